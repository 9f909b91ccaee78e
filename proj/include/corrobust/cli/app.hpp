#pragma once

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corrobust/cli/commands.hpp"

namespace corrobust::cli {

// Parses argv into a RunConfig and dispatches. Needs CLI11.hpp on the include path.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Corruption robustness toolkit for multiple-choice vision-language evaluation", "corrobust"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string kinds = "all";
  std::string severities = "1,2,3,4,5";
  std::string images, samples, predictions, embeddings, kappa, metrics, outdir;

  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", outdir, "Output directory")->required(); };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--kinds", kinds, "Comma-separated kinds or families, or 'all'");
    sub->add_option("--severities", severities, "Comma-separated severities in 1..5");
  };

  auto* corrupt = app.add_subcommand("corrupt", "Apply corruptions to an image directory");
  corrupt->add_option("--images", images, "Directory of source images")->required();
  corrupt->add_option("--seed", cfg.seed, "Global seed");
  add_out(corrupt);
  add_grid(corrupt);

  auto* validate = app.add_subcommand("validate", "Check samples, predictions and embeddings for consistency");
  validate->add_option("--samples", samples)->required();
  validate->add_option("--predictions", predictions)->required();
  validate->add_option("--embeddings", embeddings);
  validate->add_option("--severities", severities);

  auto* kappa_cmd = app.add_subcommand("kappa", "Score discriminative power of each sample");
  kappa_cmd->add_option("--samples", samples)->required();
  kappa_cmd->add_option("--predictions", predictions)->required();
  kappa_cmd->add_option("--selectors", cfg.selectors, "Selector model ids (default: all)")->delimiter(',');
  add_out(kappa_cmd);

  auto* select = app.add_subcommand("select", "Greedy diversity-aware benchmark selection");
  select->add_option("--kappa", kappa)->required();
  select->add_option("--embeddings", embeddings)->required();
  select->add_option("--samples", samples, "Needed with --per-task");
  select->add_option("--alpha1", cfg.alpha1, "Weight of kappa");
  select->add_option("--alpha2", cfg.alpha2, "Weight of diversity");
  select->add_option("--per-task", cfg.per_task, "Cap candidates per category before selection");
  select->add_option("--seed", cfg.seed, "Seed for --per-task sampling");
  add_out(select);

  auto* eval = app.add_subcommand("eval", "Compute per-record uncertainty, calibration and RAS shifts");
  eval->add_option("--samples", samples)->required();
  eval->add_option("--predictions", predictions)->required();
  add_out(eval);

  auto* analyze = app.add_subcommand("analyze", "Aggregate, test and report");
  analyze->add_option("--samples", samples);
  analyze->add_option("--predictions", predictions);
  analyze->add_option("--metrics", metrics, "metrics.jsonl from eval, instead of --predictions");
  analyze->add_option("--kappa", kappa, "kappa.jsonl; uniform weights when absent");
  analyze->add_option("--alpha", cfg.significance, "Significance level of the sensitivity test");
  analyze->add_option("--c", cfg.c, "Wrong-label similarity for the collapse check");
  analyze->add_option("--seed", cfg.seed, "Seed for the sampled collapse check");
  add_out(analyze);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  cfg.images = images;
  cfg.samples = samples;
  cfg.predictions = predictions;
  cfg.embeddings = embeddings;
  cfg.kappa = kappa;
  cfg.metrics = metrics;
  cfg.out = outdir;
  try {
    cfg.kinds = parse_kind_list(kinds);
    cfg.severities = parse_severity_list(severities);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return dispatch(cfg, out, err);
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<const char*> argv{"corrobust"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace corrobust::cli
