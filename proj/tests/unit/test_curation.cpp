#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "corrobust/curation/gini.hpp"
#include "corrobust/curation/kappa.hpp"
#include "corrobust/curation/selection.hpp"
#include "corrobust/curation/stratify.hpp"
#include "support.hpp"

using namespace corrobust;
using corrobust::testutil::make_pred;
using corrobust::testutil::make_sample;

TEST(Gini, Fixtures) {
  EXPECT_EQ(gini_inconsistency(std::vector<int>{0, 0, 0, 0, 0}, 4), 0.0);
  EXPECT_NEAR(gini_inconsistency(std::vector<int>{0, 0, 1, 1, 2}, 4), 0.853333333333333, 1e-12);
  EXPECT_NEAR(gini_inconsistency(std::vector<int>{0, 1, 0, 1, 0}, 2), 0.96, 1e-12);
  EXPECT_NEAR(gini_inconsistency(std::vector<int>{0, 1}, 2), 1.0, 1e-12);
}

TEST(Gini, Errors) {
  EXPECT_THROW(gini_inconsistency(std::vector<int>{}, 4), DomainError);
  EXPECT_THROW(gini_inconsistency(std::vector<int>{0}, 1), DomainError);
  EXPECT_THROW(gini_inconsistency(std::vector<int>{0, 4}, 4), DomainError);
  EXPECT_THROW(gini_inconsistency(std::vector<int>{-1}, 4), DomainError);
}

namespace {

SelectorGrid constant_grid(int models, int value) {
  SelectorGrid g;
  for (int m = 0; m < models; ++m) {
    for (auto kind : all_corruption_kinds()) {
      for (int sev = 1; sev <= 5; ++sev) g[{"m" + std::to_string(m), kind}][sev] = value;
    }
  }
  return g;
}

}  // namespace

TEST(Kappa, AllSameIsZero) {
  EXPECT_EQ(discriminative_power("q", 4, constant_grid(3, 2)).kappa, 0.0);
}

TEST(Kappa, OneInconsistentCellOverFiftySeven) {
  auto g = constant_grid(3, 0);
  auto& cell = g[{"m1", CorruptionKind::kSnow}];
  cell = {{1, 0}, {2, 1}, {3, 0}, {4, 1}, {5, 0}};
  const auto score = discriminative_power("q", 2, g);
  EXPECT_EQ(score.cells.size(), 57u);
  EXPECT_NEAR(score.kappa, 0.96 / 57.0, 1e-15);
  EXPECT_NEAR(score.kappa, 0.016842, 1e-6);
}

TEST(Kappa, IncompleteCellsSkipped) {
  SelectorGrid g;
  g[{"m", CorruptionKind::kFog}] = {{1, 0}, {2, 1}, {3, 0}, {4, 1}, {5, 0}};
  g[{"m", CorruptionKind::kSnow}] = {{1, 0}, {2, 1}, {4, 1}, {5, 0}};
  const auto score = discriminative_power("q", 2, g);
  EXPECT_EQ(score.cells.size(), 1u);
  ASSERT_EQ(score.skipped.size(), 1u);
  EXPECT_EQ(score.skipped[0].kind, CorruptionKind::kSnow);
  EXPECT_NEAR(score.kappa, 0.96, 1e-12);
  SelectorGrid empty_grid;
  empty_grid[{"m", CorruptionKind::kSnow}] = {{1, 0}};
  EXPECT_THROW(discriminative_power("q", 2, empty_grid), DomainError);
}

TEST(Kappa, ComputeFromPredictionsExcludesClean) {
  const std::vector<MCQSample> samples{make_sample("a", 3, 0), make_sample("b", 3, 0)};
  std::vector<PredictionRecord> preds;
  preds.push_back(make_pred("a", "sel", CorruptionSpec::clean(), {0, 0, 9}));
  const int pattern[5] = {0, 0, 1, 1, 2};
  for (int sev = 1; sev <= 5; ++sev) {
    std::vector<double> z(3, 0.0);
    z[pattern[sev - 1]] = 1.0;
    preds.push_back(make_pred("a", "sel", CorruptionSpec::make(CorruptionKind::kFog, sev), z));
    preds.push_back(make_pred("a", "other", CorruptionSpec::make(CorruptionKind::kFog, sev), {1, 0, 0}));
  }
  const auto all = compute_kappas(samples, preds);
  ASSERT_EQ(all.scores.size(), 1u);
  EXPECT_EQ(all.failed, std::vector<std::string>{"b"});
  // (1 - (4+4+1)/25) / (1 - 1/3) = 0.96, averaged with a zero cell.
  EXPECT_NEAR(all.scores[0].kappa, 0.48, 1e-12);
  const auto only = compute_kappas(samples, preds, {"sel"});
  EXPECT_NEAR(only.scores[0].kappa, 0.96, 1e-12);
}

TEST(Kappa, JsonRoundTrip) {
  CurationScore s{"q", 0.25, {{"m", CorruptionKind::kFog, 0.5}, {"m", CorruptionKind::kSnow, 0.0}}, {}};
  const auto back = curation_score_from_json(to_json(s));
  EXPECT_EQ(back.sample_id, "q");
  EXPECT_EQ(back.kappa, 0.25);
  ASSERT_EQ(back.cells.size(), 2u);
  EXPECT_EQ(back.cells[0].kind, CorruptionKind::kFog);
  nlohmann::json bad{{"sample_id", "q"}, {"kappa", 1.5}};
  EXPECT_THROW(curation_score_from_json(bad), SchemaError);
}

namespace {

std::vector<double> unit2(double angle) { return {std::cos(angle), std::sin(angle)}; }

SelectionCandidate cand(const std::string& id, double kappa, double angle) {
  return {id, kappa, unit2(angle), unit2(angle)};
}

}  // namespace

TEST(Diversity, CosineExtremes) {
  SelectionState state;
  const auto a = unit2(0.3);
  EXPECT_EQ(diversity_score(a, a, state), 2.0);
  state.add(a, a);
  EXPECT_NEAR(diversity_score(a, a, state), 0.0, 1e-15);
  EXPECT_NEAR(diversity_score(unit2(0.3 + M_PI / 2), unit2(0.3 - M_PI / 2), state), 2.0, 1e-15);
  EXPECT_NEAR(diversity_score(unit2(0.3 + M_PI), unit2(0.3 + M_PI), state), 4.0, 1e-15);
  EXPECT_THROW(diversity_score(std::vector<double>{1, 0, 0}, a, state), DomainError);
}

TEST(Diversity, ZeroCentroidCountsAsOrthogonal) {
  SelectionState state;
  state.add(std::vector<double>{1, 0}, std::vector<double>{0, 1});
  state.add(std::vector<double>{-1, 0}, std::vector<double>{0, -1});
  EXPECT_EQ(diversity_score(unit2(1.0), unit2(2.0), state), 2.0);
}

TEST(Selection, KappaOrderWhenDiversityWeightIsZero) {
  const std::vector<SelectionCandidate> pool{cand("q3", 0.1, 0), cand("q1", 0.9, 1), cand("q2", 0.5, 2)};
  const auto r = select_benchmark(pool, {1.0, 0.0, 1});
  ASSERT_EQ(r.steps.size(), 3u);
  EXPECT_EQ(r.steps[0].sample_id, "q1");
  EXPECT_EQ(r.steps[1].sample_id, "q2");
  EXPECT_EQ(r.steps[2].sample_id, "q3");
  EXPECT_NEAR(r.mean_score, 0.5, 1e-15);
  EXPECT_EQ(r.retained_ids(), std::vector<std::string>{"q1"});
}

TEST(Selection, OrthogonalBeatsIdentical) {
  const std::vector<SelectionCandidate> pool{cand("q1", 0.9, 0.0), cand("q2", 0.5, M_PI / 2), cand("q3", 0.55, 0.0)};
  const auto r = select_benchmark(pool, {});
  EXPECT_EQ(r.steps[0].sample_id, "q1");
  EXPECT_EQ(r.steps[0].diversity, 2.0);
  EXPECT_EQ(r.steps[1].sample_id, "q2");
  EXPECT_NEAR(r.steps[1].combined_score, 2.5, 1e-12);
}

TEST(Selection, IdenticalEmbeddingsEqualKappaRetainFirstPickOnly) {
  // The empty-selection diversity of 2 lifts the first pick above every later one.
  std::vector<SelectionCandidate> pool;
  for (int i = 0; i < 5; ++i) pool.push_back(cand("q" + std::to_string(i), 0.4, 0.7));
  const auto r = select_benchmark(pool, {});
  EXPECT_EQ(r.steps[0].sample_id, "q0");
  EXPECT_EQ(r.retained_ids(), std::vector<std::string>{"q0"});
  EXPECT_FALSE(r.warning.has_value());
}

TEST(Selection, ConstantScoresRetainNothingWithWarning) {
  std::vector<SelectionCandidate> pool;
  for (int i = 0; i < 4; ++i) pool.push_back(cand("q" + std::to_string(i), 0.3, i));
  const auto r = select_benchmark(pool, {1.0, 0.0, 1});
  EXPECT_EQ(r.retained_count, 0u);
  ASSERT_TRUE(r.warning.has_value());
  const auto single = select_benchmark({cand("only", 0.5, 0)}, {});
  EXPECT_EQ(single.retained_count, 0u);
  EXPECT_TRUE(single.warning.has_value());
}

TEST(Selection, TiesBrokenBySampleId) {
  const std::vector<SelectionCandidate> pool{cand("b", 0.5, 0), cand("a", 0.5, 0), cand("c", 0.5, 0)};
  const auto r = select_benchmark(pool, {1.0, 0.0, 1});
  EXPECT_EQ(r.steps[0].sample_id, "a");
  EXPECT_EQ(r.steps[1].sample_id, "b");
  EXPECT_EQ(r.steps[2].sample_id, "c");
}

TEST(Selection, FiltersZeroKappaAndValidates) {
  const std::vector<SelectionCandidate> pool{cand("z", 0.0, 0), cand("a", 0.5, 1)};
  const auto r = select_benchmark(pool, {});
  EXPECT_EQ(r.dropped_zero, std::vector<std::string>{"z"});
  EXPECT_EQ(r.steps.size(), 1u);
  EXPECT_THROW(select_benchmark({cand("z", 0.0, 0)}, {}), DomainError);
  EXPECT_THROW(select_benchmark(pool, {0.0, 0.0, 1}), DomainError);
  EXPECT_THROW(select_benchmark(pool, {-1.0, 1.0, 1}), DomainError);
  EXPECT_THROW(select_benchmark({cand("x", 1.5, 0)}, {}), DomainError);
}

TEST(Selection, ThreadedScoringMatchesSequential) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<SelectionCandidate> pool;
  for (int i = 0; i < 300; ++i) {
    std::vector<double> a(8), b(6);
    double na = 0, nb = 0;
    for (auto& x : a) na += (x = n(rng)) * x;
    for (auto& x : b) nb += (x = n(rng)) * x;
    for (auto& x : a) x /= std::sqrt(na);
    for (auto& x : b) x /= std::sqrt(nb);
    pool.push_back({"s" + std::to_string(i), u(rng), a, b});
  }
  const auto seq = select_benchmark(pool, {1.0, 1.0, 1});
  const auto par = select_benchmark(pool, {1.0, 1.0, 4});
  ASSERT_EQ(seq.steps.size(), par.steps.size());
  for (std::size_t i = 0; i < seq.steps.size(); ++i) {
    EXPECT_EQ(seq.steps[i].sample_id, par.steps[i].sample_id);
    EXPECT_EQ(seq.steps[i].combined_score, par.steps[i].combined_score);
  }
}

TEST(SelectionProperty, IncrementalCentroidMatchesBatch) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  SelectionState state;
  std::vector<std::vector<double>> seen;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> v(5);
    for (auto& x : v) x = n(rng);
    state.add(v, v);
    seen.push_back(v);
    const auto c = state.image_centroid();
    for (std::size_t d = 0; d < 5; ++d) {
      double sum = 0;
      for (const auto& s : seen) sum += s[d];
      EXPECT_NEAR(c[d], sum / static_cast<double>(seen.size()), 1e-9);
    }
  }
}

TEST(SelectionProperty, KappaOrderNonIncreasingWithoutDiversity) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<SelectionCandidate> pool;
    for (int i = 0; i < 20; ++i) pool.push_back(cand("s" + std::to_string(i), std::min(1.0, std::round(u(rng) * 10) / 10 + 0.01), u(rng) * 6));
    const auto r = select_benchmark(pool, {0.7, 0.0, 1});
    for (std::size_t i = 1; i < r.steps.size(); ++i) EXPECT_LE(r.steps[i].kappa, r.steps[i - 1].kappa);
    EXPECT_EQ(select_benchmark(pool, {}).steps.size(), r.steps.size());
  }
}

TEST(Stratify, CapsPerCategoryDeterministically) {
  std::vector<MCQSample> samples;
  for (int i = 0; i < 30; ++i) samples.push_back(make_sample("s" + std::to_string(i), 2, 0, i < 20 ? "big" : "small"));
  const auto a = stratify_pool(samples, 5, 42);
  const auto b = stratify_pool(samples, 5, 42);
  const auto c = stratify_pool(samples, 5, 43);
  EXPECT_EQ(a.size(), 10u);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(stratify_pool(samples, 100, 1).size(), 30u);
}
