#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "corrobust/analysis/aggregate.hpp"
#include "corrobust/analysis/collapse.hpp"
#include "corrobust/analysis/robustness_matrix.hpp"
#include "corrobust/analysis/sensitivity.hpp"
#include "corrobust/analysis/stats.hpp"
#include "corrobust/analysis/vqp.hpp"
#include "ttest_fixtures.hpp"

using namespace corrobust;

namespace {

MetricShift shift(const std::string& id, const std::string& model, CorruptionKind kind, int sev, double ras_value,
                  bool clean_ok = true, bool corrupt_ok = true, double ds = 0.0, double dc = 0.0) {
  MetricShift m;
  m.sample_id = id;
  m.model_id = model;
  m.corruption = CorruptionSpec::make(kind, sev);
  m.ras = ras_value;
  m.delta_s = ds;
  m.delta_c = dc;
  m.correct_clean = clean_ok;
  m.correct_corrupt = corrupt_ok;
  m.transition = classify_transition(clean_ok, corrupt_ok);
  m.behavior = classify_behavior(ds, dc);
  return m;
}

}  // namespace

TEST(Aggregate, KappaOneThreeFixture) {
  const std::vector<MetricShift> shifts{shift("a", "m", CorruptionKind::kFog, 1, 0.1),
                                        shift("b", "m", CorruptionKind::kFog, 1, -0.1)};
  const auto r = weighted_aggregate(shifts, {{"a", 1.0}, {"b", 3.0}}, "m", Metric::kRas);
  EXPECT_NEAR(r.value, -0.05, 1e-15);
  EXPECT_EQ(r.cells, 1u);
  EXPECT_EQ(r.samples, 2u);
}

TEST(Aggregate, CellsAveragedUnweighted) {
  const std::vector<MetricShift> shifts{shift("a", "m", CorruptionKind::kFog, 1, 0.3),
                                        shift("b", "m", CorruptionKind::kFog, 1, 0.1),
                                        shift("a", "m", CorruptionKind::kSnow, 2, -0.5)};
  const std::unordered_map<std::string, double> k{{"a", 1.0}, {"b", 1.0}};
  EXPECT_NEAR(weighted_aggregate(shifts, k, "m", Metric::kRas).value, (0.2 + -0.5) / 2, 1e-15);
  EXPECT_NEAR(weighted_aggregate(shifts, k, "m", Metric::kRas, Scope::of_kind(CorruptionKind::kFog)).value, 0.2,
              1e-15);
  EXPECT_NEAR(weighted_aggregate(shifts, k, "m", Metric::kRas, Scope::of_family(CorruptionFamily::kWeather)).value,
              -0.15, 1e-15);
}

TEST(Aggregate, Errors) {
  const std::vector<MetricShift> shifts{shift("a", "m", CorruptionKind::kFog, 1, 0.1)};
  EXPECT_THROW(AggregationIndex(shifts, {}), SchemaError);
  EXPECT_THROW(weighted_aggregate(shifts, {{"a", 0.0}}, "m", Metric::kRas), DomainError);
  EXPECT_THROW(weighted_aggregate(shifts, {{"a", 1.0}}, "other", Metric::kRas), DomainError);
  EXPECT_THROW(weighted_aggregate(shifts, {{"a", 1.0}}, "m", Metric::kRas, Scope::of_kind(CorruptionKind::kSnow)),
               DomainError);
  AggregationIndex idx(shifts, {{"a", 0.0}});
  EXPECT_FALSE(idx.try_aggregate("m", Metric::kRas, Scope::overall()).has_value());
}

TEST(AggregateProperty, UniformKappaEqualsPlainMeanAndLinearity) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> w(0.05, 1.0);
  const auto kinds = all_corruption_kinds();
  std::vector<MetricShift> a, b, mix;
  std::unordered_map<std::string, double> uniform, random_k;
  std::map<CorruptionSpec, std::vector<double>> cells;
  for (int i = 0; i < 400; ++i) {
    const std::string id = "s" + std::to_string(i % 40);
    const auto kind = kinds[rng() % 4];
    const int sev = 1 + static_cast<int>(rng() % 5);
    const double x = u(rng), y = u(rng);
    a.push_back(shift(id, "m", kind, sev, x));
    b.push_back(shift(id, "m", kind, sev, y));
    mix.push_back(shift(id, "m", kind, sev, 2.0 * x - 3.0 * y));
    cells[CorruptionSpec::make(kind, sev)].push_back(x);
    uniform[id] = 0.37;
    random_k[id] = w(rng);
  }
  double plain = 0;
  for (const auto& [spec, v] : cells) plain += std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  plain /= static_cast<double>(cells.size());
  EXPECT_NEAR(weighted_aggregate(a, uniform, "m", Metric::kRas).value, plain, 1e-12);
  const double fa = weighted_aggregate(a, random_k, "m", Metric::kRas).value;
  const double fb = weighted_aggregate(b, random_k, "m", Metric::kRas).value;
  EXPECT_NEAR(weighted_aggregate(mix, random_k, "m", Metric::kRas).value, 2.0 * fa - 3.0 * fb, 1e-12);
}

TEST(Matrix, PartitionAndAbsentFlags) {
  std::vector<MetricShift> shifts;
  std::unordered_map<std::string, double> k;
  for (int i = 0; i < 12; ++i) {
    const std::string id = "s" + std::to_string(i);
    k[id] = 0.1 + 0.05 * i;
    shifts.push_back(shift(id, "m", CorruptionKind::kFog, 1 + i % 5, 0.01 * i, i % 3 != 0, i % 2 == 0));
    shifts.push_back(shift(id, "m", CorruptionKind::kSnow, 1 + i % 5, -0.02 * i, true, i % 4 == 0));
  }
  AggregationIndex idx(shifts, k);
  const auto d = robustness_matrix(idx, RobustnessMode::kDestructive);
  const auto c = robustness_matrix(idx, RobustnessMode::kCorrective);
  ASSERT_EQ(d.kinds.size(), 2u);
  for (std::size_t j = 0; j < d.kinds.size(); ++j) {
    const auto n = idx.transitions("m", Scope::of_kind(d.kinds[j])).total();
    EXPECT_EQ(d.counts[0][j] + c.counts[0][j], n);
  }
  // Snow samples are all correct on clean input.
  const auto snow = static_cast<std::size_t>(std::find(c.kinds.begin(), c.kinds.end(), CorruptionKind::kSnow) - c.kinds.begin());
  EXPECT_FALSE(c.at(0, snow).has_value());
  EXPECT_TRUE(d.at(0, snow).has_value());
}

TEST(Matrix, UnchangedPredictionsGiveZeroEverywherePopulated) {
  std::vector<MetricShift> shifts;
  std::unordered_map<std::string, double> k;
  for (int i = 0; i < 10; ++i) {
    const std::string id = "s" + std::to_string(i);
    k[id] = 1.0;
    for (auto kind : {CorruptionKind::kFog, CorruptionKind::kPixelate}) {
      const bool ok = i % 2 == 0;
      shifts.push_back(shift(id, i < 5 ? "m1" : "m2", kind, 3, 0.0, ok, ok));
    }
  }
  AggregationIndex idx(shifts, k);
  for (auto mode : {RobustnessMode::kDestructive, RobustnessMode::kCorrective}) {
    const auto m = robustness_matrix(idx, mode);
    for (const auto& row : m.values) {
      for (const auto& v : row) {
        ASSERT_TRUE(v.has_value());
        EXPECT_EQ(*v, 0.0);
      }
    }
  }
}

TEST(Vqp, EmptyWhenNoGain) {
  const std::vector<MetricShift> shifts{shift("a", "m", CorruptionKind::kFog, 1, 0.0, true, false)};
  AggregationIndex idx(shifts, {{"a", 1.0}});
  EXPECT_TRUE(vqp_cases(idx).empty());
}

TEST(Vqp, InjectedHesitantCase) {
  TransitionCounts counts;
  counts.wr = 14;
  counts.rw = 11;
  counts.rr = 470;
  counts.ww = 849 - 14 - 11 - 470;
  const auto c = make_vqp_case("Idefics3-Llama3", CorruptionKind::kSpatter, 0.560, 0.007, 0.005, -0.010, 0.0105, counts);
  EXPECT_EQ(c.category, Behavior::kHesitant);
  EXPECT_EQ(c.n, 849u);
  EXPECT_NEAR(c.delta_acc_unweighted, 3.0 / 849.0, 1e-15);
  EXPECT_NEAR(c.delta_acc_unweighted, 0.0035, 1e-4);
}

TEST(Vqp, SelectsSeverityOneGains) {
  std::vector<MetricShift> shifts{shift("a", "m", CorruptionKind::kFog, 1, 0.1, false, true, 0.2, -0.1),
                                  shift("b", "m", CorruptionKind::kFog, 1, 0.0, true, true),
                                  shift("a", "m", CorruptionKind::kFog, 2, 0.0, false, true),
                                  shift("a", "m", CorruptionKind::kSnow, 1, 0.0, true, false)};
  AggregationIndex idx(shifts, {{"a", 1.0}, {"b", 1.0}});
  const auto cases = vqp_cases(idx);
  ASSERT_EQ(cases.size(), 1u);
  EXPECT_EQ(cases[0].kind, CorruptionKind::kFog);
  EXPECT_NEAR(cases[0].delta_acc, 0.5, 1e-15);
  EXPECT_EQ(cases[0].wr, 1u);
  EXPECT_EQ(cases[0].category, Behavior::kHesitant);
}

TEST(Stats, PairedTTestMatchesReference) {
  for (const auto& f : testutil::kTTestFixtures) {
    const auto r = stats::paired_t_test_greater(f.a, f.b);
    EXPECT_NEAR(r.t, f.t, 1e-6) << f.name;
    EXPECT_NEAR(r.p, f.p, 1e-8) << f.name;
    EXPECT_EQ(r.n, f.a.size());
  }
}

TEST(Stats, SymmetricDifferencesGiveHalf) {
  const std::vector<double> a{1, 2, 3, 4}, b{2, 1, 4, 3};
  const auto r = stats::paired_t_test_greater(a, b);
  EXPECT_EQ(r.t, 0.0);
  EXPECT_NEAR(r.p, 0.5, 1e-15);
}

TEST(Stats, Errors) {
  const std::vector<double> one{1.0}, two{1.0, 2.0}, flat{3.0, 3.0};
  EXPECT_THROW(stats::paired_t_test_greater(one, one), DomainError);
  EXPECT_THROW(stats::paired_t_test_greater(two, one), DomainError);
  EXPECT_THROW(stats::paired_t_test_greater(two, two), DomainError);
  EXPECT_THROW(stats::zscores(flat), DomainError);
}

TEST(Sensitivity, DirectionAndSymmetry) {
  std::vector<SeverityStep> steps;
  // RAS steps spread over a wide range with isolated outliers; dAcc steps bimodal.
  const double ras[8] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0};
  const double acc[8] = {1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0};
  for (int i = 0; i < 8; ++i) steps.push_back({CorruptionKind::kFog, 1 + i % 4, ras[i], acc[i]});
  const auto r = sensitivity_from_steps("m", steps);
  EXPECT_EQ(r.n_pairs, 8u);
  EXPECT_NEAR(r.mean_abs_z_dacc, 1.0, 1e-12);
  EXPECT_LT(r.t_statistic, 0.0);
  EXPECT_GT(r.p_value, 0.5);

  std::vector<SeverityStep> swapped;
  for (const auto& s : steps) swapped.push_back({s.kind, s.from_severity, s.dacc_step, s.ras_step});
  const auto flipped = sensitivity_from_steps("m", swapped);
  EXPECT_GT(flipped.t_statistic, 0.0);
  EXPECT_LT(flipped.p_value, 0.5);
  EXPECT_NEAR(flipped.t_statistic, -r.t_statistic, 1e-12);
  EXPECT_TRUE(flipped.p_value < 0.05 ? flipped.significant : !flipped.significant);

  EXPECT_THROW(sensitivity_from_steps("m", {steps[0]}), DomainError);
  std::vector<SeverityStep> flat(4, SeverityStep{CorruptionKind::kFog, 1, 0.2, 0.1});
  EXPECT_THROW(sensitivity_from_steps("m", flat), DomainError);
}

TEST(Sensitivity, StepsFromCellAggregates) {
  std::vector<MetricShift> shifts;
  for (int sev = 1; sev <= 5; ++sev) {
    shifts.push_back(shift("a", "m", CorruptionKind::kFog, sev, -0.1 * sev, true, sev < 3));
    shifts.push_back(shift("a", "m", CorruptionKind::kSnow, sev, -0.05 * sev * sev, true, sev < 4));
  }
  AggregationIndex idx(shifts, {{"a", 1.0}});
  const auto steps = severity_steps(idx, "m");
  ASSERT_EQ(steps.size(), 8u);
  EXPECT_NEAR(steps[0].ras_step, -0.1, 1e-12);
  EXPECT_EQ(steps[1].dacc_step, -1.0);
  EXPECT_NO_THROW(sensitivity_test(idx, "m"));
}

TEST(Collapse, ExactExamples) {
  const std::vector<double> accs{0.5};
  auto r = similarity_collapse_check(accs, 0.2);
  EXPECT_NEAR(r.similarities[0], 0.6, 1e-15);
  const std::vector<double> many{0.1, 0.5, 0.9, 1.0, 0.0};
  r = similarity_collapse_check(many, 0.2);
  ASSERT_TRUE(r.slope && r.intercept);
  EXPECT_NEAR(*r.slope, 0.8, 1e-12);
  EXPECT_NEAR(*r.intercept, 0.2, 1e-12);
  EXPECT_LE(r.max_residual, 1e-12);
  EXPECT_EQ(r.similarities[3], 1.0);
  r = similarity_collapse_check(many, 0.0);
  for (std::size_t i = 0; i < many.size(); ++i) EXPECT_EQ(r.similarities[i], many[i]);
  EXPECT_NEAR(*r.slope, 1.0, 1e-12);
  EXPECT_NEAR(*r.intercept, 0.0, 1e-12);
  EXPECT_THROW(similarity_collapse_check(many, 1.0), DomainError);
  const std::vector<double> bad{1.2};
  EXPECT_THROW(similarity_collapse_check(bad, 0.1), DomainError);
}

TEST(CollapseProperty, RankingPreservedForAnyC) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> accs(2 + rng() % 10);
    for (auto& a : accs) a = std::round(u(rng) * 100) / 100;
    const double c = std::min(0.99, u(rng));
    const auto r = similarity_collapse_check(accs, c);
    EXPECT_TRUE(r.ranking_preserved);
    std::vector<std::size_t> ia(accs.size()), is(accs.size());
    std::iota(ia.begin(), ia.end(), 0);
    std::iota(is.begin(), is.end(), 0);
    std::stable_sort(ia.begin(), ia.end(), [&](auto x, auto y) { return accs[x] < accs[y]; });
    std::stable_sort(is.begin(), is.end(), [&](auto x, auto y) { return r.similarities[x] < r.similarities[y]; });
    EXPECT_EQ(ia, is);
  }
}

TEST(Collapse, SampledModeApproximatesLine) {
  const std::vector<double> accs{0.12, 0.35, 0.5, 0.61, 0.88};
  CollapseOptions opts{CollapseMode::kSampled, 100000, 0.05, 7};
  const auto r = similarity_collapse_check(accs, 0.3, opts);
  ASSERT_TRUE(r.slope.has_value());
  EXPECT_NEAR(*r.slope, 0.7, 0.01);
  EXPECT_TRUE(r.ranking_preserved);
  const auto again = similarity_collapse_check(accs, 0.3, opts);
  EXPECT_EQ(r.similarities, again.similarities);
}
