#include <algorithm>
#include <cmath>
#include <regex>
#include <set>

#include <gtest/gtest.h>

#include "corrobust/report/report.hpp"

using namespace corrobust;
using namespace corrobust::report;

namespace {

std::set<std::string> circle_fills(const std::string& svg) {
  std::set<std::string> fills;
  static const std::regex re(R"re(<circle [^>]*fill="(#[0-9a-f]{6})")re");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    fills.insert((*it)[1]);
  }
  return fills;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Charts, QuadrantScatterUsesFourColours) {
  const auto spec = CorruptionSpec::make(CorruptionKind::kFog, 5);
  std::vector<QuadrantPoint> pts;
  const double coords[4][2] = {{-0.1, -0.1}, {0.2, -0.1}, {-0.2, 0.1}, {0.1, 0.2}};
  for (int i = 0; i < 4; ++i) {
    const double ds = coords[i][0], dc = coords[i][1];
    pts.push_back({"m", "s" + std::to_string(i), spec, ds, dc, classify_behavior(ds, dc)});
  }
  const auto chart = quadrant_chart("q", "m", pts);
  EXPECT_EQ(circle_fills(chart.svg).size(), 4u);
  EXPECT_EQ(count_lines(chart.csv), 5u);
  EXPECT_NE(chart.csv.find("m,s1,fog,5,0.2,-0.1,hesitant"), std::string::npos);
}

TEST(Charts, AbsentHeatmapCellIsHatchedNotZero) {
  RobustnessMatrix m;
  m.models = {"a", "b"};
  m.kinds = {CorruptionKind::kFog, CorruptionKind::kSnow};
  m.values = {{-0.1, std::nullopt}, {0.0, -0.3}};
  m.counts = {{4, 0}, {2, 5}};
  const auto chart = heatmap_chart("h", "t", m);
  EXPECT_NE(chart.svg.find(R"x(fill="url(#hatch)")x"), std::string::npos);
  EXPECT_NE(chart.csv.find("a,snow,NA,0\n"), std::string::npos);
  EXPECT_NE(chart.csv.find("b,fog,0,2\n"), std::string::npos);
  EXPECT_NE(chart.svg.find(">0.000<"), std::string::npos);
  EXPECT_NE(chart.svg.find(">-0.300<"), std::string::npos);
  EXPECT_EQ(chart.svg.find(">-0.000<"), std::string::npos);
}

TEST(Charts, EmptyVqpSkippedWithNote) {
  EXPECT_FALSE(vqp_chart("v", "t", {}).has_value());
  AnalysisOutputs out;
  out.destructive.mode = RobustnessMode::kDestructive;
  out.corrective.mode = RobustnessMode::kCorrective;
  std::vector<std::string> notes;
  const auto charts = build_charts(out, notes);
  EXPECT_TRUE(std::none_of(charts.begin(), charts.end(), [](const Chart& c) { return c.name == "vqp"; }));
  ASSERT_EQ(notes.size(), 1u);
  EXPECT_NE(notes[0].find("VQP chart skipped"), std::string::npos);
}

TEST(Charts, BoxStatsUseLinearQuantiles) {
  const auto b = box_stats({4, 1, 3, 2});
  ASSERT_TRUE(b.has_value());
  EXPECT_EQ(b->min, 1);
  EXPECT_EQ(b->q1, 1.75);
  EXPECT_EQ(b->median, 2.5);
  EXPECT_EQ(b->q3, 3.25);
  EXPECT_EQ(b->max, 4);
  EXPECT_FALSE(box_stats({}).has_value());
  const auto chart = boxplot_chart("b", "t", "noise", {{1, b}, {2, std::nullopt}});
  EXPECT_NE(chart.csv.find("noise,1,4,1,1.75,2.5,3.25,4\n"), std::string::npos);
  EXPECT_NE(chart.csv.find("noise,2,0,NA,NA,NA,NA,NA\n"), std::string::npos);
}

TEST(Formatting, FixedFoldsNegativeZeroAndRanksShareTies) {
  EXPECT_EQ(fixed(-0.0001), "0.000");
  EXPECT_EQ(fixed(-0.0001, 3, true), "+0.000");
  EXPECT_EQ(fixed(-0.0414, 3, true), "-0.041");
  EXPECT_EQ(descending_ranks({-0.04, -0.06, -0.04, -0.1}), (std::vector<int>{1, 3, 1, 4}));
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(svg::escape("<a&b>"), "&lt;a&amp;b&gt;");
}

TEST(Formatting, SensitivityRowShape) {
  AnalysisOutputs out;
  out.sensitivity.push_back({"Eagle-X5", 0.558, 0.381, 51.215, 2.95e-21, 76, true});
  EXPECT_EQ(sensitivity_csv(out),
            "model_id,mean_abs_z_ras,mean_abs_z_dacc,t_statistic,p_value,n_pairs,significant\n"
            "Eagle-X5,0.558,0.381,51.215,2.95e-21,76,true\n");
}

struct ImprovementRow {
  const char* model;
  const char* kind;
  double delta_acc, mean_ds, mean_dc;
  int wr, rw;
  Behavior category;
};

// Reference improvement cases on an 849-sample benchmark (three-decimal values).
const std::vector<ImprovementRow> kImprovementRows{
    {"Eagle-X5", "spatter", 0.004, 0.001, 0.001, 14, 11, Behavior::kDegraded},
    {"Emu3-Chat", "snow", 0.009, 0.002, 0.005, 30, 22, Behavior::kDegraded},
    {"Emu3-Chat", "gaussian_noise", 0.007, -0.001, 0.002, 30, 24, Behavior::kOverconfident},
    {"Emu3-Chat", "brightness", 0.005, -0.005, 0.009, 18, 14, Behavior::kOverconfident},
    {"Emu3-Chat", "speckle_noise", 0.002, -0.002, 0.013, 28, 26, Behavior::kOverconfident},
    {"Emu3-Chat", "fog", 0.001, 0.016, 0.003, 35, 34, Behavior::kDegraded},
    {"Falcon2-VLM", "brightness", 0.013, 0.002, 0.005, 40, 29, Behavior::kDegraded},
    {"Falcon2-VLM", "spatter", 0.006, 0.001, -0.003, 29, 24, Behavior::kHesitant},
    {"Falcon2-VLM", "elastic_transform", 0.004, 0.001, 0.022, 69, 66, Behavior::kDegraded},
    {"Falcon2-VLM", "saturate", 0.002, -0.003, 0.012, 35, 33, Behavior::kOverconfident},
    {"Falcon2-VLM", "motion_blur", 0.001, 0.011, 0.026, 50, 49, Behavior::kDegraded},
    {"Falcon2-VLM", "speckle_noise", 0.001, 0.005, 0.014, 43, 42, Behavior::kDegraded},
    {"Idefics3-Llama3", "spatter", 0.007, 0.005, -0.010, 25, 19, Behavior::kHesitant},
    {"Molmo", "contrast", 0.002, -0.004, -0.006, 20, 18, Behavior::kStable},
    {"SAIL-VL-1.6", "brightness", 0.006, -0.016, -0.001, 29, 24, Behavior::kStable},
    {"SAIL-VL-1.6", "pixelate", 0.006, -0.008, 0.004, 37, 32, Behavior::kOverconfident},
    {"SAIL-VL-1.6", "contrast", 0.005, -0.021, -0.002, 32, 28, Behavior::kStable},
    {"SAIL-VL-1.6", "spatter", 0.005, -0.014, -0.003, 23, 19, Behavior::kStable},
    {"SAIL-VL-1.6", "frost", 0.002, -0.015, 0.001, 39, 37, Behavior::kOverconfident},
    {"SAIL-VL-1.6", "fog", 0.001, -0.026, -0.001, 41, 40, Behavior::kStable},
    {"SAIL-VL-1.6", "snow", 0.001, -0.013, 0.001, 37, 36, Behavior::kOverconfident},
    {"DeepSeek-VL2-Small", "brightness", 0.004, 0.006, 0.000, 19, 16, Behavior::kDegraded},
    {"DeepSeek-VL2-Small", "saturate", 0.001, 0.014, -0.002, 22, 21, Behavior::kHesitant},
    {"DeepSeek-VL2-Small", "snow", 0.001, 0.023, 0.002, 33, 32, Behavior::kDegraded},
    {"mPLUG-Owl3", "spatter", 0.004, 0.009, 0.001, 12, 9, Behavior::kDegraded},
    {"Monkey-Chat", "gaussian_blur", 0.008, 0.004, 0.005, 48, 41, Behavior::kDegraded},
    {"Monkey-Chat", "elastic_transform", 0.002, -0.005, 0.012, 57, 55, Behavior::kOverconfident},
    {"Monkey-Chat", "speckle_noise", 0.002, -0.001, 0.022, 52, 50, Behavior::kOverconfident},
};

TEST(ReferenceCases, TransitionIdentityAndCategories) {
  for (const auto& r : kImprovementRows) {
    TransitionCounts c;
    c.wr = static_cast<std::size_t>(r.wr);
    c.rw = static_cast<std::size_t>(r.rw);
    c.rr = 400;
    c.ww = 849 - c.wr - c.rw - c.rr;
    const auto v = make_vqp_case(r.model, *parse_kind(r.kind), 0.5, r.delta_acc, r.mean_ds, r.mean_dc, 0.0, c);
    EXPECT_NEAR(std::round(v.delta_acc_unweighted * 1000) / 1000, r.delta_acc, 1e-12) << r.model << " " << r.kind;
    // A mean printed as 0.000 has lost its sign to rounding.
    if (r.mean_dc == 0.0 || r.mean_ds == 0.0) continue;
    EXPECT_EQ(v.category, r.category) << r.model << " " << r.kind;
  }
}
