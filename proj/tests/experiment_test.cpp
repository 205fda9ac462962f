/**
 * Copyright 2026 The spinterf Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spinterf/experiment.hpp"

namespace spinterf::harness {
namespace {

constexpr double pi = std::numbers::pi;

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

SweepConfig parse(const std::string& text) { return parse_config(json::parse(text)); }

std::string field_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

TEST(Config, DefaultsFromEmptyDocument) {
  const auto cfg = parse("{}");
  EXPECT_EQ(cfg, SweepConfig{});
  EXPECT_FALSE(cfg.sweep.has_value());
}

TEST(Config, UnpolarizedExperimentForcesInputKind) {
  EXPECT_EQ(parse(R"({"experiment":"unpolarized"})").input, InputKind::unpolarized);
}

TEST(Config, RoundTripProperty) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ang(-360, 360), unit(0, 1);
  const std::vector<Experiment> experiments{Experiment::coincidence,    Experiment::no_polarizers, Experiment::same_arm,
                                            Experiment::double_trigger, Experiment::classical,
                                            Experiment::full_distribution, Experiment::mc_run};
  for (int trial = 0; trial < 300; ++trial) {
    SweepConfig cfg;
    cfg.experiment = experiments[trial % experiments.size()];
    cfg.input = trial % 3 == 0 ? InputKind::unpolarized : InputKind::polarized;
    cfg.arm = static_cast<ArmSelection>(trial % 3);
    cfg.theta1p = ang(rng);
    cfg.theta2p = ang(rng);
    cfg.theta1 = ang(rng);
    cfg.theta2 = ang(rng);
    cfg.theta = ang(rng);
    cfg.phi = ang(rng);
    cfg.psi = ang(rng);
    cfg.tx = unit(rng);
    cfg.ty = unit(rng);
    if (trial % 2) {
      const auto params = sweepable_parameters(cfg.experiment, cfg.input);
      auto it = params.begin();
      std::advance(it, trial % params.size());
      const bool amp = *it == "tx" || *it == "ty";
      cfg.sweep = SweepAxis{*it, amp ? unit(rng) : ang(rng), amp ? unit(rng) : ang(rng), 1 + trial % 50};
    }
    cfg.mc = McSettings{1 + rng() % 100000, unit(rng), 0.5 + unit(rng), rng()};
    cfg.output = trial % 4 ? "" : "out/run" + std::to_string(trial) + ".csv";
    ASSERT_NO_THROW(validate(cfg));
    const auto text = to_json(cfg).dump();
    ASSERT_EQ(parse(text), cfg) << text;
  }
}

TEST(Config, ValidationNamesTheField) {
  EXPECT_EQ(field_of(R"({"schema_version":2})"), "schema_version");
  EXPECT_EQ(field_of(R"({"experiment":"teleport"})"), "experiment");
  EXPECT_EQ(field_of(R"({"bogus":1})"), "bogus");
  EXPECT_EQ(field_of(R"({"angles_deg":{"phi":0}})"), "angles_deg.phi");
  EXPECT_EQ(field_of(R"({"angles_deg":{"theta1":"x"}})"), "angles_deg.theta1");
  EXPECT_EQ(field_of(R"({"splitter":{"tx":1.5}})"), "splitter.tx");
  EXPECT_EQ(field_of(R"({"sweep":{"parameter":"phi","steps":0}})"), "sweep.steps");
  EXPECT_EQ(field_of(R"({"sweep":{"start":0}})"), "sweep.parameter");
  EXPECT_EQ(field_of(R"({"experiment":"double_trigger","sweep":{"parameter":"phi"}})"), "sweep.parameter");
  EXPECT_EQ(field_of(R"({"experiment":"unpolarized","sweep":{"parameter":"theta1p"}})"), "sweep.parameter");
  EXPECT_EQ(field_of(R"({"sweep":{"parameter":"tx","start":0,"stop":2}})"), "sweep");
  EXPECT_EQ(field_of(R"({"mc":{"efficiency":2}})"), "mc.efficiency");
  EXPECT_EQ(field_of(R"({"mc":{"n_pairs":0}})"), "mc.n_pairs");
  EXPECT_EQ(field_of(R"({"mc":{"n_pairs":-5}})"), "mc.n_pairs");
  EXPECT_EQ(field_of(R"([1,2])"), "");
}

TEST(Overrides, DottedAndBareKeys) {
  json doc = json::parse(R"({"experiment":"coincidence"})");
  apply_override(doc, "phi=90");
  apply_override(doc, "angles_deg.theta2=45.5");
  apply_override(doc, "sweep.parameter=theta1");
  apply_override(doc, "sweep.steps=5");
  apply_override(doc, "experiment=same_arm");
  apply_override(doc, "tx=0.6");
  const auto cfg = parse_config(doc);
  EXPECT_EQ(cfg.phi, 90.0);
  EXPECT_EQ(cfg.theta2, 45.5);
  EXPECT_EQ(cfg.tx, 0.6);
  EXPECT_EQ(cfg.experiment, Experiment::same_arm);
  ASSERT_TRUE(cfg.sweep);
  EXPECT_EQ(cfg.sweep->parameter, "theta1");
  EXPECT_EQ(cfg.sweep->steps, 5);
}

TEST(Overrides, Malformed) {
  json doc = json::object();
  EXPECT_THROW(apply_override(doc, "phi"), ConfigError);
  EXPECT_THROW(apply_override(doc, "=3"), ConfigError);
  EXPECT_THROW(apply_override(doc, "a..b=3"), ConfigError);
  doc["experiment"] = "coincidence";
  EXPECT_THROW(apply_override(doc, "experiment.x=1"), ConfigError);
}

TEST(Io, MissingFileIsIoError) { EXPECT_THROW(load_json_file("/nonexistent/config.json"), IoError); }

TEST(Io, ShippedConfigsParse) {
  for (const char* name : {"unpolarized_phase_sweep.json", "unpolarized_analyzer_fringe.json", "mc_unpolarized.json"})
    EXPECT_NO_THROW(parse_config(load_json_file(std::string(SPINTERF_SOURCE_DIR) + "/configs/" + name))) << name;
}

TEST(Format, FifteenSignificantDigits) {
  EXPECT_EQ(format_number(0.125), "0.125");
  EXPECT_EQ(format_number(1.0 / 3), "0.333333333333333");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(360.0), "360");
}

TEST(Sweep, UnpolarizedPhaseFringe) {
  auto cfg = parse(R"({"experiment":"unpolarized","sweep":{"parameter":"phi","start":0,"stop":360,"steps":73}})");
  const auto rows = parse_csv(run_sweep(cfg));
  ASSERT_EQ(rows.size(), 74u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"phi", "analytic", "engine", "abs_deviation"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double phi = std::stod(rows[i][0]) * pi / 180;
    EXPECT_DOUBLE_EQ(std::stod(rows[i][0]), 5.0 * (i - 1));
    EXPECT_NEAR(std::stod(rows[i][1]), (1 - std::cos(phi)) / 8, 1e-12);
    EXPECT_NEAR(std::stod(rows[i][2]), (1 - std::cos(phi)) / 8, 1e-12);
    EXPECT_LT(std::stod(rows[i][3]), 1e-12);
  }
}

TEST(Sweep, AnalyzerFringeZeroAtParallel) {
  auto cfg = parse(R"({"experiment":"unpolarized","sweep":{"parameter":"theta2","start":0,"stop":180,"steps":37}})");
  const auto rows = parse_csv(run_sweep(cfg));
  ASSERT_EQ(rows.size(), 38u);
  EXPECT_LE(std::abs(std::stod(rows[1][1])), 1e-12);
  EXPECT_NEAR(std::stod(rows[19][1]), 0.125, 1e-12);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double t2 = std::stod(rows[i][0]) * pi / 180;
    EXPECT_NEAR(std::stod(rows[i][2]), std::pow(std::sin(t2), 2) / 8, 1e-12);
  }
}

TEST(Sweep, SingleStep) {
  auto cfg = parse(R"({"experiment":"coincidence","sweep":{"parameter":"theta1","start":30,"stop":90,"steps":1}})");
  const auto rows = parse_csv(run_sweep(cfg));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], "30");
}

TEST(Sweep, NoAxisGivesOnePoint) {
  const auto rows = parse_csv(run_sweep(parse(R"({"experiment":"same_arm","arm":"both"})")));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "point");
  EXPECT_NEAR(std::stod(rows[1][1]), 1.0, 1e-12);
}

TEST(Sweep, ClassicalHasNoEngineColumn) {
  const auto rows =
      parse_csv(run_sweep(parse(R"({"experiment":"classical","phases_deg":{"phi":180},"angles_deg":{"theta2":0}})")));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][1], "7");
  EXPECT_EQ(rows[1][2], "");
}

TEST(Sweep, EveryExperimentAgrees) {
  for (const char* e : {"coincidence", "no_polarizers", "same_arm", "double_trigger", "unpolarized", "full_distribution"})
    for (const char* input : {"polarized", "unpolarized"}) {
      auto cfg = parse(std::string(R"({"experiment":")") + e + R"(","input":")" + input +
                       R"(","arm":"both","angles_deg":{"theta1p":20,"theta2p":75,"theta1":10,"theta2":130,"theta":40},)"
                       R"("splitter":{"tx":0.9,"ty":0.6},"phases_deg":{"phi":60,"psi":60}})");
      const auto row = evaluate_point(cfg);
      ASSERT_TRUE(row.engine);
      EXPECT_NEAR(row.analytic, *row.engine, 1e-12) << e << ' ' << input;
    }
}

TEST(Sweep, FullDistributionColumns) {
  const auto rows = parse_csv(run_sweep(parse(R"({"experiment":"full_distribution","input":"unpolarized"})")));
  ASSERT_EQ(rows[0].size(), 8u);
  EXPECT_EQ(rows[0][4], "analytic_opposite");
  EXPECT_NEAR(std::stod(rows[1][4]), 0.25, 1e-12);
  EXPECT_NEAR(std::stod(rows[1][7]), 0.75, 1e-12);
}

TEST(Sweep, McRunIsSeeded) {
  auto cfg = parse(R"({"experiment":"mc_run","input":"unpolarized","mc":{"n_pairs":200000,"seed":5}})");
  const auto a = run_sweep(cfg), b = run_sweep(cfg);
  EXPECT_EQ(a, b);
  const auto rows = parse_csv(a);
  EXPECT_EQ(rows[0][4], "mc_estimate");
  EXPECT_NEAR(std::stod(rows[1][4]), 0.25, 4 * std::stod(rows[1][5]));
  cfg.mc.seed = 6;
  EXPECT_NE(run_sweep(cfg), a);
}

TEST(Sweep, ByteStable) {
  auto cfg = parse(R"({"experiment":"coincidence","splitter":{"tx":0.9,"ty":0.6},
                       "sweep":{"parameter":"theta2","start":0,"stop":180,"steps":19}})");
  const auto first = run_sweep(cfg);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(run_sweep(cfg), first);
  EXPECT_EQ(first.find(';'), std::string::npos);
}

TEST(Compare, CoarseDefaultPasses) {
  CompareConfig cc;
  cc.angle_step_deg = 45;
  const auto r = compare_report(cc);
  EXPECT_TRUE(r.passed()) << r.to_text();
  EXPECT_GE(r.formulas.size(), 10u);
}

TEST(Compare, OpaqueSplitterEdgePasses) {
  CompareConfig cc;
  cc.angle_step_deg = 30;
  cc.splitters = {{0.0, 0.0}};
  EXPECT_TRUE(compare_report(cc).passed());
}

TEST(Compare, PerturbedConstantFails) {
  const auto cc =
      parse_compare(json::parse(R"({"compare":{"angle_step_deg":45,"constants":{"unpolarized_balanced_prefactor":0.13}}})"));
  EXPECT_EQ(cc.unpolarized_balanced_prefactor, 0.13);
  const auto r = compare_report(cc);
  EXPECT_FALSE(r.passed());
  EXPECT_NE(r.to_text().find("FAIL"), std::string::npos);
}

TEST(Compare, ConfigErrors) {
  EXPECT_THROW(parse_compare(json::parse(R"({"compare":{"angle_step_deg":0}})")), ConfigError);
  EXPECT_THROW(parse_compare(json::parse(R"({"compare":{"splitters":[{"tx":2,"ty":0}]}})")), ConfigError);
  EXPECT_THROW(parse_compare(json::parse(R"({"compare":{"nope":1}})")), ConfigError);
  EXPECT_EQ(parse_compare(json::parse("{}")), CompareConfig{});
}

}  // namespace
}  // namespace spinterf::harness
