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
#include <vector>

#include "oracle.hpp"
#include "spinterf/detection.hpp"

namespace spinterf {
namespace {

constexpr double kTol = 1e-12;
constexpr double pi = std::numbers::pi;
const BeamSplitter kBalanced = BeamSplitter::balanced();

std::vector<double> angle_grid() {
  std::vector<double> v;
  for (int i = 0; i < 12; ++i) v.push_back(i * pi / 12);
  return v;
}

// --- coincidence -----------------------------------------------------------

TEST(Coincidence, OrthogonalIncidentCrossedAnalyzers) {
  EXPECT_NEAR(coincidence_probability(polarized(0, pi / 2), 0, pi / 2, kBalanced, {}), 0.25, kTol);
}

TEST(Coincidence, ParallelIncidentNeverSplitsAtZeroPhase) {
  for (double t1p : angle_grid())
    for (double t1 : angle_grid())
      for (double t2 : angle_grid()) ASSERT_NEAR(coincidence_probability(polarized(t1p, t1p), t1, t2, kBalanced, {}), 0.0, kTol);
}

TEST(Coincidence, UnpolarizedSingletValues) {
  EXPECT_NEAR(coincidence_probability(unpolarized(), 0.4, 0.4, kBalanced, {}), 0.0, kTol);
  EXPECT_NEAR(coincidence_probability(unpolarized(), 0.4, 0.4 + pi / 2, kBalanced, {}), 0.125, kTol);
}

TEST(Coincidence, AntiphaseAllZero) {
  EXPECT_NEAR(coincidence_probability(polarized(0, 0), 0, 0, kBalanced, {pi, 0}), 1.0, kTol);
}

TEST(Coincidence, SameArmDetectorsRejected) {
  EXPECT_THROW(coincidence_probability(polarized(0, 0), {Arm::side1, 0, Port::parallel}, {Arm::side1, 0, Port::parallel},
                                       kBalanced, {}),
               std::invalid_argument);
}

TEST(Coincidence, FactorizesLeftRightAtZeroPhase) {
  for (double a : angle_grid())
    for (double b : angle_grid())
      for (double c : angle_grid())
        for (double d : angle_grid()) {
          const double expected = 0.25 * std::pow(std::sin(a - b), 2) * std::pow(std::sin(c - d), 2);
          ASSERT_NEAR(coincidence_probability(polarized(a, b), c, d, kBalanced, {}), expected, kTol);
        }
}

TEST(Coincidence, UnpolarizedDependsOnlyOnAnalyzerDifference) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 2 * pi);
  for (int trial = 0; trial < 200; ++trial) {
    const double t1 = u(rng), t2 = u(rng), off = u(rng);
    const double p = coincidence_probability(unpolarized(), t1, t2, kBalanced, {});
    ASSERT_NEAR(p, coincidence_probability(unpolarized(), t1 + off, t2 + off, kBalanced, {}), kTol);
    ASSERT_NEAR(coincidence_probability(unpolarized(), t1, t1, kBalanced, {}), 0.0, kTol);
  }
}

// --- no polarizers ---------------------------------------------------------

TEST(NoPolarizers, Values) {
  EXPECT_NEAR(coincidence_no_polarizers(polarized(0, pi / 2), kBalanced, {}), 0.5, kTol);
  EXPECT_NEAR(coincidence_no_polarizers(polarized(0, 0), kBalanced, {}), 0.0, kTol);
  // (0 + 1/2 + 1/2 + 0) / 4 over the mixture.
  EXPECT_NEAR(coincidence_no_polarizers(unpolarized(), kBalanced, {}), 0.25, kTol);
}

TEST(NoPolarizers, IndependentOfDummyAnalyzerAngles) {
  const auto bs = BeamSplitter::lossless(0.9, 0.6);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 2 * pi);
  for (int trial = 0; trial < 100; ++trial) {
    const auto in = polarized(u(rng), u(rng));
    const PhaseGeometry g{u(rng), 0.0};
    const double ref = coincidence_no_polarizers(in, bs, g);
    const double a = u(rng), b = u(rng);
    double sum = 0.0;
    for (double da : {0.0, pi / 2})
      for (double db : {0.0, pi / 2}) sum += coincidence_probability(in, a + da, b + db, bs, g);
    ASSERT_NEAR(sum, ref, kTol);
    ASSERT_NEAR(coincidence_no_polarizers(in, bs, g, a, b), ref, kTol);
  }
}

TEST(NoPolarizers, QuadraturePhaseLosesIncidentDependence) {
  // The cross term vanishes at phi = pi/2, leaving 1/2 for any incident angles.
  for (double a : angle_grid())
    for (double b : angle_grid())
      ASSERT_NEAR(coincidence_no_polarizers(polarized(a, b), kBalanced, {pi / 2, 0}), 0.5, kTol);
}

TEST(NoPolarizers, AntiphaseStillDependsOnIncidentAngles) {
  // 1/2 - 1/2 cos^2(d) cos(phi): at phi = pi it runs from 1/2 to 1.
  EXPECT_NEAR(coincidence_no_polarizers(polarized(0, 0), kBalanced, {pi, 0}), 1.0, kTol);
  EXPECT_NEAR(coincidence_no_polarizers(polarized(0, pi / 2), kBalanced, {pi, 0}), 0.5, kTol);
}

// --- same arm --------------------------------------------------------------

TEST(SameArm, Values) {
  EXPECT_NEAR(same_arm_probability(polarized(0, 0), Arm::side2, 0, 0, kBalanced, {}), 0.5, kTol);
  // Frozen from the permanent oracle: photon 2 is y-polarized, both analyzers pass x.
  EXPECT_NEAR(same_arm_probability(polarized(0, pi / 2), Arm::side2, 0, 0, kBalanced, {}), 0.0, kTol);
  EXPECT_NEAR(oracle::same_arm(kBalanced, oracle::along(0), oracle::along(pi / 2), true, oracle::along(0),
                               oracle::along(0), 0.0),
              0.0, kTol);
}

TEST(SameArm, UnpolarizedBothArmsReading) {
  for (double a : angle_grid())
    for (double b : angle_grid()) {
      const double both = same_arm_both_arms(unpolarized(), a, b, kBalanced, {});
      ASSERT_NEAR(both, (1 + std::pow(std::cos(a - b), 2)) / 8, kTol);
      // one arm carries half of it
      ASSERT_NEAR(same_arm_probability(unpolarized(), Arm::side1, a, b, kBalanced, {}), both / 2, kTol);
    }
}

TEST(SameArmNoPolarizers, Values) {
  EXPECT_NEAR(same_arm_no_polarizers(polarized(0, pi / 2), kBalanced, {}), 0.5, kTol);
  EXPECT_NEAR(same_arm_no_polarizers(polarized(0, 0), kBalanced, {}), 1.0, kTol);
  // (1 + 1/2 + 1/2 + 1) / 4
  EXPECT_NEAR(same_arm_no_polarizers(unpolarized(), kBalanced, {}), 0.75, kTol);
}

// --- double trigger --------------------------------------------------------

TEST(DoubleTrigger, Values) {
  EXPECT_NEAR(double_trigger_probability(polarized(0, 0), Arm::side2, 0, kBalanced), 0.25, kTol);
  EXPECT_NEAR(double_trigger_probability(polarized(0, pi / 2), Arm::side2, 0, kBalanced), 0.0, kTol);
  // 1/16 frozen from the oracle with squared lowering.
  EXPECT_NEAR(oracle::double_trigger(kBalanced, oracle::along(0), oracle::along(0), true, oracle::along(pi / 4)),
              1.0 / 16, kTol);
  EXPECT_NEAR(double_trigger_probability(polarized(0, 0), Arm::side2, pi / 4, kBalanced), 1.0 / 16, kTol);
}

// --- full distribution -----------------------------------------------------

TEST(FullDistribution, CanonicalOutcomeSet) {
  const auto d = full_outcome_distribution(polarized(0.1, 0.2), 0.3, 0.4, kBalanced, {});
  EXPECT_EQ(d.size(), 12u);
  int opposite = 0;
  for (const auto& [o, p] : d.entries()) opposite += o.kind == OutcomeKind::opposite_arms;
  EXPECT_EQ(opposite, 4);
}

TEST(FullDistribution, Totals) {
  const auto a = full_outcome_distribution(polarized(0, 0), 0, 0, kBalanced, {});
  EXPECT_NEAR(a.opposite_arm_total(), 0.0, kTol);
  EXPECT_NEAR(a.same_arm_total(), 1.0, kTol);
  const auto b = full_outcome_distribution(polarized(0, pi / 2), 0, 0, kBalanced, {});
  EXPECT_NEAR(b.opposite_arm_total(), 0.5, kTol);
  EXPECT_NEAR(b.same_arm_total(), 0.5, kTol);
  const auto c = full_outcome_distribution(unpolarized(), 0, 0, kBalanced, {});
  EXPECT_NEAR(c.opposite_arm_total(), 0.25, kTol);
  EXPECT_NEAR(c.same_arm_total(), 0.75, kTol);
}

TEST(FullDistribution, NormalizedOnGridAtZeroPhases) {
  const std::vector<double> grid = [] {
    std::vector<double> v;
    for (int i = 0; i < 12; i += 2) v.push_back(i * pi / 12);
    return v;
  }();
  for (const auto& bs : {kBalanced, BeamSplitter::lossless(0.9, 0.6), BeamSplitter::lossless(1, 1), BeamSplitter::lossless(0, 0)})
    for (double a : grid)
      for (double b : grid)
        for (double t1 : grid)
          for (double t2 : grid) {
            ASSERT_NEAR(full_outcome_distribution(polarized(a, b), t1, t2, bs, {}).total(), 1.0, kTol);
            if (a == 0 && b == 0) {
              ASSERT_NEAR(full_outcome_distribution(unpolarized(), t1, t2, bs, {}).total(), 1.0, kTol);
            }
          }
}

TEST(FullDistribution, NormalizedWhenPhasesShareCosine) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 2 * pi);
  for (int trial = 0; trial < 100; ++trial) {
    const double phi = u(rng);
    const PhaseGeometry g{phi, trial % 2 ? phi : -phi};
    ASSERT_NEAR(full_outcome_distribution(polarized(u(rng), u(rng)), u(rng), u(rng), kBalanced, g).total(), 1.0, kTol);
  }
}

TEST(FullDistribution, DeviationForIndependentPhases) {
  // total = 1 + 1/2 <cos^2(theta1p - theta2p)> (cos psi - cos phi); the mixture
  // average of cos^2 is 1/2.
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0, 2 * pi);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = u(rng), b = u(rng), phi = u(rng), psi = u(rng);
    const double dev = std::cos(psi) - std::cos(phi);
    ASSERT_NEAR(full_outcome_distribution(polarized(a, b), u(rng), u(rng), kBalanced, {phi, psi}).total(),
                1.0 + 0.5 * std::pow(std::cos(a - b), 2) * dev, kTol);
    ASSERT_NEAR(full_outcome_distribution(unpolarized(), u(rng), u(rng), kBalanced, {phi, psi}).total(), 1.0 + 0.25 * dev,
                kTol);
  }
}

// --- oracle equivalence ----------------------------------------------------

TEST(Engine, MatchesPermanentOracle) {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(0, 2 * pi), unit(0, 1);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto bs = BeamSplitter::lossless(unit(rng), unit(rng));
    const double a = u(rng), b = u(rng), t1 = u(rng), t2 = u(rng), phi = u(rng), psi = u(rng);
    const auto pa = oracle::along(a), pb = oracle::along(b);
    const PhaseGeometry g{phi, psi};
    ASSERT_NEAR(coincidence_probability(polarized(a, b), t1, t2, bs, g),
                oracle::coincidence(bs, pa, pb, oracle::along(t1), oracle::along(t2), phi), kTol);
    ASSERT_NEAR(coincidence_probability(unpolarized(), t1, t2, bs, g), oracle::unpolarized([&](auto p, auto q) {
                  return oracle::coincidence(bs, p, q, oracle::along(t1), oracle::along(t2), phi);
                }),
                kTol);
    for (auto arm : {Arm::side1, Arm::side2}) {
      const bool upper = arm == Arm::side2;
      ASSERT_NEAR(same_arm_probability(polarized(a, b), arm, t1, t2, bs, g),
                  oracle::same_arm(bs, pa, pb, upper, oracle::along(t1), oracle::along(t2), psi), kTol);
      ASSERT_NEAR(same_arm_probability(polarized(a, b), arm, t1, t2, bs, g, Port::perpendicular, Port::parallel),
                  oracle::same_arm(bs, pa, pb, upper, oracle::along(t1 + pi / 2), oracle::along(t2), psi), kTol);
      ASSERT_NEAR(double_trigger_probability(polarized(a, b), arm, t1, bs),
                  oracle::double_trigger(bs, pa, pb, upper, oracle::along(t1)), kTol);
    }
  }
}

TEST(Engine, DegenerateSplittersStayFinite) {
  for (const auto& bs : {BeamSplitter::lossless(0, 0), BeamSplitter::lossless(1, 1), BeamSplitter::lossless(1, 0)}) {
    const auto d = full_outcome_distribution(unpolarized(), 0.3, 0.8, bs, {});
    EXPECT_NEAR(d.total(), 1.0, kTol);
    for (const auto& [o, p] : d.entries()) EXPECT_TRUE(std::isfinite(p));
  }
  // A window sends both photons straight through: coincidences only.
  EXPECT_NEAR(full_outcome_distribution(polarized(0.2, 1.0), 0, 0, BeamSplitter::lossless(1, 1), {}).opposite_arm_total(),
              1.0, kTol);
}

}  // namespace
}  // namespace spinterf
