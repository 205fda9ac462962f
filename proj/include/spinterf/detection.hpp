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

#pragma once

// Exact detection probabilities by brute-force operator algebra: build the
// detector field operators, apply them to the input state and project onto
// the vacuum.

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spinterf/fock.hpp"
#include "spinterf/optics.hpp"

namespace spinterf {

/// Uniform incoherent mixture of the four x/y basis products.
struct Unpolarized {};

using InputSpec = std::variant<IncidentPolarization, Unpolarized>;

inline InputSpec polarized(double theta1p, double theta2p) { return IncidentPolarization{theta1p, theta2p}; }
inline InputSpec unpolarized() { return Unpolarized{}; }

namespace detail {

// Probability for a pure state, or its 1/4-weighted average over the basis
// products for the unpolarized input. Mixtures average probabilities, never
// amplitudes.
template <typename F>
double mixture_average(const InputSpec& input, F&& probability_of) {
  if (const auto* inc = std::get_if<IncidentPolarization>(&input)) return probability_of(product_state(*inc));
  double sum = 0.0;
  for (auto a : {Polarization::x, Polarization::y})
    for (auto b : {Polarization::x, Polarization::y}) sum += probability_of(basis_product(a, b));
  return sum / 4.0;
}

inline double vacuum_probability(const TwoPhotonState& s, const OperatorExpr& first, const OperatorExpr& second) {
  // second acts first
  return std::norm(vacuum_amplitude(apply_operator_expr(apply_operator_expr(s, second), first)));
}

constexpr std::array<Port, 2> kPorts{Port::parallel, Port::perpendicular};

}  // namespace detail

/// |<0| E1 E2 |Psi>|^2 for detectors behind analyzers on opposite arms.
inline double coincidence_probability(const InputSpec& input, const AnalyzerSetting& d1, const AnalyzerSetting& d2,
                                      const BeamSplitter& bs, const PhaseGeometry& geom) {
  if (d1.arm == d2.arm) throw std::invalid_argument("coincidence detectors must sit on opposite arms");
  const auto e1 = detector_operator(d1, bs, geom);
  const auto e2 = detector_operator(d2, bs, geom);
  return detail::mixture_average(input, [&](const TwoPhotonState& s) { return detail::vacuum_probability(s, e1, e2); });
}

inline double coincidence_probability(const InputSpec& input, double theta1, double theta2, const BeamSplitter& bs,
                                      const PhaseGeometry& geom) {
  return coincidence_probability(input, {Arm::side1, theta1, Port::parallel}, {Arm::side2, theta2, Port::parallel},
                                 bs, geom);
}

/// Coincidences with the polarizers removed: sum over both exits of both
/// birefringent analyzers. Independent of the analyzer orientations.
inline double coincidence_no_polarizers(const InputSpec& input, const BeamSplitter& bs, const PhaseGeometry& geom,
                                        double theta1 = 0.0, double theta2 = 0.0) {
  double sum = 0.0;
  for (auto p1 : detail::kPorts)
    for (auto p2 : detail::kPorts)
      sum += coincidence_probability(input, {Arm::side1, theta1, p1}, {Arm::side2, theta2, p2}, bs, geom);
  return sum;
}

/// Both photons in `arm`: (1/2)|<0| E' E |Psi>|^2 with the companion detector
/// at theta_a (omega1 channel) and the primary at theta_b (omega2 channel).
/// The 1/2 accounts for the pair taking the other arm.
inline double same_arm_probability(const InputSpec& input, Arm arm, double theta_a, double theta_b,
                                   const BeamSplitter& bs, const PhaseGeometry& geom, Port port_a = Port::parallel,
                                   Port port_b = Port::parallel) {
  const auto pair = same_arm_operator_pair(arm, theta_a, theta_b, bs, geom, port_a, port_b);
  return 0.5 * detail::mixture_average(input, [&](const TwoPhotonState& s) {
           return detail::vacuum_probability(s, pair.companion, pair.primary);
         });
}

/// Same-arm probability at the given ports summed over both arms.
inline double same_arm_both_arms(const InputSpec& input, double theta_a, double theta_b, const BeamSplitter& bs,
                                 const PhaseGeometry& geom) {
  return same_arm_probability(input, Arm::side1, theta_a, theta_b, bs, geom) +
         same_arm_probability(input, Arm::side2, theta_a, theta_b, bs, geom);
}

/// Same-arm pairs with the polarizers removed: all four analyzer exits in
/// both arms.
inline double same_arm_no_polarizers(const InputSpec& input, const BeamSplitter& bs, const PhaseGeometry& geom,
                                     double theta_a = 0.0, double theta_b = 0.0) {
  double sum = 0.0;
  for (auto arm : {Arm::side1, Arm::side2})
    for (auto pa : detail::kPorts)
      for (auto pb : detail::kPorts) sum += same_arm_probability(input, arm, theta_a, theta_b, bs, geom, pa, pb);
  return sum;
}

/// One detector registering both photons. The two photons are recorded at the
/// same spot, so no same-arm phase enters. Weight is 1/2 (other arm) times
/// 1/2! (double occupation of one detector mode) times <E^dag^2 E^2>.
inline double double_trigger_probability(const InputSpec& input, Arm arm, double theta, const BeamSplitter& bs) {
  const auto e = detail::field_operator(arm, AnalyzerSetting{arm, theta, Port::parallel}.projection(), bs, 0.0);
  return 0.25 * detail::mixture_average(input, [&](const TwoPhotonState& s) { return detail::vacuum_probability(s, e, e); });
}

enum class OutcomeKind : std::uint8_t { opposite_arms, same_arm };

/// Frequency channel a detector is filtered to; opposite-arm detectors see both.
enum class FrequencySlot : std::uint8_t { unresolved, omega1, omega2 };

struct DetectorId {
  Arm arm = Arm::side1;
  Port port = Port::parallel;
  FrequencySlot slot = FrequencySlot::unresolved;

  friend bool operator==(const DetectorId&, const DetectorId&) = default;
};

inline std::string to_string(const DetectorId& d) {
  std::string s = d.arm == Arm::side1 ? "D1" : "D2";
  if (d.slot == FrequencySlot::omega1) s += "w1";
  if (d.slot == FrequencySlot::omega2) s += "w2";
  return s + (d.port == Port::perpendicular ? "perp" : "");
}

/// Which pair of detectors fired. For opposite arms `first` is the side1 exit
/// and `second` the side2 exit; for same-arm pairs they are the omega1 and
/// omega2 detectors of `arm`.
struct Outcome {
  OutcomeKind kind = OutcomeKind::opposite_arms;
  Arm arm = Arm::side1;
  Port first = Port::parallel;
  Port second = Port::parallel;

  std::array<DetectorId, 2> detectors() const {
    if (kind == OutcomeKind::opposite_arms)
      return {DetectorId{Arm::side1, first, FrequencySlot::unresolved},
              DetectorId{Arm::side2, second, FrequencySlot::unresolved}};
    return {DetectorId{arm, first, FrequencySlot::omega1}, DetectorId{arm, second, FrequencySlot::omega2}};
  }

  std::string label() const {
    const auto d = detectors();
    return to_string(d[0]) + "+" + to_string(d[1]);
  }

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Canonical order: 4 opposite-arm port pairs, then side1 and side2 same-arm pairs.
inline const std::vector<Outcome>& all_outcomes() {
  static const std::vector<Outcome> outcomes = [] {
    std::vector<Outcome> v;
    for (auto p1 : detail::kPorts)
      for (auto p2 : detail::kPorts) v.push_back({OutcomeKind::opposite_arms, Arm::side1, p1, p2});
    for (auto arm : {Arm::side1, Arm::side2})
      for (auto pa : detail::kPorts)
        for (auto pb : detail::kPorts) v.push_back({OutcomeKind::same_arm, arm, pa, pb});
    return v;
  }();
  return outcomes;
}

class OutcomeDistribution {
 public:
  using Entry = std::pair<Outcome, double>;

  OutcomeDistribution() = default;
  explicit OutcomeDistribution(std::vector<Entry> entries) : entries_(std::move(entries)) {
    for (const auto& [o, p] : entries_)
      if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("outcome probabilities must be nonnegative");
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  double probability(const Outcome& o) const {
    for (const auto& [k, p] : entries_)
      if (k == o) return p;
    return 0.0;
  }

  double total() const { return sum_if([](const Outcome&) { return true; }); }
  double opposite_arm_total() const {
    return sum_if([](const Outcome& o) { return o.kind == OutcomeKind::opposite_arms; });
  }
  double same_arm_total() const { return sum_if([](const Outcome& o) { return o.kind == OutcomeKind::same_arm; }); }

  bool is_normalized(double tol = kNormTolerance) const { return std::abs(total() - 1.0) <= tol; }

 private:
  template <typename Pred>
  double sum_if(Pred pred) const {
    double s = 0.0;
    for (const auto& [o, p] : entries_)
      if (pred(o)) s += p;
    return s;
  }
  std::vector<Entry> entries_;
};

/// Every exclusive two-detector outcome for analyzers at theta1 (side1 /
/// omega1 channel) and theta2 (side2 / omega2 channel). Double-trigger events
/// belong to a different event space and are not part of it. The set sums to
/// one only when cos(psi) == cos(phi); callers normally take phi = psi = 0.
inline OutcomeDistribution full_outcome_distribution(const InputSpec& input, double theta1, double theta2,
                                                     const BeamSplitter& bs, const PhaseGeometry& geom) {
  std::vector<OutcomeDistribution::Entry> entries;
  for (const auto& o : all_outcomes()) {
    double p = 0.0;
    if (o.kind == OutcomeKind::opposite_arms)
      p = coincidence_probability(input, {Arm::side1, theta1, o.first}, {Arm::side2, theta2, o.second}, bs, geom);
    else
      p = same_arm_probability(input, o.arm, theta1, theta2, bs, geom, o.first, o.second);
    entries.emplace_back(o, p);
  }
  return OutcomeDistribution(std::move(entries));
}

}  // namespace spinterf
