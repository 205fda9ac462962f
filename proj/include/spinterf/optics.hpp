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

// Beam splitter, birefringent analyzers and detector field operators,
// expressed as lowering-operator combinations over the input modes.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spinterf/fock.hpp"

namespace spinterf {

/// Lossless two-port splitter with real per-polarization amplitudes.
/// Reflection carries a fixed factor i.
struct BeamSplitter {
  double tx = std::numbers::sqrt2 / 2;
  double ty = std::numbers::sqrt2 / 2;
  double rx = std::numbers::sqrt2 / 2;
  double ry = std::numbers::sqrt2 / 2;

  static BeamSplitter balanced() { return {}; }

  /// Reflection amplitudes completed from losslessness.
  static BeamSplitter lossless(double tx, double ty) {
    if (!(tx >= 0.0 && tx <= 1.0 && ty >= 0.0 && ty <= 1.0))
      throw std::invalid_argument("transmission amplitudes must lie in [0, 1]");
    BeamSplitter bs{tx, ty, std::sqrt(1.0 - tx * tx), std::sqrt(1.0 - ty * ty)};
    return bs;
  }

  double transmission(Polarization p) const { return p == Polarization::x ? tx : ty; }
  double reflection(Polarization p) const { return p == Polarization::x ? rx : ry; }

  bool is_balanced(double tol = kNormTolerance) const {
    const double h = std::numbers::sqrt2 / 2;
    return std::abs(tx - h) <= tol && std::abs(ty - h) <= tol && std::abs(rx - h) <= tol && std::abs(ry - h) <= tol;
  }

  void validate() const {
    for (double c : {tx, ty, rx, ry})
      if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("splitter amplitudes must lie in [0, 1]");
    if (std::abs(tx * tx + rx * rx - 1.0) > kNormTolerance || std::abs(ty * ty + ry * ry - 1.0) > kNormTolerance)
      throw std::invalid_argument("splitter is not lossless: t^2 + r^2 != 1");
  }

  friend bool operator==(const BeamSplitter&, const BeamSplitter&) = default;
};

/// Output-arm lowering operators in terms of input-arm ones, split into the
/// transmitted and reflected contributions:
///   a_out(arm) = t a_in(arm) + i r a_in(other arm), separately for x and y.
class SplitterTable {
 public:
  const OperatorExpr& transmitted(Polarization p, Arm out) const { return transmitted_[slot(p, out)]; }
  const OperatorExpr& reflected(Polarization p, Arm out) const { return reflected_[slot(p, out)]; }
  OperatorExpr output(Polarization p, Arm out) const { return transmitted(p, out) + reflected(p, out); }

 private:
  friend SplitterTable bs_output_ops(const BeamSplitter& bs);
  static std::size_t slot(Polarization p, Arm a) {
    return static_cast<std::size_t>(p) * 2 + static_cast<std::size_t>(a);
  }
  std::array<OperatorExpr, 4> transmitted_;
  std::array<OperatorExpr, 4> reflected_;
};

inline SplitterTable bs_output_ops(const BeamSplitter& bs) {
  bs.validate();
  SplitterTable table;
  const Amplitude i{0.0, 1.0};
  for (auto p : {Polarization::x, Polarization::y})
    for (auto out : {Arm::side1, Arm::side2}) {
      const auto s = SplitterTable::slot(p, out);
      if (bs.transmission(p) != 0.0)
        table.transmitted_[s] = OperatorExpr::lowering(input_mode(out, p), bs.transmission(p));
      if (bs.reflection(p) != 0.0)
        table.reflected_[s] = OperatorExpr::lowering(input_mode(other(out), p), i * bs.reflection(p));
    }
  return table;
}

/// Exit of a birefringent analyzer.
enum class Port : std::uint8_t { parallel = 0, perpendicular = 1 };

inline const char* to_string(Port p) { return p == Port::parallel ? "par" : "perp"; }

struct AnalyzerSetting {
  Arm arm = Arm::side1;
  double theta = 0.0;
  Port port = Port::parallel;

  /// (x, y) weights of the detected polarization: (cos, sin) for the
  /// parallel exit, (-sin, cos) for the perpendicular one.
  std::array<double, 2> projection() const {
    const double c = std::cos(theta), s = std::sin(theta);
    return port == Port::parallel ? std::array<double, 2>{c, s} : std::array<double, 2>{-s, c};
  }
};

/// Detector geometry reduced to the two interference phases (radians):
/// phi for detectors on opposite arms, psi for two detectors in one arm.
struct PhaseGeometry {
  double phi = 0.0;
  double psi = 0.0;

  /// phi = 2 pi (z2 - z1) / L and psi = 2 pi (Z2 - Z2') / L for transverse
  /// detector offsets and fringe spacing L.
  static PhaseGeometry from_positions(double z1, double z2, double same_arm_z, double same_arm_zp,
                                      double fringe_spacing) {
    if (!(fringe_spacing > 0.0) || !std::isfinite(fringe_spacing))
      throw std::invalid_argument("fringe spacing must be positive");
    const double k = 2.0 * std::numbers::pi / fringe_spacing;
    return {k * (z2 - z1), k * (same_arm_z - same_arm_zp)};
  }

  void validate() const {
    if (!std::isfinite(phi) || !std::isfinite(psi)) throw std::invalid_argument("phases must be finite");
  }
};

namespace detail {

// Field at a detector in `arm` behind an analyzer with the given projection;
// the reflected part (photon from the opposite source) picks up `reflected_phase`.
inline OperatorExpr field_operator(Arm arm, std::array<double, 2> proj, const BeamSplitter& bs,
                                   double reflected_phase) {
  const auto table = bs_output_ops(bs);
  const Amplitude phase = std::polar(1.0, reflected_phase);
  OperatorExpr e;
  for (auto p : {Polarization::x, Polarization::y}) {
    const double w = proj[static_cast<std::size_t>(p)];
    if (w == 0.0) continue;
    if (!table.transmitted(p, arm).empty()) e += Amplitude{w} * table.transmitted(p, arm);
    if (!table.reflected(p, arm).empty()) e += (w * phase) * table.reflected(p, arm);
  }
  return e;
}

}  // namespace detail

/// Field operator of one detector on the opposite-arm (coincidence) layout.
/// Half of phi is attached to the reflected part in each arm, so a D1*D2
/// amplitude carries exactly exp(i phi) between its reflected-reflected and
/// transmitted-transmitted contributions.
inline OperatorExpr detector_operator(const AnalyzerSetting& setting, const BeamSplitter& bs,
                                      const PhaseGeometry& geom) {
  geom.validate();
  return detail::field_operator(setting.arm, setting.projection(), bs, geom.phi / 2.0);
}

/// Two frequency-separated detectors in one arm.
struct SameArmPair {
  OperatorExpr primary;    // analyzer theta_b, no extra phase
  OperatorExpr companion;  // analyzer theta_a, psi on its reflected part
};

inline SameArmPair same_arm_operator_pair(Arm arm, double theta_a, double theta_b, const BeamSplitter& bs,
                                          const PhaseGeometry& geom, Port port_a = Port::parallel,
                                          Port port_b = Port::parallel) {
  geom.validate();
  return {detail::field_operator(arm, AnalyzerSetting{arm, theta_b, port_b}.projection(), bs, 0.0),
          detail::field_operator(arm, AnalyzerSetting{arm, theta_a, port_a}.projection(), bs, geom.psi)};
}

}  // namespace spinterf
