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

// Closed-form detection probabilities. Nothing here touches the Fock-space
// machinery; these are written out term by term so they can be checked
// against the operator-algebra engine in detection.hpp.
//
// Angle convention: theta1p/theta2p are the incident polarizations of the
// photons entering side1/side2, theta1/theta2 the analyzer orientations.
// Same-arm formulas are written for the side2 arm, with theta_a on the omega1
// channel and theta_b on the omega2 channel.

#include <cmath>
#include <numbers>

#include "spinterf/fock.hpp"
#include "spinterf/optics.hpp"

namespace spinterf::closed_form {

struct ABTerms {
  double A = 0.0;  // transmitted-transmitted paths
  double B = 0.0;  // reflected-reflected paths
};

struct CDTerms {
  double C = 0.0;
  double D = 0.0;
};

inline ABTerms ab_terms(double theta1p, double theta2p, double theta1, double theta2, const BeamSplitter& bs) {
  const double c1p = std::cos(theta1p), s1p = std::sin(theta1p);
  const double c2p = std::cos(theta2p), s2p = std::sin(theta2p);
  const double c1 = std::cos(theta1), s1 = std::sin(theta1);
  const double c2 = std::cos(theta2), s2 = std::sin(theta2);
  ABTerms t;
  t.A = bs.tx * bs.tx * c1p * c2p * c1 * c2 + bs.ty * bs.ty * s1p * s2p * s1 * s2 +
        bs.tx * bs.ty * (c1p * s2p * c1 * s2 + s1p * c2p * s1 * c2);
  t.B = bs.rx * bs.rx * c1p * c2p * c1 * c2 + bs.ry * bs.ry * s1p * s2p * s1 * s2 +
        bs.rx * bs.ry * (c1p * s2p * s1 * c2 + s1p * c2p * c1 * s2);
  return t;
}

/// A^2 + B^2 - 2AB cos(phi).
inline double p_coincidence(double theta1p, double theta2p, double theta1, double theta2, const BeamSplitter& bs,
                            double phi) {
  const auto [A, B] = ab_terms(theta1p, theta2p, theta1, theta2, bs);
  return A * A + B * B - 2.0 * A * B * std::cos(phi);
}

/// Balanced splitter, phi = 0: factorizes left-right.
inline double p_coincidence_in_phase(double theta1p, double theta2p, double theta1, double theta2) {
  const double a = std::sin(theta1p - theta2p), b = std::sin(theta1 - theta2);
  return 0.25 * a * a * b * b;
}

/// Balanced splitter, phi = pi.
inline double p_coincidence_antiphase(double theta1p, double theta2p, double theta1, double theta2) {
  const double s = std::cos(theta1p - theta2) * std::cos(theta2p - theta1) +
                   std::cos(theta1p - theta1) * std::cos(theta2p - theta2);
  return 0.25 * s * s;
}

/// Balanced splitter, phi = pi/2: the interference term drops out.
inline double p_coincidence_quadrature(double theta1p, double theta2p, double theta1, double theta2) {
  const double a = std::cos(theta1p - theta2) * std::cos(theta2p - theta1);
  const double b = std::cos(theta1p - theta1) * std::cos(theta2p - theta2);
  return 0.25 * (a * a + b * b);
}

/// Coincidences without polarizers on a balanced splitter.
inline double p_no_polarizers(double theta1p, double theta2p, double phi) {
  if (phi == 0.0) {
    const double s = std::sin(theta1p - theta2p);
    return 0.5 * s * s;
  }
  const auto bs = BeamSplitter::balanced();
  const double half_pi = std::numbers::pi / 2;
  double sum = 0.0;
  for (double theta1 : {0.0, half_pi})
    for (double theta2 : {0.0, half_pi}) sum += p_coincidence(theta1p, theta2p, theta1, theta2, bs, phi);
  return sum;
}

/// Same as p_no_polarizers for an arbitrary splitter (four-exit sum).
inline double p_no_polarizers(double theta1p, double theta2p, const BeamSplitter& bs, double phi) {
  const double half_pi = std::numbers::pi / 2;
  double sum = 0.0;
  for (double theta1 : {0.0, half_pi})
    for (double theta2 : {0.0, half_pi}) sum += p_coincidence(theta1p, theta2p, theta1, theta2, bs, phi);
  return sum;
}

inline CDTerms cd_terms(double theta1p, double theta2p, double theta_a, double theta_b, const BeamSplitter& bs) {
  const double c1p = std::cos(theta1p), s1p = std::sin(theta1p);
  const double c2p = std::cos(theta2p), s2p = std::sin(theta2p);
  const double ca = std::cos(theta_a), sa = std::sin(theta_a);
  const double cb = std::cos(theta_b), sb = std::sin(theta_b);
  const double common = bs.tx * bs.rx * c1p * c2p * ca * cb + bs.ty * bs.ry * s1p * s2p * sa * sb;
  CDTerms t;
  t.C = common + bs.tx * bs.ry * s1p * c2p * sa * cb + bs.ty * bs.rx * c1p * s2p * ca * sb;
  t.D = common + bs.tx * bs.ry * s1p * c2p * ca * sb + bs.ty * bs.rx * c1p * s2p * sa * cb;
  return t;
}

/// Both photons in the side2 arm: (1/2)(C^2 + D^2 + 2CD cos(psi)).
inline double p_same_arm(double theta1p, double theta2p, double theta_a, double theta_b, const BeamSplitter& bs,
                         double psi) {
  const auto [C, D] = cd_terms(theta1p, theta2p, theta_a, theta_b, bs);
  return 0.5 * (C * C + D * D + 2.0 * C * D * std::cos(psi));
}

/// The side1 arm is the mirror image: the incident photons trade places.
inline double p_same_arm(Arm arm, double theta1p, double theta2p, double theta_a, double theta_b,
                         const BeamSplitter& bs, double psi) {
  return arm == Arm::side2 ? p_same_arm(theta1p, theta2p, theta_a, theta_b, bs, psi)
                           : p_same_arm(theta2p, theta1p, theta_a, theta_b, bs, psi);
}

/// Balanced splitter, psi = 0 (one arm).
inline double p_same_arm_balanced(double theta1p, double theta2p, double theta_a, double theta_b) {
  const double s = std::cos(theta1p - theta_b) * std::cos(theta2p - theta_a) +
                   std::cos(theta1p - theta_a) * std::cos(theta2p - theta_b);
  return s * s / 8.0;
}

/// Both arms, all analyzer exits, balanced splitter, psi = 0.
inline double p_same_arm_no_polarizers(double theta1p, double theta2p) {
  const double c = std::cos(theta1p - theta2p);
  return 0.5 * (1.0 + c * c);
}

/// Single detector behind a theta analyzer registering both photons (balanced).
inline double p_double_trigger(double theta1p, double theta2p, double theta, double psi) {
  const double a = std::cos(theta1p - theta), b = std::cos(theta2p - theta);
  return a * a * b * b * (1.0 + std::cos(psi)) / 8.0;
}

/// Double trigger on an arbitrary splitter: |T|^2 |R|^2 with T the
/// transmitted-photon projection and R the reflected one.
inline double p_double_trigger(Arm arm, double theta1p, double theta2p, double theta, const BeamSplitter& bs) {
  const double own = arm == Arm::side1 ? theta1p : theta2p;
  const double foreign = arm == Arm::side1 ? theta2p : theta1p;
  const double t = bs.tx * std::cos(theta) * std::cos(own) + bs.ty * std::sin(theta) * std::sin(own);
  const double r = bs.rx * std::cos(theta) * std::cos(foreign) + bs.ry * std::sin(theta) * std::sin(foreign);
  return t * t * r * r;
}

/// Unpolarized coincidences on an arbitrary lossless splitter.
inline double p_unpolarized(double theta1, double theta2, const BeamSplitter& bs, double phi) {
  const double c1 = std::cos(theta1), s1 = std::sin(theta1);
  const double c2 = std::cos(theta2), s2 = std::sin(theta2);
  const double tx2 = bs.tx * bs.tx, ty2 = bs.ty * bs.ty, rx2 = bs.rx * bs.rx, ry2 = bs.ry * bs.ry;
  const double trans = (tx2 * c1 * c1 + ty2 * s1 * s1) * (tx2 * c2 * c2 + ty2 * s2 * s2);
  const double refl = (rx2 * c1 * c1 + ry2 * s1 * s1) * (rx2 * c2 * c2 + ry2 * s2 * s2);
  // Cross term is linear in t*r per axis.
  const double cross = bs.tx * bs.rx * c1 * c2 + bs.ty * bs.ry * s1 * s2;
  return 0.25 * trans + 0.25 * refl - 0.5 * cross * cross * std::cos(phi);
}

/// Unpolarized coincidences, balanced splitter.
inline double p_unpolarized_balanced(double theta1, double theta2, double phi, double prefactor = 1.0 / 8.0) {
  const double c = std::cos(theta2 - theta1);
  return prefactor * (1.0 - std::cos(phi) * c * c);
}

/// Unpolarized coincidences, balanced splitter, phi = 0: singlet-like sin^2.
inline double p_unpolarized_in_phase(double theta1, double theta2) {
  const double s = std::sin(theta2 - theta1);
  return s * s / 8.0;
}

/// Unpolarized pair in one arm at analyzers theta1 x theta2, summed over both
/// arms (balanced, psi = 0).
inline double p_unpolarized_same_arm(double theta1, double theta2) {
  const double c = std::cos(theta1 - theta2);
  return (1.0 + c * c) / 8.0;
}

/// Classical coincidence rate for two amplitude-stabilized beams of equal
/// intensity, up to normalization. Never reaches zero.
inline double p_classical(double theta1, double theta2, double phi) {
  const double c = std::cos(theta2 - theta1);
  return 3.0 + 2.0 * (1.0 - std::cos(phi)) * c * c;
}

/// (max - min) / (max + min).
inline double visibility(double max_rate, double min_rate) { return (max_rate - min_rate) / (max_rate + min_rate); }

}  // namespace spinterf::closed_form
