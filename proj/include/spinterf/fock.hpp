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

// Two-photon Fock space over the eight input modes of a two-port
// interferometer, plus the lowering-operator algebra that every detection
// probability reduces to.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spinterf {

using Amplitude = std::complex<double>;

/// Normalization tolerance used throughout the library.
inline constexpr double kNormTolerance = 1e-12;

enum class Arm : std::uint8_t { side1 = 0, side2 = 1 };
enum class Polarization : std::uint8_t { x = 0, y = 1 };
enum class Frequency : std::uint8_t { omega1 = 0, omega2 = 1 };

constexpr Arm other(Arm a) { return a == Arm::side1 ? Arm::side2 : Arm::side1; }

inline const char* to_string(Arm a) { return a == Arm::side1 ? "side1" : "side2"; }
inline const char* to_string(Polarization p) { return p == Polarization::x ? "x" : "y"; }
inline const char* to_string(Frequency f) { return f == Frequency::omega1 ? "omega1" : "omega2"; }

/// One bosonic mode: spatial arm, linear polarization axis and frequency slot.
///
/// The eight modes are totally ordered by `index()`, arm major, frequency minor.
struct Mode {
  Arm arm = Arm::side1;
  Polarization pol = Polarization::x;
  Frequency freq = Frequency::omega1;

  static constexpr std::size_t count = 8;

  constexpr std::size_t index() const {
    return static_cast<std::size_t>(arm) * 4 + static_cast<std::size_t>(pol) * 2 +
           static_cast<std::size_t>(freq);
  }

  static constexpr Mode from_index(std::size_t i) {
    if (i >= count) throw std::out_of_range("mode index out of range");
    return Mode{static_cast<Arm>(i / 4), static_cast<Polarization>((i / 2) % 2),
                static_cast<Frequency>(i % 2)};
  }

  friend constexpr bool operator==(Mode a, Mode b) { return a.index() == b.index(); }
  friend constexpr auto operator<=>(Mode a, Mode b) { return a.index() <=> b.index(); }
};

/// Input mode occupied by the photon entering from `arm`: photon 1 (omega1)
/// enters side1, photon 2 (omega2) enters side2.
constexpr Mode input_mode(Arm arm, Polarization pol) {
  return Mode{arm, pol, arm == Arm::side1 ? Frequency::omega1 : Frequency::omega2};
}

inline std::string to_string(Mode m) {
  return std::string("(") + to_string(m.arm) + "," + to_string(m.pol) + "," + to_string(m.freq) + ")";
}

/// Occupation numbers of the eight modes; total photon number is at most two.
class OccupationConfig {
 public:
  static constexpr int kMaxPhotons = 2;

  constexpr OccupationConfig() = default;

  OccupationConfig(std::initializer_list<std::pair<Mode, int>> occupied) {
    for (auto [mode, n] : occupied) {
      if (n < 0) throw std::invalid_argument("negative occupation");
      counts_[mode.index()] = static_cast<std::uint8_t>(counts_[mode.index()] + n);
    }
    if (total() > kMaxPhotons) throw std::invalid_argument("more than two photons");
  }

  static constexpr OccupationConfig vacuum() { return OccupationConfig{}; }

  int count(Mode m) const { return counts_[m.index()]; }

  int total() const {
    int n = 0;
    for (auto c : counts_) n += c;
    return n;
  }

  /// Configuration with one photon removed from `m`; requires count(m) >= 1.
  OccupationConfig lowered(Mode m) const {
    if (counts_[m.index()] == 0) throw std::logic_error("lowering an empty mode");
    OccupationConfig out = *this;
    --out.counts_[m.index()];
    return out;
  }

  OccupationConfig raised(Mode m) const {
    if (total() >= kMaxPhotons) throw std::invalid_argument("more than two photons");
    OccupationConfig out = *this;
    ++out.counts_[m.index()];
    return out;
  }

  /// Dense index in [0, kConfigCount): vacuum, then one-photon, then two-photon
  /// configurations (i <= j, row major over the upper triangle).
  std::size_t dense_index() const {
    std::array<std::size_t, 2> occupied{};
    std::size_t k = 0;
    for (std::size_t i = 0; i < Mode::count; ++i)
      for (int c = 0; c < counts_[i]; ++c) occupied[k++] = i;
    if (k == 0) return 0;
    if (k == 1) return 1 + occupied[0];
    const std::size_t i = occupied[0], j = occupied[1];
    return 1 + Mode::count + i * Mode::count - i * (i - 1) / 2 + (j - i);
  }

  friend bool operator==(const OccupationConfig&, const OccupationConfig&) = default;
  friend auto operator<=>(const OccupationConfig&, const OccupationConfig&) = default;

 private:
  std::array<std::uint8_t, Mode::count> counts_{};
};

/// 1 vacuum + 8 one-photon + 36 two-photon configurations.
inline constexpr std::size_t kConfigCount = 1 + Mode::count + Mode::count * (Mode::count + 1) / 2;

namespace detail {

inline const std::array<OccupationConfig, kConfigCount>& config_table() {
  static const auto table = [] {
    std::array<OccupationConfig, kConfigCount> t{};
    t[0] = OccupationConfig::vacuum();
    for (std::size_t i = 0; i < Mode::count; ++i) {
      const auto one = OccupationConfig::vacuum().raised(Mode::from_index(i));
      t[one.dense_index()] = one;
      for (std::size_t j = i; j < Mode::count; ++j) {
        const auto two = one.raised(Mode::from_index(j));
        t[two.dense_index()] = two;
      }
    }
    return t;
  }();
  return table;
}

}  // namespace detail

/// Pure state (or unnormalized vector) in the <=2-photon Fock space.
class TwoPhotonState {
 public:
  TwoPhotonState() { amps_.fill(Amplitude{}); }

  static TwoPhotonState zero() { return {}; }

  static TwoPhotonState basis(const OccupationConfig& cfg, Amplitude amp = 1.0) {
    TwoPhotonState s;
    s.amps_[cfg.dense_index()] = amp;
    return s;
  }

  Amplitude amplitude(const OccupationConfig& cfg) const { return amps_[cfg.dense_index()]; }
  Amplitude amplitude_at(std::size_t dense) const { return amps_.at(dense); }

  void add(const OccupationConfig& cfg, Amplitude amp) { amps_[cfg.dense_index()] += amp; }

  static const OccupationConfig& config_at(std::size_t dense) { return detail::config_table().at(dense); }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  bool is_normalized(double tol = kNormTolerance) const { return std::abs(norm_squared() - 1.0) <= tol; }

  /// Calls f(config, amplitude) for every nonzero amplitude in dense order.
  template <typename F>
  void for_each_nonzero(F&& f) const {
    for (std::size_t i = 0; i < kConfigCount; ++i)
      if (amps_[i] != Amplitude{}) f(config_at(i), amps_[i]);
  }

  /// Largest amplitude-wise deviation from `other`.
  double max_abs_difference(const TwoPhotonState& other) const {
    double d = 0.0;
    for (std::size_t i = 0; i < kConfigCount; ++i) d = std::max(d, std::abs(amps_[i] - other.amps_[i]));
    return d;
  }

  TwoPhotonState& operator+=(const TwoPhotonState& o) {
    for (std::size_t i = 0; i < kConfigCount; ++i) amps_[i] += o.amps_[i];
    return *this;
  }
  TwoPhotonState& operator*=(Amplitude c) {
    for (auto& a : amps_) a *= c;
    return *this;
  }
  friend TwoPhotonState operator+(TwoPhotonState a, const TwoPhotonState& b) { return a += b; }
  friend TwoPhotonState operator*(Amplitude c, TwoPhotonState s) { return s *= c; }

 private:
  std::array<Amplitude, kConfigCount> amps_;
};

/// Linear polarization angles (radians) of the two incident photons.
struct IncidentPolarization {
  double theta1p = 0.0;
  double theta2p = 0.0;
};

/// Photon 1 in side1 at omega1 polarized along theta1p, photon 2 in side2 at
/// omega2 polarized along theta2p.
inline TwoPhotonState product_state(IncidentPolarization inc) {
  if (!std::isfinite(inc.theta1p) || !std::isfinite(inc.theta2p))
    throw std::invalid_argument("incident polarization angles must be finite");
  const std::array<double, 2> p1{std::cos(inc.theta1p), std::sin(inc.theta1p)};
  const std::array<double, 2> p2{std::cos(inc.theta2p), std::sin(inc.theta2p)};
  TwoPhotonState s;
  for (auto a : {Polarization::x, Polarization::y})
    for (auto b : {Polarization::x, Polarization::y}) {
      const double c = p1[static_cast<int>(a)] * p2[static_cast<int>(b)];
      if (c != 0.0)
        s.add(OccupationConfig{{input_mode(Arm::side1, a), 1}, {input_mode(Arm::side2, b), 1}}, c);
    }
  return s;
}

/// |1_a>_1 |1_b>_2, one of the four products spanning the unpolarized mixture.
inline TwoPhotonState basis_product(Polarization a, Polarization b) {
  return TwoPhotonState::basis(OccupationConfig{{input_mode(Arm::side1, a), 1}, {input_mode(Arm::side2, b), 1}});
}

inline TwoPhotonState apply_annihilation(const TwoPhotonState& state, Mode mode) {
  TwoPhotonState out;
  state.for_each_nonzero([&](const OccupationConfig& cfg, Amplitude amp) {
    const int n = cfg.count(mode);
    if (n > 0) out.add(cfg.lowered(mode), amp * std::sqrt(static_cast<double>(n)));
  });
  return out;
}

/// Amplitude on the all-empty configuration.
inline Amplitude vacuum_amplitude(const TwoPhotonState& state) {
  return state.amplitude(OccupationConfig::vacuum());
}

/// <n_mode> = sum |c|^2 n over configurations (norm is not divided out).
inline double expected_occupancy(const TwoPhotonState& state, Mode mode) {
  double s = 0.0;
  state.for_each_nonzero([&](const OccupationConfig& cfg, Amplitude amp) { s += std::norm(amp) * cfg.count(mode); });
  return s;
}

/// Finite linear combination of products of at most two lowering operators.
class OperatorExpr {
 public:
  static constexpr std::size_t kMaxOrder = 2;

  struct Term {
    Amplitude coefficient{};
    std::array<Mode, kMaxOrder> modes{};
    std::size_t order = 0;

    /// Modes in written order, leftmost first; application is right to left.
    std::span<const Mode> lowered() const { return {modes.data(), order}; }
  };

  OperatorExpr() = default;

  static OperatorExpr identity(Amplitude c = 1.0) {
    OperatorExpr e;
    e.terms_.push_back(Term{c, {}, 0});
    return e;
  }

  static OperatorExpr lowering(Mode m, Amplitude c = 1.0) {
    OperatorExpr e;
    e.terms_.push_back(Term{c, {m, Mode{}}, 1});
    return e;
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  OperatorExpr& operator+=(const OperatorExpr& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    return *this;
  }
  friend OperatorExpr operator+(OperatorExpr a, const OperatorExpr& b) { return a += b; }

  friend OperatorExpr operator*(Amplitude c, OperatorExpr e) {
    for (auto& t : e.terms_) t.coefficient *= c;
    return e;
  }

  /// Operator product a*b (b acts first).
  friend OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) {
    OperatorExpr out;
    for (const auto& ta : a.terms_)
      for (const auto& tb : b.terms_) {
        if (ta.order + tb.order > kMaxOrder) throw std::invalid_argument("operator product exceeds two lowerings");
        Term t{ta.coefficient * tb.coefficient, {}, ta.order + tb.order};
        std::size_t k = 0;
        for (auto m : ta.lowered()) t.modes[k++] = m;
        for (auto m : tb.lowered()) t.modes[k++] = m;
        out.terms_.push_back(t);
      }
    return out;
  }

  /// Merges terms with equal mode content and drops exact zeros. Lowering
  /// operators commute, so modes within a term are sorted.
  std::map<std::vector<Mode>, Amplitude> canonical() const {
    std::map<std::vector<Mode>, Amplitude> out;
    for (const auto& t : terms_) {
      std::vector<Mode> key(t.lowered().begin(), t.lowered().end());
      std::sort(key.begin(), key.end());
      out[key] += t.coefficient;
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == Amplitude{}; });
    return out;
  }

  /// Coefficient of the canonical term lowering exactly `modes` (any order).
  Amplitude coefficient_of(std::vector<Mode> modes) const {
    std::sort(modes.begin(), modes.end());
    const auto c = canonical();
    const auto it = c.find(modes);
    return it == c.end() ? Amplitude{} : it->second;
  }

 private:
  std::vector<Term> terms_;
};

/// Largest coefficient-wise deviation between the canonical forms of a and b.
inline double max_abs_difference(const OperatorExpr& a, const OperatorExpr& b) {
  auto ca = a.canonical();
  const auto cb = b.canonical();
  for (const auto& [k, v] : cb) ca[k] -= v;
  double d = 0.0;
  for (const auto& [k, v] : ca) d = std::max(d, std::abs(v));
  return d;
}

inline TwoPhotonState apply_operator_expr(const TwoPhotonState& state, const OperatorExpr& expr) {
  TwoPhotonState out;
  for (const auto& term : expr.terms()) {
    if (term.coefficient == Amplitude{}) continue;
    TwoPhotonState s = state;
    const auto modes = term.lowered();
    for (auto it = modes.rbegin(); it != modes.rend(); ++it) s = apply_annihilation(s, *it);
    s *= term.coefficient;
    out += s;
  }
  return out;
}

}  // namespace spinterf
