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

// Configuration, parameter sweeps and the engine-vs-closed-form comparison
// report behind the command-line tool.
//
// Angles and phases are degrees in configuration files and CSV output and
// radians everywhere else.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "spinterf/closed_form.hpp"
#include "spinterf/detection.hpp"
#include "spinterf/sampler.hpp"

namespace spinterf::harness {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Invalid configuration; `field` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { coincidence, no_polarizers, same_arm, double_trigger, unpolarized, classical, full_distribution, mc_run };
enum class InputKind { polarized, unpolarized };
enum class ArmSelection { side1, side2, both };

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

namespace detail {

template <typename E>
struct EnumNames;

template <>
struct EnumNames<Experiment> {
  static constexpr std::array<std::pair<Experiment, std::string_view>, 8> values{{
      {Experiment::coincidence, "coincidence"},
      {Experiment::no_polarizers, "no_polarizers"},
      {Experiment::same_arm, "same_arm"},
      {Experiment::double_trigger, "double_trigger"},
      {Experiment::unpolarized, "unpolarized"},
      {Experiment::classical, "classical"},
      {Experiment::full_distribution, "full_distribution"},
      {Experiment::mc_run, "mc_run"},
  }};
};

template <>
struct EnumNames<InputKind> {
  static constexpr std::array<std::pair<InputKind, std::string_view>, 2> values{{
      {InputKind::polarized, "polarized"},
      {InputKind::unpolarized, "unpolarized"},
  }};
};

template <>
struct EnumNames<ArmSelection> {
  static constexpr std::array<std::pair<ArmSelection, std::string_view>, 3> values{{
      {ArmSelection::side1, "side1"},
      {ArmSelection::side2, "side2"},
      {ArmSelection::both, "both"},
  }};
};

}  // namespace detail

template <typename E>
std::string_view name_of(E e) {
  for (auto [v, n] : detail::EnumNames<E>::values)
    if (v == e) return n;
  throw std::logic_error("unnamed enum value");
}

template <typename E>
std::optional<E> parse_enum(std::string_view s) {
  for (auto [v, n] : detail::EnumNames<E>::values)
    if (n == s) return v;
  return std::nullopt;
}

struct SweepAxis {
  std::string parameter;
  double start = 0.0;
  double stop = 0.0;
  int steps = 1;

  /// Evenly spaced from start to stop inclusive; a single step yields start.
  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(std::max(steps, 0)));
    for (int i = 0; i < steps; ++i)
      v.push_back(steps == 1 ? start : start + (stop - start) * static_cast<double>(i) / (steps - 1));
    return v;
  }

  friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

struct McSettings {
  std::uint64_t n_pairs = 100000;
  double efficiency = 1.0;
  double window_ns = 5.0;
  std::uint64_t seed = 1;

  friend bool operator==(const McSettings&, const McSettings&) = default;
};

/// Everything needed to evaluate one experiment at one parameter point, plus
/// an optional sweep axis. Angles and phases in degrees.
struct SweepConfig {
  int schema_version = kSchemaVersion;
  Experiment experiment = Experiment::coincidence;
  InputKind input = InputKind::polarized;
  ArmSelection arm = ArmSelection::side2;
  double theta1p = 0.0;
  double theta2p = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta = 0.0;  // double-trigger analyzer
  double phi = 0.0;
  double psi = 0.0;
  double tx = std::numbers::sqrt2 / 2;
  double ty = std::numbers::sqrt2 / 2;
  std::optional<SweepAxis> sweep;
  McSettings mc;
  std::string output;  // empty: standard output

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

namespace detail {

struct ParamSlot {
  std::string_view name;
  std::string_view group;  // JSON object holding it
  double SweepConfig::*member;
};

inline constexpr std::array<ParamSlot, 9> kParams{{
    {"theta1p", "angles_deg", &SweepConfig::theta1p},
    {"theta2p", "angles_deg", &SweepConfig::theta2p},
    {"theta1", "angles_deg", &SweepConfig::theta1},
    {"theta2", "angles_deg", &SweepConfig::theta2},
    {"theta", "angles_deg", &SweepConfig::theta},
    {"phi", "phases_deg", &SweepConfig::phi},
    {"psi", "phases_deg", &SweepConfig::psi},
    {"tx", "splitter", &SweepConfig::tx},
    {"ty", "splitter", &SweepConfig::ty},
}};

inline const ParamSlot* find_param(std::string_view name) {
  for (const auto& p : kParams)
    if (p.name == name) return &p;
  return nullptr;
}

inline double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

inline std::string require_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

inline std::uint64_t require_unsigned(const json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
    throw ConfigError(path, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

template <typename E>
E require_enum(const json& j, const std::string& path) {
  const auto s = require_string(j, path);
  const auto v = parse_enum<E>(s);
  if (!v) {
    std::string allowed;
    for (auto [e, n] : EnumNames<E>::values) allowed += (allowed.empty() ? "" : "|") + std::string(n);
    throw ConfigError(path, "unknown value '" + s + "', expected " + allowed);
  }
  return *v;
}

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<std::string_view> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
}

}  // namespace detail

/// Parameters that each experiment can sweep.
inline std::set<std::string> sweepable_parameters(Experiment e, InputKind input) {
  std::set<std::string> p;
  const bool pol = input == InputKind::polarized;
  switch (e) {
    case Experiment::coincidence:
      p = {"theta1", "theta2", "phi", "tx", "ty"};
      break;
    case Experiment::no_polarizers:
      p = {"phi", "tx", "ty"};
      break;
    case Experiment::same_arm:
      p = {"theta1", "theta2", "psi", "tx", "ty"};
      break;
    case Experiment::double_trigger:
      p = {"theta", "tx", "ty"};
      break;
    case Experiment::unpolarized:
      return {"theta1", "theta2", "phi", "tx", "ty"};
    case Experiment::classical:
      return {"theta1", "theta2", "phi"};
    case Experiment::full_distribution:
    case Experiment::mc_run:
      p = {"theta1", "theta2", "phi", "psi", "tx", "ty"};
      break;
  }
  if (pol) p.insert({"theta1p", "theta2p"});
  return p;
}

inline void validate(const SweepConfig& cfg) {
  if (cfg.schema_version != kSchemaVersion)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(cfg.schema_version));
  for (const auto& p : detail::kParams)
    if (!std::isfinite(cfg.*p.member)) throw ConfigError(std::string(p.group) + "." + std::string(p.name), "must be finite");
  if (!(cfg.tx >= 0.0 && cfg.tx <= 1.0)) throw ConfigError("splitter.tx", "must lie in [0, 1]");
  if (!(cfg.ty >= 0.0 && cfg.ty <= 1.0)) throw ConfigError("splitter.ty", "must lie in [0, 1]");
  if (cfg.sweep) {
    const auto& s = *cfg.sweep;
    if (s.steps < 1) throw ConfigError("sweep.steps", "must be at least 1");
    if (!std::isfinite(s.start)) throw ConfigError("sweep.start", "must be finite");
    if (!std::isfinite(s.stop)) throw ConfigError("sweep.stop", "must be finite");
    const auto allowed = sweepable_parameters(cfg.experiment, cfg.input);
    if (!allowed.contains(s.parameter))
      throw ConfigError("sweep.parameter", "'" + s.parameter + "' is not a parameter of experiment " +
                                               std::string(name_of(cfg.experiment)));
    if ((s.parameter == "tx" || s.parameter == "ty") &&
        (std::min(s.start, s.stop) < 0.0 || std::max(s.start, s.stop) > 1.0))
      throw ConfigError("sweep", "transmission amplitudes must stay in [0, 1]");
  }
  if (cfg.mc.n_pairs < 1) throw ConfigError("mc.n_pairs", "must be at least 1");
  if (!(cfg.mc.efficiency >= 0.0 && cfg.mc.efficiency <= 1.0)) throw ConfigError("mc.efficiency", "must lie in [0, 1]");
  if (!(cfg.mc.window_ns > 0.0)) throw ConfigError("mc.window_ns", "must be positive");
}

inline json to_json(const SweepConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["experiment"] = name_of(cfg.experiment);
  j["input"] = name_of(cfg.input);
  j["arm"] = name_of(cfg.arm);
  for (const auto& p : detail::kParams) j[std::string(p.group)][std::string(p.name)] = cfg.*p.member;
  if (cfg.sweep)
    j["sweep"] = {{"parameter", cfg.sweep->parameter},
                  {"start", cfg.sweep->start},
                  {"stop", cfg.sweep->stop},
                  {"steps", cfg.sweep->steps}};
  j["mc"] = {{"n_pairs", cfg.mc.n_pairs},
             {"efficiency", cfg.mc.efficiency},
             {"window_ns", cfg.mc.window_ns},
             {"seed", cfg.mc.seed}};
  j["output"] = cfg.output;
  return j;
}

/// Builds a validated config from a JSON document. Missing entries keep their
/// defaults; unknown keys are errors.
inline SweepConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
  using namespace detail;
  reject_unknown(doc, "",
                 {"schema_version", "experiment", "input", "arm", "angles_deg", "phases_deg", "splitter", "sweep", "mc",
                  "output", "compare"});
  SweepConfig cfg;
  if (doc.contains("schema_version")) {
    if (!doc["schema_version"].is_number_integer()) throw ConfigError("schema_version", "expected an integer");
    cfg.schema_version = doc["schema_version"].get<int>();
  }
  if (doc.contains("experiment")) cfg.experiment = require_enum<Experiment>(doc["experiment"], "experiment");
  if (doc.contains("input")) cfg.input = require_enum<InputKind>(doc["input"], "input");
  if (doc.contains("arm")) cfg.arm = require_enum<ArmSelection>(doc["arm"], "arm");
  if (cfg.experiment == Experiment::unpolarized) cfg.input = InputKind::unpolarized;

  for (std::string_view group : {"angles_deg", "phases_deg", "splitter"}) {
    const std::string g(group);
    if (!doc.contains(g)) continue;
    const auto& obj = doc[g];
    if (!obj.is_object()) throw ConfigError(g, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const auto* slot = find_param(it.key());
      const std::string path = g + "." + it.key();
      if (!slot || slot->group != group) throw ConfigError(path, "unknown key");
      cfg.*slot->member = require_number(*it, path);
    }
  }

  if (doc.contains("sweep") && !doc["sweep"].is_null()) {
    const auto& s = doc["sweep"];
    if (!s.is_object()) throw ConfigError("sweep", "expected an object");
    reject_unknown(s, "sweep", {"parameter", "start", "stop", "steps"});
    SweepAxis axis;
    if (!s.contains("parameter")) throw ConfigError("sweep.parameter", "required");
    axis.parameter = require_string(s["parameter"], "sweep.parameter");
    if (s.contains("start")) axis.start = require_number(s["start"], "sweep.start");
    if (s.contains("stop")) axis.stop = require_number(s["stop"], "sweep.stop");
    if (s.contains("steps")) {
      if (!s["steps"].is_number_integer()) throw ConfigError("sweep.steps", "expected an integer");
      axis.steps = s["steps"].get<int>();
    }
    cfg.sweep = axis;
  }

  if (doc.contains("mc")) {
    const auto& m = doc["mc"];
    if (!m.is_object()) throw ConfigError("mc", "expected an object");
    reject_unknown(m, "mc", {"n_pairs", "efficiency", "window_ns", "seed"});
    if (m.contains("n_pairs")) cfg.mc.n_pairs = require_unsigned(m["n_pairs"], "mc.n_pairs");
    if (m.contains("efficiency")) cfg.mc.efficiency = require_number(m["efficiency"], "mc.efficiency");
    if (m.contains("window_ns")) cfg.mc.window_ns = require_number(m["window_ns"], "mc.window_ns");
    if (m.contains("seed")) cfg.mc.seed = require_unsigned(m["seed"], "mc.seed");
  }
  if (doc.contains("output")) cfg.output = require_string(doc["output"], "output");

  validate(cfg);
  return cfg;
}

/// Applies one `key=value` override to a JSON document. Keys are dotted paths
/// (`phases_deg.phi`, `sweep.steps`); a bare parameter name such as `phi`
/// resolves to its group. Values are parsed as JSON, falling back to a string.
inline void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) throw ConfigError(std::string(assignment), "expected key=value");
  std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  if (key.find('.') == std::string::npos)
    if (const auto* slot = detail::find_param(key)) key = std::string(slot->group) + "." + key;

  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty()) throw ConfigError(key, "empty path component");
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError(key, "path crosses a non-object value");
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    pos = dot + 1;
  }
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError(path, "not valid JSON");
  return doc;
}

/// 15 significant digits, '.' separator regardless of locale.
inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 15);
  return std::string(buf.data(), res.ptr);
}

// --- evaluation -------------------------------------------------------------

/// Parameter point in internal units.
struct PointParams {
  double theta1p, theta2p, theta1, theta2, theta, phi, psi;
  BeamSplitter bs;
};

inline PointParams to_point(const SweepConfig& cfg) {
  return {deg_to_rad(cfg.theta1p), deg_to_rad(cfg.theta2p), deg_to_rad(cfg.theta1), deg_to_rad(cfg.theta2),
          deg_to_rad(cfg.theta),   deg_to_rad(cfg.phi),     deg_to_rad(cfg.psi),    BeamSplitter::lossless(cfg.tx, cfg.ty)};
}

struct Row {
  double swept = 0.0;
  double analytic = 0.0;
  std::optional<double> engine;
  std::vector<double> extra;
};

inline std::vector<std::string> extra_columns(Experiment e) {
  switch (e) {
    case Experiment::full_distribution:
      return {"analytic_opposite", "engine_opposite", "analytic_same", "engine_same"};
    case Experiment::mc_run:
      return {"mc_estimate", "mc_std_error", "mc_recorded"};
    default:
      return {};
  }
}

namespace detail {

// Closed-form route for the unpolarized mixture: average a polarized closed
// form over the four x/y incident products.
template <typename F>
double basis_average(F&& f) {
  const double h = std::numbers::pi / 2;
  return (f(0.0, 0.0) + f(0.0, h) + f(h, 0.0) + f(h, h)) / 4.0;
}

template <typename F>
double closed_form_input(const SweepConfig& cfg, const PointParams& p, F&& f) {
  return cfg.input == InputKind::unpolarized ? basis_average(f) : f(p.theta1p, p.theta2p);
}

inline std::vector<Arm> arms_of(ArmSelection a) {
  if (a == ArmSelection::side1) return {Arm::side1};
  if (a == ArmSelection::side2) return {Arm::side2};
  return {Arm::side1, Arm::side2};
}

struct FullTotals {
  double opposite = 0.0;
  double same = 0.0;
};

inline FullTotals closed_form_full(double t1p, double t2p, const PointParams& p) {
  namespace cf = closed_form;
  const double h = std::numbers::pi / 2;
  FullTotals t;
  for (double a : {0.0, h})
    for (double b : {0.0, h}) {
      t.opposite += cf::p_coincidence(t1p, t2p, p.theta1 + a, p.theta2 + b, p.bs, p.phi);
      for (auto arm : {Arm::side1, Arm::side2}) t.same += cf::p_same_arm(arm, t1p, t2p, p.theta1 + a, p.theta2 + b, p.bs, p.psi);
    }
  return t;
}

}  // namespace detail

inline InputSpec input_of(const SweepConfig& cfg, const PointParams& p) {
  if (cfg.input == InputKind::unpolarized) return unpolarized();
  return polarized(p.theta1p, p.theta2p);
}

/// Evaluates one point of the configured experiment.
inline Row evaluate_point(const SweepConfig& cfg) {
  namespace cf = closed_form;
  const PointParams p = to_point(cfg);
  const InputSpec input = input_of(cfg, p);
  const PhaseGeometry geom{p.phi, p.psi};
  Row row;
  switch (cfg.experiment) {
    case Experiment::coincidence:
    case Experiment::unpolarized:
      row.analytic = cfg.input == InputKind::unpolarized
                         ? cf::p_unpolarized(p.theta1, p.theta2, p.bs, p.phi)
                         : cf::p_coincidence(p.theta1p, p.theta2p, p.theta1, p.theta2, p.bs, p.phi);
      row.engine = coincidence_probability(input, p.theta1, p.theta2, p.bs, geom);
      break;
    case Experiment::no_polarizers:
      row.analytic = detail::closed_form_input(cfg, p, [&](double a, double b) {
        return p.bs.is_balanced() ? cf::p_no_polarizers(a, b, p.phi) : cf::p_no_polarizers(a, b, p.bs, p.phi);
      });
      row.engine = coincidence_no_polarizers(input, p.bs, geom);
      break;
    case Experiment::same_arm: {
      double a = 0.0, e = 0.0;
      for (auto arm : detail::arms_of(cfg.arm)) {
        a += detail::closed_form_input(cfg, p, [&](double t1p, double t2p) {
          return cf::p_same_arm(arm, t1p, t2p, p.theta1, p.theta2, p.bs, p.psi);
        });
        e += same_arm_probability(input, arm, p.theta1, p.theta2, p.bs, geom);
      }
      row.analytic = a;
      row.engine = e;
      break;
    }
    case Experiment::double_trigger: {
      double a = 0.0, e = 0.0;
      for (auto arm : detail::arms_of(cfg.arm)) {
        a += detail::closed_form_input(
            cfg, p, [&](double t1p, double t2p) { return cf::p_double_trigger(arm, t1p, t2p, p.theta, p.bs); });
        e += double_trigger_probability(input, arm, p.theta, p.bs);
      }
      row.analytic = a;
      row.engine = e;
      break;
    }
    case Experiment::classical:
      row.analytic = cf::p_classical(p.theta1, p.theta2, p.phi);
      break;
    case Experiment::full_distribution: {
      const auto t = detail::closed_form_input(cfg, p, [&](double a, double b) {
        return detail::closed_form_full(a, b, p).opposite;
      });
      const auto s = detail::closed_form_input(cfg, p, [&](double a, double b) {
        return detail::closed_form_full(a, b, p).same;
      });
      const auto dist = full_outcome_distribution(input, p.theta1, p.theta2, p.bs, geom);
      row.analytic = t + s;
      row.engine = dist.total();
      row.extra = {t, dist.opposite_arm_total(), s, dist.same_arm_total()};
      break;
    }
    case Experiment::mc_run: {
      const auto dist = full_outcome_distribution(input, p.theta1, p.theta2, p.bs, geom);
      row.analytic = detail::closed_form_input(cfg, p, [&](double a, double b) {
        return detail::closed_form_full(a, b, p).opposite;
      });
      row.engine = dist.opposite_arm_total();
      const auto ct = sample_run(dist, RunConfig{cfg.mc.n_pairs, cfg.mc.efficiency, cfg.mc.window_ns, cfg.mc.seed});
      const auto est = estimate_kind(ct, OutcomeKind::opposite_arms);
      row.extra = {est.probability, est.std_error, static_cast<double>(ct.total_recorded())};
      break;
    }
  }
  return row;
}

/// CSV document: header, then one row per sweep point in sweep order.
inline std::string run_sweep(const SweepConfig& cfg) {
  validate(cfg);
  const std::string swept = cfg.sweep ? cfg.sweep->parameter : "point";
  std::ostringstream out;
  out << swept << ",analytic,engine,abs_deviation";
  for (const auto& c : extra_columns(cfg.experiment)) out << ',' << c;
  out << '\n';

  const std::vector<double> values = cfg.sweep ? cfg.sweep->values() : std::vector<double>{0.0};
  const auto* slot = cfg.sweep ? detail::find_param(cfg.sweep->parameter) : nullptr;
  for (double v : values) {
    SweepConfig point = cfg;
    if (slot) point.*slot->member = v;
    Row row = evaluate_point(point);
    row.swept = v;
    out << format_number(row.swept) << ',' << format_number(row.analytic) << ',';
    if (row.engine) out << format_number(*row.engine) << ',' << format_number(std::abs(*row.engine - row.analytic));
    else out << ',';
    for (double x : row.extra) out << ',' << format_number(x);
    out << '\n';
  }
  return out.str();
}

// --- comparison report ------------------------------------------------------

struct CompareConfig {
  double angle_step_deg = 15.0;  // grid over [0, 180)
  std::vector<double> phases_deg{0.0, 90.0, 180.0, 120.0};
  std::vector<std::pair<double, double>> splitters{
      {std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2}, {0.9, 0.6}, {1.0, 1.0}, {0.0, 0.0}};
  double tolerance = 1e-12;
  /// Constant of the balanced unpolarized coincidence form; exposed so a test
  /// fixture can perturb it.
  double unpolarized_balanced_prefactor = 1.0 / 8.0;

  friend bool operator==(const CompareConfig&, const CompareConfig&) = default;
};

inline CompareConfig parse_compare(const json& doc) {
  using namespace detail;
  CompareConfig c;
  if (!doc.is_object() || !doc.contains("compare")) return c;
  const auto& j = doc["compare"];
  if (!j.is_object()) throw ConfigError("compare", "expected an object");
  reject_unknown(j, "compare", {"angle_step_deg", "phases_deg", "splitters", "tolerance", "constants"});
  if (j.contains("angle_step_deg")) {
    c.angle_step_deg = require_number(j["angle_step_deg"], "compare.angle_step_deg");
    if (!(c.angle_step_deg > 0.0)) throw ConfigError("compare.angle_step_deg", "must be positive");
  }
  if (j.contains("phases_deg")) {
    if (!j["phases_deg"].is_array()) throw ConfigError("compare.phases_deg", "expected an array");
    c.phases_deg.clear();
    for (std::size_t i = 0; i < j["phases_deg"].size(); ++i)
      c.phases_deg.push_back(require_number(j["phases_deg"][i], "compare.phases_deg[" + std::to_string(i) + "]"));
  }
  if (j.contains("splitters")) {
    if (!j["splitters"].is_array()) throw ConfigError("compare.splitters", "expected an array");
    c.splitters.clear();
    for (std::size_t i = 0; i < j["splitters"].size(); ++i) {
      const std::string path = "compare.splitters[" + std::to_string(i) + "]";
      const auto& s = j["splitters"][i];
      if (!s.is_object()) throw ConfigError(path, "expected {\"tx\":..,\"ty\":..}");
      reject_unknown(s, path, {"tx", "ty"});
      const double tx = require_number(s.value("tx", json()), path + ".tx");
      const double ty = require_number(s.value("ty", json()), path + ".ty");
      if (tx < 0 || tx > 1 || ty < 0 || ty > 1) throw ConfigError(path, "amplitudes must lie in [0, 1]");
      c.splitters.emplace_back(tx, ty);
    }
  }
  if (j.contains("tolerance")) c.tolerance = require_number(j["tolerance"], "compare.tolerance");
  if (j.contains("constants")) {
    const auto& k = j["constants"];
    if (!k.is_object()) throw ConfigError("compare.constants", "expected an object");
    reject_unknown(k, "compare.constants", {"unpolarized_balanced_prefactor"});
    if (k.contains("unpolarized_balanced_prefactor"))
      c.unpolarized_balanced_prefactor =
          require_number(k["unpolarized_balanced_prefactor"], "compare.constants.unpolarized_balanced_prefactor");
  }
  return c;
}

struct FormulaStat {
  std::string name;
  std::size_t points = 0;
  double max_abs_deviation = 0.0;
  double sum_abs_deviation = 0.0;

  double mean_abs_deviation() const { return points ? sum_abs_deviation / static_cast<double>(points) : 0.0; }
  void add(double engine, double analytic) {
    const double d = std::abs(engine - analytic);
    ++points;
    sum_abs_deviation += d;
    // NaN counts as a failure
    if (!(d <= max_abs_deviation)) max_abs_deviation = std::isnan(d) ? INFINITY : d;
  }
};

struct CompareReport {
  std::vector<FormulaStat> formulas;
  double tolerance = 1e-12;

  bool passed() const {
    return std::all_of(formulas.begin(), formulas.end(),
                       [&](const FormulaStat& f) { return f.max_abs_deviation <= tolerance; });
  }
  std::size_t total_points() const {
    std::size_t n = 0;
    for (const auto& f : formulas) n += f.points;
    return n;
  }

  std::string to_text() const {
    std::ostringstream out;
    out << "formula,points,max_abs_deviation,mean_abs_deviation,status\n";
    for (const auto& f : formulas)
      out << f.name << ',' << f.points << ',' << format_number(f.max_abs_deviation) << ','
          << format_number(f.mean_abs_deviation()) << ',' << (f.max_abs_deviation <= tolerance ? "pass" : "FAIL")
          << '\n';
    out << "# tolerance " << format_number(tolerance) << ", " << total_points() << " points, "
        << (passed() ? "all formulas pass" : "deviation above tolerance") << '\n';
    return out.str();
  }
};

/// Engine against closed forms over the full grid: four incident/analyzer
/// angles, every configured phase (used for phi and psi) and splitter.
/// Balanced-only closed forms are checked on the balanced splitter at the
/// phase they are written for.
inline CompareReport compare_report(const CompareConfig& cc) {
  namespace cf = closed_form;
  constexpr double pi = std::numbers::pi;
  std::vector<double> angles;
  for (int i = 0; i * cc.angle_step_deg < 180.0 - 1e-9; ++i) angles.push_back(deg_to_rad(i * cc.angle_step_deg));
  std::vector<double> phases;
  for (double d : cc.phases_deg) phases.push_back(deg_to_rad(d));
  std::vector<BeamSplitter> splitters;
  for (auto [tx, ty] : cc.splitters) splitters.push_back(BeamSplitter::lossless(tx, ty));

  std::map<std::string, FormulaStat> stats;
  const std::vector<std::string> order{"coincidence",          "coincidence_in_phase",   "coincidence_antiphase",
                                       "coincidence_quadrature", "no_polarizers",          "same_arm",
                                       "same_arm_balanced",     "same_arm_no_polarizers", "double_trigger",
                                       "unpolarized",           "unpolarized_balanced",   "unpolarized_in_phase",
                                       "unpolarized_same_arm"};
  for (const auto& n : order) stats[n].name = n;

  for (const auto& bs : splitters) {
    const bool is_balanced = bs.is_balanced();
    for (double t1p : angles)
      for (double t2p : angles) {
        const InputSpec in = polarized(t1p, t2p);
        for (double phase : phases) {
          const PhaseGeometry opp{phase, 0.0};
          const PhaseGeometry same{0.0, phase};
          stats["no_polarizers"].add(coincidence_no_polarizers(in, bs, opp), cf::p_no_polarizers(t1p, t2p, bs, phase));
          if (is_balanced)
            stats["no_polarizers"].add(coincidence_no_polarizers(in, bs, opp), cf::p_no_polarizers(t1p, t2p, phase));
          for (double t1 : angles)
            for (double t2 : angles) {
              stats["coincidence"].add(coincidence_probability(in, t1, t2, bs, opp),
                                       cf::p_coincidence(t1p, t2p, t1, t2, bs, phase));
              for (auto arm : {Arm::side1, Arm::side2})
                stats["same_arm"].add(same_arm_probability(in, arm, t1, t2, bs, same),
                                      cf::p_same_arm(arm, t1p, t2p, t1, t2, bs, phase));
            }
        }
        for (double t : angles)
          for (auto arm : {Arm::side1, Arm::side2}) {
            const double e = double_trigger_probability(in, arm, t, bs);
            stats["double_trigger"].add(e, cf::p_double_trigger(arm, t1p, t2p, t, bs));
            if (is_balanced) stats["double_trigger"].add(e, cf::p_double_trigger(t1p, t2p, t, 0.0));
          }
        if (is_balanced) {
          stats["same_arm_no_polarizers"].add(same_arm_no_polarizers(in, bs, {}), cf::p_same_arm_no_polarizers(t1p, t2p));
          for (double t1 : angles)
            for (double t2 : angles) {
              stats["coincidence_in_phase"].add(coincidence_probability(in, t1, t2, bs, {0.0, 0.0}),
                                                cf::p_coincidence_in_phase(t1p, t2p, t1, t2));
              stats["coincidence_antiphase"].add(coincidence_probability(in, t1, t2, bs, {pi, 0.0}),
                                                 cf::p_coincidence_antiphase(t1p, t2p, t1, t2));
              stats["coincidence_quadrature"].add(coincidence_probability(in, t1, t2, bs, {pi / 2, 0.0}),
                                                  cf::p_coincidence_quadrature(t1p, t2p, t1, t2));
              for (auto arm : {Arm::side1, Arm::side2})
                stats["same_arm_balanced"].add(same_arm_probability(in, arm, t1, t2, bs, {}),
                                               cf::p_same_arm_balanced(t1p, t2p, t1, t2));
            }
        }
      }

    const InputSpec unpol = unpolarized();
    for (double t1 : angles)
      for (double t2 : angles) {
        for (double phase : phases) {
          const double e = coincidence_probability(unpol, t1, t2, bs, {phase, 0.0});
          stats["unpolarized"].add(e, cf::p_unpolarized(t1, t2, bs, phase));
          if (is_balanced)
            stats["unpolarized_balanced"].add(e, cf::p_unpolarized_balanced(t1, t2, phase, cc.unpolarized_balanced_prefactor));
        }
        if (is_balanced) {
          stats["unpolarized_in_phase"].add(coincidence_probability(unpol, t1, t2, bs, {}), cf::p_unpolarized_in_phase(t1, t2));
          stats["unpolarized_same_arm"].add(same_arm_both_arms(unpol, t1, t2, bs, {}), cf::p_unpolarized_same_arm(t1, t2));
        }
      }
  }

  CompareReport report;
  report.tolerance = cc.tolerance;
  for (const auto& n : order) report.formulas.push_back(stats[n]);
  return report;
}

}  // namespace spinterf::harness
