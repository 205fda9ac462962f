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

// Command-line front end: parameter sweeps to CSV, the engine-vs-closed-form
// comparison report, and Monte Carlo count runs.
//
// Exit codes: 0 success, 1 validation failure, 2 comparison failure,
// 3 I/O failure.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spinterf/experiment.hpp"

namespace {

using namespace spinterf;
using namespace spinterf::harness;

enum ExitCode : int { kOk = 0, kValidation = 1, kComparison = 2, kIo = 3 };

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  bool print_config = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON configuration file");
  cmd->add_option("--out", o.out_path, "output path (default: standard output)");
  cmd->add_option("--seed", o.seed, "Monte Carlo seed (overrides mc.seed)");
  cmd->add_option("--set", o.overrides, "override a configuration entry, key=value (repeatable)")->take_all();
  cmd->add_flag("--print-config", o.print_config, "print the resolved configuration and exit");
}

json resolve_document(const CommonOptions& o) {
  json doc = o.config_path.empty() ? json::object() : load_json_file(o.config_path);
  for (const auto& s : o.overrides) apply_override(doc, s);
  if (o.seed) doc["mc"]["seed"] = *o.seed;
  if (!o.out_path.empty()) doc["output"] = o.out_path;
  return doc;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing to standard output");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing " + path);
}

int run_sweep_command(const CommonOptions& o) {
  const auto cfg = parse_config(resolve_document(o));
  if (o.print_config) {
    std::cout << to_json(cfg).dump(2) << '\n';
    return kOk;
  }
  write_output(cfg.output, run_sweep(cfg));
  return kOk;
}

int run_compare_command(const CommonOptions& o) {
  const json doc = resolve_document(o);
  const auto cc = parse_compare(doc);
  const auto report = compare_report(cc);
  write_output(doc.value("output", std::string()), report.to_text());
  if (!report.passed()) std::cerr << "compare: engine and closed forms disagree beyond tolerance\n";
  return report.passed() ? kOk : kComparison;
}

std::string mc_table(const SweepConfig& cfg, const std::string& events_path) {
  const PointParams p = to_point(cfg);
  const auto dist = full_outcome_distribution(input_of(cfg, p), p.theta1, p.theta2, p.bs, PhaseGeometry{p.phi, p.psi});
  const RunConfig run{cfg.mc.n_pairs, cfg.mc.efficiency, cfg.mc.window_ns, cfg.mc.seed};

  std::ofstream events;
  ClickSink sink;
  if (!events_path.empty()) {
    events.open(events_path, std::ios::binary);
    if (!events) throw IoError("cannot open " + events_path + " for writing");
    events << "pair_index,detector,time_in_window_ns\n";
    sink = [&events](const ClickRecord& a, const ClickRecord& b) {
      for (const auto* c : {&a, &b})
        events << c->pair_index << ',' << to_string(c->detector) << ',' << format_number(c->time_in_window_ns) << '\n';
    };
  }
  const auto ct = sample_run(dist, run, sink);
  if (events.is_open()) {
    events.close();
    if (!events) throw IoError("failed writing " + events_path);
  }

  std::ostringstream out;
  out << "outcome,probability,count,estimate,std_error,lower_bound_only\n";
  const auto est = estimate(ct);
  for (std::size_t i = 0; i < est.size(); ++i) {
    const auto& [o, e] = est[i];
    out << o.label() << ',' << format_number(dist.probability(o)) << ',' << ct.counts()[i] << ','
        << format_number(e.probability) << ',' << format_number(e.std_error) << ',' << (e.lower_bound_only ? 1 : 0)
        << '\n';
  }
  for (auto [kind, name, exact] : {std::tuple{OutcomeKind::opposite_arms, "opposite_arms", dist.opposite_arm_total()},
                                   std::tuple{OutcomeKind::same_arm, "same_arm", dist.same_arm_total()}}) {
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < ct.outcomes().size(); ++i)
      if (ct.outcomes()[i].kind == kind) c += ct.counts()[i];
    const auto e = estimate_kind(ct, kind);
    out << name << ',' << format_number(exact) << ',' << c << ',' << format_number(e.probability) << ','
        << format_number(e.std_error) << ',' << (e.lower_bound_only ? 1 : 0) << '\n';
  }
  return out.str();
}

int run_mc_command(const CommonOptions& o, const std::string& events_path) {
  json doc = resolve_document(o);
  if (!doc.contains("experiment")) doc["experiment"] = "mc_run";
  const auto cfg = parse_config(doc);
  if (o.print_config) {
    std::cout << to_json(cfg).dump(2) << '\n';
    return kOk;
  }
  write_output(cfg.output, mc_table(cfg, events_path));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Two-photon beam-splitter interference: coincidence, same-arm and unpolarized detection probabilities.\n"
      "Angles and phases are given in degrees in configuration files, --set overrides and CSV output."};
  app.require_subcommand(1);

  CommonOptions sweep_opts, compare_opts, mc_opts;
  std::string events_path;
  auto* sweep = app.add_subcommand("sweep", "evaluate an experiment over a sweep axis and write CSV");
  add_common(sweep, sweep_opts);
  auto* compare = app.add_subcommand("compare", "check the operator engine against every closed form");
  add_common(compare, compare_opts);
  auto* mc = app.add_subcommand("mc", "simulate a finite-count run and estimate outcome probabilities");
  add_common(mc, mc_opts);
  mc->add_option("--events", events_path, "also write every recorded click to this CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*sweep) return run_sweep_command(sweep_opts);
    if (*compare) return run_compare_command(compare_opts);
    if (*mc) return run_mc_command(mc_opts, events_path);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kValidation;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}
