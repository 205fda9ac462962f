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

// Finite-count Monte Carlo of the coincidence experiment: draw one exclusive
// outcome per emitted pair, let each involved detector fire with the given
// efficiency, and count what was recorded.
//
// Random numbers come from a counter-based generator so that every pair's
// draws depend only on (seed, pair index). Runs are therefore reproducible and
// independent of how the pairs are split into shards.

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "spinterf/detection.hpp"

namespace spinterf {

/// Algorithm id of the generator below; part of the reproducibility contract.
inline constexpr std::string_view kRngAlgorithm = "splitmix64-counter/v1";

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// Uniform double in [0, 1) for draw `counter` of stream `seed`:
/// top 53 bits of mix(mix(seed) + (counter + 1) * gamma).
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t bits = splitmix64_mix(splitmix64_mix(seed) + (counter + 1) * kGoldenGamma);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Draws per emitted pair: outcome selection, then one per detector.
inline constexpr std::uint64_t kDrawsPerPair = 3;

struct RunConfig {
  std::uint64_t n_pairs = 1;
  double efficiency = 1.0;
  double window_ns = 5.0;  // recorded for the experiment description; jitter is not modeled
  std::uint64_t seed = 0;

  void validate() const {
    if (n_pairs < 1) throw std::invalid_argument("n_pairs must be at least 1");
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw std::invalid_argument("efficiency must lie in [0, 1]");
    if (!(window_ns > 0.0) || !std::isfinite(window_ns)) throw std::invalid_argument("window_ns must be positive");
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// One detector click. Both clicks of a recorded pair share the pair index and,
/// without arrival-time jitter, sit at the start of the window.
struct ClickRecord {
  DetectorId detector;
  std::uint64_t pair_index = 0;
  double time_in_window_ns = 0.0;
};

class CountTable {
 public:
  CountTable() = default;
  CountTable(std::vector<Outcome> outcomes, double efficiency)
      : outcomes_(std::move(outcomes)), counts_(outcomes_.size(), 0), efficiency_(efficiency) {}

  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t n_emitted() const { return n_emitted_; }
  double efficiency() const { return efficiency_; }

  std::uint64_t count(const Outcome& o) const {
    for (std::size_t i = 0; i < outcomes_.size(); ++i)
      if (outcomes_[i] == o) return counts_[i];
    return 0;
  }

  std::uint64_t total_recorded() const {
    std::uint64_t s = 0;
    for (auto c : counts_) s += c;
    return s;
  }

  void record(std::size_t outcome_index) { ++counts_.at(outcome_index); }
  void add_emitted(std::uint64_t n) { n_emitted_ += n; }

  /// Count addition; both tables must describe the same outcome set.
  CountTable& merge(const CountTable& other) {
    if (other.outcomes_ != outcomes_ || other.efficiency_ != efficiency_)
      throw std::invalid_argument("cannot merge count tables of different runs");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    n_emitted_ += other.n_emitted_;
    return *this;
  }

  friend bool operator==(const CountTable&, const CountTable&) = default;

 private:
  std::vector<Outcome> outcomes_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t n_emitted_ = 0;
  double efficiency_ = 1.0;
};

using ClickSink = std::function<void(const ClickRecord&, const ClickRecord&)>;

/// Simulates pairs [first_pair, first_pair + n_pairs) of the run `cfg`
/// (cfg.n_pairs is ignored here).
inline CountTable sample_shard(const OutcomeDistribution& dist, const RunConfig& cfg, std::uint64_t first_pair,
                               std::uint64_t n_pairs, const ClickSink& sink = {}) {
  cfg.validate();
  if (!dist.is_normalized()) throw std::invalid_argument("outcome distribution is not normalized");

  std::vector<Outcome> outcomes;
  std::vector<double> cumulative;
  double acc = 0.0;
  std::size_t last_nonzero = 0;
  for (const auto& [o, p] : dist.entries()) {
    acc += p;
    if (p > 0.0) last_nonzero = outcomes.size();
    outcomes.push_back(o);
    cumulative.push_back(acc);
  }

  CountTable table(outcomes, cfg.efficiency);
  for (std::uint64_t n = first_pair; n < first_pair + n_pairs; ++n) {
    const std::uint64_t base = n * kDrawsPerPair;
    const double u = counter_uniform(cfg.seed, base);
    std::size_t k = 0;
    while (k < cumulative.size() && !(u < cumulative[k])) ++k;
    if (k == cumulative.size()) k = last_nonzero;  // rounding tail
    const bool first_fires = counter_uniform(cfg.seed, base + 1) < cfg.efficiency;
    const bool second_fires = counter_uniform(cfg.seed, base + 2) < cfg.efficiency;
    if (first_fires && second_fires) {
      table.record(k);
      if (sink) {
        const auto d = outcomes[k].detectors();
        sink(ClickRecord{d[0], n, 0.0}, ClickRecord{d[1], n, 0.0});
      }
    }
  }
  table.add_emitted(n_pairs);
  return table;
}

inline CountTable sample_run(const OutcomeDistribution& dist, const RunConfig& cfg, const ClickSink& sink = {}) {
  return sample_shard(dist, cfg, 0, cfg.n_pairs, sink);
}

/// Splits the run into contiguous shards evaluated concurrently; the merged
/// table equals sample_run(dist, cfg) for any shard count.
inline CountTable sample_run_sharded(const OutcomeDistribution& dist, const RunConfig& cfg, unsigned shards) {
  cfg.validate();
  if (shards == 0) throw std::invalid_argument("shard count must be positive");
  const std::uint64_t per = cfg.n_pairs / shards, extra = cfg.n_pairs % shards;
  std::vector<std::future<CountTable>> parts;
  std::uint64_t first = 0;
  for (unsigned s = 0; s < shards; ++s) {
    const std::uint64_t n = per + (s < extra ? 1 : 0);
    parts.push_back(std::async(std::launch::async, [&dist, &cfg, first, n] { return sample_shard(dist, cfg, first, n); }));
    first += n;
  }
  CountTable merged = parts.front().get();
  for (std::size_t s = 1; s < parts.size(); ++s) merged.merge(parts[s].get());
  return merged;
}

struct Estimate {
  double probability = 0.0;
  double std_error = 0.0;
  bool lower_bound_only = false;  // no counts: the estimate bounds p from below only
};

/// Efficiency correction for an outcome requiring `arity` detectors to fire.
inline double efficiency_correction(double efficiency, int arity) { return std::pow(efficiency, arity); }

/// Estimate of summed probability for a group of counts, corrected for
/// two-detector efficiency, with a binomial standard error.
inline Estimate estimate_counts(std::uint64_t count, std::uint64_t n_emitted, double efficiency, int arity = 2) {
  if (n_emitted == 0) throw std::invalid_argument("no pairs emitted");
  if (count == 0) return {0.0, 0.0, true};
  const double n = static_cast<double>(n_emitted);
  const double f = static_cast<double>(count) / n;
  const double corr = efficiency_correction(efficiency, arity);
  return {f / corr, std::sqrt(f * (1.0 - f) / n) / corr, false};
}

inline std::vector<std::pair<Outcome, Estimate>> estimate(const CountTable& ct) {
  if (ct.n_emitted() == 0) throw std::invalid_argument("no pairs emitted");
  std::vector<std::pair<Outcome, Estimate>> out;
  for (std::size_t i = 0; i < ct.outcomes().size(); ++i)
    out.emplace_back(ct.outcomes()[i], estimate_counts(ct.counts()[i], ct.n_emitted(), ct.efficiency()));
  return out;
}

inline Estimate estimate_kind(const CountTable& ct, OutcomeKind kind) {
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < ct.outcomes().size(); ++i)
    if (ct.outcomes()[i].kind == kind) c += ct.counts()[i];
  return estimate_counts(c, ct.n_emitted(), ct.efficiency());
}

}  // namespace spinterf
