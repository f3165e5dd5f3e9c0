/*
 * Copyright 2026 The Unlearn Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "unlearn/bench.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <tuple>
#include <variant>

#include "unlearn/error.hpp"
#include "unlearn/hash.hpp"

namespace unlearn::bench {
namespace {

constexpr std::uint64_t kModelSalt = 0x4d6f64656cULL;
constexpr std::uint64_t kDeleteSalt = 0x44656cULL;
constexpr std::uint64_t kReduceSalt = 0x526564ULL;

std::uint64_t model_seed(const TrialConfig& cfg) {
  return hash_combine(cfg.seed, kModelSalt);
}
std::uint64_t delete_seed(const TrialConfig& cfg) {
  return hash_combine(cfg.seed, kDeleteSalt);
}

void check_lengths(std::span<const std::uint8_t> a,
                   std::span<const std::uint8_t> b) {
  if (a.empty()) throw ArgumentError("empty prediction vector");
  if (a.size() != b.size()) {
    throw ArgumentError("length mismatch: " + std::to_string(a.size()) +
                        " vs " + std::to_string(b.size()));
  }
}

double fraction_equal(std::span<const std::uint8_t> a,
                      std::span<const std::uint8_t> b) {
  check_lengths(a, b);
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

TrialResult begin(const TrialConfig& cfg, const Dataset& train,
                  const Dataset& test) {
  if (train.empty()) throw ArgumentError("trial: empty training set");
  if (test.empty()) throw ArgumentError("trial: empty test set");
  TrialResult r;
  r.config = cfg;
  r.n_deleted = deletion_count(train.rows(), cfg.delete_percentage);
  r.degenerate = r.n_deleted == 0;
  r.test_set_hash = test.content_hash();
  return r;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string_view strategy_name(Strategy s) {
  return s == Strategy::kNaive ? "naive" : "sisa_dare";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name == "naive") return Strategy::kNaive;
  if (name == "sisa_dare") return Strategy::kSisaDare;
  return std::nullopt;
}

SisaConfig sisa_config(const TrialConfig& cfg) {
  SisaConfig s;
  s.n_shards = cfg.n_shards;
  s.n_slices = cfg.n_slices;
  s.constituent_params = cfg.forest;
  s.seed = model_seed(cfg);
  s.constituent = ConstituentKind::kDare;
  return s;
}

Deletion deletion_plan(const TrialConfig& cfg, const Dataset& train) {
  return delete_n_elements(
      train, deletion_count(train.rows(), cfg.delete_percentage),
      delete_seed(cfg));
}

std::pair<Dataset, Dataset> trial_data(const GridSpec& spec,
                                       const TrialConfig& cfg,
                                       const Dataset& train,
                                       const Dataset& test) {
  // Every trial of one repeat sees the same reduction, whatever its size.
  const auto seed = hash_combine(spec.master_seed, kReduceSalt, cfg.repeat);
  return reduce_to_target_size(train, test, cfg.target_size, seed,
                               spec.test_ceiling);
}

double consistency(std::span<const std::uint8_t> predictions,
                   std::span<const std::uint8_t> labels) {
  return fraction_equal(predictions, labels);
}

double agreement(std::span<const std::uint8_t> a,
                 std::span<const std::uint8_t> b) {
  return fraction_equal(a, b);
}

std::optional<double> percent_change(double before, double after) {
  if (before == 0.0) return std::nullopt;
  return (after * 100.0 - before * 100.0) / before;
}

bool is_degenerate(const TrialConfig& cfg) {
  return deletion_count(cfg.target_size, cfg.delete_percentage) == 0;
}

TrialResult run_naive_trial(const TrialConfig& cfg, const Dataset& train,
                            const Dataset& test) {
  TrialResult r = begin(cfg, train, test);
  const auto seed = model_seed(cfg);

  auto baseline = NaiveForest::fit(train, cfg.forest, seed);
  const auto before = baseline.predict(test);
  r.consistency_before = consistency(before, test.labels());

  Stopwatch watch;
  auto after = watch.time([&] {
    auto reduced = deletion_plan(cfg, train);
    auto retrained = NaiveForest::fit(reduced.remaining, cfg.forest, seed);
    return retrained.predict(test);
  });
  r.computational_cost_seconds = watch.elapsed();
  r.consistency_after = consistency(after, test.labels());
  r.agreement_after = agreement(before, after);
  r.percent_change = percent_change(r.consistency_before, r.consistency_after);
  return r;
}

TrialResult run_sisa_trial(const TrialConfig& cfg, const Dataset& train,
                           const Dataset& test) {
  TrialResult r = begin(cfg, train, test);
  const auto scfg = sisa_config(cfg);

  auto model = sisa_fit(train, scfg);
  const auto before = model.predict(test);
  r.consistency_before = consistency(before, test.labels());

  Deletion plan;
  Stopwatch watch;
  auto after = watch.time([&] {
    plan = deletion_plan(cfg, train);
    for (auto id : plan.deleted_row_ids) sisa_delete(model, id);
    return model.predict(test);
  });
  r.computational_cost_seconds = watch.elapsed();
  r.consistency_after = consistency(after, test.labels());
  r.agreement_after = agreement(before, after);
  r.percent_change = percent_change(r.consistency_before, r.consistency_after);

  if (plan.remaining.rows() >= scfg.n_shards) {
    auto scratch = sisa_fit(plan.remaining, scfg);
    r.scratch_consistency_after =
        consistency(scratch.predict(test), test.labels());
  }
  return r;
}

TrialResult run_trial(const TrialConfig& cfg, const Dataset& train,
                      const Dataset& test) {
  return cfg.strategy == Strategy::kNaive ? run_naive_trial(cfg, train, test)
                                          : run_sisa_trial(cfg, train, test);
}

std::vector<std::string> check_result(const TrialResult& r) {
  std::vector<std::string> errors;
  const std::string where =
      std::string(strategy_name(r.config.strategy)) + " n=" +
      std::to_string(r.config.target_size) + " pct=" +
      std::to_string(r.config.delete_percentage) + ": ";
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(r.consistency_before) || !in_unit(r.consistency_after) ||
      !in_unit(r.agreement_after)) {
    errors.push_back(where + "metric outside [0,1]");
  }
  if (!(r.computational_cost_seconds >= 0.0)) {
    errors.push_back(where + "negative computational cost");
  }
  const auto expect = percent_change(r.consistency_before, r.consistency_after);
  if (expect.has_value() != r.percent_change.has_value() ||
      (expect && *expect != *r.percent_change)) {
    errors.push_back(where + "percent_change disagrees with its consistencies");
  }
  if (r.config.strategy == Strategy::kSisaDare && r.scratch_consistency_after &&
      *r.scratch_consistency_after != r.consistency_after) {
    errors.push_back(where +
                     "unlearned model differs from scratch retrain (consistency " +
                     std::to_string(r.consistency_after) + " vs " +
                     std::to_string(*r.scratch_consistency_after) + ")");
  }
  return errors;
}

std::vector<TrialConfig> expand_grid(const GridSpec& spec) {
  std::vector<TrialConfig> out;
  for (std::size_t rep = 0; rep < spec.repeats; ++rep) {
    for (auto size : spec.target_sizes) {
      for (auto pct : spec.delete_percentages) {
        for (auto strategy : spec.strategies) {
          TrialConfig c;
          c.strategy = strategy;
          c.target_size = size;
          c.delete_percentage = pct;
          c.repeat = rep;
          c.seed = hash_combine(spec.master_seed, size, canonical_bits(pct), rep);
          c.forest = spec.forest;
          c.n_shards = spec.n_shards;
          c.n_slices = spec.n_slices;
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

GridOutcome run_grid(const GridSpec& spec, const Dataset& train,
                     const Dataset& test, const GridCallbacks& callbacks) {
  GridOutcome outcome;
  const auto trials = expand_grid(spec);

  using Attempt = std::variant<TrialResult, TrialFailure>;
  auto attempt = [&](const TrialConfig& cfg) -> Attempt {
    try {
      if (!(cfg.delete_percentage > 0.0 && cfg.delete_percentage < 1.0)) {
        throw ArgumentError("delete_percentage must be in (0,1)");
      }
      auto [tr, te] = trial_data(spec, cfg, train, test);
      return run_trial(cfg, tr, te);
    } catch (const std::exception& e) {
      return TrialFailure{cfg, e.what()};
    }
  };
  auto record = [&](Attempt a) {
    if (auto* f = std::get_if<TrialFailure>(&a)) {
      if (callbacks.on_failure) callbacks.on_failure(*f);
      outcome.failures.push_back(std::move(*f));
      return;
    }
    auto& r = std::get<TrialResult>(a);
    for (auto& e : check_result(r)) outcome.violations.push_back(std::move(e));
    if (callbacks.on_result) callbacks.on_result(r);
    outcome.results.push_back(std::move(r));
  };

  if (spec.parallel) {
    std::vector<std::future<Attempt>> pending;
    pending.reserve(trials.size());
    for (const auto& cfg : trials) {
      pending.push_back(std::async(std::launch::async, attempt, cfg));
    }
    for (auto& f : pending) record(f.get());
  } else {
    for (const auto& cfg : trials) record(attempt(cfg));
  }

  // Both arms of a (size, pct, repeat) cell must have seen the same test set.
  std::map<std::tuple<std::size_t, std::uint64_t, std::size_t>, std::uint64_t>
      test_hash;
  for (const auto& r : outcome.results) {
    auto key = std::make_tuple(r.config.target_size,
                               canonical_bits(r.config.delete_percentage),
                               r.config.repeat);
    auto [it, fresh] = test_hash.emplace(key, r.test_set_hash);
    if (!fresh && it->second != r.test_set_hash) {
      outcome.violations.push_back("arms of n=" +
                                   std::to_string(r.config.target_size) +
                                   " used different test sets");
    }
  }
  return outcome;
}

TrendReport cost_trend(std::span<const TrialResult> results, double noise,
                       std::size_t max_inversions) {
  TrendReport report;
  std::map<std::pair<std::size_t, double>, std::vector<double>> sisa;
  double naive_sum = 0.0, sisa_sum = 0.0;
  std::size_t naive_n = 0, sisa_n = 0;
  for (const auto& r : results) {
    if (r.config.strategy == Strategy::kSisaDare) {
      sisa[{r.config.target_size, r.config.delete_percentage}].push_back(
          r.computational_cost_seconds);
      sisa_sum += r.computational_cost_seconds;
      ++sisa_n;
    } else {
      naive_sum += r.computational_cost_seconds;
      ++naive_n;
    }
  }
  if (naive_n && sisa_n && sisa_sum > 0.0) {
    report.naive_over_sisa_cost = (naive_sum / static_cast<double>(naive_n)) /
                                  (sisa_sum / static_cast<double>(sisa_n));
  }

  std::vector<std::size_t> sizes;
  std::vector<double> pcts;
  std::map<std::pair<std::size_t, double>, double> med;
  for (auto& [key, costs] : sisa) {
    med[key] = median(costs);
    sizes.push_back(key.first);
    pcts.push_back(key.second);
  }
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  std::sort(pcts.begin(), pcts.end());
  pcts.erase(std::unique(pcts.begin(), pcts.end()), pcts.end());

  auto compare = [&](std::pair<std::size_t, double> a,
                     std::pair<std::size_t, double> b) {
    if (!med.contains(a) || !med.contains(b)) return;
    TrendReport::Step step{
        "n=" + std::to_string(a.first) + ",pct=" + std::to_string(a.second) +
            " -> n=" + std::to_string(b.first) +
            ",pct=" + std::to_string(b.second),
        med[a], med[b]};
    report.comparisons.push_back(step);
    if (step.to < step.from) {
      if (step.to >= step.from * (1.0 - noise)) ++report.tolerated;
      report.inversions.push_back(step);
    }
  };
  for (auto n : sizes) {
    for (std::size_t i = 1; i < pcts.size(); ++i) {
      compare({n, pcts[i - 1]}, {n, pcts[i]});
    }
  }
  for (auto p : pcts) {
    for (std::size_t i = 1; i < sizes.size(); ++i) {
      compare({sizes[i - 1], p}, {sizes[i], p});
    }
  }
  report.within_tolerance = report.inversions.size() <= max_inversions &&
                            report.tolerated == report.inversions.size();
  return report;
}

}  // namespace unlearn::bench
