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

#ifndef UNLEARN_BENCH_HPP_
#define UNLEARN_BENCH_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unlearn/dataset.hpp"
#include "unlearn/forest.hpp"
#include "unlearn/sisa.hpp"

namespace unlearn::bench {

enum class Strategy { kNaive, kSisaDare };

std::string_view strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

// Monotonic-clock stopwatch. Only the callable passed to time() is measured.
class Stopwatch {
 public:
  using Clock = std::chrono::steady_clock;

  void start() { start_ = Clock::now(); }
  // Seconds since start().
  double stop() {
    elapsed_ = std::chrono::duration<double>(Clock::now() - start_).count();
    return elapsed_;
  }
  double elapsed() const { return elapsed_; }

  template <typename F>
  decltype(auto) time(F&& body) {
    start();
    if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
      body();
      stop();
    } else {
      auto out = body();
      stop();
      return out;
    }
  }

 private:
  Clock::time_point start_ = Clock::now();
  double elapsed_ = 0.0;
};

// Fraction of positions where prediction == label. Throws ArgumentError on
// empty or mismatched input.
double consistency(std::span<const std::uint8_t> predictions,
                   std::span<const std::uint8_t> labels);
// Fraction of positions where the two prediction vectors match.
double agreement(std::span<const std::uint8_t> a,
                 std::span<const std::uint8_t> b);
// Percent change (after - before) / before * 100, evaluated as
// (after * 100 - before * 100) / before. nullopt when before == 0.
std::optional<double> percent_change(double before, double after);

struct TrialConfig {
  Strategy strategy = Strategy::kNaive;
  std::size_t target_size = 10;
  double delete_percentage = 0.25;
  std::uint64_t seed = 0;
  std::size_t repeat = 0;
  ForestParams forest;
  std::size_t n_shards = 2;
  std::size_t n_slices = 1;
};

// floor(target_size * delete_percentage) == 0: the trial deletes nothing.
bool is_degenerate(const TrialConfig& cfg);

struct TrialResult {
  TrialConfig config;
  double consistency_before = 0.0;
  double consistency_after = 0.0;
  std::optional<double> percent_change;
  double computational_cost_seconds = 0.0;
  std::size_t n_deleted = 0;
  double agreement_after = 0.0;
  std::uint64_t test_set_hash = 0;
  bool degenerate = false;
  // sisa_dare only: consistency of an ensemble fitted from scratch on the
  // reduced training set with the same seed (measured outside the timer).
  std::optional<double> scratch_consistency_after;
};

// Constituent configuration of the sisa_dare arm.
SisaConfig sisa_config(const TrialConfig& cfg);
// Rows a trial forgets: floor(train.rows() * delete_percentage) ids drawn by
// delete_n_elements with the trial's deletion seed. Both arms use it.
Deletion deletion_plan(const TrialConfig& cfg, const Dataset& train);

// Both arms expect `train` already reduced to the trial's target size and
// delete floor(train.rows() * delete_percentage) rows chosen by
// delete_n_elements with the same seed, so the two arms forget the same rows.
TrialResult run_naive_trial(const TrialConfig& cfg, const Dataset& train,
                            const Dataset& test);
TrialResult run_sisa_trial(const TrialConfig& cfg, const Dataset& train,
                           const Dataset& test);
TrialResult run_trial(const TrialConfig& cfg, const Dataset& train,
                      const Dataset& test);

// Invariant checks on a finished trial; one message per violation.
std::vector<std::string> check_result(const TrialResult& r);

struct GridSpec {
  std::vector<Strategy> strategies{Strategy::kNaive, Strategy::kSisaDare};
  std::vector<std::size_t> target_sizes{10, 100, 1000};
  std::vector<double> delete_percentages{0.25, 0.50, 0.75};
  std::size_t repeats = 1;
  std::uint64_t master_seed = 0;
  ForestParams forest;
  std::size_t n_shards = 2;
  std::size_t n_slices = 1;
  std::size_t test_ceiling = 500;
  // Runs trials concurrently. Timing numbers are then meaningless; use only
  // for correctness runs.
  bool parallel = false;
};

struct TrialFailure {
  TrialConfig config;
  std::string message;
};

struct GridOutcome {
  std::vector<TrialResult> results;
  std::vector<TrialFailure> failures;
  std::vector<std::string> violations;

  bool ok() const { return failures.empty() && violations.empty(); }
};

struct GridCallbacks {
  std::function<void(const TrialResult&)> on_result;
  std::function<void(const TrialFailure&)> on_failure;
};

// Trial list in execution order: repeat, target size, percentage, strategy.
std::vector<TrialConfig> expand_grid(const GridSpec& spec);

// Reduced train/test pair a grid trial runs on.
std::pair<Dataset, Dataset> trial_data(const GridSpec& spec,
                                       const TrialConfig& cfg,
                                       const Dataset& train,
                                       const Dataset& test);

// Runs every trial of the grid against the master train/test split. Each
// trial re-derives its reduced training set from `train`, so trials never
// see each other's deletions. Failures are recorded and the grid continues.
GridOutcome run_grid(const GridSpec& spec, const Dataset& train,
                     const Dataset& test, const GridCallbacks& callbacks = {});

// Median-cost monotonicity summary for the sisa_dare arm.
struct TrendReport {
  struct Step {
    std::string description;
    double from = 0.0;
    double to = 0.0;
  };
  std::vector<Step> comparisons;
  std::vector<Step> inversions;
  // Inversions no larger than `noise` relative to the earlier value.
  std::size_t tolerated = 0;
  bool within_tolerance = false;
  // Mean naive cost / mean sisa_dare cost over the grid (informational).
  std::optional<double> naive_over_sisa_cost;
};

TrendReport cost_trend(std::span<const TrialResult> results,
                       double noise = 0.10, std::size_t max_inversions = 1);

}  // namespace unlearn::bench

#endif  // UNLEARN_BENCH_HPP_
