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

#include "split_search.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "unlearn/hash.hpp"
#include "unlearn/simd/kernels.hpp"

namespace unlearn::detail {

std::uint64_t root_path(std::uint64_t tree_seed) {
  return hash_combine(tree_seed, 0x526f6f74ULL);
}

std::uint64_t child_path(std::uint64_t path, bool right) {
  return hash_combine(path, right ? 2 : 1);
}

std::vector<std::uint32_t> sample_tree_features(std::uint64_t tree_seed,
                                                std::size_t d,
                                                std::size_t k) {
  std::vector<std::uint32_t> cols(d);
  std::iota(cols.begin(), cols.end(), 0u);
  k = std::min(k, d);
  std::mt19937_64 rng(hash_combine(tree_seed, 0x46656174ULL));
  for (std::size_t i = 0; i < k && i + 1 < d; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, d - 1);
    std::swap(cols[i], cols[pick(rng)]);
  }
  cols.resize(k);
  std::sort(cols.begin(), cols.end());
  return cols;
}

ClassCounts count_labels(const Dataset& data,
                         std::span<const std::uint32_t> positions) {
  ClassCounts c;
  for (auto p : positions) ++c[data.label(p)];
  return c;
}

bool is_terminal(const ForestParams& params, ClassCounts counts,
                 std::size_t depth) {
  return depth >= params.max_depth || counts.pure() ||
         counts.total() < 2 * params.min_samples_leaf;
}

void append_feature_candidates(const SplitContext& ctx,
                               std::span<const std::uint32_t> positions,
                               std::uint32_t feature, std::uint64_t path,
                               ClassCounts counts, SplitScratch& s,
                               std::vector<SplitCandidate>& out) {
  const std::size_t m = positions.size();
  s.values.resize(m);
  s.labels.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    s.values[i] = ctx.data.at(positions[i], feature);
    s.labels[i] = ctx.data.label(positions[i]);
  }
  s.sorted.assign(s.values.begin(), s.values.end());
  std::sort(s.sorted.begin(), s.sorted.end());

  s.uniques.clear();
  s.multiplicity.clear();
  for (double v : s.sorted) {
    if (!s.uniques.empty() && s.uniques.back() == v) {
      ++s.multiplicity.back();
    } else {
      s.uniques.push_back(v);
      s.multiplicity.push_back(1);
    }
  }
  if (s.uniques.size() < 2) return;

  // Rank every possible lower endpoint (all but the largest value).
  const std::size_t pairs = s.uniques.size() - 1;
  const std::uint64_t base = hash_combine(ctx.tree_seed, path, feature);
  s.keys.resize(pairs);
  s.order.resize(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    s.keys[i] = hash_combine(base, canonical_bits(s.uniques[i]));
    s.order[i] = i;
  }
  const std::size_t keep = std::min(pairs, ctx.params.thresholds_per_feature);
  auto by_key = [&](std::size_t a, std::size_t b) {
    return s.keys[a] != s.keys[b] ? s.keys[a] < s.keys[b] : a < b;
  };
  if (keep < pairs) {
    std::nth_element(s.order.begin(), s.order.begin() + keep, s.order.end(),
                     by_key);
    s.order.resize(keep);
  }
  std::sort(s.order.begin(), s.order.end());

  s.thresholds.resize(keep);
  const std::size_t first = out.size();
  for (std::size_t k = 0; k < keep; ++k) {
    const std::size_t i = s.order[k];
    const double lo = s.uniques[i];
    const double hi = s.uniques[i + 1];
    double mid = lo * 0.5 + hi * 0.5;
    if (!(mid >= lo && mid < hi)) mid = lo;
    s.thresholds[k] = mid;
    SplitCandidate c;
    c.feature = feature;
    c.threshold = mid;
    c.lower_value = lo;
    c.upper_value = hi;
    c.lower_count = s.multiplicity[i];
    c.upper_count = s.multiplicity[i + 1];
    out.push_back(c);
  }

  s.left_n0.resize(keep);
  s.left_n1.resize(keep);
  simd::count_le_by_label(s.values, s.labels, s.thresholds, s.left_n0,
                          s.left_n1);
  for (std::size_t k = 0; k < keep; ++k) {
    SplitCandidate& c = out[first + k];
    c.left = {s.left_n0[k], s.left_n1[k]};
    c.right = {counts.n0 - c.left.n0, counts.n1 - c.left.n1};
  }
}

std::vector<SplitCandidate> node_candidates(
    const SplitContext& ctx, std::span<const std::uint32_t> positions,
    std::uint64_t path, ClassCounts counts, SplitScratch& scratch) {
  std::vector<SplitCandidate> out;
  for (auto f : ctx.features) {
    append_feature_candidates(ctx, positions, f, path, counts, scratch, out);
  }
  return out;
}

std::optional<std::uint32_t> best_candidate(
    const ForestParams& params, ClassCounts counts,
    std::span<const SplitCandidate> candidates, SplitScratch& s) {
  const std::size_t n = candidates.size();
  if (n == 0 || counts.total() == 0) return std::nullopt;
  s.left_n0.resize(n);
  s.left_n1.resize(n);
  s.gains.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    s.left_n0[k] = candidates[k].left.n0;
    s.left_n1[k] = candidates[k].left.n1;
  }
  simd::gini_gains(counts.n0, counts.n1, s.left_n0, s.left_n1, s.gains);

  std::optional<std::uint32_t> best;
  double best_gain = 0.0;
  const auto min_leaf = static_cast<std::uint32_t>(params.min_samples_leaf);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& c = candidates[k];
    if (c.left.total() < min_leaf || c.right.total() < min_leaf) continue;
    if (s.gains[k] > best_gain) {
      best_gain = s.gains[k];
      best = static_cast<std::uint32_t>(k);
    }
  }
  return best;
}

void partition_rows(const Dataset& data,
                    std::span<const std::uint32_t> positions,
                    const SplitCandidate& split,
                    std::vector<std::uint32_t>& left,
                    std::vector<std::uint32_t>& right) {
  left.clear();
  right.clear();
  for (auto p : positions) {
    (data.at(p, split.feature) <= split.threshold ? left : right).push_back(p);
  }
}

}  // namespace unlearn::detail
