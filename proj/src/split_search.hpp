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

#ifndef UNLEARN_SRC_SPLIT_SEARCH_HPP_
#define UNLEARN_SRC_SPLIT_SEARCH_HPP_

// Candidate-threshold generation and best-split selection shared by the
// removal-enabled and the naive forest. Everything here is a pure function of
// (tree seed, node path, rows at the node), which is what makes deletion
// reproduce a from-scratch fit exactly.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "unlearn/dataset.hpp"
#include "unlearn/forest.hpp"

namespace unlearn::detail {

struct SplitContext {
  const Dataset& data;
  const ForestParams& params;
  std::span<const std::uint32_t> features;
  std::uint64_t tree_seed;
};

// Reusable buffers; one per worker thread.
struct SplitScratch {
  std::vector<double> values;
  std::vector<std::uint8_t> labels;
  std::vector<double> sorted;
  std::vector<double> uniques;
  std::vector<std::uint32_t> multiplicity;
  std::vector<std::size_t> order;
  std::vector<std::uint64_t> keys;
  std::vector<double> thresholds;
  std::vector<std::uint32_t> left_n0;
  std::vector<std::uint32_t> left_n1;
  std::vector<double> gains;
};

std::uint64_t root_path(std::uint64_t tree_seed);
std::uint64_t child_path(std::uint64_t path, bool right);

// Features a tree may split on: a seeded sample of the columns, ascending.
std::vector<std::uint32_t> sample_tree_features(std::uint64_t tree_seed,
                                                std::size_t d,
                                                std::size_t k);

ClassCounts count_labels(const Dataset& data,
                         std::span<const std::uint32_t> positions);

// Node is a leaf regardless of its data: pure, too small to produce two
// children of min_samples_leaf, or at the depth cap.
bool is_terminal(const ForestParams& params, ClassCounts counts,
                 std::size_t depth);

// Appends the candidates of one feature, ascending by threshold. Among the
// adjacent distinct-value pairs at the node, keeps the
// thresholds_per_feature whose lower value has the smallest seeded hash.
void append_feature_candidates(const SplitContext& ctx,
                               std::span<const std::uint32_t> positions,
                               std::uint32_t feature, std::uint64_t path,
                               ClassCounts counts, SplitScratch& scratch,
                               std::vector<SplitCandidate>& out);

std::vector<SplitCandidate> node_candidates(
    const SplitContext& ctx, std::span<const std::uint32_t> positions,
    std::uint64_t path, ClassCounts counts, SplitScratch& scratch);

// Index of the eligible candidate with maximal Gini gain; ties go to the
// earliest candidate, i.e. lowest feature then lowest threshold. Eligible:
// both sides hold >= min_samples_leaf rows and gain > 0.
std::optional<std::uint32_t> best_candidate(
    const ForestParams& params, ClassCounts counts,
    std::span<const SplitCandidate> candidates, SplitScratch& scratch);

// Stable partition of positions by `feature <= threshold`.
void partition_rows(const Dataset& data,
                    std::span<const std::uint32_t> positions,
                    const SplitCandidate& split,
                    std::vector<std::uint32_t>& left,
                    std::vector<std::uint32_t>& right);

}  // namespace unlearn::detail

#endif  // UNLEARN_SRC_SPLIT_SEARCH_HPP_
