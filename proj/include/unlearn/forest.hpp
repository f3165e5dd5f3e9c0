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

#ifndef UNLEARN_FOREST_HPP_
#define UNLEARN_FOREST_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "unlearn/dataset.hpp"
#include "unlearn/gini.hpp"

namespace unlearn {

struct ForestParams {
  std::size_t n_trees = 10;
  std::size_t max_depth = 10;
  // 0 selects ceil(sqrt(d)).
  std::size_t max_features_per_tree = 0;
  std::size_t thresholds_per_feature = 8;
  std::size_t min_samples_leaf = 1;

  bool operator==(const ForestParams&) const = default;
};

// Throws ArgumentError on zero trees / thresholds / min_samples_leaf.
void validate(const ForestParams& params);
std::size_t features_per_tree(const ForestParams& params, std::size_t d);

// One cached split "feature <= threshold". The threshold is the midpoint of
// two adjacent distinct values present at the node (lower_value,
// upper_value); their multiplicities let a deletion detect when the pair
// stops being adjacent without rescanning the node's rows.
struct SplitCandidate {
  std::uint32_t feature = 0;
  double threshold = 0.0;
  double lower_value = 0.0;
  double upper_value = 0.0;
  std::uint32_t lower_count = 0;
  std::uint32_t upper_count = 0;
  ClassCounts left;
  ClassCounts right;

  bool operator==(const SplitCandidate&) const = default;
};

struct NodeStats {
  ClassCounts counts;
  // Ordered by (feature, threshold). Empty for nodes that can never split
  // again (pure, too small, at the depth cap, or no distinct values).
  std::vector<SplitCandidate> candidates;

  bool operator==(const NodeStats&) const = default;
};

// Internal node when `chosen` is set (index into stats.candidates), leaf
// otherwise. Leaves hold the sorted ids of the training rows that reach them.
struct DareNode {
  NodeStats stats;
  std::optional<std::uint32_t> chosen;
  std::unique_ptr<DareNode> left;
  std::unique_ptr<DareNode> right;
  std::vector<std::uint64_t> row_ids;

  DareNode() = default;
  DareNode(const DareNode& other);
  DareNode& operator=(const DareNode& other);
  DareNode(DareNode&&) noexcept = default;
  DareNode& operator=(DareNode&&) noexcept = default;

  bool is_leaf() const { return !chosen.has_value(); }
  const SplitCandidate& split() const { return stats.candidates[*chosen]; }

  friend bool operator==(const DareNode& a, const DareNode& b);
};

struct DareTree {
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> features;  // ascending
  DareNode root;

  bool operator==(const DareTree&) const = default;
  std::size_t node_count() const;
  std::size_t depth() const;
};

struct DeletionReport {
  std::size_t nodes_updated = 0;
  std::size_t subtrees_retrained = 0;
  std::size_t features_refreshed = 0;
  std::size_t rows_touched = 0;

  DeletionReport& operator+=(const DeletionReport& o);
  bool operator==(const DeletionReport&) const = default;
};

class NaiveForest;
namespace testing {
struct ForestBackdoor;
}

// Removal-enabled random forest. Every node caches the label counts of its
// candidate splits, so deleting a training row walks one root-to-leaf path
// per tree, updates counts, and rebuilds only subtrees whose best split
// changed. The model after delete_row(x) is structurally identical to fit()
// on the training set without x, with the same seed.
//
// Single writer: delete_row must not run concurrently with any other call.
// Const members are safe to call concurrently between mutations.
class DareForest {
 public:
  // Throws ArgumentError for an empty training set or invalid params.
  // `n_jobs` > 1 trains trees on that many threads; the result does not
  // depend on it.
  static DareForest fit(const Dataset& train, const ForestParams& params,
                        std::uint64_t seed, std::size_t n_jobs = 1);

  // Mean over trees of the reached leaf's positive fraction n1 / (n0 + n1).
  // Throws ArgumentError on a feature-count mismatch, StateError once every
  // training row has been deleted.
  std::vector<double> predict_proba(const Dataset& x) const;
  std::vector<std::uint8_t> predict(const Dataset& x) const;

  // Throws ArgumentError when the id was never trained on or is already
  // deleted.
  DeletionReport delete_row(std::uint64_t row_id);

  bool contains(std::uint64_t row_id) const;
  std::size_t live_rows() const { return live_; }
  std::vector<std::uint64_t> live_row_ids() const;
  // Training rows still in the model, in their original order.
  Dataset live_training_set() const;

  const ForestParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t num_features() const { return train_.cols(); }
  const std::vector<DareTree>& trees() const { return trees_; }

  void set_jobs(std::size_t n_jobs) { n_jobs_ = n_jobs == 0 ? 1 : n_jobs; }

  // Trees, params and seed equal; the retained raw rows are not compared.
  bool same_structure(const DareForest& other) const;

  // Count conservation, leaf partition of the live rows, and argmax validity
  // at every node. Returns one message per violation.
  std::vector<std::string> check_invariants() const;

  std::vector<std::byte> serialize() const;
  static DareForest deserialize(std::span<const std::byte> bytes);

 private:
  friend struct testing::ForestBackdoor;

  DareForest(Dataset train, ForestParams params, std::uint64_t seed);
  void index_rows();

  Dataset train_;
  ForestParams params_;
  std::uint64_t seed_ = 0;
  std::vector<DareTree> trees_;
  std::vector<std::uint8_t> alive_;
  std::unordered_map<std::uint64_t, std::uint32_t> position_;
  std::size_t live_ = 0;
  std::size_t n_jobs_ = 1;
};

// Compact flat-array forest with no deletion support; the retrain-from-scratch
// baseline. Built by the same split search as DareForest, so for equal data
// and seed the two predict identically.
class NaiveForest {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    ClassCounts counts;

    bool operator==(const Node&) const = default;
  };
  struct Tree {
    std::vector<std::uint32_t> features;
    std::vector<Node> nodes;  // nodes[0] is the root

    bool operator==(const Tree&) const = default;
  };

  static NaiveForest fit(const Dataset& train, const ForestParams& params,
                         std::uint64_t seed, std::size_t n_jobs = 1);

  std::vector<double> predict_proba(const Dataset& x) const;
  std::vector<std::uint8_t> predict(const Dataset& x) const;

  const ForestParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t num_features() const { return cols_; }
  std::size_t trained_rows() const { return rows_; }
  const std::vector<Tree>& trees() const { return trees_; }

  std::vector<std::byte> serialize() const;
  static NaiveForest deserialize(std::span<const std::byte> bytes);

  bool operator==(const NaiveForest&) const = default;

 private:
  ForestParams params_;
  std::uint64_t seed_ = 0;
  std::size_t cols_ = 0;
  std::size_t rows_ = 0;
  std::vector<Tree> trees_;
};

// Fit from scratch on `train` minus `deleted_ids`. Throws ArgumentError for
// ids not in `train`.
NaiveForest naive_retrain(const Dataset& train,
                          std::span<const std::uint64_t> deleted_ids,
                          const ForestParams& params, std::uint64_t seed);

// 1 where p >= 0.5 (a tie predicts the positive class).
std::vector<std::uint8_t> threshold_predictions(std::span<const double> proba);

// Seed of tree `t` in a forest seeded with `seed`.
std::uint64_t tree_seed(std::uint64_t seed, std::size_t t);

namespace testing {
// Test hook: reaches into a forest to damage it so negative-control checks
// can be exercised. Not for production use.
struct ForestBackdoor {
  // Adds one to the root label-0 count of tree 0.
  static void corrupt_root_counts(DareForest& forest);
};
}  // namespace testing

}  // namespace unlearn

#endif  // UNLEARN_FOREST_HPP_
