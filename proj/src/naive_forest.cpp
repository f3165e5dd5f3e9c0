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

#include <algorithm>
#include <thread>

#include "split_search.hpp"
#include "unlearn/error.hpp"
#include "unlearn/forest.hpp"
#include "unlearn/simd/kernels.hpp"

namespace unlearn {
namespace {

using detail::SplitContext;
using detail::SplitScratch;

class FlatBuilder {
 public:
  FlatBuilder(SplitContext ctx, std::vector<NaiveForest::Node>& nodes)
      : ctx_(ctx), nodes_(nodes) {}

  std::uint32_t build(const std::vector<std::uint32_t>& positions,
                      std::size_t depth, std::uint64_t path) {
    const auto index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    const ClassCounts counts = detail::count_labels(ctx_.data, positions);
    nodes_[index].counts = counts;
    if (detail::is_terminal(ctx_.params, counts, depth)) return index;
    auto candidates =
        detail::node_candidates(ctx_, positions, path, counts, scratch_);
    auto best =
        detail::best_candidate(ctx_.params, counts, candidates, scratch_);
    if (!best) return index;

    const SplitCandidate& split = candidates[*best];
    std::vector<std::uint32_t> left, right;
    detail::partition_rows(ctx_.data, positions, split, left, right);
    nodes_[index].feature = static_cast<std::int32_t>(split.feature);
    nodes_[index].threshold = split.threshold;
    const auto l = build(left, depth + 1, detail::child_path(path, false));
    const auto r = build(right, depth + 1, detail::child_path(path, true));
    nodes_[index].left = l;
    nodes_[index].right = r;
    return index;
  }

 private:
  SplitContext ctx_;
  std::vector<NaiveForest::Node>& nodes_;
  SplitScratch scratch_;
};

double leaf_fraction(const NaiveForest::Tree& tree,
                     std::span<const double> row) {
  const NaiveForest::Node* n = &tree.nodes[0];
  while (n->feature >= 0) {
    n = &tree.nodes[row[static_cast<std::size_t>(n->feature)] <= n->threshold
                        ? n->left
                        : n->right];
  }
  return static_cast<double>(n->counts.n1) /
         static_cast<double>(n->counts.total());
}

}  // namespace

NaiveForest NaiveForest::fit(const Dataset& train, const ForestParams& params,
                             std::uint64_t seed, std::size_t n_jobs) {
  validate(params);
  if (train.empty()) throw ArgumentError("fit: empty training set");
  NaiveForest forest;
  forest.params_ = params;
  forest.seed_ = seed;
  forest.cols_ = train.cols();
  forest.rows_ = train.rows();
  forest.trees_.resize(params.n_trees);

  const std::size_t k = features_per_tree(params, train.cols());
  std::vector<std::uint32_t> all(train.rows());
  for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
  auto grow = [&](std::size_t t) {
    Tree& tree = forest.trees_[t];
    const auto s = tree_seed(seed, t);
    tree.features = detail::sample_tree_features(s, train.cols(), k);
    FlatBuilder builder(SplitContext{train, params, tree.features, s},
                        tree.nodes);
    builder.build(all, 0, detail::root_path(s));
  };
  const std::size_t jobs =
      std::min(std::max<std::size_t>(n_jobs, 1), params.n_trees);
  if (jobs == 1) {
    for (std::size_t t = 0; t < params.n_trees; ++t) grow(t);
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t t = w; t < params.n_trees; t += jobs) grow(t);
      });
    }
  }
  return forest;
}

std::vector<double> NaiveForest::predict_proba(const Dataset& x) const {
  if (x.cols() != cols_) {
    throw ArgumentError("predict: expected " + std::to_string(cols_) +
                        " features, got " + std::to_string(x.cols()));
  }
  if (rows_ == 0) throw StateError("predict: model has no training rows");
  std::vector<double> acc(x.rows(), 0.0);
  std::vector<double> votes(x.rows());
  for (const auto& tree : trees_) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      votes[i] = leaf_fraction(tree, x.row(i));
    }
    simd::accumulate(acc, votes);
  }
  const double n = static_cast<double>(trees_.size());
  for (auto& p : acc) p /= n;
  return acc;
}

std::vector<std::uint8_t> NaiveForest::predict(const Dataset& x) const {
  return threshold_predictions(predict_proba(x));
}

NaiveForest naive_retrain(const Dataset& train,
                          std::span<const std::uint64_t> deleted_ids,
                          const ForestParams& params, std::uint64_t seed) {
  return NaiveForest::fit(without_rows(train, deleted_ids), params, seed);
}

}  // namespace unlearn
