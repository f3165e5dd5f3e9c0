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
#include <cmath>
#include <functional>
#include <thread>

#include "split_search.hpp"
#include "unlearn/error.hpp"
#include "unlearn/forest.hpp"
#include "unlearn/hash.hpp"
#include "unlearn/simd/kernels.hpp"

namespace unlearn {
namespace {

using detail::SplitContext;
using detail::SplitScratch;

// Builds a removal-enabled subtree over the given row positions.
class NodeBuilder {
 public:
  explicit NodeBuilder(SplitContext ctx) : ctx_(ctx) {}

  DareNode build(std::vector<std::uint32_t> positions, std::size_t depth,
                 std::uint64_t path) {
    DareNode node;
    node.stats.counts = detail::count_labels(ctx_.data, positions);
    if (!detail::is_terminal(ctx_.params, node.stats.counts, depth)) {
      node.stats.candidates = detail::node_candidates(
          ctx_, positions, path, node.stats.counts, scratch_);
      node.chosen = detail::best_candidate(ctx_.params, node.stats.counts,
                                           node.stats.candidates, scratch_);
    }
    if (node.is_leaf()) {
      node.row_ids.reserve(positions.size());
      for (auto p : positions) node.row_ids.push_back(ctx_.data.row_id(p));
      std::sort(node.row_ids.begin(), node.row_ids.end());
      return node;
    }
    std::vector<std::uint32_t> left, right;
    detail::partition_rows(ctx_.data, positions, node.split(), left, right);
    positions = {};
    node.left = std::make_unique<DareNode>(
        build(std::move(left), depth + 1, detail::child_path(path, false)));
    node.right = std::make_unique<DareNode>(
        build(std::move(right), depth + 1, detail::child_path(path, true)));
    return node;
  }

  const SplitContext& context() const { return ctx_; }
  SplitScratch& scratch() { return scratch_; }

 private:
  SplitContext ctx_;
  SplitScratch scratch_;
};

// Removes one training row from one tree.
class RowEraser {
 public:
  RowEraser(NodeBuilder& builder,
            const std::unordered_map<std::uint64_t, std::uint32_t>& position,
            std::uint32_t row)
      : builder_(builder),
        ctx_(builder.context()),
        position_(position),
        row_(row),
        row_id_(ctx_.data.row_id(row)),
        label_(ctx_.data.label(row)) {}

  void erase(DareNode& node, std::size_t depth, std::uint64_t path) {
    ++report_.nodes_updated;
    --node.stats.counts[label_];

    if (node.stats.candidates.empty()) {
      // Terminal leaf, or a leaf with no distinct values left on any
      // feature; neither can start splitting after a removal.
      remove_id(node);
      return;
    }
    if (detail::is_terminal(ctx_.params, node.stats.counts, depth)) {
      rebuild(node, depth, path);
      return;
    }

    std::optional<std::pair<std::uint32_t, double>> previous;
    if (!node.is_leaf()) {
      previous.emplace(node.split().feature, node.split().threshold);
    }

    std::vector<std::uint32_t> stale;
    for (auto& c : node.stats.candidates) {
      const double v = ctx_.data.at(row_, c.feature);
      --(v <= c.threshold ? c.left : c.right)[label_];
      bool lost = false;
      if (v == c.lower_value) lost |= --c.lower_count == 0;
      if (v == c.upper_value) lost |= --c.upper_count == 0;
      if (lost && (stale.empty() || stale.back() != c.feature)) {
        stale.push_back(c.feature);
      }
    }
    if (!stale.empty()) refresh(node, stale, path);

    auto best = detail::best_candidate(ctx_.params, node.stats.counts,
                                       node.stats.candidates,
                                       builder_.scratch());
    if (node.is_leaf()) {
      if (best) {
        rebuild(node, depth, path);
      } else {
        remove_id(node);
      }
      return;
    }
    const auto& b = node.stats.candidates[best.value_or(0)];
    if (!best || b.feature != previous->first ||
        b.threshold != previous->second) {
      rebuild(node, depth, path);
      return;
    }
    node.chosen = best;
    const bool go_right = ctx_.data.at(row_, b.feature) > b.threshold;
    erase(go_right ? *node.right : *node.left, depth + 1,
          detail::child_path(path, go_right));
  }

  const DeletionReport& report() const { return report_; }

 private:
  void remove_id(DareNode& node) {
    auto it = std::lower_bound(node.row_ids.begin(), node.row_ids.end(),
                               row_id_);
    node.row_ids.erase(it);
  }

  // Positions of the rows below `node`, minus the row being erased.
  std::vector<std::uint32_t> surviving_rows(const DareNode& node) const {
    std::vector<std::uint32_t> out;
    out.reserve(node.stats.counts.total());
    std::vector<const DareNode*> stack{&node};
    while (!stack.empty()) {
      const DareNode* n = stack.back();
      stack.pop_back();
      if (n->is_leaf()) {
        for (auto id : n->row_ids) {
          if (id != row_id_) out.push_back(position_.at(id));
        }
      } else {
        stack.push_back(n->right.get());
        stack.push_back(n->left.get());
      }
    }
    return out;
  }

  void rebuild(DareNode& node, std::size_t depth, std::uint64_t path) {
    auto rows = surviving_rows(node);
    ++report_.subtrees_retrained;
    report_.rows_touched += rows.size();
    node = builder_.build(std::move(rows), depth, path);
  }

  // Recomputes the candidates of features whose endpoint pair vanished.
  void refresh(DareNode& node, std::span<const std::uint32_t> stale,
               std::uint64_t path) {
    auto rows = surviving_rows(node);
    report_.rows_touched += rows.size();
    report_.features_refreshed += stale.size();
    std::vector<SplitCandidate> merged;
    merged.reserve(node.stats.candidates.size());
    auto& old = node.stats.candidates;
    std::size_t i = 0;
    for (auto f : ctx_.features) {
      const bool recompute =
          std::find(stale.begin(), stale.end(), f) != stale.end();
      while (i < old.size() && old[i].feature == f) {
        if (!recompute) merged.push_back(old[i]);
        ++i;
      }
      if (recompute) {
        detail::append_feature_candidates(ctx_, rows, f, path,
                                          node.stats.counts,
                                          builder_.scratch(), merged);
      }
    }
    old = std::move(merged);
  }

  NodeBuilder& builder_;
  const SplitContext& ctx_;
  const std::unordered_map<std::uint64_t, std::uint32_t>& position_;
  std::uint32_t row_;
  std::uint64_t row_id_;
  std::uint8_t label_;
  DeletionReport report_;
};

// Runs body(t) for t in [0, n), on up to `jobs` threads.
void for_each_tree(std::size_t n, std::size_t jobs,
                   const std::function<void(std::size_t)>& body) {
  jobs = std::min(std::max<std::size_t>(jobs, 1), n);
  if (jobs <= 1) {
    for (std::size_t t = 0; t < n; ++t) body(t);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      for (std::size_t t = w; t < n; t += jobs) body(t);
    });
  }
}

double leaf_fraction(const DareNode& root, std::span<const double> row) {
  const DareNode* n = &root;
  while (!n->is_leaf()) {
    const auto& s = n->split();
    n = row[s.feature] <= s.threshold ? n->left.get() : n->right.get();
  }
  return static_cast<double>(n->stats.counts.n1) /
         static_cast<double>(n->stats.counts.total());
}

void check_node(const DareForest& forest, const DareNode& node,
                const std::string& where, std::vector<std::uint64_t>& leaf_ids,
                SplitScratch& scratch, std::vector<std::string>& errors) {
  const ClassCounts counts = node.stats.counts;
  for (const auto& c : node.stats.candidates) {
    if (c.left.n0 + c.right.n0 != counts.n0 ||
        c.left.n1 + c.right.n1 != counts.n1) {
      errors.push_back(where + ": candidate on feature " +
                       std::to_string(c.feature) +
                       " does not sum to node counts");
      break;
    }
  }
  if (node.is_leaf()) {
    if (node.row_ids.size() != counts.total()) {
      errors.push_back(where + ": leaf holds " +
                       std::to_string(node.row_ids.size()) + " rows but counts " +
                       std::to_string(counts.total()));
    }
    leaf_ids.insert(leaf_ids.end(), node.row_ids.begin(), node.row_ids.end());
    return;
  }
  if (!node.left || !node.right || *node.chosen >= node.stats.candidates.size()) {
    errors.push_back(where + ": malformed internal node");
    return;
  }
  const ClassCounts l = node.left->stats.counts;
  const ClassCounts r = node.right->stats.counts;
  if (l.n0 + r.n0 != counts.n0 || l.n1 + r.n1 != counts.n1) {
    errors.push_back(where + ": children do not sum to node counts");
  }
  if (node.split().left != l || node.split().right != r) {
    errors.push_back(where + ": chosen split counts disagree with children");
  }
  auto best = detail::best_candidate(forest.params(), counts,
                                     node.stats.candidates, scratch);
  if (best != node.chosen) {
    errors.push_back(where + ": chosen split is not the cached argmax");
  }
  check_node(forest, *node.left, where + "L", leaf_ids, scratch, errors);
  check_node(forest, *node.right, where + "R", leaf_ids, scratch, errors);
}

}  // namespace

void validate(const ForestParams& p) {
  if (p.n_trees == 0) throw ArgumentError("n_trees must be >= 1");
  if (p.thresholds_per_feature == 0) {
    throw ArgumentError("thresholds_per_feature must be >= 1");
  }
  if (p.min_samples_leaf == 0) {
    throw ArgumentError("min_samples_leaf must be >= 1");
  }
}

std::size_t features_per_tree(const ForestParams& p, std::size_t d) {
  if (p.max_features_per_tree != 0) return std::min(p.max_features_per_tree, d);
  auto k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  return std::clamp<std::size_t>(k, 1, d);
}

std::uint64_t tree_seed(std::uint64_t seed, std::size_t t) {
  return hash_combine(seed, 0x54726565ULL, t);
}

DeletionReport& DeletionReport::operator+=(const DeletionReport& o) {
  nodes_updated += o.nodes_updated;
  subtrees_retrained += o.subtrees_retrained;
  features_refreshed += o.features_refreshed;
  rows_touched += o.rows_touched;
  return *this;
}

DareNode::DareNode(const DareNode& o)
    : stats(o.stats),
      chosen(o.chosen),
      left(o.left ? std::make_unique<DareNode>(*o.left) : nullptr),
      right(o.right ? std::make_unique<DareNode>(*o.right) : nullptr),
      row_ids(o.row_ids) {}

DareNode& DareNode::operator=(const DareNode& o) {
  if (this != &o) *this = DareNode(o);
  return *this;
}

bool operator==(const DareNode& a, const DareNode& b) {
  if (a.stats != b.stats || a.chosen != b.chosen || a.row_ids != b.row_ids) {
    return false;
  }
  if (a.is_leaf()) return true;
  return *a.left == *b.left && *a.right == *b.right;
}

std::size_t DareTree::node_count() const {
  std::size_t n = 0;
  std::vector<const DareNode*> stack{&root};
  while (!stack.empty()) {
    const DareNode* x = stack.back();
    stack.pop_back();
    ++n;
    if (!x->is_leaf()) {
      stack.push_back(x->left.get());
      stack.push_back(x->right.get());
    }
  }
  return n;
}

std::size_t DareTree::depth() const {
  std::function<std::size_t(const DareNode&)> rec = [&](const DareNode& n) {
    return n.is_leaf() ? std::size_t{0}
                       : 1 + std::max(rec(*n.left), rec(*n.right));
  };
  return rec(root);
}

DareForest::DareForest(Dataset train, ForestParams params, std::uint64_t seed)
    : train_(std::move(train)), params_(params), seed_(seed) {}

void DareForest::index_rows() {
  position_.clear();
  position_.reserve(train_.rows() * 2);
  for (std::size_t i = 0; i < train_.rows(); ++i) {
    position_.emplace(train_.row_id(i), static_cast<std::uint32_t>(i));
  }
}

DareForest DareForest::fit(const Dataset& train, const ForestParams& params,
                           std::uint64_t seed, std::size_t n_jobs) {
  validate(params);
  if (train.empty()) throw ArgumentError("fit: empty training set");
  DareForest forest(train, params, seed);
  forest.index_rows();
  forest.alive_.assign(train.rows(), 1);
  forest.live_ = train.rows();
  forest.n_jobs_ = std::max<std::size_t>(n_jobs, 1);

  const std::size_t k = features_per_tree(params, train.cols());
  forest.trees_.resize(params.n_trees);
  std::vector<std::uint32_t> all(train.rows());
  for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
  for_each_tree(params.n_trees, forest.n_jobs_, [&](std::size_t t) {
    DareTree& tree = forest.trees_[t];
    tree.seed = tree_seed(seed, t);
    tree.features = detail::sample_tree_features(tree.seed, train.cols(), k);
    NodeBuilder builder(
        SplitContext{forest.train_, forest.params_, tree.features, tree.seed});
    tree.root = builder.build(all, 0, detail::root_path(tree.seed));
  });
  return forest;
}

bool DareForest::contains(std::uint64_t row_id) const {
  auto it = position_.find(row_id);
  return it != position_.end() && alive_[it->second];
}

DeletionReport DareForest::delete_row(std::uint64_t row_id) {
  auto it = position_.find(row_id);
  if (it == position_.end()) {
    throw ArgumentError("delete: unknown row id " + std::to_string(row_id));
  }
  const std::uint32_t row = it->second;
  if (!alive_[row]) {
    throw ArgumentError("delete: row id " + std::to_string(row_id) +
                        " already deleted");
  }
  std::vector<DeletionReport> reports(trees_.size());
  for_each_tree(trees_.size(), n_jobs_, [&](std::size_t t) {
    DareTree& tree = trees_[t];
    NodeBuilder builder(
        SplitContext{train_, params_, tree.features, tree.seed});
    RowEraser eraser(builder, position_, row);
    eraser.erase(tree.root, 0, detail::root_path(tree.seed));
    reports[t] = eraser.report();
  });
  alive_[row] = 0;
  --live_;
  DeletionReport total;
  for (const auto& r : reports) total += r;
  return total;
}

std::vector<std::uint64_t> DareForest::live_row_ids() const {
  std::vector<std::uint64_t> ids;
  ids.reserve(live_);
  for (std::size_t i = 0; i < train_.rows(); ++i) {
    if (alive_[i]) ids.push_back(train_.row_id(i));
  }
  return ids;
}

Dataset DareForest::live_training_set() const {
  std::vector<std::size_t> keep;
  keep.reserve(live_);
  for (std::size_t i = 0; i < train_.rows(); ++i) {
    if (alive_[i]) keep.push_back(i);
  }
  return train_.take(keep);
}

std::vector<double> DareForest::predict_proba(const Dataset& x) const {
  if (x.cols() != train_.cols()) {
    throw ArgumentError("predict: expected " + std::to_string(train_.cols()) +
                        " features, got " + std::to_string(x.cols()));
  }
  if (live_ == 0) {
    throw StateError("predict: every training row has been deleted");
  }
  std::vector<double> acc(x.rows(), 0.0);
  std::vector<double> votes(x.rows());
  for (const auto& tree : trees_) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      votes[i] = leaf_fraction(tree.root, x.row(i));
    }
    simd::accumulate(acc, votes);
  }
  const double n = static_cast<double>(trees_.size());
  for (auto& p : acc) p /= n;
  return acc;
}

std::vector<std::uint8_t> DareForest::predict(const Dataset& x) const {
  return threshold_predictions(predict_proba(x));
}

bool DareForest::same_structure(const DareForest& other) const {
  return params_ == other.params_ && seed_ == other.seed_ &&
         trees_ == other.trees_;
}

std::vector<std::string> DareForest::check_invariants() const {
  std::vector<std::string> errors;
  const auto live = live_row_ids();
  SplitScratch scratch;
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    std::vector<std::uint64_t> leaf_ids;
    const std::string where = "tree " + std::to_string(t) + " node ";
    check_node(*this, trees_[t].root, where, leaf_ids, scratch, errors);
    std::sort(leaf_ids.begin(), leaf_ids.end());
    std::vector<std::uint64_t> expected = live;
    std::sort(expected.begin(), expected.end());
    if (leaf_ids != expected) {
      errors.push_back("tree " + std::to_string(t) +
                       ": leaves do not partition the live training rows");
    }
  }
  return errors;
}

std::vector<std::uint8_t> threshold_predictions(std::span<const double> proba) {
  std::vector<std::uint8_t> out(proba.size());
  for (std::size_t i = 0; i < proba.size(); ++i) out[i] = proba[i] >= 0.5;
  return out;
}

void testing::ForestBackdoor::corrupt_root_counts(DareForest& forest) {
  if (!forest.trees_.empty()) ++forest.trees_[0].root.stats.counts.n0;
}

}  // namespace unlearn
