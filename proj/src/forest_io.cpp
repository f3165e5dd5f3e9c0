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

// Checkpoint encodings for DareForest ("ULDF") and NaiveForest ("ULNF").
// Layouts are documented in docs/formats.md.

#include <algorithm>

#include "unlearn/binary_io.hpp"
#include "unlearn/error.hpp"
#include "unlearn/forest.hpp"

namespace unlearn {
namespace {

constexpr std::string_view kDareMagic = "ULDF";
constexpr std::string_view kNaiveMagic = "ULNF";
constexpr std::uint32_t kVersion = 1;

void put_params(ByteWriter& w, const ForestParams& p) {
  w.put<std::uint64_t>(p.n_trees);
  w.put<std::uint64_t>(p.max_depth);
  w.put<std::uint64_t>(p.max_features_per_tree);
  w.put<std::uint64_t>(p.thresholds_per_feature);
  w.put<std::uint64_t>(p.min_samples_leaf);
}

ForestParams get_params(ByteReader& r) {
  ForestParams p;
  auto at = r.offset();
  p.n_trees = r.get<std::uint64_t>();
  p.max_depth = r.get<std::uint64_t>();
  p.max_features_per_tree = r.get<std::uint64_t>();
  p.thresholds_per_feature = r.get<std::uint64_t>();
  p.min_samples_leaf = r.get<std::uint64_t>();
  try {
    validate(p);
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("invalid params: ") + e.what(), at);
  }
  return p;
}

void put_counts(ByteWriter& w, ClassCounts c) {
  w.put(c.n0);
  w.put(c.n1);
}

ClassCounts get_counts(ByteReader& r) {
  ClassCounts c;
  c.n0 = r.get<std::uint32_t>();
  c.n1 = r.get<std::uint32_t>();
  return c;
}

void check_version(ByteReader& r) {
  auto at = r.offset();
  if (auto v = r.get<std::uint32_t>(); v != kVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(v),
                      at);
  }
}

void put_node(ByteWriter& w, const DareNode& n) {
  w.put<std::uint8_t>(n.is_leaf() ? 0 : 1);
  put_counts(w, n.stats.counts);
  w.put<std::uint64_t>(n.stats.candidates.size());
  for (const auto& c : n.stats.candidates) {
    w.put(c.feature);
    w.put(c.threshold);
    w.put(c.lower_value);
    w.put(c.upper_value);
    w.put(c.lower_count);
    w.put(c.upper_count);
    put_counts(w, c.left);
    put_counts(w, c.right);
  }
  if (n.is_leaf()) {
    w.put<std::uint64_t>(n.row_ids.size());
    for (auto id : n.row_ids) w.put(id);
  } else {
    w.put(*n.chosen);
    put_node(w, *n.left);
    put_node(w, *n.right);
  }
}

DareNode get_node(ByteReader& r, std::size_t depth, std::size_t max_depth,
                  std::size_t cols) {
  if (depth > max_depth) throw FormatError("tree deeper than max_depth", r.offset());
  DareNode n;
  auto kind_at = r.offset();
  auto kind = r.get<std::uint8_t>();
  if (kind > 1) throw FormatError("bad node tag", kind_at);
  n.stats.counts = get_counts(r);
  auto count = r.get<std::uint64_t>();
  r.require_count(count, 52, "candidate");
  n.stats.candidates.resize(count);
  for (auto& c : n.stats.candidates) {
    auto at = r.offset();
    c.feature = r.get<std::uint32_t>();
    if (c.feature >= cols) throw FormatError("candidate feature out of range", at);
    c.threshold = r.get<double>();
    c.lower_value = r.get<double>();
    c.upper_value = r.get<double>();
    c.lower_count = r.get<std::uint32_t>();
    c.upper_count = r.get<std::uint32_t>();
    c.left = get_counts(r);
    c.right = get_counts(r);
  }
  if (kind == 0) {
    auto rows = r.get<std::uint64_t>();
    r.require_count(rows, 8, "leaf row");
    n.row_ids.resize(rows);
    for (auto& id : n.row_ids) id = r.get<std::uint64_t>();
  } else {
    auto at = r.offset();
    n.chosen = r.get<std::uint32_t>();
    if (*n.chosen >= n.stats.candidates.size()) {
      throw FormatError("chosen split index out of range", at);
    }
    n.left = std::make_unique<DareNode>(get_node(r, depth + 1, max_depth, cols));
    n.right = std::make_unique<DareNode>(get_node(r, depth + 1, max_depth, cols));
  }
  return n;
}

std::vector<std::uint32_t> get_features(ByteReader& r, std::size_t cols) {
  auto k = r.get<std::uint64_t>();
  r.require_count(k, 4, "feature");
  std::vector<std::uint32_t> f(k);
  for (auto& x : f) {
    auto at = r.offset();
    x = r.get<std::uint32_t>();
    if (x >= cols) throw FormatError("tree feature out of range", at);
  }
  return f;
}

}  // namespace

std::vector<std::byte> DareForest::serialize() const {
  ByteWriter w;
  w.magic(kDareMagic);
  w.put(kVersion);
  put_params(w, params_);
  w.put(seed_);
  w.blob(unlearn::serialize(train_));
  for (auto a : alive_) w.put(a);
  w.put<std::uint64_t>(trees_.size());
  for (const auto& t : trees_) {
    w.put(t.seed);
    w.put<std::uint64_t>(t.features.size());
    for (auto f : t.features) w.put(f);
    put_node(w, t.root);
  }
  return w.take();
}

DareForest DareForest::deserialize(std::span<const std::byte> bytes) {
  if (bytes.empty()) throw FormatError("empty forest checkpoint", 0);
  ByteReader r(bytes);
  r.expect_magic(kDareMagic);
  check_version(r);
  auto params = get_params(r);
  auto seed = r.get<std::uint64_t>();
  auto data_at = r.offset();
  Dataset train;
  try {
    train = deserialize_dataset(r.blob());
  } catch (const FormatError& e) {
    throw FormatError(std::string("embedded training set: ") + e.what(),
                      data_at);
  }
  DareForest forest(std::move(train), params, seed);
  forest.index_rows();
  forest.alive_.resize(forest.train_.rows());
  for (auto& a : forest.alive_) {
    auto at = r.offset();
    a = r.get<std::uint8_t>();
    if (a > 1) throw FormatError("bad alive flag", at);
  }
  forest.live_ = static_cast<std::size_t>(
      std::count(forest.alive_.begin(), forest.alive_.end(), 1));
  auto trees_at = r.offset();
  if (r.get<std::uint64_t>() != params.n_trees) {
    throw FormatError("tree count does not match params", trees_at);
  }
  forest.trees_.resize(params.n_trees);
  for (auto& t : forest.trees_) {
    t.seed = r.get<std::uint64_t>();
    t.features = get_features(r, forest.train_.cols());
    t.root = get_node(r, 0, params.max_depth, forest.train_.cols());
  }
  r.expect_end();
  if (auto errors = forest.check_invariants(); !errors.empty()) {
    throw FormatError("inconsistent forest: " + errors.front(), bytes.size());
  }
  return forest;
}

std::vector<std::byte> NaiveForest::serialize() const {
  ByteWriter w;
  w.magic(kNaiveMagic);
  w.put(kVersion);
  put_params(w, params_);
  w.put(seed_);
  w.put<std::uint64_t>(cols_);
  w.put<std::uint64_t>(rows_);
  w.put<std::uint64_t>(trees_.size());
  for (const auto& t : trees_) {
    w.put<std::uint64_t>(t.features.size());
    for (auto f : t.features) w.put(f);
    w.put<std::uint64_t>(t.nodes.size());
    for (const auto& n : t.nodes) {
      w.put(n.feature);
      w.put(n.threshold);
      w.put(n.left);
      w.put(n.right);
      put_counts(w, n.counts);
    }
  }
  return w.take();
}

NaiveForest NaiveForest::deserialize(std::span<const std::byte> bytes) {
  if (bytes.empty()) throw FormatError("empty forest checkpoint", 0);
  ByteReader r(bytes);
  r.expect_magic(kNaiveMagic);
  check_version(r);
  NaiveForest f;
  f.params_ = get_params(r);
  f.seed_ = r.get<std::uint64_t>();
  f.cols_ = r.get<std::uint64_t>();
  f.rows_ = r.get<std::uint64_t>();
  auto trees_at = r.offset();
  if (r.get<std::uint64_t>() != f.params_.n_trees) {
    throw FormatError("tree count does not match params", trees_at);
  }
  f.trees_.resize(f.params_.n_trees);
  for (auto& t : f.trees_) {
    t.features = get_features(r, f.cols_);
    auto n = r.get<std::uint64_t>();
    r.require_count(n, 28, "node");
    if (n == 0) throw FormatError("tree without nodes", r.offset());
    t.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto at = r.offset();
      auto& node = t.nodes[i];
      node.feature = r.get<std::int32_t>();
      node.threshold = r.get<double>();
      node.left = r.get<std::uint32_t>();
      node.right = r.get<std::uint32_t>();
      node.counts = get_counts(r);
      // Children always follow their parent in the flat layout.
      if (node.feature >= 0 &&
          (static_cast<std::size_t>(node.feature) >= f.cols_ ||
           node.left <= i || node.right <= i || node.left >= n ||
           node.right >= n)) {
        throw FormatError("bad node links", at);
      }
    }
  }
  r.expect_end();
  return f;
}

}  // namespace unlearn
