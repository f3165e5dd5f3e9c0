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
#include <random>

#include "gtest/gtest.h"
#include "test_util.hpp"
#include "unlearn/error.hpp"
#include "unlearn/forest.hpp"

namespace unlearn {
namespace {

using test::bit_equal;
using test::make_dataset;
using test::random_dataset;

ForestParams one_tree(std::size_t depth) {
  ForestParams p;
  p.n_trees = 1;
  p.max_depth = depth;
  return p;
}

void collect_leaves(const DareNode& n, std::vector<const DareNode*>& out) {
  if (n.is_leaf()) {
    out.push_back(&n);
    return;
  }
  collect_leaves(*n.left, out);
  collect_leaves(*n.right, out);
}

TEST(ForestParams, Validation) {
  ForestParams p;
  EXPECT_NO_THROW(validate(p));
  p.n_trees = 0;
  EXPECT_THROW(validate(p), ArgumentError);
  p = {};
  p.thresholds_per_feature = 0;
  EXPECT_THROW(validate(p), ArgumentError);
  p = {};
  p.min_samples_leaf = 0;
  EXPECT_THROW(validate(p), ArgumentError);
  EXPECT_EQ(features_per_tree({}, 64), 8u);
  EXPECT_EQ(features_per_tree({}, 10), 4u);
  ForestParams capped;
  capped.max_features_per_tree = 99;
  EXPECT_EQ(features_per_tree(capped, 5), 5u);
}

// Brute force on four rows: the only zero-error split is between 1 and 2.
TEST(DareForest, FourSeparableRows) {
  auto ds = make_dataset(1, {0, 1, 2, 3}, {0, 0, 1, 1});
  auto f = DareForest::fit(ds, one_tree(2), 3);
  const auto& root = f.trees()[0].root;
  ASSERT_FALSE(root.is_leaf());
  EXPECT_EQ(root.split().threshold, 1.5);
  EXPECT_TRUE(root.left->is_leaf());
  EXPECT_TRUE(root.right->is_leaf());
  EXPECT_TRUE(root.left->stats.counts.pure());
  EXPECT_TRUE(root.right->stats.counts.pure());
  auto pred = f.predict(ds);
  EXPECT_EQ(pred, (std::vector<std::uint8_t>{0, 0, 1, 1}));
}

TEST(DareForest, SingleClassIsLoneLeaf) {
  auto ds = make_dataset(2, {0, 1, 2, 3, 4, 5}, {1, 1, 1});
  auto f = DareForest::fit(ds, {}, 1);
  for (const auto& t : f.trees()) EXPECT_TRUE(t.root.is_leaf());
  for (double p : f.predict_proba(ds)) EXPECT_EQ(p, 1.0);
}

TEST(DareForest, DeterministicAndSeedSensitive) {
  std::mt19937_64 rng(5);
  auto ds = random_dataset(rng, 120, 9);
  auto a = DareForest::fit(ds, {}, 77);
  auto b = DareForest::fit(ds, {}, 77);
  EXPECT_TRUE(a.same_structure(b));
  EXPECT_EQ(a.serialize(), b.serialize());
  auto c = DareForest::fit(ds, {}, 78);
  EXPECT_FALSE(a.same_structure(c));
}

TEST(DareForest, ParallelFitMatchesSerial) {
  std::mt19937_64 rng(6);
  auto ds = random_dataset(rng, 150, 12);
  auto serial = DareForest::fit(ds, {}, 9, 1);
  auto parallel = DareForest::fit(ds, {}, 9, 4);
  EXPECT_TRUE(serial.same_structure(parallel));
  auto del = [&](DareForest f) {
    f.set_jobs(3);
    for (std::uint64_t id = 0; id < 40; ++id) f.delete_row(id);
    return f;
  };
  auto s = del(serial);
  serial.set_jobs(1);
  for (std::uint64_t id = 0; id < 40; ++id) serial.delete_row(id);
  EXPECT_TRUE(s.same_structure(serial));
}

TEST(DareForest, ErrorsAndStates) {
  auto ds = make_dataset(1, {0, 1, 2, 3}, {0, 0, 1, 1});
  EXPECT_THROW(DareForest::fit(Dataset(1), {}, 0), ArgumentError);
  auto f = DareForest::fit(ds, one_tree(3), 1);
  EXPECT_THROW(f.delete_row(99), ArgumentError);
  f.delete_row(0);
  EXPECT_THROW(f.delete_row(0), ArgumentError);
  EXPECT_FALSE(f.contains(0));
  EXPECT_TRUE(f.contains(1));
  EXPECT_THROW(f.predict_proba(make_dataset(2, {0, 0}, {0})), ArgumentError);
  f.delete_row(1);
  f.delete_row(2);
  f.delete_row(3);
  EXPECT_EQ(f.live_rows(), 0u);
  EXPECT_THROW(f.predict_proba(ds), StateError);
}

TEST(DareForest, CountsOnlyDeletion) {
  // Pure halves: removing an interior label-0 row leaves the root split at
  // 4.5 and touches only a pure leaf.
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(i);
    y.push_back(i >= 5);
  }
  auto ds = make_dataset(1, x, y);
  auto f = DareForest::fit(ds, one_tree(4), 2);
  ASSERT_EQ(f.trees()[0].root.split().threshold, 4.5);
  auto before = f.predict_proba(ds);
  auto report = f.delete_row(2);
  EXPECT_EQ(report.subtrees_retrained, 0u);
  EXPECT_GE(report.nodes_updated, 1u);
  EXPECT_TRUE(bit_equal(before, f.predict_proba(ds)));
  EXPECT_TRUE(f.check_invariants().empty());
}

TEST(DareForest, DeleteAllButOne) {
  std::mt19937_64 rng(8);
  auto ds = random_dataset(rng, 60, 5);
  auto f = DareForest::fit(ds, {}, 4);
  for (std::uint64_t id = 0; id < 59; ++id) f.delete_row(id);
  for (const auto& t : f.trees()) {
    ASSERT_TRUE(t.root.is_leaf());
    EXPECT_EQ(t.root.row_ids, std::vector<std::uint64_t>{59});
  }
  const double expect = ds.label(59) ? 1.0 : 0.0;
  for (double p : f.predict_proba(ds)) EXPECT_EQ(p, expect);
}

TEST(DareForest, LeavesPartitionLiveRows) {
  std::mt19937_64 rng(9);
  auto ds = random_dataset(rng, 90, 6);
  auto f = DareForest::fit(ds, {}, 4);
  auto order = test::random_deletions(rng, ds, 45);
  for (auto id : order) {
    f.delete_row(id);
    for (const auto& t : f.trees()) {
      std::vector<const DareNode*> leaves;
      collect_leaves(t.root, leaves);
      std::vector<std::uint64_t> seen;
      for (auto* l : leaves) {
        EXPECT_EQ(l->row_ids.size(), l->stats.counts.total());
        seen.insert(seen.end(), l->row_ids.begin(), l->row_ids.end());
      }
      std::sort(seen.begin(), seen.end());
      ASSERT_EQ(seen, f.live_row_ids());
    }
    ASSERT_TRUE(f.check_invariants().empty());
  }
}

// Core property: delete(x) on fit(D) equals fit(D \ S) for random D, S and
// deletion order, in structure and in bit-exact probabilities.
TEST(DareForest, DeleteEqualsRefitRandomized) {
  std::mt19937_64 rng(2024);
  for (int c = 0; c < 150; ++c) {
    const std::size_t rows = std::uniform_int_distribution<std::size_t>(2, 200)(rng);
    const std::size_t d = std::uniform_int_distribution<std::size_t>(1, 16)(rng);
    auto ds = random_dataset(rng, rows, d);
    auto probe = random_dataset(rng, 25, d);
    auto params = test::random_params(rng, d);
    const std::uint64_t seed = rng();
    const std::size_t n_del = std::uniform_int_distribution<std::size_t>(
        1, std::max<std::size_t>(1, rows * 3 / 4))(rng);
    auto order = test::random_deletions(rng, ds, std::min(n_del, rows - 1));

    auto model = DareForest::fit(ds, params, seed);
    for (auto id : order) model.delete_row(id);
    auto scratch = DareForest::fit(without_rows(ds, order), params, seed);
    ASSERT_TRUE(model.same_structure(scratch)) << "case " << c;
    ASSERT_TRUE(bit_equal(model.predict_proba(probe), scratch.predict_proba(probe)))
        << "case " << c;
    ASSERT_TRUE(model.check_invariants().empty()) << "case " << c;
  }
}

TEST(DareForest, DeletionOrderIrrelevant) {
  std::mt19937_64 rng(10);
  for (int c = 0; c < 20; ++c) {
    auto ds = random_dataset(rng, 80, 4);
    auto a = DareForest::fit(ds, {}, c);
    auto b = a;
    auto ids = test::random_deletions(rng, ds, 2);
    a.delete_row(ids[0]);
    a.delete_row(ids[1]);
    b.delete_row(ids[1]);
    b.delete_row(ids[0]);
    EXPECT_TRUE(a.same_structure(b));
  }
}

TEST(DareForest, CopyIsIndependent) {
  std::mt19937_64 rng(11);
  auto ds = random_dataset(rng, 50, 4);
  auto a = DareForest::fit(ds, {}, 1);
  auto b = a;
  b.delete_row(3);
  EXPECT_TRUE(a.contains(3));
  EXPECT_TRUE(a.same_structure(DareForest::fit(ds, {}, 1)));
}

TEST(DareForest, ProbabilitiesBounded) {
  std::mt19937_64 rng(12);
  auto ds = random_dataset(rng, 100, 6);
  auto f = DareForest::fit(ds, {}, 2);
  for (double p : f.predict_proba(random_dataset(rng, 200, 6))) {
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(DareForest, CorruptionDetected) {
  std::mt19937_64 rng(13);
  auto f = DareForest::fit(random_dataset(rng, 40, 3), {}, 2);
  ASSERT_TRUE(f.check_invariants().empty());
  testing::ForestBackdoor::corrupt_root_counts(f);
  EXPECT_FALSE(f.check_invariants().empty());
}

TEST(DareForest, CheckpointRoundTrip) {
  std::mt19937_64 rng(14);
  auto ds = random_dataset(rng, 70, 5);
  auto f = DareForest::fit(ds, {}, 6);
  for (std::uint64_t id : {3, 9, 27}) f.delete_row(id);
  auto bytes = f.serialize();
  auto back = DareForest::deserialize(bytes);
  EXPECT_TRUE(back.same_structure(f));
  EXPECT_EQ(back.serialize(), bytes);
  EXPECT_EQ(back.live_row_ids(), f.live_row_ids());
  // The restored model keeps deleting exactly.
  back.delete_row(4);
  f.delete_row(4);
  EXPECT_TRUE(back.same_structure(f));
}

TEST(DareForest, CheckpointRejectsDamage) {
  std::mt19937_64 rng(15);
  auto bytes = DareForest::fit(random_dataset(rng, 30, 3), {}, 6).serialize();
  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, bytes.size() / 2,
                          bytes.size() - 1}) {
    std::vector<std::byte> part(bytes.begin(), bytes.begin() + cut);
    EXPECT_THROW(DareForest::deserialize(part), FormatError) << cut;
  }
  auto extra = bytes;
  extra.push_back(std::byte{0});
  EXPECT_THROW(DareForest::deserialize(extra), FormatError);
}

TEST(NaiveForest, MatchesDarePredictions) {
  std::mt19937_64 rng(16);
  for (int c = 0; c < 30; ++c) {
    const std::size_t d = 1 + rng() % 10;
    auto ds = random_dataset(rng, 20 + rng() % 150, d);
    auto probe = random_dataset(rng, 40, d);
    auto params = test::random_params(rng, d);
    auto dare = DareForest::fit(ds, params, c);
    auto naive = NaiveForest::fit(ds, params, c);
    ASSERT_TRUE(bit_equal(dare.predict_proba(probe), naive.predict_proba(probe)));
    EXPECT_EQ(naive.trained_rows(), ds.rows());
  }
}

TEST(NaiveForest, RetrainExamples) {
  std::mt19937_64 rng(17);
  auto ds = random_dataset(rng, 40, 3);
  EXPECT_EQ(naive_retrain(ds, {}, {}, 5), NaiveForest::fit(ds, {}, 5));
  std::vector<std::uint64_t> all_but_two;
  for (std::uint64_t id = 0; id < 38; ++id) all_but_two.push_back(id);
  auto small = naive_retrain(ds, all_but_two, {}, 5);
  EXPECT_EQ(small.trained_rows(), 2u);
  EXPECT_EQ(naive_retrain(ds, all_but_two, {}, 5), small);
  std::vector<std::uint64_t> unknown{1000};
  EXPECT_THROW(naive_retrain(ds, unknown, {}, 5), ArgumentError);
}

TEST(NaiveForest, CheckpointRoundTrip) {
  std::mt19937_64 rng(18);
  auto f = NaiveForest::fit(random_dataset(rng, 60, 4), {}, 2);
  auto bytes = f.serialize();
  EXPECT_EQ(NaiveForest::deserialize(bytes), f);
  bytes.resize(bytes.size() - 3);
  EXPECT_THROW(NaiveForest::deserialize(bytes), FormatError);
}

TEST(Predict, ThresholdRule) {
  std::vector<double> p{0.7, 0.3, 0.5, 0.0, 1.0};
  EXPECT_EQ(threshold_predictions(p), (std::vector<std::uint8_t>{1, 0, 1, 0, 1}));
}

}  // namespace
}  // namespace unlearn
