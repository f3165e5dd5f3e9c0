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

// Random instance generators shared by the unit and acceptance tests.

#ifndef UNLEARN_TESTS_TEST_UTIL_HPP_
#define UNLEARN_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <random>
#include <vector>

#include "unlearn/dataset.hpp"
#include "unlearn/forest.hpp"

namespace unlearn::test {

inline Dataset make_dataset(std::size_t cols, std::vector<double> x,
                            std::vector<std::uint8_t> y) {
  std::vector<std::uint64_t> ids(y.size());
  std::iota(ids.begin(), ids.end(), std::uint64_t{0});
  return Dataset(cols, std::move(x), std::move(y), std::move(ids));
}

// Mix of low-cardinality integer columns (lots of ties) and Gaussian columns;
// labels depend on a noisy linear score so splits carry signal.
inline Dataset random_dataset(std::mt19937_64& rng, std::size_t rows,
                              std::size_t d) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<int> levels(d);
  for (auto& l : levels) l = coin(rng) ? std::uniform_int_distribution<int>(2, 5)(rng) : 0;
  std::normal_distribution<double> gauss;
  std::vector<double> x(rows * d);
  std::vector<std::uint8_t> y(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double score = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double v =
          levels[c] ? std::uniform_int_distribution<int>(0, levels[c] - 1)(rng)
                    : gauss(rng);
      x[r * d + c] = v;
      score += (c % 2 ? -1.0 : 1.0) * v;
    }
    y[r] = score + gauss(rng) > 0.0 ? 1 : 0;
  }
  return make_dataset(d, std::move(x), std::move(y));
}

inline ForestParams random_params(std::mt19937_64& rng, std::size_t d) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  ForestParams p;
  p.n_trees = pick(1, 5);
  p.max_depth = pick(1, 8);
  p.max_features_per_tree = pick(0, d);
  p.thresholds_per_feature = pick(1, 8);
  p.min_samples_leaf = pick(1, 4);
  return p;
}

// `count` distinct row ids of `ds` in random order.
inline std::vector<std::uint64_t> random_deletions(std::mt19937_64& rng,
                                                   const Dataset& ds,
                                                   std::size_t count) {
  std::vector<std::uint64_t> ids(ds.row_ids().begin(), ds.row_ids().end());
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(std::min(count, ids.size()));
  return ids;
}

inline bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace unlearn::test

#endif  // UNLEARN_TESTS_TEST_UTIL_HPP_
