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

#include <stdexcept>

#include "gtest/gtest.h"
#include "unlearn/gini.hpp"

namespace unlearn {
namespace {

TEST(Gini, Impurity) {
  EXPECT_EQ(gini_impurity({2, 2}), 0.5);
  EXPECT_EQ(gini_impurity({3, 0}), 0.0);
  EXPECT_DOUBLE_EQ(gini_impurity({1, 2}), 4.0 / 9.0);
}

// Hand-derived: G(2,2) = 0.5 and both children pure.
TEST(Gini, PerfectSplitGainsHalf) {
  EXPECT_EQ(gini_gain({2, 2}, {2, 0}, {0, 2}), 0.5);
}

// Children repeat the parent's impurity, so nothing is gained.
TEST(Gini, MirrorSplitGainsNothing) {
  EXPECT_EQ(gini_gain({2, 2}, {1, 1}, {1, 1}), 0.0);
}

TEST(Gini, PureParent) {
  EXPECT_EQ(gini_gain({4, 0}, {1, 0}, {3, 0}), 0.0);
  EXPECT_EQ(gini_gain({4, 0}, {4, 0}, {0, 0}), 0.0);
}

TEST(Gini, EmptySideIsZero) {
  EXPECT_EQ(gini_gain({3, 5}, {0, 0}, {3, 5}), 0.0);
}

TEST(Gini, KnownValue) {
  // parent (3,3): 0.5; left (3,1): 0.375 w=4/6; right (0,2): 0 -> 0.25
  EXPECT_NEAR(gini_gain({3, 3}, {3, 1}, {0, 2}), 0.25, 1e-15);
}

TEST(Gini, MismatchIsInvariantViolation) {
  EXPECT_THROW(gini_gain({2, 2}, {1, 0}, {0, 0}), std::logic_error);
  EXPECT_THROW(gini_gain({0, 0}, {0, 0}, {0, 0}), std::logic_error);
}

TEST(Gini, NonNegativeOverSmallGrid) {
  for (std::uint32_t p0 = 0; p0 < 7; ++p0)
    for (std::uint32_t p1 = 0; p1 < 7; ++p1)
      for (std::uint32_t l0 = 0; l0 <= p0; ++l0)
        for (std::uint32_t l1 = 0; l1 <= p1; ++l1) {
          if (p0 + p1 == 0) continue;
          EXPECT_GE(gini_gain({p0, p1}, {l0, l1}, {p0 - l0, p1 - l1}), -1e-15);
        }
}

}  // namespace
}  // namespace unlearn
