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

#include "unlearn/gini.hpp"

#include <stdexcept>

#include "unlearn/simd/kernels.hpp"

namespace unlearn {

double gini_impurity(ClassCounts c) {
  const double a = c.n0;
  const double b = c.n1;
  const double n = a + b;
  return 1.0 - (a * a + b * b) / (n * n);
}

double gini_gain(ClassCounts parent, ClassCounts left, ClassCounts right) {
  if (left.n0 + right.n0 != parent.n0 || left.n1 + right.n1 != parent.n1) {
    throw std::logic_error("gini_gain: child counts do not sum to parent");
  }
  if (parent.total() == 0) throw std::logic_error("gini_gain: empty parent");
  double gain = 0.0;
  simd::scalar::gini_gains(parent.n0, parent.n1, std::span(&left.n0, 1),
                           std::span(&left.n1, 1), std::span(&gain, 1));
  return gain;
}

}  // namespace unlearn
