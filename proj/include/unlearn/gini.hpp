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

#ifndef UNLEARN_GINI_HPP_
#define UNLEARN_GINI_HPP_

#include <cstdint>

namespace unlearn {

struct ClassCounts {
  std::uint32_t n0 = 0;
  std::uint32_t n1 = 0;

  std::uint32_t total() const { return n0 + n1; }
  std::uint32_t& operator[](std::uint8_t label) { return label ? n1 : n0; }
  std::uint32_t operator[](std::uint8_t label) const { return label ? n1 : n0; }
  bool pure() const { return n0 == 0 || n1 == 0; }

  bool operator==(const ClassCounts&) const = default;
};

// Gini impurity 1 - (n0^2 + n1^2) / (n0 + n1)^2.
double gini_impurity(ClassCounts c);

// G(parent) - (|L|/|P|) G(left) - (|R|/|P|) G(right); 0 when either side is
// empty. Throws std::logic_error when left + right != parent or parent is
// empty. Bit-identical to the batched kernel in simd/kernels.hpp.
double gini_gain(ClassCounts parent, ClassCounts left, ClassCounts right);

}  // namespace unlearn

#endif  // UNLEARN_GINI_HPP_
