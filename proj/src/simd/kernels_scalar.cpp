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

#include <cstddef>

#include "unlearn/simd/kernels.hpp"

namespace unlearn::simd::scalar {
namespace {

// 1 - (a^2 + b^2) / n^2. Operation order mirrored by the AVX2 variant.
inline double impurity(double a, double b) {
  const double n = a + b;
  return 1.0 - (a * a + b * b) / (n * n);
}

}  // namespace

void count_le_by_label(std::span<const double> values,
                       std::span<const std::uint8_t> labels,
                       std::span<const double> thresholds,
                       std::span<std::uint32_t> left_n0,
                       std::span<std::uint32_t> left_n1) {
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    const double t = thresholds[k];
    std::uint32_t total = 0;
    std::uint32_t ones = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::uint32_t le = values[i] <= t;
      total += le;
      ones += le & labels[i];
    }
    left_n0[k] = total - ones;
    left_n1[k] = ones;
  }
}

void gini_gains(std::uint32_t parent_n0, std::uint32_t parent_n1,
                std::span<const std::uint32_t> left_n0,
                std::span<const std::uint32_t> left_n1,
                std::span<double> gains) {
  const double p0 = parent_n0;
  const double p1 = parent_n1;
  const double n = p0 + p1;
  const double g_parent = impurity(p0, p1);
  for (std::size_t k = 0; k < gains.size(); ++k) {
    const double l0 = left_n0[k];
    const double l1 = left_n1[k];
    const double r0 = p0 - l0;
    const double r1 = p1 - l1;
    const double nl = l0 + l1;
    const double nr = r0 + r1;
    if (nl == 0.0 || nr == 0.0) {
      gains[k] = 0.0;
      continue;
    }
    const double wl = nl / n;
    const double wr = nr / n;
    gains[k] = (g_parent - wl * impurity(l0, l1)) - wr * impurity(r0, r1);
  }
}

void accumulate(std::span<double> acc, std::span<const double> x) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += x[i];
}

}  // namespace unlearn::simd::scalar
