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

#ifndef UNLEARN_SIMD_KERNELS_HPP_
#define UNLEARN_SIMD_KERNELS_HPP_

// Data-parallel inner loops of tree training and prediction. Every kernel has
// a scalar reference implementation and, on x86-64, an AVX2 variant chosen at
// runtime. Variants are required to be bit-identical to the scalar reference
// (integer counts exactly, floating-point results via the same operation
// sequence without contraction), which keeps forest structure independent of
// the host CPU.

#include <cstdint>
#include <span>
#include <string_view>

namespace unlearn::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

// Best variant the running CPU supports.
Isa detected_isa();
// Variant currently used by the dispatching entry points.
Isa active_isa();
// Overrides dispatch (tests, benchmarking). Requesting an unsupported ISA
// falls back to scalar; returns the ISA actually selected.
Isa set_active_isa(Isa isa);

// For every threshold t[k]: how many rows with values[i] <= t[k] carry label
// 0 and label 1. `labels` must hold 0/1 bytes, same length as `values`.
void count_le_by_label(std::span<const double> values,
                       std::span<const std::uint8_t> labels,
                       std::span<const double> thresholds,
                       std::span<std::uint32_t> left_n0,
                       std::span<std::uint32_t> left_n1);

// Gini gain of each split of a parent holding (parent_n0, parent_n1) rows,
// given the left-side counts per split. Gain is 0 when a side is empty.
void gini_gains(std::uint32_t parent_n0, std::uint32_t parent_n1,
                std::span<const std::uint32_t> left_n0,
                std::span<const std::uint32_t> left_n1,
                std::span<double> gains);

// acc[i] += x[i]
void accumulate(std::span<double> acc, std::span<const double> x);

// Per-ISA implementations; the dispatching functions above forward to one of
// these. Exposed so equivalence tests can call both directly.
namespace scalar {
void count_le_by_label(std::span<const double>, std::span<const std::uint8_t>,
                       std::span<const double>, std::span<std::uint32_t>,
                       std::span<std::uint32_t>);
void gini_gains(std::uint32_t, std::uint32_t, std::span<const std::uint32_t>,
                std::span<const std::uint32_t>, std::span<double>);
void accumulate(std::span<double>, std::span<const double>);
}  // namespace scalar

#if defined(UNLEARN_HAVE_AVX2_KERNELS)
namespace avx2 {
void count_le_by_label(std::span<const double>, std::span<const std::uint8_t>,
                       std::span<const double>, std::span<std::uint32_t>,
                       std::span<std::uint32_t>);
void gini_gains(std::uint32_t, std::uint32_t, std::span<const std::uint32_t>,
                std::span<const std::uint32_t>, std::span<double>);
void accumulate(std::span<double>, std::span<const double>);
}  // namespace avx2
#endif

}  // namespace unlearn::simd

#endif  // UNLEARN_SIMD_KERNELS_HPP_
