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

#include <atomic>
#include <cassert>

#include "unlearn/simd/kernels.hpp"

namespace unlearn::simd {
namespace {

struct KernelTable {
  decltype(&scalar::count_le_by_label) count_le_by_label;
  decltype(&scalar::gini_gains) gini_gains;
  decltype(&scalar::accumulate) accumulate;
};

constexpr KernelTable kScalarTable{&scalar::count_le_by_label,
                                   &scalar::gini_gains, &scalar::accumulate};
#if defined(UNLEARN_HAVE_AVX2_KERNELS)
constexpr KernelTable kAvx2Table{&avx2::count_le_by_label, &avx2::gini_gains,
                                 &avx2::accumulate};
#endif

const KernelTable& table_for(Isa isa) {
#if defined(UNLEARN_HAVE_AVX2_KERNELS)
  if (isa == Isa::kAvx2) return kAvx2Table;
#endif
  (void)isa;
  return kScalarTable;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

const KernelTable& current() { return table_for(active().load()); }

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

Isa detected_isa() {
#if defined(UNLEARN_HAVE_AVX2_KERNELS)
  if (__builtin_cpu_supports("avx2")) return Isa::kAvx2;
#endif
  return Isa::kScalar;
}

Isa active_isa() { return active().load(); }

Isa set_active_isa(Isa isa) {
  if (isa == Isa::kAvx2 && detected_isa() != Isa::kAvx2) isa = Isa::kScalar;
  active().store(isa);
  return isa;
}

void count_le_by_label(std::span<const double> values,
                       std::span<const std::uint8_t> labels,
                       std::span<const double> thresholds,
                       std::span<std::uint32_t> left_n0,
                       std::span<std::uint32_t> left_n1) {
  assert(values.size() == labels.size());
  assert(left_n0.size() >= thresholds.size());
  assert(left_n1.size() >= thresholds.size());
  current().count_le_by_label(values, labels, thresholds, left_n0, left_n1);
}

void gini_gains(std::uint32_t parent_n0, std::uint32_t parent_n1,
                std::span<const std::uint32_t> left_n0,
                std::span<const std::uint32_t> left_n1,
                std::span<double> gains) {
  assert(left_n0.size() >= gains.size() && left_n1.size() >= gains.size());
  current().gini_gains(parent_n0, parent_n1, left_n0, left_n1, gains);
}

void accumulate(std::span<double> acc, std::span<const double> x) {
  assert(acc.size() == x.size());
  current().accumulate(acc, x);
}

}  // namespace unlearn::simd
