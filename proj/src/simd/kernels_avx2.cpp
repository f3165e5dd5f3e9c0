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

// Compiled with -mavx2 only; reached through runtime dispatch after CPUID.

#include <immintrin.h>

#include <cstddef>
#include <cstring>

#include "unlearn/simd/kernels.hpp"

namespace unlearn::simd::avx2 {
namespace {

inline __m256d impurity(__m256d a, __m256d b) {
  const __m256d n = _mm256_add_pd(a, b);
  const __m256d sq = _mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
  return _mm256_sub_pd(_mm256_set1_pd(1.0),
                       _mm256_div_pd(sq, _mm256_mul_pd(n, n)));
}

inline std::uint64_t hsum_epi64(__m256i v) {
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

}  // namespace

void count_le_by_label(std::span<const double> values,
                       std::span<const std::uint8_t> labels,
                       std::span<const double> thresholds,
                       std::span<std::uint32_t> left_n0,
                       std::span<std::uint32_t> left_n1) {
  const std::size_t n = values.size();
  const std::size_t body = n & ~std::size_t{3};
  const __m256i one = _mm256_set1_epi64x(1);
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    const double t = thresholds[k];
    const __m256d tv = _mm256_set1_pd(t);
    __m256i total = _mm256_setzero_si256();
    __m256i ones = _mm256_setzero_si256();
    for (std::size_t i = 0; i < body; i += 4) {
      const __m256d v = _mm256_loadu_pd(values.data() + i);
      const __m256i le =
          _mm256_and_si256(_mm256_castpd_si256(_mm256_cmp_pd(v, tv, _CMP_LE_OQ)),
                           one);
      std::int32_t packed;
      std::memcpy(&packed, labels.data() + i, 4);
      const __m256i lab = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(packed));
      total = _mm256_add_epi64(total, le);
      ones = _mm256_add_epi64(ones, _mm256_and_si256(le, lab));
    }
    auto tot = static_cast<std::uint32_t>(hsum_epi64(total));
    auto one_count = static_cast<std::uint32_t>(hsum_epi64(ones));
    for (std::size_t i = body; i < n; ++i) {
      const std::uint32_t le = values[i] <= t;
      tot += le;
      one_count += le & labels[i];
    }
    left_n0[k] = tot - one_count;
    left_n1[k] = one_count;
  }
}

void gini_gains(std::uint32_t parent_n0, std::uint32_t parent_n1,
                std::span<const std::uint32_t> left_n0,
                std::span<const std::uint32_t> left_n1,
                std::span<double> gains) {
  const std::size_t m = gains.size();
  const std::size_t body = m & ~std::size_t{3};
  const __m256d p0 = _mm256_set1_pd(parent_n0);
  const __m256d p1 = _mm256_set1_pd(parent_n1);
  const __m256d n = _mm256_add_pd(p0, p1);
  const __m256d g_parent = impurity(p0, p1);
  const __m256d zero = _mm256_setzero_pd();
  for (std::size_t k = 0; k < body; k += 4) {
    const __m256d l0 = _mm256_cvtepi32_pd(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(left_n0.data() + k)));
    const __m256d l1 = _mm256_cvtepi32_pd(
        _mm_loadu_si128(reinterpret_cast<const __m128i*>(left_n1.data() + k)));
    const __m256d r0 = _mm256_sub_pd(p0, l0);
    const __m256d r1 = _mm256_sub_pd(p1, l1);
    const __m256d nl = _mm256_add_pd(l0, l1);
    const __m256d nr = _mm256_add_pd(r0, r1);
    const __m256d wl = _mm256_div_pd(nl, n);
    const __m256d wr = _mm256_div_pd(nr, n);
    const __m256d gain = _mm256_sub_pd(
        _mm256_sub_pd(g_parent, _mm256_mul_pd(wl, impurity(l0, l1))),
        _mm256_mul_pd(wr, impurity(r0, r1)));
    const __m256d empty = _mm256_or_pd(_mm256_cmp_pd(nl, zero, _CMP_EQ_OQ),
                                       _mm256_cmp_pd(nr, zero, _CMP_EQ_OQ));
    _mm256_storeu_pd(gains.data() + k, _mm256_blendv_pd(gain, zero, empty));
  }
  if (body < m) {
    scalar::gini_gains(parent_n0, parent_n1, left_n0.subspan(body),
                       left_n1.subspan(body), gains.subspan(body));
  }
}

void accumulate(std::span<double> acc, std::span<const double> x) {
  const std::size_t n = acc.size();
  const std::size_t body = n & ~std::size_t{3};
  for (std::size_t i = 0; i < body; i += 4) {
    _mm256_storeu_pd(acc.data() + i,
                     _mm256_add_pd(_mm256_loadu_pd(acc.data() + i),
                                   _mm256_loadu_pd(x.data() + i)));
  }
  for (std::size_t i = body; i < n; ++i) acc[i] += x[i];
}

}  // namespace unlearn::simd::avx2
