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

#include <cstring>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "unlearn/simd/kernels.hpp"

namespace unlearn::simd {
namespace {

// Reference written out long-hand, independent of both kernel variants.
void naive_count(const std::vector<double>& v, const std::vector<std::uint8_t>& y,
                 const std::vector<double>& t, std::vector<std::uint32_t>& l0,
                 std::vector<std::uint32_t>& l1) {
  l0.assign(t.size(), 0);
  l1.assign(t.size(), 0);
  for (std::size_t k = 0; k < t.size(); ++k) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] <= t[k]) (y[i] ? l1 : l0)[k]++;
    }
  }
}

TEST(Kernels, DispatchOverride) {
  const Isa detected = detected_isa();
  EXPECT_EQ(set_active_isa(Isa::kScalar), Isa::kScalar);
  EXPECT_EQ(active_isa(), Isa::kScalar);
  EXPECT_EQ(set_active_isa(detected), detected);
  EXPECT_EQ(isa_name(Isa::kScalar), "scalar");
}

TEST(Kernels, ScalarCountMatchesReference) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = rng() % 70;
    const std::size_t m = rng() % 12;
    std::vector<double> v(n), t(m);
    std::vector<std::uint8_t> y(n);
    for (auto& x : v) x = static_cast<double>(rng() % 7) - 3.0;
    for (auto& x : y) x = rng() & 1;
    for (auto& x : t) x = static_cast<double>(rng() % 9) - 4.0 + 0.5;
    std::vector<std::uint32_t> a0(m), a1(m), r0, r1;
    scalar::count_le_by_label(v, y, t, a0, a1);
    naive_count(v, y, t, r0, r1);
    EXPECT_EQ(a0, r0);
    EXPECT_EQ(a1, r1);
  }
}

#if defined(UNLEARN_HAVE_AVX2_KERNELS)

class Avx2Kernels : public ::testing::Test {
 protected:
  void SetUp() override {
    if (detected_isa() != Isa::kAvx2) GTEST_SKIP() << "CPU lacks AVX2";
  }
};

TEST_F(Avx2Kernels, CountEquivalence) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = rng() % 133;
    const std::size_t m = rng() % 20;
    std::vector<double> v(n), t(m);
    std::vector<std::uint8_t> y(n);
    for (auto& x : v) x = trial % 2 ? g(rng) : static_cast<double>(rng() % 5);
    for (auto& x : y) x = rng() & 1;
    for (auto& x : t) x = trial % 2 ? g(rng) : static_cast<double>(rng() % 5);
    if (n && m && trial % 3 == 0) t[0] = v[0];  // exact equality edge
    std::vector<std::uint32_t> s0(m), s1(m), a0(m), a1(m);
    scalar::count_le_by_label(v, y, t, s0, s1);
    avx2::count_le_by_label(v, y, t, a0, a1);
    ASSERT_EQ(s0, a0) << "trial " << trial;
    ASSERT_EQ(s1, a1) << "trial " << trial;
  }
}

TEST_F(Avx2Kernels, GiniGainsBitIdentical) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint32_t p0 = rng() % 300;
    const std::uint32_t p1 = rng() % 300 + (p0 == 0);
    const std::size_t m = rng() % 37;
    std::vector<std::uint32_t> l0(m), l1(m);
    for (std::size_t k = 0; k < m; ++k) {
      l0[k] = static_cast<std::uint32_t>(rng() % (p0 + 1));
      l1[k] = static_cast<std::uint32_t>(rng() % (p1 + 1));
    }
    if (m) { l0[0] = 0; l1[0] = 0; }  // empty left side
    if (m > 1) { l0[1] = p0; l1[1] = p1; }  // empty right side
    std::vector<double> s(m), a(m);
    scalar::gini_gains(p0, p1, l0, l1, s);
    avx2::gini_gains(p0, p1, l0, l1, a);
    ASSERT_EQ(0, std::memcmp(s.data(), a.data(), m * sizeof(double)))
        << "trial " << trial;
  }
}

TEST_F(Avx2Kernels, AccumulateBitIdentical) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = rng() % 41;
    std::vector<double> base(n), x(n);
    for (auto& v : base) v = u(rng);
    for (auto& v : x) v = u(rng);
    auto s = base;
    auto a = base;
    scalar::accumulate(s, x);
    avx2::accumulate(a, x);
    ASSERT_EQ(0, std::memcmp(s.data(), a.data(), n * sizeof(double)));
  }
}

#endif

TEST(Kernels, GainsZeroForEmptySide) {
  std::vector<std::uint32_t> l0{0, 3}, l1{0, 5};
  std::vector<double> g(2, -1.0);
  gini_gains(3, 5, l0, l1, g);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 0.0);
}

}  // namespace
}  // namespace unlearn::simd
