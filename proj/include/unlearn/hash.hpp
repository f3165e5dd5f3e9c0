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

#ifndef UNLEARN_HASH_HPP_
#define UNLEARN_HASH_HPP_

#include <bit>
#include <cstdint>
#include <span>
#include <string_view>

namespace unlearn {

// SplitMix64 finalizer. Used to derive independent sub-seeds and to key
// deterministic selections; never used for anything security related.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ mix64(value));
}

template <typename... Ts>
constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value,
                                     Ts... rest) {
  return hash_combine(hash_combine(seed, value), rest...);
}

// Bit pattern of a double with -0.0 folded onto +0.0, so values that compare
// equal hash equal.
inline std::uint64_t canonical_bits(double v) {
  return std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v);
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = kFnvOffset) {
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::span<const std::byte> bytes,
                             std::uint64_t h = kFnvOffset) {
  for (std::byte b : bytes) {
    h ^= static_cast<std::uint64_t>(b);
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace unlearn

#endif  // UNLEARN_HASH_HPP_
