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

#ifndef UNLEARN_BINARY_IO_HPP_
#define UNLEARN_BINARY_IO_HPP_

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "unlearn/error.hpp"

namespace unlearn {

// Little-endian byte sink for the checkpoint and dataset containers.
class ByteWriter {
 public:
  void bytes(std::span<const std::byte> data) {
    buf_.insert(buf_.end(), data.begin(), data.end());
  }

  void magic(std::string_view tag) {
    bytes(std::as_bytes(std::span(tag.data(), tag.size())));
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    if constexpr (std::is_floating_point_v<T>) {
      using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
      put(std::bit_cast<U>(value));
    } else {
      using U = std::make_unsigned_t<T>;
      auto u = static_cast<U>(value);
      for (std::size_t i = 0; i < sizeof(T); ++i) {
        buf_.push_back(static_cast<std::byte>((u >> (8 * i)) & 0xff));
      }
    }
  }

  // Length-prefixed (u64) blob.
  void blob(std::span<const std::byte> data) {
    put<std::uint64_t>(data.size());
    bytes(data);
  }

  const std::vector<std::byte>& data() const { return buf_; }
  std::vector<std::byte> take() { return std::move(buf_); }

 private:
  std::vector<std::byte> buf_;
};

// Bounds-checked reader; every failure reports the offset it stopped at.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> data) : data_(data) {}

  void expect_magic(std::string_view tag) {
    require(tag.size(), "truncated magic");
    if (std::memcmp(data_.data() + pos_, tag.data(), tag.size()) != 0) {
      throw FormatError("bad magic, expected '" + std::string(tag) + "'", pos_);
    }
    pos_ += tag.size();
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    if constexpr (std::is_floating_point_v<T>) {
      using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
      return std::bit_cast<T>(get<U>());
    } else {
      require(sizeof(T), "truncated value");
      using U = std::make_unsigned_t<T>;
      U u = 0;
      for (std::size_t i = 0; i < sizeof(T); ++i) {
        u |= static_cast<U>(static_cast<U>(data_[pos_ + i]) << (8 * i));
      }
      pos_ += sizeof(T);
      return static_cast<T>(u);
    }
  }

  std::span<const std::byte> bytes(std::size_t n) {
    require(n, "truncated payload");
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::span<const std::byte> blob() {
    auto n = get<std::uint64_t>();
    return bytes(static_cast<std::size_t>(n));
  }

  // Guards element counts read from the file before allocating for them.
  void require_count(std::uint64_t count, std::size_t elem_size,
                     const char* what) {
    if (elem_size != 0 && count > remaining() / elem_size) {
      throw FormatError(std::string("implausible ") + what + " count", pos_);
    }
  }

  void expect_end() const {
    if (pos_ != data_.size()) {
      throw FormatError("trailing bytes", pos_);
    }
  }

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void require(std::size_t n, const char* what) const {
    if (n > remaining()) throw FormatError(what, pos_);
  }

  std::span<const std::byte> data_;
  std::size_t pos_ = 0;
};

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::byte> data);
std::string read_file_text(const std::filesystem::path& path);
void write_file_text(const std::filesystem::path& path, std::string_view text);

}  // namespace unlearn

#endif  // UNLEARN_BINARY_IO_HPP_
