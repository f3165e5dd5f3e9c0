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

#ifndef UNLEARN_SELFTEST_HPP_
#define UNLEARN_SELFTEST_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace unlearn {

struct SelftestOptions {
  std::uint64_t seed = 0x5e1f7e57;
  // Randomized fit/delete/refit instances per model kind.
  std::size_t instances = 40;
  // Damages one forest's root counts before the count-conservation check.
  bool inject_corruption = false;
};

struct SelftestCheck {
  std::string name;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::vector<std::string> messages;  // first few failure messages
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;

  std::size_t passed() const;
  std::size_t failed() const;
  bool ok() const { return failed() == 0; }
};

SelftestReport run_selftest(const SelftestOptions& options = {});

}  // namespace unlearn

#endif  // UNLEARN_SELFTEST_HPP_
