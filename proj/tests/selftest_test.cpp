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

#include "gtest/gtest.h"
#include "unlearn/selftest.hpp"

namespace unlearn {
namespace {

TEST(Selftest, CleanBuildPasses) {
  auto report = run_selftest();
  EXPECT_TRUE(report.ok());
  EXPECT_GT(report.passed(), 100u);
}

TEST(Selftest, InjectedCorruptionFailsConservation) {
  SelftestOptions opt;
  opt.instances = 5;
  opt.inject_corruption = true;
  auto report = run_selftest(opt);
  EXPECT_FALSE(report.ok());
  bool conservation_failed = false;
  for (const auto& c : report.checks) {
    if (c.name == "count conservation") conservation_failed = c.failed > 0;
  }
  EXPECT_TRUE(conservation_failed);
}

}  // namespace
}  // namespace unlearn
