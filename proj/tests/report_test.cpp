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

#include <random>

#include "gtest/gtest.h"
#include "unlearn/error.hpp"
#include "unlearn/report.hpp"

namespace unlearn::report {
namespace {

std::vector<ResultRow> sample_rows() {
  std::vector<ResultRow> rows;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t rep = 0;
  for (std::size_t n : {10, 100, 1000}) {
    for (double pct : {0.25, 0.5, 0.75}) {
      for (const char* s : {"naive", "sisa_dare"}) {
        ResultRow r;
        r.strategy = s;
        r.target_size = n;
        r.delete_percentage = pct;
        r.repeat = rep;
        r.n_deleted = static_cast<std::size_t>(n * pct);
        r.consistency_before = u(rng);
        r.consistency_after = u(rng);
        r.percent_change = bench::percent_change(r.consistency_before, r.consistency_after);
        r.agreement_after = u(rng);
        r.computational_cost_seconds = u(rng) * 1e-3;
        r.test_set_hash = rng();
        rows.push_back(r);
      }
    }
  }
  return rows;
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.25), "0.25");
  EXPECT_EQ(format_number(5.0), "5");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-16.666666666666668), "-16.666666666666668");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
}

TEST(Csv, HeaderAndRoundTrip) {
  auto rows = sample_rows();
  auto csv = results_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
  EXPECT_EQ(parse_results_csv(csv), rows);
  EXPECT_EQ(results_csv(parse_results_csv(csv)), csv);
}

TEST(Csv, UndefinedPercentChange) {
  ResultRow r;
  r.strategy = "naive";
  r.test_set_hash = 0xab;
  EXPECT_EQ(csv_line(r), "naive,0,0,0,0,0,0,undefined,0,0,00000000000000ab");
  std::vector<ResultRow> one{r};
  EXPECT_FALSE(parse_results_csv(results_csv(one))[0].percent_change.has_value());
}

TEST(Csv, SchemaErrorsNameColumns) {
  try {
    parse_results_csv("strategy,target_size\n");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("delete_percentage"), std::string::npos);
  }
  EXPECT_THROW(parse_results_csv(""), SchemaError);
  auto csv = std::string(kCsvHeader) + "\nnaive,10,0.25,0,2,0.5,0.5,0,1,0.1\n";
  try {
    parse_results_csv(csv);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Log, TidyEqualsCsvBytes) {
  auto rows = sample_rows();
  std::string log = log_comment("run started\nseed=1");
  for (const auto& r : rows) {
    log += log_block(r);
    log += "\n";
  }
  EXPECT_EQ(tidy(log), results_csv(rows));
  EXPECT_EQ(parse_log(log).size(), 18u);
}

TEST(Log, BlockLayout) {
  ResultRow r;
  r.strategy = "sisa_dare";
  r.target_size = 10;
  r.delete_percentage = 0.5;
  r.n_deleted = 5;
  r.consistency_before = 0.8;
  r.consistency_after = 0.84;
  r.percent_change = 5.0;
  r.agreement_after = 0.9;
  r.computational_cost_seconds = 0.002;
  r.test_set_hash = 1;
  EXPECT_EQ(log_block(r),
            "[trial]\n"
            "strategy = sisa_dare\n"
            "target_size = 10\n"
            "delete_percentage = 0.5\n"
            "repeat = 0\n"
            "n_deleted = 5\n"
            "consistency_before = 0.8\n"
            "consistency_after = 0.84\n"
            "percent_change = 5\n"
            "agreement_after = 0.9\n"
            "computational_cost_seconds = 0.002\n"
            "test_set_hash = 0000000000000001\n"
            "[end]\n");
}

TEST(Log, EmptyLogIsHeaderOnly) {
  EXPECT_EQ(tidy(""), std::string(kCsvHeader) + "\n");
  EXPECT_EQ(tidy("# nothing ran\n\n"), std::string(kCsvHeader) + "\n");
}

TEST(Log, TruncatedBlockNamesLine) {
  auto rows = sample_rows();
  auto block = log_block(rows[0]);
  auto cut = block.substr(0, block.find("agreement_after"));
  try {
    tidy(log_block(rows[1]) + cut);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 22u);
    EXPECT_NE(std::string(e.what()).find("truncated"), std::string::npos);
  }
}

TEST(Log, MalformedLines) {
  auto good = log_block(sample_rows()[0]);
  auto replace = [&](const std::string& from, const std::string& to) {
    auto s = good;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  auto line_of = [](const std::string& text) {
    try {
      parse_log(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of(replace("repeat = 0", "repeat: 0")), 5u);
  EXPECT_EQ(line_of(replace("repeat = 0", "colour = 0")), 5u);
  EXPECT_EQ(line_of(replace("repeat = 0", "repeat = x")), 5u);
  EXPECT_EQ(line_of(replace("repeat = 0", "strategy = naive")), 5u);
  EXPECT_EQ(line_of(replace("repeat = 0\n", "")), 12u);
  EXPECT_EQ(line_of("garbage\n"), 1u);
}

TEST(Svg, DeterministicWithThreePanels) {
  auto rows = sample_rows();
  auto a = render_svg(rows);
  EXPECT_EQ(a, render_svg(rows));
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  std::size_t panels = 0;
  for (auto pos = a.find("class=\"panel\""); pos != std::string::npos;
       pos = a.find("class=\"panel\"", pos + 1)) {
    ++panels;
  }
  EXPECT_EQ(panels, 3u);
  EXPECT_NE(a.find("delete 25%"), std::string::npos);
  EXPECT_NE(a.find("delete 75%"), std::string::npos);
  std::size_t bars = 0;
  for (auto pos = a.find("class=\"cost\""); pos != std::string::npos;
       pos = a.find("class=\"cost\"", pos + 1)) {
    ++bars;
  }
  EXPECT_EQ(bars, 18u);
}

TEST(Svg, EmptyInputRejected) {
  std::vector<ResultRow> none;
  EXPECT_THROW(render_svg(none), ArgumentError);
}

TEST(ToRow, CopiesFields) {
  bench::TrialResult r;
  r.config.strategy = bench::Strategy::kSisaDare;
  r.config.target_size = 100;
  r.config.delete_percentage = 0.75;
  r.config.repeat = 2;
  r.n_deleted = 75;
  r.consistency_before = 0.7;
  r.consistency_after = 0.7;
  r.percent_change = 0.0;
  r.test_set_hash = 9;
  auto row = to_row(r);
  EXPECT_EQ(row.strategy, "sisa_dare");
  EXPECT_EQ(row.repeat, 2u);
  EXPECT_EQ(row.n_deleted, 75u);
  EXPECT_EQ(row.percent_change, 0.0);
}

}  // namespace
}  // namespace unlearn::report
