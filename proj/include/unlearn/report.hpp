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

#ifndef UNLEARN_REPORT_HPP_
#define UNLEARN_REPORT_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unlearn/bench.hpp"

namespace unlearn::report {

inline constexpr std::string_view kCsvHeader =
    "strategy,target_size,delete_percentage,repeat,n_deleted,"
    "consistency_before,consistency_after,percent_change,agreement_after,"
    "computational_cost_seconds,test_set_hash";

// One logged trial, as it appears in the text log and the CSV.
struct ResultRow {
  std::string strategy;
  std::size_t target_size = 0;
  double delete_percentage = 0.0;
  std::size_t repeat = 0;
  std::size_t n_deleted = 0;
  double consistency_before = 0.0;
  double consistency_after = 0.0;
  std::optional<double> percent_change;  // nullopt prints as "undefined"
  double agreement_after = 0.0;
  double computational_cost_seconds = 0.0;
  std::uint64_t test_set_hash = 0;

  bool operator==(const ResultRow&) const = default;
};

ResultRow to_row(const bench::TrialResult& r);

// Shortest decimal text that parses back to exactly `v`.
std::string format_number(double v);

std::string csv_line(const ResultRow& row);
// Header plus one line per row, '\n' terminated.
std::string results_csv(std::span<const ResultRow> rows);
// Parses a results CSV. Throws SchemaError when a column is missing or
// misnamed, ParseError (with line) for bad values.
std::vector<ResultRow> parse_results_csv(std::string_view text);

// Text log block:
//   [trial]
//   key = value      (one line per CSV column, CSV column order)
//   [end]
// Lines starting with '#' and blank lines between blocks are ignored.
std::string log_block(const ResultRow& row);
std::string log_comment(std::string_view text);
std::vector<ResultRow> parse_log(std::string_view text);

// Log -> CSV with the same schema and bytes the bench writes directly.
std::string tidy(std::string_view log_text);

// Grouped chart: one panel per deletion percentage, x = target size, bars =
// median computational cost per strategy, markers = median percent change in
// consistency (right axis). Throws ArgumentError on empty input.
std::string render_svg(std::span<const ResultRow> rows);

}  // namespace unlearn::report

#endif  // UNLEARN_REPORT_HPP_
