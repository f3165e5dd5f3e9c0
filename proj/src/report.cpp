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

#include "unlearn/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "unlearn/error.hpp"

namespace unlearn::report {
namespace {

constexpr std::array<std::string_view, 11> kColumns = {
    "strategy",           "target_size",       "delete_percentage",
    "repeat",             "n_deleted",         "consistency_before",
    "consistency_after",  "percent_change",    "agreement_after",
    "computational_cost_seconds", "test_set_hash"};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<std::string> fields_of(const ResultRow& r) {
  return {r.strategy,
          std::to_string(r.target_size),
          format_number(r.delete_percentage),
          std::to_string(r.repeat),
          std::to_string(r.n_deleted),
          format_number(r.consistency_before),
          format_number(r.consistency_after),
          r.percent_change ? format_number(*r.percent_change) : "undefined",
          format_number(r.agreement_after),
          format_number(r.computational_cost_seconds),
          hex64(r.test_set_hash)};
}

double parse_double(std::string_view s, std::size_t line,
                    std::string_view column) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw ParseError("bad number '" + std::string(s) + "' for " +
                         std::string(column),
                     line);
  }
  return v;
}

std::size_t parse_size(std::string_view s, std::size_t line,
                       std::string_view column) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw ParseError("bad integer '" + std::string(s) + "' for " +
                         std::string(column),
                     line);
  }
  return v;
}

// Fills one column of `row` from text; `index` is the kColumns position.
void assign(ResultRow& row, std::size_t index, std::string_view value,
            std::size_t line) {
  const auto col = kColumns[index];
  switch (index) {
    case 0:
      if (!bench::parse_strategy(value)) {
        throw ParseError("unknown strategy '" + std::string(value) + "'", line);
      }
      row.strategy = std::string(value);
      break;
    case 1: row.target_size = parse_size(value, line, col); break;
    case 2: row.delete_percentage = parse_double(value, line, col); break;
    case 3: row.repeat = parse_size(value, line, col); break;
    case 4: row.n_deleted = parse_size(value, line, col); break;
    case 5: row.consistency_before = parse_double(value, line, col); break;
    case 6: row.consistency_after = parse_double(value, line, col); break;
    case 7:
      if (value == "undefined") {
        row.percent_change.reset();
      } else {
        row.percent_change = parse_double(value, line, col);
      }
      break;
    case 8: row.agreement_after = parse_double(value, line, col); break;
    case 9:
      row.computational_cost_seconds = parse_double(value, line, col);
      break;
    case 10: {
      std::uint64_t h = 0;
      auto [p, ec] =
          std::from_chars(value.data(), value.data() + value.size(), h, 16);
      if (value.size() != 16 || ec != std::errc() ||
          p != value.data() + value.size()) {
        throw ParseError("bad test_set_hash '" + std::string(value) + "'", line);
      }
      row.test_set_hash = h;
      break;
    }
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ResultRow to_row(const bench::TrialResult& r) {
  ResultRow row;
  row.strategy = std::string(bench::strategy_name(r.config.strategy));
  row.target_size = r.config.target_size;
  row.delete_percentage = r.config.delete_percentage;
  row.repeat = r.config.repeat;
  row.n_deleted = r.n_deleted;
  row.consistency_before = r.consistency_before;
  row.consistency_after = r.consistency_after;
  row.percent_change = r.percent_change;
  row.agreement_after = r.agreement_after;
  row.computational_cost_seconds = r.computational_cost_seconds;
  row.test_set_hash = r.test_set_hash;
  return row;
}

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string csv_line(const ResultRow& row) {
  std::string out;
  for (const auto& f : fields_of(row)) {
    if (!out.empty()) out.push_back(',');
    out += f;
  }
  return out;
}

std::string results_csv(std::span<const ResultRow> rows) {
  std::string out(kCsvHeader);
  out.push_back('\n');
  for (const auto& r : rows) {
    out += csv_line(r);
    out.push_back('\n');
  }
  return out;
}

std::vector<ResultRow> parse_results_csv(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty()) throw SchemaError("results CSV is empty");
  auto split = [](std::string_view line) {
    std::vector<std::string_view> f;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      f.push_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return f;
  };
  auto header = split(trim(lines[0]));
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i >= header.size() || header[i] != kColumns[i]) {
      throw SchemaError("results CSV: expected column '" +
                        std::string(kColumns[i]) + "' at position " +
                        std::to_string(i + 1));
    }
  }
  if (header.size() != kColumns.size()) {
    throw SchemaError("results CSV: unexpected column '" +
                      std::string(header[kColumns.size()]) + "'");
  }
  std::vector<ResultRow> rows;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    auto line = trim(lines[l]);
    if (line.empty()) continue;
    auto f = split(line);
    if (f.size() != kColumns.size()) {
      throw ParseError("expected " + std::to_string(kColumns.size()) +
                           " fields, got " + std::to_string(f.size()),
                       l + 1);
    }
    ResultRow row;
    for (std::size_t i = 0; i < f.size(); ++i) assign(row, i, f[i], l + 1);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string log_block(const ResultRow& row) {
  std::string out = "[trial]\n";
  auto fields = fields_of(row);
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    out += kColumns[i];
    out += " = ";
    out += fields[i];
    out.push_back('\n');
  }
  out += "[end]\n";
  return out;
}

std::string log_comment(std::string_view text) {
  std::string out;
  for (auto line : split_lines(text)) {
    out += "# ";
    out += line;
    out.push_back('\n');
  }
  if (out.empty()) out = "#\n";
  return out;
}

std::vector<ResultRow> parse_log(std::string_view text) {
  std::vector<ResultRow> rows;
  auto lines = split_lines(text);
  std::optional<ResultRow> open;
  std::size_t open_line = 0;
  std::array<bool, kColumns.size()> seen{};
  for (std::size_t l = 0; l < lines.size(); ++l) {
    const std::size_t lineno = l + 1;
    auto line = trim(lines[l]);
    if (!open) {
      if (line.empty() || line.front() == '#') continue;
      if (line != "[trial]") {
        throw ParseError("expected [trial], got '" + std::string(line) + "'",
                         lineno);
      }
      open.emplace();
      open_line = lineno;
      seen.fill(false);
      continue;
    }
    if (line == "[end]") {
      for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
          throw ParseError("block missing '" + std::string(kColumns[i]) + "'",
                           lineno);
        }
      }
      rows.push_back(std::move(*open));
      open.reset();
      continue;
    }
    if (line == "[trial]") {
      throw ParseError("block started at line " + std::to_string(open_line) +
                           " is not closed",
                       lineno);
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected 'key = value'", lineno);
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    auto it = std::find(kColumns.begin(), kColumns.end(), key);
    if (it == kColumns.end()) {
      throw ParseError("unknown key '" + std::string(key) + "'", lineno);
    }
    const auto idx = static_cast<std::size_t>(it - kColumns.begin());
    if (seen[idx]) {
      throw ParseError("duplicate key '" + std::string(key) + "'", lineno);
    }
    seen[idx] = true;
    assign(*open, idx, value, lineno);
  }
  if (open) {
    throw ParseError("truncated block (started at line " +
                         std::to_string(open_line) + ")",
                     lines.size());
  }
  return rows;
}

std::string tidy(std::string_view log_text) {
  auto rows = parse_log(log_text);
  return results_csv(rows);
}

std::string render_svg(std::span<const ResultRow> rows) {
  if (rows.empty()) throw ArgumentError("plot: no result rows");

  // (pct, size, strategy) -> repeats
  struct Cell {
    std::vector<double> cost;
    std::vector<double> change;
  };
  std::map<std::tuple<double, std::size_t, std::string>, Cell> cells;
  std::set<double> pcts;
  std::set<std::size_t> sizes;
  std::set<std::string> strategies;
  for (const auto& r : rows) {
    auto& c = cells[{r.delete_percentage, r.target_size, r.strategy}];
    c.cost.push_back(r.computational_cost_seconds);
    if (r.percent_change) c.change.push_back(*r.percent_change);
    pcts.insert(r.delete_percentage);
    sizes.insert(r.target_size);
    strategies.insert(r.strategy);
  }

  static constexpr std::array<std::string_view, 4> kBar = {"#4c72b0", "#dd8452",
                                                           "#55a868", "#c44e52"};
  static constexpr std::array<std::string_view, 4> kMark = {"#1f3b66", "#8a4312",
                                                            "#2b5a36", "#6e2224"};
  const double panel_w = 320, panel_h = 300, left = 70, top = 60, gap = 80;
  const double plot_w = panel_w - 40, plot_h = panel_h - 90;
  const double width = left + static_cast<double>(pcts.size()) * (panel_w + gap);
  const double height = top + panel_h + 70;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt("%.0f", width)
      << "\" height=\"" << fmt("%.0f", height) << "\" font-family=\"sans-serif\""
      << " font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt("%.1f", width / 2) << "\" y=\"24\" font-size=\"15\""
      << " text-anchor=\"middle\">Computational cost and percent change in"
      << " consistency of unlearning</text>\n";

  std::size_t p_index = 0;
  for (double pct : pcts) {
    const double x0 = left + static_cast<double>(p_index) * (panel_w + gap);
    const double y0 = top + 20;
    double max_cost = 0.0, max_change = 0.0;
    for (auto& [key, cell] : cells) {
      if (std::get<0>(key) != pct) continue;
      max_cost = std::max(max_cost, median(cell.cost));
      if (!cell.change.empty()) {
        max_change = std::max(max_change, std::fabs(median(cell.change)));
      }
    }
    if (max_cost <= 0.0) max_cost = 1.0;
    if (max_change <= 0.0) max_change = 1.0;
    const double base_y = y0 + plot_h;
    const double mid_y = y0 + plot_h / 2;

    svg << "<g class=\"panel\" data-delete-percentage=\"" << format_number(pct)
        << "\">\n";
    svg << "<text x=\"" << fmt("%.1f", x0 + plot_w / 2) << "\" y=\""
        << fmt("%.1f", y0 - 10) << "\" text-anchor=\"middle\" font-size=\"13\">"
        << "delete " << fmt("%.0f", pct * 100) << "%</text>\n";
    svg << "<rect x=\"" << fmt("%.1f", x0) << "\" y=\"" << fmt("%.1f", y0)
        << "\" width=\"" << fmt("%.1f", plot_w) << "\" height=\""
        << fmt("%.1f", plot_h) << "\" fill=\"none\" stroke=\"#888\"/>\n";
    // Left axis: cost.
    for (int t = 0; t <= 4; ++t) {
      const double y = base_y - plot_h * t / 4.0;
      svg << "<text x=\"" << fmt("%.1f", x0 - 4) << "\" y=\"" << fmt("%.1f", y + 4)
          << "\" text-anchor=\"end\">" << fmt("%.3g", max_cost * t / 4.0)
          << "</text>\n";
    }
    // Right axis: percent change, symmetric around zero.
    for (int t = -2; t <= 2; ++t) {
      const double y = mid_y - (plot_h / 2) * t / 2.0;
      svg << "<text x=\"" << fmt("%.1f", x0 + plot_w + 4) << "\" y=\""
          << fmt("%.1f", y + 4) << "\" fill=\"#555\">"
          << fmt("%.3g", max_change * t / 2.0) << "%</text>\n";
    }
    svg << "<line x1=\"" << fmt("%.1f", x0) << "\" y1=\"" << fmt("%.1f", mid_y)
        << "\" x2=\"" << fmt("%.1f", x0 + plot_w) << "\" y2=\""
        << fmt("%.1f", mid_y) << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";

    const double slot = plot_w / static_cast<double>(sizes.size());
    const double bar_w = slot * 0.7 / static_cast<double>(strategies.size());
    std::size_t s_index = 0;
    for (auto size : sizes) {
      const double sx = x0 + slot * static_cast<double>(s_index);
      svg << "<text x=\"" << fmt("%.1f", sx + slot / 2) << "\" y=\""
          << fmt("%.1f", base_y + 16) << "\" text-anchor=\"middle\">n="
          << size << "</text>\n";
      std::size_t k = 0;
      for (const auto& strategy : strategies) {
        auto it = cells.find({pct, size, strategy});
        const double bx = sx + slot * 0.15 + bar_w * static_cast<double>(k);
        if (it != cells.end()) {
          const double cost = median(it->second.cost);
          const double h = plot_h * cost / max_cost;
          svg << "<rect class=\"cost\" data-strategy=\"" << escape_xml(strategy)
              << "\" x=\"" << fmt("%.1f", bx) << "\" y=\""
              << fmt("%.1f", base_y - h) << "\" width=\"" << fmt("%.1f", bar_w)
              << "\" height=\"" << fmt("%.1f", h) << "\" fill=\""
              << kBar[k % kBar.size()] << "\"><title>" << escape_xml(strategy)
              << " n=" << size << " cost " << fmt("%.6g", cost)
              << " s</title></rect>\n";
          if (!it->second.change.empty()) {
            const double change = median(it->second.change);
            const double my = mid_y - (plot_h / 2) * change / max_change;
            svg << "<circle class=\"change\" data-strategy=\""
                << escape_xml(strategy) << "\" cx=\""
                << fmt("%.1f", bx + bar_w / 2) << "\" cy=\"" << fmt("%.1f", my)
                << "\" r=\"4\" fill=\"" << kMark[k % kMark.size()]
                << "\"><title>" << escape_xml(strategy) << " n=" << size
                << " change " << fmt("%.4g", change) << "%</title></circle>\n";
          }
        }
        ++k;
      }
      ++s_index;
    }
    svg << "</g>\n";
    ++p_index;
  }

  // Legend.
  std::size_t k = 0;
  for (const auto& strategy : strategies) {
    const double lx = left + static_cast<double>(k) * 260;
    const double ly = height - 24;
    svg << "<rect x=\"" << fmt("%.1f", lx) << "\" y=\"" << fmt("%.1f", ly - 10)
        << "\" width=\"12\" height=\"12\" fill=\"" << kBar[k % kBar.size()]
        << "\"/>\n<text x=\"" << fmt("%.1f", lx + 16) << "\" y=\""
        << fmt("%.1f", ly) << "\">" << escape_xml(strategy)
        << " cost (s, left)</text>\n<circle cx=\"" << fmt("%.1f", lx + 136)
        << "\" cy=\"" << fmt("%.1f", ly - 4) << "\" r=\"4\" fill=\""
        << kMark[k % kMark.size()] << "\"/>\n<text x=\"" << fmt("%.1f", lx + 144)
        << "\" y=\"" << fmt("%.1f", ly) << "\">% change (right)</text>\n";
    ++k;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace unlearn::report
