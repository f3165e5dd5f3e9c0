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

// Command-line front end: generate -> preprocess -> bench -> tidy -> plot,
// plus selftest. Flags override the --config file, which overrides defaults.

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#if defined(UNLEARN_CLI11_PACKAGE)
#include <CLI/CLI.hpp>
#else
#include "CLI11.hpp"
#endif
#include "unlearn/bench.hpp"
#include "unlearn/binary_io.hpp"
#include "unlearn/dataset.hpp"
#include "unlearn/error.hpp"
#include "unlearn/report.hpp"
#include "unlearn/selftest.hpp"
#include "unlearn/simd/kernels.hpp"

namespace fs = std::filesystem;
using namespace unlearn;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct GlobalOptions {
  std::uint64_t seed = 42;
  std::string isa = "auto";
};

struct GenerateOptions {
  std::string out;
  bool synthetic = false;
  std::size_t rows = 2000;
  std::size_t dims = 64;
  double class_sep = 4.0;
  std::string csv;
  CsvSchema schema;
  std::size_t buckets = 64;
  bool counts = false;
};

struct PreprocessOptions {
  std::string in;
  std::string train_out;
  std::string test_out;
  double test_fraction = 0.3;
};

struct ForestOptions {
  std::size_t trees = 10;
  std::size_t max_depth = 10;
  std::size_t max_features = 0;
  std::size_t thresholds = 8;
  std::size_t min_samples_leaf = 1;

  ForestParams params() const {
    return {trees, max_depth, max_features, thresholds, min_samples_leaf};
  }
};

struct BenchOptions {
  std::string train;
  std::string test;
  std::string log;
  std::string csv;
  std::size_t repeats = 1;
  std::vector<std::string> strategies{"naive", "sisa_dare"};
  std::vector<std::size_t> sizes{10, 100, 1000};
  std::vector<double> percentages{0.25, 0.50, 0.75};
  std::size_t shards = 2;
  std::size_t slices = 1;
  std::size_t test_ceiling = 500;
  bool parallel = false;
  ForestOptions forest;
};

struct TidyOptions {
  std::string log;
  std::string out;
};

struct PlotOptions {
  std::string csv;
  std::string out;
};

struct SelftestCliOptions {
  std::size_t instances = 40;
  bool inject_corruption = false;
};

void print_balance(const char* name, const Dataset& ds) {
  std::size_t pos = 0;
  for (auto y : ds.labels()) pos += y;
  std::cout << name << ": " << ds.rows() << " rows, " << pos << " positive, "
            << ds.rows() - pos << " negative\n";
}

int cmd_generate(const GlobalOptions& g, const GenerateOptions& o) {
  Dataset ds;
  if (o.synthetic) {
    ds = generate_synthetic(o.rows, o.dims, o.class_sep, g.seed);
  } else {
    auto ingested = ingest_csv(o.csv, o.schema);
    if (ingested.records.empty()) {
      throw SchemaError("no usable rows in " + o.csv);
    }
    ds = encode(ingested.records, {o.buckets, g.seed, !o.counts});
    std::cout << "ingested " << ingested.records.size() << " records, skipped "
              << ingested.skipped << "\n";
  }
  save(ds, o.out);
  std::cout << "wrote " << o.out << ": " << ds.rows() << " rows x " << ds.cols()
            << " features\n";
  return 0;
}

int cmd_preprocess(const GlobalOptions& g, const PreprocessOptions& o) {
  const Dataset ds = load(o.in);
  std::size_t pos = 0;
  for (auto y : ds.labels()) pos += y;
  if (pos == 0 || pos == ds.rows()) {
    std::cerr << "warning: " << o.in << " contains a single class\n";
  }
  auto [train, test] = train_test_split(ds, o.test_fraction, g.seed);
  save(train, o.train_out);
  save(test, o.test_out);
  print_balance("train", train);
  print_balance("test", test);
  return 0;
}

int cmd_bench(const GlobalOptions& g, const BenchOptions& o) {
  bench::GridSpec spec;
  spec.strategies.clear();
  for (const auto& s : o.strategies) {
    auto parsed = bench::parse_strategy(s);
    if (!parsed) throw ArgumentError("unknown strategy '" + s + "'");
    spec.strategies.push_back(*parsed);
  }
  spec.target_sizes = o.sizes;
  spec.delete_percentages = o.percentages;
  spec.repeats = o.repeats;
  spec.master_seed = g.seed;
  spec.forest = o.forest.params();
  validate(spec.forest);
  spec.n_shards = o.shards;
  spec.n_slices = o.slices;
  spec.test_ceiling = o.test_ceiling;
  spec.parallel = o.parallel;

  const Dataset train = load(o.train);
  const Dataset test = load(o.test);

  std::ofstream log(o.log, std::ios::app | std::ios::binary);
  if (!log) throw IoError("cannot open log " + o.log);
  log << report::log_comment("bench seed=" + std::to_string(g.seed) +
                             " trials=" +
                             std::to_string(bench::expand_grid(spec).size()) +
                             (o.parallel ? " parallel (costs not comparable)" : ""));
  log.flush();

  std::mutex io;
  std::vector<report::ResultRow> rows;
  bench::GridCallbacks callbacks;
  callbacks.on_result = [&](const bench::TrialResult& r) {
    std::lock_guard lock(io);
    auto row = report::to_row(r);
    log << report::log_block(row);
    log.flush();
    std::cout << row.strategy << " n=" << row.target_size
              << " pct=" << report::format_number(row.delete_percentage)
              << " repeat=" << row.repeat << " deleted=" << row.n_deleted
              << " consistency " << report::format_number(row.consistency_before)
              << " -> " << report::format_number(row.consistency_after)
              << " cost " << report::format_number(row.computational_cost_seconds)
              << " s" << (r.degenerate ? " (degenerate)" : "") << "\n";
  };
  callbacks.on_failure = [&](const bench::TrialFailure& f) {
    std::lock_guard lock(io);
    log << report::log_comment("trial failed: " + f.message);
    log.flush();
    std::cerr << "trial failed: " << f.message << "\n";
  };

  auto outcome = bench::run_grid(spec, train, test, callbacks);
  // The CSV lists trials in grid order even when they finished out of order.
  rows.clear();
  for (const auto& r : outcome.results) rows.push_back(report::to_row(r));
  write_file_text(o.csv, report::results_csv(rows));

  auto trend = bench::cost_trend(outcome.results);
  if (trend.naive_over_sisa_cost) {
    std::cout << "mean naive / sisa_dare cost: "
              << report::format_number(*trend.naive_over_sisa_cost) << "\n";
  }
  std::cout << rows.size() << " results written to " << o.csv << "\n";
  for (const auto& v : outcome.violations) std::cerr << "violation: " << v << "\n";
  return outcome.ok() ? 0 : kExitFailure;
}

int cmd_tidy(const TidyOptions& o) {
  const auto csv = report::tidy(read_file_text(o.log));
  write_file_text(o.out, csv);
  return 0;
}

int cmd_plot(const PlotOptions& o) {
  const auto rows = report::parse_results_csv(read_file_text(o.csv));
  const auto svg = report::render_svg(rows);  // throws before anything is written
  write_file_text(o.out, svg);
  std::cout << "wrote " << o.out << "\n";
  return 0;
}

int cmd_selftest(const GlobalOptions& g, const SelftestCliOptions& o) {
  SelftestOptions options;
  options.seed = g.seed;
  options.instances = o.instances;
  options.inject_corruption = o.inject_corruption;
  const auto result = run_selftest(options);
  for (const auto& c : result.checks) {
    std::cout << (c.failed ? "FAIL " : "ok   ") << c.name << ": " << c.passed
              << " passed, " << c.failed << " failed\n";
    for (const auto& m : c.messages) std::cout << "     " << m << "\n";
  }
  std::cout << result.passed() << " passed, " << result.failed() << " failed\n";
  return result.ok() ? 0 : kExitFailure;
}

void add_forest_options(CLI::App* app, ForestOptions& f) {
  app->add_option("--trees", f.trees, "Trees per forest")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--max-depth", f.max_depth, "Maximum tree depth")
      ->capture_default_str();
  app->add_option("--max-features", f.max_features,
                  "Features sampled per tree (0 = ceil(sqrt(d)))")
      ->capture_default_str();
  app->add_option("--thresholds", f.thresholds, "Candidate thresholds per feature")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--min-samples-leaf", f.min_samples_leaf, "Minimum rows per leaf")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact machine unlearning benchmark: DaRE forests, SISA ensembles "
               "and naive retraining"};
  app.set_config("--config", "", "Flat key = value config file ([section] per subcommand)");
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Master seed")
      ->envname("UNLEARN_SEED")
      ->capture_default_str();
  app.add_option("--isa", global.isa, "Kernel instruction set: auto, scalar, avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
      ->capture_default_str();

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Write a dataset container");
  generate->add_option("-o,--out", gen.out, "Output container")->required();
  auto* synth = generate->add_flag("--synthetic", gen.synthetic,
                                   "Two Gaussian clouds");
  auto* csv_in = generate->add_option("--csv", gen.csv, "Input CSV to ingest and encode")
                     ->check(CLI::ExistingFile);
  synth->excludes(csv_in);
  generate->add_option("--rows", gen.rows, "Synthetic rows")->capture_default_str();
  generate->add_option("--dims", gen.dims, "Synthetic features")->capture_default_str();
  generate->add_option("--class-sep", gen.class_sep, "Distance between class means")
      ->capture_default_str();
  generate->add_option("--id-column", gen.schema.user_id_column)->capture_default_str();
  generate->add_option("--label-column", gen.schema.label_column)->capture_default_str();
  generate->add_option("--text-column", gen.schema.text_column)->capture_default_str();
  generate->add_option("--buckets", gen.buckets, "Hashed token buckets")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  generate->add_flag("--counts", gen.counts, "Token counts instead of presence bits");

  PreprocessOptions pre;
  auto* preprocess = app.add_subcommand("preprocess", "Split a container into train/test");
  preprocess->add_option("-i,--in", pre.in)->required()->check(CLI::ExistingFile);
  preprocess->add_option("--train-out", pre.train_out)->required();
  preprocess->add_option("--test-out", pre.test_out)->required();
  preprocess->add_option("--test-fraction", pre.test_fraction)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  BenchOptions bo;
  auto* benchmark = app.add_subcommand("bench", "Run the unlearning trial grid");
  benchmark->add_option("--train", bo.train)->required()->check(CLI::ExistingFile);
  benchmark->add_option("--test", bo.test)->required()->check(CLI::ExistingFile);
  benchmark->add_option("--log", bo.log, "Append-only text log")->required();
  benchmark->add_option("--csv", bo.csv, "Results CSV")->required();
  benchmark->add_option("--repeats", bo.repeats)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  benchmark->add_option("--strategies", bo.strategies)
      ->check(CLI::IsMember({"naive", "sisa_dare"}))
      ->capture_default_str();
  benchmark->add_option("--sizes", bo.sizes)->capture_default_str();
  benchmark->add_option("--percentages", bo.percentages)
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  benchmark->add_option("--shards", bo.shards)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  benchmark->add_option("--slices", bo.slices)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  benchmark->add_option("--test-ceiling", bo.test_ceiling)->capture_default_str();
  benchmark->add_flag("--parallel", bo.parallel,
                      "Run trials concurrently (invalidates cost comparisons)");
  add_forest_options(benchmark, bo.forest);

  TidyOptions to;
  auto* tidy = app.add_subcommand("tidy", "Convert a text log to the results CSV");
  tidy->add_option("--log", to.log)->required()->check(CLI::ExistingFile);
  tidy->add_option("-o,--out", to.out)->required();

  PlotOptions po;
  auto* plot = app.add_subcommand("plot", "Render a results CSV as SVG");
  plot->add_option("--csv", po.csv)->required()->check(CLI::ExistingFile);
  plot->add_option("-o,--out", po.out)->required();

  SelftestCliOptions so;
  auto* selftest = app.add_subcommand("selftest", "Run the built-in oracle checks");
  selftest->add_option("--instances", so.instances)->capture_default_str();
  selftest->add_flag("--inject-corruption", so.inject_corruption)->group("");

  try {
    app.parse(argc, argv);
    if (*generate && !gen.synthetic && gen.csv.empty()) {
      throw CLI::RequiredError("generate needs --synthetic or --csv");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (global.isa == "scalar") {
    simd::set_active_isa(simd::Isa::kScalar);
  } else if (global.isa == "avx2") {
    if (simd::detected_isa() != simd::Isa::kAvx2) {
      std::cerr << "error: AVX2 kernels are not available on this machine\n";
      return kExitUsage;
    }
    simd::set_active_isa(simd::Isa::kAvx2);
  }

  try {
    if (*generate) return cmd_generate(global, gen);
    if (*preprocess) return cmd_preprocess(global, pre);
    if (*benchmark) return cmd_bench(global, bo);
    if (*tidy) return cmd_tidy(to);
    if (*plot) return cmd_plot(po);
    if (*selftest) return cmd_selftest(global, so);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitFailure;
}
