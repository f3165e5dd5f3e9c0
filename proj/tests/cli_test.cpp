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

// Drives the built `unlearn` binary through its subcommands.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "unlearn/binary_io.hpp"
#include "unlearn/dataset.hpp"
#include "unlearn/report.hpp"

namespace unlearn {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("unlearn_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  CliRun run(const std::string& args, const std::string& env = "") const {
    const std::string cmd =
        env + " '" UNLEARN_CLI_PATH "' " + args + " 2>&1";
    CliRun r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
  }

  void pipeline_inputs() {
    ASSERT_EQ(run("generate --synthetic --rows 400 --dims 8 -o " + path("d.bin")).code, 0);
    ASSERT_EQ(run("preprocess -i " + path("d.bin") + " --train-out " + path("tr.bin") +
                  " --test-out " + path("te.bin"))
                  .code,
              0);
  }

  fs::path dir_;
};

TEST_F(CliTest, GenerateSynthetic) {
  auto r = run("generate --synthetic --rows 2000 --dims 64 -o " + path("d.bin"));
  ASSERT_EQ(r.code, 0) << r.out;
  auto ds = load(path("d.bin"));
  EXPECT_EQ(ds.rows(), 2000u);
  EXPECT_EQ(ds.cols(), 64u);
  EXPECT_NE(r.out.find("2000 rows x 64 features"), std::string::npos);
}

TEST_F(CliTest, GenerateFromCsv) {
  std::ofstream(path("in.csv")) << "user_id,label,text\na,1,win cash\nb,0,see you\nc,1,free prize now\n";
  auto r = run("generate --csv " + path("in.csv") + " --buckets 16 -o " + path("d.bin"));
  ASSERT_EQ(r.code, 0) << r.out;
  auto ds = load(path("d.bin"));
  EXPECT_EQ(ds.rows(), 3u);
  EXPECT_EQ(ds.cols(), 16u);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_NE(run("generate --csv " + path("missing.csv") + " -o " + path("d.bin")).code, 0);
  EXPECT_NE(run("generate -o " + path("d.bin")).code, 0);
  EXPECT_NE(run("generate --synthetic --csv x -o " + path("d.bin")).code, 0);
  EXPECT_NE(run("").code, 0);
  EXPECT_NE(run("frobnicate").code, 0);
  EXPECT_FALSE(fs::exists(path("d.bin")));
}

TEST_F(CliTest, PreprocessSplitsAndWarns) {
  ASSERT_EQ(run("generate --synthetic --rows 2000 --dims 4 -o " + path("d.bin")).code, 0);
  auto r = run("preprocess -i " + path("d.bin") + " --train-out " + path("a.bin") +
               " --test-out " + path("b.bin") + " --test-fraction 0.3");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(load(path("a.bin")).rows(), 1400u);
  EXPECT_EQ(load(path("b.bin")).rows(), 600u);
  ASSERT_EQ(run("preprocess -i " + path("d.bin") + " --train-out " + path("c.bin") +
                " --test-out " + path("e.bin") + " --test-fraction 0.3")
                .code,
            0);
  EXPECT_EQ(read_file_bytes(path("a.bin")), read_file_bytes(path("c.bin")));

  save(Dataset(1, {1, 2, 3}, {1, 1, 1}, {0, 1, 2}), path("one.bin"));
  r = run("preprocess -i " + path("one.bin") + " --train-out " + path("f.bin") +
          " --test-out " + path("g.bin"));
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("single class"), std::string::npos);

  std::ofstream(path("junk.bin")) << "not a container";
  EXPECT_NE(run("preprocess -i " + path("junk.bin") + " --train-out " + path("h.bin") +
                " --test-out " + path("i.bin"))
                .code,
            0);
}

TEST_F(CliTest, PipelineEndToEnd) {
  pipeline_inputs();
  auto bench = run("bench --train " + path("tr.bin") + " --test " + path("te.bin") +
                   " --log " + path("log.txt") + " --csv " + path("r.csv") +
                   " --sizes 10 50 --trees 3");
  ASSERT_EQ(bench.code, 0) << bench.out;
  auto rows = report::parse_results_csv(read_file_text(path("r.csv")));
  EXPECT_EQ(rows.size(), 12u);

  ASSERT_EQ(run("tidy --log " + path("log.txt") + " -o " + path("t.csv")).code, 0);
  EXPECT_EQ(read_file_text(path("t.csv")), read_file_text(path("r.csv")));

  ASSERT_EQ(run("plot --csv " + path("r.csv") + " -o " + path("a.svg")).code, 0);
  ASSERT_EQ(run("plot --csv " + path("t.csv") + " -o " + path("b.svg")).code, 0);
  EXPECT_EQ(read_file_text(path("a.svg")), read_file_text(path("b.svg")));
}

TEST_F(CliTest, BenchFiltersAndRepeats) {
  pipeline_inputs();
  auto r = run("bench --train " + path("tr.bin") + " --test " + path("te.bin") +
               " --log " + path("l.txt") + " --csv " + path("r.csv") +
               " --strategies sisa_dare --sizes 10 20 30 --repeats 2 --trees 2");
  ASSERT_EQ(r.code, 0) << r.out;
  auto rows = report::parse_results_csv(read_file_text(path("r.csv")));
  EXPECT_EQ(rows.size(), 18u);
  for (const auto& row : rows) EXPECT_EQ(row.strategy, "sisa_dare");
}

TEST_F(CliTest, SeedFromEnvironmentAndConfig) {
  auto gen = [&](const std::string& extra, const std::string& env, const std::string& out) {
    return run(extra + " generate --synthetic --rows 50 --dims 3 -o " + path(out), env);
  };
  ASSERT_EQ(gen("--seed 7", "", "a.bin").code, 0);
  ASSERT_EQ(gen("", "UNLEARN_SEED=7", "b.bin").code, 0);
  ASSERT_EQ(gen("", "UNLEARN_SEED=8", "c.bin").code, 0);
  EXPECT_EQ(read_file_bytes(path("a.bin")), read_file_bytes(path("b.bin")));
  EXPECT_NE(read_file_bytes(path("a.bin")), read_file_bytes(path("c.bin")));

  std::ofstream(path("cfg.ini")) << "seed = 7\n[generate]\nrows = 50\n";
  ASSERT_EQ(run("--config " + path("cfg.ini") +
                " generate --synthetic --dims 3 -o " + path("d.bin"))
                .code,
            0);
  EXPECT_EQ(read_file_bytes(path("a.bin")), read_file_bytes(path("d.bin")));
  // Flags beat the config file.
  ASSERT_EQ(run("--config " + path("cfg.ini") +
                " --seed 8 generate --synthetic --dims 3 -o " + path("e.bin"))
                .code,
            0);
  EXPECT_EQ(read_file_bytes(path("c.bin")), read_file_bytes(path("e.bin")));
}

TEST_F(CliTest, TidyAndPlotErrors) {
  std::ofstream(path("bad.txt")) << "[trial]\nstrategy = naive\n";
  auto r = run("tidy --log " + path("bad.txt") + " -o " + path("x.csv"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("line"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("x.csv")));

  std::ofstream(path("empty.txt")) << "";
  ASSERT_EQ(run("tidy --log " + path("empty.txt") + " -o " + path("e.csv")).code, 0);
  EXPECT_EQ(read_file_text(path("e.csv")), std::string(report::kCsvHeader) + "\n");
  r = run("plot --csv " + path("e.csv") + " -o " + path("e.svg"));
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(fs::exists(path("e.svg")));

  std::ofstream(path("cols.csv")) << "strategy,size\nnaive,10\n";
  r = run("plot --csv " + path("cols.csv") + " -o " + path("c.svg"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("target_size"), std::string::npos);
}

TEST_F(CliTest, Selftest) {
  auto ok = run("selftest --instances 10");
  EXPECT_EQ(ok.code, 0) << ok.out;
  auto bad = run("selftest --instances 10 --inject-corruption");
  EXPECT_NE(bad.code, 0);
  EXPECT_NE(bad.out.find("FAIL count conservation"), std::string::npos);
}

}  // namespace
}  // namespace unlearn
