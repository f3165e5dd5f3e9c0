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

#include "unlearn/selftest.hpp"

#include <algorithm>
#include <cstring>
#include <exception>
#include <functional>
#include <numeric>
#include <random>

#include "unlearn/bench.hpp"
#include "unlearn/binary_io.hpp"
#include "unlearn/dataset.hpp"
#include "unlearn/forest.hpp"
#include "unlearn/report.hpp"
#include "unlearn/sisa.hpp"

namespace unlearn {
namespace {

constexpr std::size_t kMaxMessages = 5;

struct Instance {
  Dataset train;
  Dataset probe;
  ForestParams params;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> deletions;
};

// Features drawn from a few discrete levels so ties and duplicate values are
// common, mixed with continuous columns.
Instance random_instance(std::mt19937_64& rng) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  const std::size_t rows = pick(2, 120);
  const std::size_t d = pick(1, 8);
  std::vector<std::size_t> levels(d);
  for (auto& l : levels) l = pick(0, 1) ? pick(2, 6) : 0;
  std::normal_distribution<double> noise(0.0, 1.0);
  auto draw = [&](std::size_t n) {
    std::vector<double> x(n * d);
    std::vector<std::uint8_t> y(n);
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        double v = levels[c] ? static_cast<double>(pick(0, levels[c] - 1))
                             : noise(rng);
        x[r * d + c] = v;
        s += v;
      }
      y[r] = (s + noise(rng) > 0.5 * static_cast<double>(d)) ? 1 : 0;
    }
    std::vector<std::uint64_t> ids(n);
    std::iota(ids.begin(), ids.end(), std::uint64_t{0});
    return Dataset(d, std::move(x), std::move(y), std::move(ids));
  };
  Instance in{draw(rows), draw(16), {}, rng(), {}};
  in.params.n_trees = pick(1, 4);
  in.params.max_depth = pick(1, 6);
  in.params.max_features_per_tree = pick(0, d);
  in.params.thresholds_per_feature = pick(1, 6);
  in.params.min_samples_leaf = pick(1, 3);
  std::vector<std::uint64_t> ids(in.train.row_ids().begin(),
                                 in.train.row_ids().end());
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(pick(1, std::max<std::size_t>(1, rows * 3 / 4)));
  if (ids.size() >= rows) ids.resize(rows - 1);
  in.deletions = std::move(ids);
  return in;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

class Recorder {
 public:
  explicit Recorder(SelftestReport& report) : report_(report) {}

  std::size_t begin(std::string name) {
    report_.checks.push_back({std::move(name), 0, 0, {}});
    return report_.checks.size() - 1;
  }

  // Runs `body`; false or an exception counts as one failure.
  void expect(std::size_t index, const std::string& what,
              const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    auto& check = report_.checks[index];
    if (ok) {
      ++check.passed;
      return;
    }
    ++check.failed;
    if (check.messages.size() < kMaxMessages) {
      check.messages.push_back(detail.empty() ? what : what + ": " + detail);
    }
  }

 private:
  SelftestReport& report_;
};

}  // namespace

std::size_t SelftestReport::passed() const {
  std::size_t n = 0;
  for (const auto& c : checks) n += c.passed;
  return n;
}

std::size_t SelftestReport::failed() const {
  std::size_t n = 0;
  for (const auto& c : checks) n += c.failed;
  return n;
}

SelftestReport run_selftest(const SelftestOptions& options) {
  SelftestReport report;
  Recorder rec(report);
  std::mt19937_64 rng(options.seed);

  std::vector<Instance> instances;
  for (std::size_t i = 0; i < options.instances; ++i) {
    instances.push_back(random_instance(rng));
  }

  const auto forest_exact = rec.begin("forest delete equals refit");
  const auto conservation = rec.begin("count conservation");
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& in = instances[i];
    const std::string tag = "instance " + std::to_string(i);
    DareForest model = DareForest::fit(in.train, in.params, in.seed);
    for (auto id : in.deletions) model.delete_row(id);
    if (options.inject_corruption && i == 0) {
      testing::ForestBackdoor::corrupt_root_counts(model);
    }
    rec.expect(conservation, tag, [&](std::string& detail) {
      auto issues = model.check_invariants();
      if (!issues.empty()) detail = issues.front();
      return issues.empty();
    });
    rec.expect(forest_exact, tag, [&](std::string& detail) {
      auto scratch = DareForest::fit(without_rows(in.train, in.deletions),
                                     in.params, in.seed);
      if (!model.same_structure(scratch)) {
        detail = "tree structure differs";
        return false;
      }
      if (!bit_equal(model.predict_proba(in.probe),
                     scratch.predict_proba(in.probe))) {
        detail = "predict_proba differs";
        return false;
      }
      return true;
    });
  }

  const auto sisa_exact = rec.begin("sisa delete equals refit");
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& in = instances[i];
    SisaConfig cfg;
    cfg.n_shards = std::size_t{1} << (i % 3);
    cfg.n_slices = 1 + i % 2;
    cfg.constituent = i % 4 == 3 ? ConstituentKind::kNaive : ConstituentKind::kDare;
    cfg.constituent_params = in.params;
    cfg.seed = in.seed;
    // Refitting needs at least one row per shard.
    if (in.train.rows() - in.deletions.size() < cfg.n_shards) continue;
    rec.expect(sisa_exact, "instance " + std::to_string(i),
               [&](std::string& detail) {
                 auto model = SisaEnsemble::fit(in.train, cfg);
                 for (auto id : in.deletions) model.delete_row(id);
                 auto scratch =
                     SisaEnsemble::fit(without_rows(in.train, in.deletions), cfg);
                 if (!model.same_structure(scratch)) {
                   detail = "ensemble structure differs";
                   return false;
                 }
                 return bit_equal(model.predict_proba(in.probe),
                                  scratch.predict_proba(in.probe));
               });
  }

  const auto eq1 = rec.begin("percent change formula");
  rec.expect(eq1, "(0.80, 0.84) -> 5", [](std::string& detail) {
    auto v = bench::percent_change(0.80, 0.84);
    if (v) detail = report::format_number(*v);
    return v && *v == 5.0;
  });
  rec.expect(eq1, "(0, x) undefined",
             [](std::string&) { return !bench::percent_change(0.0, 0.5); });
  {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t bad = 0;
    for (int k = 0; k < 1000; ++k) {
      double c = 1.0 - unit(rng);  // (0, 1]
      auto v = bench::percent_change(c, c);
      if (!v || *v != 0.0) ++bad;
    }
    rec.expect(eq1, "(c, c) -> 0", [&](std::string& detail) {
      detail = std::to_string(bad) + " of 1000 nonzero";
      return bad == 0;
    });
  }

  const auto trips = rec.begin("round trips");
  const auto& base = instances.empty() ? random_instance(rng) : instances.front();
  rec.expect(trips, "dataset container", [&](std::string&) {
    return deserialize_dataset(serialize(base.train)) == base.train;
  });
  rec.expect(trips, "forest checkpoint", [&](std::string&) {
    auto model = DareForest::fit(base.train, base.params, base.seed);
    if (!base.deletions.empty()) model.delete_row(base.deletions.front());
    auto bytes = model.serialize();
    auto back = DareForest::deserialize(bytes);
    return back.same_structure(model) && back.serialize() == bytes;
  });
  rec.expect(trips, "naive checkpoint", [&](std::string&) {
    auto model = NaiveForest::fit(base.train, base.params, base.seed);
    return NaiveForest::deserialize(model.serialize()) == model;
  });
  rec.expect(trips, "ensemble checkpoint", [&](std::string&) {
    SisaConfig cfg;
    cfg.n_shards = std::min<std::size_t>(2, base.train.rows());
    cfg.constituent_params = base.params;
    cfg.seed = base.seed;
    auto model = SisaEnsemble::fit(base.train, cfg);
    auto bytes = model.serialize();
    return SisaEnsemble::deserialize(bytes).serialize() == bytes;
  });
  rec.expect(trips, "log to csv", [&](std::string&) {
    std::vector<report::ResultRow> rows(2);
    rows[0].strategy = "naive";
    rows[0].target_size = 10;
    rows[0].delete_percentage = 0.25;
    rows[0].n_deleted = 2;
    rows[0].consistency_before = 0.7;
    rows[0].consistency_after = 0.8;
    rows[0].percent_change = bench::percent_change(0.7, 0.8);
    rows[0].computational_cost_seconds = 1.25e-4;
    rows[0].test_set_hash = 0xfeedfacecafebeefULL;
    rows[1] = rows[0];
    rows[1].strategy = "sisa_dare";
    rows[1].consistency_before = 0.0;
    rows[1].percent_change.reset();
    std::string log = report::log_comment("selftest");
    for (const auto& r : rows) log += report::log_block(r);
    const auto csv = report::results_csv(rows);
    return report::tidy(log) == csv && report::parse_results_csv(csv) == rows;
  });

  return report;
}

}  // namespace unlearn
