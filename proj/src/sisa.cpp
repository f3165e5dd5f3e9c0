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

#include "unlearn/sisa.hpp"

#include <algorithm>
#include <limits>

#include "unlearn/binary_io.hpp"
#include "unlearn/error.hpp"
#include "unlearn/hash.hpp"

namespace unlearn {
namespace {

constexpr std::string_view kEnsembleMagic = "ULSE";
constexpr std::uint32_t kEnsembleVersion = 1;

std::uint64_t shard_seed(const SisaConfig& cfg, std::size_t s) {
  return hash_combine(cfg.seed, 0x5368617264ULL, s);
}

void validate(const SisaConfig& cfg) {
  if (cfg.n_shards == 0) throw ArgumentError("n_shards must be >= 1");
  if (cfg.n_slices == 0) throw ArgumentError("n_slices must be >= 1");
  validate(cfg.constituent_params);
}

bool slicing_checkpoints(const SisaConfig& cfg) {
  return cfg.constituent == ConstituentKind::kNaive && cfg.n_slices > 1;
}

std::vector<std::byte> model_bytes(const SisaEnsemble::Shard& shard) {
  if (const auto* d = std::get_if<DareForest>(&shard.model)) {
    return d->serialize();
  }
  if (const auto* n = std::get_if<NaiveForest>(&shard.model)) {
    return n->serialize();
  }
  return {};
}

}  // namespace

std::size_t shard_for(std::uint64_t row_id, const SisaConfig& cfg) {
  return static_cast<std::size_t>(
      hash_combine(cfg.seed, 0x53686172ULL, row_id) % cfg.n_shards);
}

std::uint64_t slice_key(std::uint64_t row_id, const SisaConfig& cfg) {
  return hash_combine(cfg.seed, 0x536c6963ULL, row_id);
}

std::uint32_t slice_for(std::uint64_t key, std::size_t n_slices) {
  // Top bits of the key select an equal-width hash range.
  return static_cast<std::uint32_t>(
      (static_cast<unsigned __int128>(key) * n_slices) >> 64);
}

std::vector<std::size_t> SisaEnsemble::Shard::slice_ends(
    std::size_t n_slices) const {
  std::vector<std::size_t> ends(n_slices, 0);
  std::size_t i = 0;
  for (std::size_t k = 0; k < n_slices; ++k) {
    while (i < slice_of.size() && slice_of[i] <= k) ++i;
    ends[k] = i;
  }
  return ends;
}

SisaEnsemble SisaEnsemble::fit(const Dataset& train, const SisaConfig& cfg) {
  validate(cfg);
  if (train.rows() < cfg.n_shards) {
    throw ArgumentError("sisa_fit: " + std::to_string(train.rows()) +
                        " rows for " + std::to_string(cfg.n_shards) +
                        " shards");
  }
  SisaEnsemble e;
  e.cfg_ = cfg;
  e.train_ = train;
  e.position_.reserve(train.rows() * 2);
  for (std::size_t i = 0; i < train.rows(); ++i) {
    e.position_.emplace(train.row_id(i), static_cast<std::uint32_t>(i));
  }
  e.shards_.resize(cfg.n_shards);

  std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> members(
      cfg.n_shards);
  for (auto id : train.row_ids()) {
    members[shard_for(id, cfg)].emplace_back(slice_key(id, cfg), id);
  }
  for (std::size_t s = 0; s < cfg.n_shards; ++s) {
    auto& m = members[s];
    std::sort(m.begin(), m.end());
    auto& shard = e.shards_[s];
    for (const auto& [key, id] : m) {
      shard.row_ids.push_back(id);
      shard.slice_of.push_back(slice_for(key, cfg.n_slices));
    }
    e.train_shard(s, 0, nullptr);
  }
  return e;
}

Dataset SisaEnsemble::shard_rows(std::size_t s, std::size_t slice_end) const {
  const auto& ids = shards_[s].row_ids;
  std::vector<std::size_t> pos;
  pos.reserve(slice_end);
  for (std::size_t i = 0; i < slice_end; ++i) pos.push_back(position_.at(ids[i]));
  std::sort(pos.begin(), pos.end());
  return train_.take(pos);
}

void SisaEnsemble::train_shard(std::size_t s, std::size_t from_slice,
                               SisaDeletionReport* report) {
  Shard& shard = shards_[s];
  const auto seed = shard_seed(cfg_, s);
  const auto& params = cfg_.constituent_params;
  if (shard.row_ids.empty()) {
    shard.model = std::monostate{};
    shard.slice_checkpoints.clear();
    return;
  }
  if (cfg_.constituent == ConstituentKind::kDare) {
    shard.model = DareForest::fit(shard_rows(s, shard.row_ids.size()), params,
                                  seed);
    return;
  }
  if (!slicing_checkpoints(cfg_)) {
    shard.model =
        NaiveForest::fit(shard_rows(s, shard.row_ids.size()), params, seed);
    if (report) report->slices_retrained = 1;
    return;
  }
  const auto ends = shard.slice_ends(cfg_.n_slices);
  shard.slice_checkpoints.resize(cfg_.n_slices);
  for (std::size_t k = from_slice; k < cfg_.n_slices; ++k) {
    if (ends[k] == 0) {
      shard.slice_checkpoints[k].reset();
    } else {
      shard.slice_checkpoints[k] =
          NaiveForest::fit(shard_rows(s, ends[k]), params, seed);
    }
    if (report) ++report->slices_retrained;
  }
  shard.model = *shard.slice_checkpoints.back();
}

std::size_t SisaEnsemble::shard_of(std::uint64_t row_id) const {
  if (!contains(row_id)) {
    throw ArgumentError("unknown row id " + std::to_string(row_id));
  }
  return shard_for(row_id, cfg_);
}

bool SisaEnsemble::contains(std::uint64_t row_id) const {
  if (!position_.contains(row_id)) return false;
  const auto& ids = shards_[shard_for(row_id, cfg_)].row_ids;
  return std::find(ids.begin(), ids.end(), row_id) != ids.end();
}

std::size_t SisaEnsemble::live_rows() const {
  std::size_t n = 0;
  for (const auto& s : shards_) n += s.row_ids.size();
  return n;
}

SisaDeletionReport SisaEnsemble::delete_row(std::uint64_t row_id) {
  const std::size_t s = shard_of(row_id);
  Shard& shard = shards_[s];
  auto it = std::find(shard.row_ids.begin(), shard.row_ids.end(), row_id);
  const auto idx = static_cast<std::size_t>(it - shard.row_ids.begin());
  const std::uint32_t slice = shard.slice_of[idx];
  shard.row_ids.erase(it);
  shard.slice_of.erase(shard.slice_of.begin() + static_cast<std::ptrdiff_t>(idx));

  SisaDeletionReport report;
  report.shard = s;
  if (shard.row_ids.empty()) {
    report.shard_emptied = true;
    train_shard(s, 0, &report);
  } else if (auto* dare = std::get_if<DareForest>(&shard.model)) {
    report.forest = dare->delete_row(row_id);
  } else {
    train_shard(s, slicing_checkpoints(cfg_) ? slice : 0, &report);
  }
  return report;
}

std::vector<double> SisaEnsemble::predict_proba(const Dataset& x) const {
  std::vector<double> acc(x.rows(), 0.0);
  std::size_t active = 0;
  for (const auto& shard : shards_) {
    if (!shard.active()) continue;
    ++active;
    auto p = std::visit(
        [&](const auto& m) -> std::vector<double> {
          if constexpr (std::is_same_v<std::decay_t<decltype(m)>,
                                       std::monostate>) {
            return {};
          } else {
            return m.predict_proba(x);
          }
        },
        shard.model);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      acc[i] += cfg_.aggregation == Aggregation::kMeanProba
                    ? p[i]
                    : (p[i] >= 0.5 ? 1.0 : 0.0);
    }
  }
  if (active == 0) throw StateError("predict: every shard is empty");
  for (auto& v : acc) v /= static_cast<double>(active);
  return acc;
}

std::vector<std::uint8_t> SisaEnsemble::predict(const Dataset& x) const {
  return threshold_predictions(predict_proba(x));
}

std::uint64_t SisaEnsemble::shard_checkpoint_hash(std::size_t s) const {
  const auto& shard = shards_.at(s);
  if (!shard.active()) return 0;
  auto bytes = model_bytes(shard);
  return fnv1a64(std::span<const std::byte>(bytes));
}

bool SisaEnsemble::same_structure(const SisaEnsemble& o) const {
  if (!(cfg_ == o.cfg_) || shards_.size() != o.shards_.size()) return false;
  for (std::size_t s = 0; s < shards_.size(); ++s) {
    const auto& a = shards_[s];
    const auto& b = o.shards_[s];
    if (a.row_ids != b.row_ids || a.slice_of != b.slice_of ||
        a.model.index() != b.model.index() ||
        a.slice_checkpoints != b.slice_checkpoints) {
      return false;
    }
    if (const auto* d = std::get_if<DareForest>(&a.model)) {
      if (!d->same_structure(std::get<DareForest>(b.model))) return false;
    } else if (const auto* n = std::get_if<NaiveForest>(&a.model)) {
      if (!(*n == std::get<NaiveForest>(b.model))) return false;
    }
  }
  return true;
}

std::vector<std::string> SisaEnsemble::check_invariants() const {
  std::vector<std::string> errors;
  std::vector<std::uint64_t> seen;
  for (std::size_t s = 0; s < shards_.size(); ++s) {
    const auto& shard = shards_[s];
    const std::string where = "shard " + std::to_string(s) + ": ";
    if (shard.row_ids.size() != shard.slice_of.size()) {
      errors.push_back(where + "slice table length mismatch");
      continue;
    }
    std::uint64_t prev_key = 0;
    for (std::size_t i = 0; i < shard.row_ids.size(); ++i) {
      const auto id = shard.row_ids[i];
      const auto key = slice_key(id, cfg_);
      if (shard_for(id, cfg_) != s) errors.push_back(where + "misassigned row");
      if (i > 0 && key < prev_key) errors.push_back(where + "rows out of order");
      if (shard.slice_of[i] != slice_for(key, cfg_.n_slices)) {
        errors.push_back(where + "slice index mismatch");
      }
      prev_key = key;
      seen.push_back(id);
    }
    auto ends = shard.slice_ends(cfg_.n_slices);
    for (std::size_t k = 1; k < ends.size(); ++k) {
      if (ends[k] < ends[k - 1]) errors.push_back(where + "slices not nested");
    }
    if (shard.active() == shard.row_ids.empty()) {
      errors.push_back(where + "active flag disagrees with membership");
    }
    if (const auto* d = std::get_if<DareForest>(&shard.model)) {
      auto live = d->live_row_ids();
      auto ids = shard.row_ids;
      std::sort(live.begin(), live.end());
      std::sort(ids.begin(), ids.end());
      if (live != ids) errors.push_back(where + "constituent trained on other rows");
      for (auto& e : d->check_invariants()) errors.push_back(where + e);
    } else if (const auto* n = std::get_if<NaiveForest>(&shard.model)) {
      if (n->trained_rows() != shard.row_ids.size()) {
        errors.push_back(where + "constituent trained on other rows");
      }
    }
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    errors.push_back("a row id appears in more than one shard");
  }
  return errors;
}

std::vector<std::byte> SisaEnsemble::serialize() const {
  ByteWriter w;
  w.magic(kEnsembleMagic);
  w.put(kEnsembleVersion);
  w.put<std::uint64_t>(cfg_.n_shards);
  w.put<std::uint64_t>(cfg_.n_slices);
  const auto& p = cfg_.constituent_params;
  for (std::uint64_t v : {p.n_trees, p.max_depth, p.max_features_per_tree,
                          p.thresholds_per_feature, p.min_samples_leaf}) {
    w.put(v);
  }
  w.put(cfg_.seed);
  w.put<std::uint8_t>(cfg_.aggregation == Aggregation::kMeanProba ? 0 : 1);
  w.put<std::uint8_t>(cfg_.constituent == ConstituentKind::kDare ? 0 : 1);
  w.blob(unlearn::serialize(train_));
  for (const auto& shard : shards_) {
    w.put<std::uint64_t>(shard.row_ids.size());
    for (std::size_t i = 0; i < shard.row_ids.size(); ++i) {
      w.put(shard.row_ids[i]);
      w.put(shard.slice_of[i]);
    }
    w.put<std::uint8_t>(static_cast<std::uint8_t>(shard.model.index()));
    if (shard.active()) w.blob(model_bytes(shard));
    w.put<std::uint64_t>(shard.slice_checkpoints.size());
    for (const auto& c : shard.slice_checkpoints) {
      w.put<std::uint8_t>(c.has_value());
      if (c) w.blob(c->serialize());
    }
  }
  return w.take();
}

SisaEnsemble SisaEnsemble::deserialize(std::span<const std::byte> bytes) {
  if (bytes.empty()) throw FormatError("empty ensemble checkpoint", 0);
  ByteReader r(bytes);
  r.expect_magic(kEnsembleMagic);
  auto at = r.offset();
  if (r.get<std::uint32_t>() != kEnsembleVersion) {
    throw FormatError("unsupported ensemble version", at);
  }
  SisaEnsemble e;
  at = r.offset();
  e.cfg_.n_shards = r.get<std::uint64_t>();
  e.cfg_.n_slices = r.get<std::uint64_t>();
  auto& p = e.cfg_.constituent_params;
  p.n_trees = r.get<std::uint64_t>();
  p.max_depth = r.get<std::uint64_t>();
  p.max_features_per_tree = r.get<std::uint64_t>();
  p.thresholds_per_feature = r.get<std::uint64_t>();
  p.min_samples_leaf = r.get<std::uint64_t>();
  e.cfg_.seed = r.get<std::uint64_t>();
  auto agg = r.get<std::uint8_t>();
  auto kind = r.get<std::uint8_t>();
  if (agg > 1 || kind > 1) throw FormatError("bad enum tag", r.offset() - 1);
  e.cfg_.aggregation = agg == 0 ? Aggregation::kMeanProba : Aggregation::kMajorityVote;
  e.cfg_.constituent = kind == 0 ? ConstituentKind::kDare : ConstituentKind::kNaive;
  try {
    validate(e.cfg_);
  } catch (const ArgumentError& err) {
    throw FormatError(std::string("invalid config: ") + err.what(), at);
  }
  r.require_count(e.cfg_.n_shards, 17, "shard");
  e.train_ = deserialize_dataset(r.blob());
  for (std::size_t i = 0; i < e.train_.rows(); ++i) {
    e.position_.emplace(e.train_.row_id(i), static_cast<std::uint32_t>(i));
  }
  e.shards_.resize(e.cfg_.n_shards);
  for (auto& shard : e.shards_) {
    auto n = r.get<std::uint64_t>();
    r.require_count(n, 12, "shard row");
    shard.row_ids.resize(n);
    shard.slice_of.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto id_at = r.offset();
      shard.row_ids[i] = r.get<std::uint64_t>();
      shard.slice_of[i] = r.get<std::uint32_t>();
      if (!e.position_.contains(shard.row_ids[i])) {
        throw FormatError("shard row id not in training set", id_at);
      }
    }
    auto tag_at = r.offset();
    auto tag = r.get<std::uint8_t>();
    if (tag == 1) {
      shard.model = DareForest::deserialize(r.blob());
    } else if (tag == 2) {
      shard.model = NaiveForest::deserialize(r.blob());
    } else if (tag != 0) {
      throw FormatError("bad constituent tag", tag_at);
    }
    auto k = r.get<std::uint64_t>();
    r.require_count(k, 1, "slice checkpoint");
    shard.slice_checkpoints.resize(k);
    for (auto& c : shard.slice_checkpoints) {
      if (r.get<std::uint8_t>()) c = NaiveForest::deserialize(r.blob());
    }
  }
  r.expect_end();
  if (auto errors = e.check_invariants(); !errors.empty()) {
    throw FormatError("inconsistent ensemble: " + errors.front(), bytes.size());
  }
  return e;
}

}  // namespace unlearn
