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

#ifndef UNLEARN_SISA_HPP_
#define UNLEARN_SISA_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "unlearn/dataset.hpp"
#include "unlearn/forest.hpp"

namespace unlearn {

enum class Aggregation { kMeanProba, kMajorityVote };
enum class ConstituentKind { kDare, kNaive };

struct SisaConfig {
  std::size_t n_shards = 1;
  std::size_t n_slices = 1;
  ForestParams constituent_params;
  std::uint64_t seed = 0;
  Aggregation aggregation = Aggregation::kMeanProba;
  ConstituentKind constituent = ConstituentKind::kDare;

  bool operator==(const SisaConfig&) const = default;
};

struct SisaDeletionReport {
  std::size_t shard = 0;
  // Forwarded to a DareForest constituent.
  DeletionReport forest;
  // NaiveForest constituents: slice checkpoints retrained from scratch.
  std::size_t slices_retrained = 0;
  bool shard_emptied = false;
};

// Sharded, isolated, sliced, aggregated ensemble. Rows are assigned to shards
// and ordered into slices by seeded hashes of their row id, so membership is
// stable under deletion: sisa_delete(x) leaves the ensemble equal to
// sisa_fit on the training set without x.
class SisaEnsemble {
 public:
  struct Shard {
    // Rows ordered by the slice hash; slice_of[i] is non-decreasing.
    std::vector<std::uint64_t> row_ids;
    std::vector<std::uint32_t> slice_of;
    // Empty when the shard holds no rows (inactive, skipped by aggregation).
    std::variant<std::monostate, DareForest, NaiveForest> model;
    // NaiveForest constituents with n_slices > 1: entry k is the model
    // trained on slices [0, k] (absent while that prefix is empty). The last
    // entry equals `model`.
    std::vector<std::optional<NaiveForest>> slice_checkpoints;

    bool active() const { return model.index() != 0; }
    // Exclusive end index of each nested prefix (slices 0..k).
    std::vector<std::size_t> slice_ends(std::size_t n_slices) const;
  };

  // Throws ArgumentError when train has fewer rows than shards.
  static SisaEnsemble fit(const Dataset& train, const SisaConfig& cfg);

  // Aggregates active shards. Throws StateError when no shard is active.
  std::vector<double> predict_proba(const Dataset& x) const;
  std::vector<std::uint8_t> predict(const Dataset& x) const;

  SisaDeletionReport delete_row(std::uint64_t row_id);

  const SisaConfig& config() const { return cfg_; }
  const std::vector<Shard>& shards() const { return shards_; }
  std::size_t shard_of(std::uint64_t row_id) const;  // ArgumentError if absent
  bool contains(std::uint64_t row_id) const;
  std::size_t live_rows() const;

  // FNV-1a of the shard's constituent checkpoint; 0 for inactive shards.
  std::uint64_t shard_checkpoint_hash(std::size_t shard) const;

  // Same config, shard membership and constituent structure.
  bool same_structure(const SisaEnsemble& other) const;

  // Shard membership, slice nesting and constituent training sets agree.
  std::vector<std::string> check_invariants() const;

  std::vector<std::byte> serialize() const;
  static SisaEnsemble deserialize(std::span<const std::byte> bytes);

 private:
  void train_shard(std::size_t s, std::size_t from_slice,
                   SisaDeletionReport* report);
  Dataset shard_rows(std::size_t s, std::size_t slice_end) const;

  SisaConfig cfg_;
  Dataset train_;
  std::unordered_map<std::uint64_t, std::uint32_t> position_;
  std::vector<Shard> shards_;
};

// Which shard a row id lands in, and its position key within the shard.
std::size_t shard_for(std::uint64_t row_id, const SisaConfig& cfg);
std::uint64_t slice_key(std::uint64_t row_id, const SisaConfig& cfg);
std::uint32_t slice_for(std::uint64_t key, std::size_t n_slices);

// Free-function spellings used by the harness.
inline SisaEnsemble sisa_fit(const Dataset& train, const SisaConfig& cfg) {
  return SisaEnsemble::fit(train, cfg);
}
inline std::vector<double> sisa_predict_proba(const SisaEnsemble& e,
                                              const Dataset& x) {
  return e.predict_proba(x);
}
inline SisaDeletionReport sisa_delete(SisaEnsemble& e, std::uint64_t row_id) {
  return e.delete_row(row_id);
}

}  // namespace unlearn

#endif  // UNLEARN_SISA_HPP_
