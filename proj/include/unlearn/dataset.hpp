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

#ifndef UNLEARN_DATASET_HPP_
#define UNLEARN_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace unlearn {

// Dense binary-labelled dataset. Rows carry a stable `row_id` (their index in
// the source they were derived from) that survives every split, reduction
// and deletion, so models can refer to training rows by id.
class Dataset {
 public:
  // Empty dataset with `cols` features.
  explicit Dataset(std::size_t cols = 1);

  // Validates all invariants: shapes agree, labels in {0,1}, finite features,
  // unique row ids, cols >= 1. Throws ArgumentError.
  Dataset(std::size_t cols, std::vector<double> features,
          std::vector<std::uint8_t> labels, std::vector<std::uint64_t> row_ids);

  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return cols_; }
  bool empty() const { return labels_.empty(); }

  double at(std::size_t row, std::size_t col) const {
    return features_[row * cols_ + col];
  }
  std::span<const double> row(std::size_t r) const {
    return {features_.data() + r * cols_, cols_};
  }
  std::uint8_t label(std::size_t r) const { return labels_[r]; }
  std::uint64_t row_id(std::size_t r) const { return row_ids_[r]; }

  std::span<const double> features() const { return features_; }
  std::span<const std::uint8_t> labels() const { return labels_; }
  std::span<const std::uint64_t> row_ids() const { return row_ids_; }

  // New dataset holding the given row positions, in the given order.
  Dataset take(std::span<const std::size_t> positions) const;

  // Stable content hash (FNV-1a over the binary container encoding).
  std::uint64_t content_hash() const;

  bool operator==(const Dataset&) const = default;

 private:
  std::size_t cols_;
  std::vector<double> features_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::uint64_t> row_ids_;
};

struct RawRecord {
  std::string user_id;
  std::uint8_t label = 0;
  std::string text;
};

struct CsvSchema {
  std::string user_id_column = "user_id";
  std::string label_column = "label";
  std::string text_column = "text";
};

struct IngestResult {
  std::vector<RawRecord> records;
  std::size_t skipped = 0;
};

struct EncodingConfig {
  std::size_t num_hash_features = 64;
  std::uint64_t seed = 0;
  bool binarize = true;
};

// Two Gaussian clouds (unit variance) whose means are `class_sep` apart along
// the all-ones diagonal. Labels are balanced (counts differ by at most one),
// so both classes are present whenever n_rows >= 2.
Dataset generate_synthetic(std::size_t n_rows, std::size_t d, double class_sep,
                           std::uint64_t seed);

// Reads a header-mapped CSV (RFC 4180 quoting). Rows whose label is not 0/1
// or whose text is blank after trimming are skipped and counted.
IngestResult ingest_csv(const std::filesystem::path& path,
                        const CsvSchema& schema = {});

// Lowercased whitespace tokens, each hashed (seeded FNV-1a) into one of
// `num_hash_features` buckets. Bucket = token count, or 1.0/0.0 presence when
// binarizing.
Dataset encode(std::span<const RawRecord> records, const EncodingConfig& cfg);

// Bucket a token lands in; exposed for tests.
std::size_t token_bucket(std::string_view token, const EncodingConfig& cfg);

// test size = round(rows * test_fraction), clamped to [1, rows - 1].
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds,
                                             double test_fraction,
                                             std::uint64_t seed);

// Keeps min(target_size, train.rows()) training rows; the test set is only
// reduced when it has more than `test_ceiling` rows. Source order is kept.
std::pair<Dataset, Dataset> reduce_to_target_size(
    const Dataset& train, const Dataset& test, std::size_t target_size,
    std::uint64_t seed,
    std::size_t test_ceiling = std::numeric_limits<std::size_t>::max());

struct Deletion {
  Dataset remaining;
  std::vector<std::uint64_t> deleted_row_ids;  // in selection order
};

// Removes n uniformly chosen rows (without replacement).
Deletion delete_n_elements(const Dataset& train, std::size_t n,
                           std::uint64_t seed);

// Removes floor(rows * pct) rows from each of train and test.
std::pair<Dataset, Dataset> delete_percentage(const Dataset& train,
                                              const Dataset& test, double pct,
                                              std::uint64_t seed);

// Drops the rows with the given ids. Throws ArgumentError on unknown ids.
Dataset without_rows(const Dataset& ds, std::span<const std::uint64_t> ids);

// floor(rows * pct) with the same truncation the harness uses everywhere.
std::size_t deletion_count(std::size_t rows, double pct);

// Binary container; layout in docs/formats.md.
std::vector<std::byte> serialize(const Dataset& ds);
Dataset deserialize_dataset(std::span<const std::byte> bytes);
void save(const Dataset& ds, const std::filesystem::path& path);
Dataset load(const std::filesystem::path& path);

// Plain CSV export: row_id,label,f0..f{d-1}.
void export_csv(const Dataset& ds, const std::filesystem::path& path);

}  // namespace unlearn

#endif  // UNLEARN_DATASET_HPP_
