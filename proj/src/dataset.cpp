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

#include "unlearn/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "unlearn/binary_io.hpp"
#include "unlearn/error.hpp"
#include "unlearn/hash.hpp"

namespace unlearn {
namespace {

constexpr std::string_view kDatasetMagic = "ULDS";
constexpr std::uint32_t kDatasetVersion = 1;

// Positions 0..n-1 with the first k entries a uniform sample without
// replacement (partial Fisher-Yates).
std::vector<std::size_t> sample_positions(std::size_t n, std::size_t k,
                                          std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  return idx;
}

// Keeps the first k sampled positions, restored to source order.
std::vector<std::size_t> sorted_prefix(std::vector<std::size_t> idx,
                                       std::size_t k) {
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<std::size_t> complement(std::size_t n,
                                    std::span<const std::size_t> removed) {
  std::vector<bool> gone(n, false);
  for (auto p : removed) gone[p] = true;
  std::vector<std::size_t> keep;
  keep.reserve(n - removed.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!gone[i]) keep.push_back(i);
  }
  return keep;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

// Splits RFC 4180 CSV text into records. Quoted fields may contain commas,
// doubled quotes and newlines. Each record remembers its starting line.
struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

std::vector<CsvRecord> parse_csv(std::string_view text) {
  std::vector<CsvRecord> out;
  CsvRecord rec;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  rec.line = 1;
  auto end_field = [&] {
    rec.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    bool blank = rec.fields.size() == 1 && rec.fields[0].empty();
    if (!blank) out.push_back(std::move(rec));
    rec = CsvRecord{};
    rec.line = line;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw ParseError("stray quote inside unquoted field", line);
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", rec.line);
  if (field_started || !field.empty() || !rec.fields.empty()) end_record();
  return out;
}

}  // namespace

Dataset::Dataset(std::size_t cols) : cols_(cols) {
  if (cols_ == 0) throw ArgumentError("dataset needs at least one column");
}

Dataset::Dataset(std::size_t cols, std::vector<double> features,
                 std::vector<std::uint8_t> labels,
                 std::vector<std::uint64_t> row_ids)
    : cols_(cols),
      features_(std::move(features)),
      labels_(std::move(labels)),
      row_ids_(std::move(row_ids)) {
  if (cols_ == 0) throw ArgumentError("dataset needs at least one column");
  if (features_.size() != labels_.size() * cols_ ||
      row_ids_.size() != labels_.size()) {
    throw ArgumentError("dataset shape mismatch: " +
                        std::to_string(features_.size()) + " features, " +
                        std::to_string(labels_.size()) + " labels, " +
                        std::to_string(row_ids_.size()) + " row ids, " +
                        std::to_string(cols_) + " cols");
  }
  for (auto l : labels_) {
    if (l > 1) throw ArgumentError("label outside {0,1}");
  }
  for (double v : features_) {
    if (!std::isfinite(v)) throw ArgumentError("non-finite feature value");
  }
  std::unordered_set<std::uint64_t> seen(row_ids_.size() * 2);
  for (auto id : row_ids_) {
    if (!seen.insert(id).second) {
      throw ArgumentError("duplicate row id " + std::to_string(id));
    }
  }
}

Dataset Dataset::take(std::span<const std::size_t> positions) const {
  Dataset out(cols_);
  out.features_.reserve(positions.size() * cols_);
  out.labels_.reserve(positions.size());
  out.row_ids_.reserve(positions.size());
  for (auto p : positions) {
    auto r = row(p);
    out.features_.insert(out.features_.end(), r.begin(), r.end());
    out.labels_.push_back(labels_[p]);
    out.row_ids_.push_back(row_ids_[p]);
  }
  return out;
}

std::uint64_t Dataset::content_hash() const {
  auto bytes = serialize(*this);
  return fnv1a64(std::span<const std::byte>(bytes));
}

Dataset generate_synthetic(std::size_t n_rows, std::size_t d, double class_sep,
                           std::uint64_t seed) {
  if (n_rows < 2) throw ArgumentError("generate_synthetic: n_rows must be >= 2");
  if (d < 1) throw ArgumentError("generate_synthetic: d must be >= 1");
  if (!std::isfinite(class_sep)) {
    throw ArgumentError("generate_synthetic: class_sep must be finite");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> labels(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) labels[i] = i % 2;
  std::shuffle(labels.begin(), labels.end(), rng);

  // Means at +/- class_sep/2 along the unit diagonal.
  const double offset = 0.5 * class_sep / std::sqrt(static_cast<double>(d));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> features(n_rows * d);
  std::vector<std::uint64_t> ids(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    const double mean = labels[i] ? offset : -offset;
    for (std::size_t j = 0; j < d; ++j) features[i * d + j] = mean + noise(rng);
    ids[i] = i;
  }
  return Dataset(d, std::move(features), std::move(labels), std::move(ids));
}

IngestResult ingest_csv(const std::filesystem::path& path,
                        const CsvSchema& schema) {
  std::ifstream probe(path);
  if (!probe) throw IoError("cannot open " + path.string());
  probe.close();
  const std::string text = read_file_text(path);
  auto rows = parse_csv(text);
  if (rows.empty()) throw SchemaError(path.string() + ": missing header row");

  const auto& header = rows.front().fields;
  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    throw SchemaError(path.string() + ": missing column '" + name + "'");
  };
  const std::size_t uid_col = column(schema.user_id_column);
  const std::size_t label_col = column(schema.label_column);
  const std::size_t text_col = column(schema.text_column);
  const std::size_t need = std::max({uid_col, label_col, text_col}) + 1;

  IngestResult out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() < need) {
      ++out.skipped;
      continue;
    }
    auto label = trim(f[label_col]);
    auto body = trim(f[text_col]);
    if ((label != "0" && label != "1") || body.empty()) {
      ++out.skipped;
      continue;
    }
    out.records.push_back(RawRecord{std::string(trim(f[uid_col])),
                                    static_cast<std::uint8_t>(label[0] - '0'),
                                    std::string(body)});
  }
  return out;
}

std::size_t token_bucket(std::string_view token, const EncodingConfig& cfg) {
  return static_cast<std::size_t>(hash_combine(cfg.seed, fnv1a64(token)) %
                                  cfg.num_hash_features);
}

Dataset encode(std::span<const RawRecord> records, const EncodingConfig& cfg) {
  if (records.empty()) throw ArgumentError("encode: no records");
  if (cfg.num_hash_features < 2) {
    throw ArgumentError("encode: num_hash_features must be >= 2");
  }
  const std::size_t d = cfg.num_hash_features;
  std::vector<double> features(records.size() * d, 0.0);
  std::vector<std::uint8_t> labels;
  std::vector<std::uint64_t> ids;
  std::string token;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.label > 1) throw ArgumentError("encode: label outside {0,1}");
    double* row = features.data() + r * d;
    auto flush = [&] {
      if (token.empty()) return;
      double& slot = row[token_bucket(token, cfg)];
      slot = cfg.binarize ? 1.0 : slot + 1.0;
      token.clear();
    };
    for (char c : rec.text) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        flush();
      } else {
        token.push_back(static_cast<char>(
            std::tolower(static_cast<unsigned char>(c))));
      }
    }
    flush();
    labels.push_back(rec.label);
    ids.push_back(r);
  }
  return Dataset(d, std::move(features), std::move(labels), std::move(ids));
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds,
                                             double test_fraction,
                                             std::uint64_t seed) {
  if (ds.rows() < 2) throw ArgumentError("train_test_split: need >= 2 rows");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ArgumentError("train_test_split: test_fraction must be in (0,1)");
  }
  const std::size_t n = ds.rows();
  auto k = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * test_fraction));
  k = std::clamp<std::size_t>(k, 1, n - 1);
  auto test_pos = sorted_prefix(sample_positions(n, k, seed), k);
  auto train_pos = complement(n, test_pos);
  return {ds.take(train_pos), ds.take(test_pos)};
}

std::pair<Dataset, Dataset> reduce_to_target_size(const Dataset& train,
                                                  const Dataset& test,
                                                  std::size_t target_size,
                                                  std::uint64_t seed,
                                                  std::size_t test_ceiling) {
  if (target_size < 1) throw ArgumentError("reduce_to_target_size: target 0");
  const std::size_t k = std::min(target_size, train.rows());
  Dataset new_train =
      k == train.rows()
          ? train
          : train.take(sorted_prefix(sample_positions(train.rows(), k, seed), k));
  Dataset new_test = test;
  if (test.rows() > test_ceiling) {
    auto tseed = hash_combine(seed, 0x7e57);
    new_test = test.take(sorted_prefix(
        sample_positions(test.rows(), test_ceiling, tseed), test_ceiling));
  }
  return {std::move(new_train), std::move(new_test)};
}

Deletion delete_n_elements(const Dataset& train, std::size_t n,
                           std::uint64_t seed) {
  if (n > train.rows()) {
    throw ArgumentError("delete_n_elements: n=" + std::to_string(n) +
                        " exceeds " + std::to_string(train.rows()) + " rows");
  }
  auto idx = sample_positions(train.rows(), n, seed);
  std::vector<std::size_t> chosen(idx.begin(), idx.begin() + n);
  Deletion out{train.take(complement(train.rows(), chosen)), {}};
  out.deleted_row_ids.reserve(n);
  for (auto p : chosen) out.deleted_row_ids.push_back(train.row_id(p));
  return out;
}

std::size_t deletion_count(std::size_t rows, double pct) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(rows) * pct));
}

std::pair<Dataset, Dataset> delete_percentage(const Dataset& train,
                                              const Dataset& test, double pct,
                                              std::uint64_t seed) {
  if (!(pct >= 0.0 && pct <= 1.0)) {
    throw ArgumentError("delete_percentage: pct must be in [0,1]");
  }
  auto a = delete_n_elements(train, deletion_count(train.rows(), pct), seed);
  auto b = delete_n_elements(test, deletion_count(test.rows(), pct),
                             hash_combine(seed, 0x7e57));
  return {std::move(a.remaining), std::move(b.remaining)};
}

Dataset without_rows(const Dataset& ds, std::span<const std::uint64_t> ids) {
  std::unordered_map<std::uint64_t, std::size_t> pos;
  pos.reserve(ds.rows() * 2);
  for (std::size_t i = 0; i < ds.rows(); ++i) pos.emplace(ds.row_id(i), i);
  std::vector<std::size_t> removed;
  removed.reserve(ids.size());
  std::vector<bool> seen(ds.rows(), false);
  for (auto id : ids) {
    auto it = pos.find(id);
    if (it == pos.end()) {
      throw ArgumentError("unknown row id " + std::to_string(id));
    }
    if (seen[it->second]) {
      throw ArgumentError("row id listed twice: " + std::to_string(id));
    }
    seen[it->second] = true;
    removed.push_back(it->second);
  }
  return ds.take(complement(ds.rows(), removed));
}

std::vector<std::byte> serialize(const Dataset& ds) {
  ByteWriter w;
  w.magic(kDatasetMagic);
  w.put<std::uint32_t>(kDatasetVersion);
  w.put<std::uint64_t>(ds.rows());
  w.put<std::uint64_t>(ds.cols());
  for (double v : ds.features()) w.put(v);
  for (auto l : ds.labels()) w.put<std::uint8_t>(l);
  for (auto id : ds.row_ids()) w.put<std::uint64_t>(id);
  return w.take();
}

Dataset deserialize_dataset(std::span<const std::byte> bytes) {
  if (bytes.empty()) throw FormatError("empty dataset container", 0);
  ByteReader r(bytes);
  r.expect_magic(kDatasetMagic);
  auto version_at = r.offset();
  if (auto v = r.get<std::uint32_t>(); v != kDatasetVersion) {
    throw FormatError("unsupported dataset version " + std::to_string(v),
                      version_at);
  }
  auto rows = r.get<std::uint64_t>();
  auto cols_at = r.offset();
  auto cols = r.get<std::uint64_t>();
  if (cols == 0) throw FormatError("zero columns", cols_at);
  // 8 bytes per feature, 1 per label, 8 per id.
  if (rows > r.remaining() / 9 || cols > r.remaining() / 8 ||
      rows * cols * 8 + rows * 9 != r.remaining()) {
    throw FormatError("payload size does not match header (rows=" +
                          std::to_string(rows) + ", cols=" +
                          std::to_string(cols) + ")",
                      r.offset());
  }
  std::vector<double> features(rows * cols);
  for (auto& v : features) {
    auto at = r.offset();
    v = r.get<double>();
    if (!std::isfinite(v)) throw FormatError("non-finite feature", at);
  }
  std::vector<std::uint8_t> labels(rows);
  for (auto& l : labels) {
    auto at = r.offset();
    l = r.get<std::uint8_t>();
    if (l > 1) throw FormatError("label outside {0,1}", at);
  }
  std::vector<std::uint64_t> ids(rows);
  std::unordered_set<std::uint64_t> seen(rows * 2);
  for (auto& id : ids) {
    auto at = r.offset();
    id = r.get<std::uint64_t>();
    if (!seen.insert(id).second) throw FormatError("duplicate row id", at);
  }
  r.expect_end();
  return Dataset(static_cast<std::size_t>(cols), std::move(features),
                 std::move(labels), std::move(ids));
}

void save(const Dataset& ds, const std::filesystem::path& path) {
  write_file_bytes(path, serialize(ds));
}

Dataset load(const std::filesystem::path& path) {
  return deserialize_dataset(read_file_bytes(path));
}

void export_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "row_id,label";
  for (std::size_t j = 0; j < ds.cols(); ++j) out << ",f" << j;
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    out << ds.row_id(i) << ',' << static_cast<int>(ds.label(i));
    for (double v : ds.row(i)) out << ',' << v;
    out << '\n';
  }
  write_file_text(path, out.str());
}

}  // namespace unlearn
