// Copyright 2026-present the volsearch project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "volsearch/aggregator.hpp"
#include "volsearch/distance.hpp"
#include "volsearch/evaluator.hpp"
#include "volsearch/hnsw_index.hpp"
#include "volsearch/lsh_index.hpp"
#include "volsearch/sampler.hpp"
#include "volsearch/search_index.hpp"
#include "volsearch/slice_store.hpp"

namespace volsearch {

struct IndexSpec {
  IndexKind kind = IndexKind::kExact;
  Metric metric = Metric::kL2;
  LshParams lsh;
  HnswParams hnsw;
  /// Worker threads for exact scans; ignored by the approximate indexes.
  std::size_t threads = 1;

  /// Short label such as "exact", "lsh-b1024" or "hnsw-m16-ef64"; the metric
  /// is appended when it is not L2.
  std::string token() const;
};

/// Builds from scratch. The metric in `spec` overrides the per-index
/// metric fields.
std::shared_ptr<const SearchIndex> build_index(std::shared_ptr<const SliceStore> db, const IndexSpec& spec);

/// Loads a file written by save_index; its kind must match `kind`.
std::shared_ptr<const SearchIndex> load_index(const std::filesystem::path& path, IndexKind kind,
                                              std::shared_ptr<const SliceStore> db);
void save_index(const SearchIndex& index, const std::filesystem::path& path);

/// One retrieval variant: a sampling plan plus weighting, or the
/// slice-wise baseline that skips aggregation.
struct Variant {
  bool slicewise = false;
  SamplingPlan sampling;
  WeightingPolicy weighting;

  static Variant slice_wise() { return {true, {}, {}}; }

  /// The sampling token, suffixed "/gaussian" (or "/gaussian:F") when
  /// weighted; "slicewise" for the baseline.
  std::string token() const;
};

/// Accepts the sampling tokens plus "slicewise".
Variant parse_variant(std::string_view sampling, std::string_view weighting = "uniform");

struct SlicePrediction {
  std::string query_volume_id;
  std::uint32_t query_slice = 0;
  std::string predicted_volume_id;

  bool operator==(const SlicePrediction&) const = default;
};

struct RetrievalOutput {
  bool slicewise = false;
  /// One per query volume, in query table order. Empty for slice-wise runs.
  std::vector<Prediction> volumes;
  /// One per query slice for slice-wise runs, in storage order.
  std::vector<SlicePrediction> slices;

  bool operator==(const RetrievalOutput&) const = default;
};

/// Runs every query volume through sampling, per-slice top-1 search and
/// aggregation. Random sampling draws with `seed` and the query volume's
/// position as the stream, so each volume gets its own draw.
RetrievalOutput run_retrieval(const SliceStore& queries, const SearchIndex& index, const Variant& variant,
                              std::uint64_t seed, std::size_t num_threads = 1);

/// Reports for each level. For slice-wise output every slice is one sample.
std::vector<EvalReport> evaluate_output(const RetrievalOutput& output, const VolumeCatalog& db,
                                        const VolumeCatalog& queries, std::span<const LabelLevel> levels);

/// Two columns (query, predicted) for volume runs, three (query, slice,
/// predicted) for slice-wise runs, tab separated, one line each.
std::string format_predictions(const RetrievalOutput& output);

/// Parses either layout. Throws kCorrupt naming the offending line.
RetrievalOutput parse_predictions(std::string_view text);

void write_predictions(const RetrievalOutput& output, const std::filesystem::path& path);
RetrievalOutput read_predictions(const std::filesystem::path& path);

/// Everything one retrieve-and-evaluate run needs.
struct RunConfig {
  IndexSpec index;
  Variant variant;
  std::filesystem::path db_path;
  std::filesystem::path queries_path;
  /// Optional prebuilt index; built on the fly when empty.
  std::filesystem::path index_path;
  std::filesystem::path report_dir;
  std::vector<LabelLevel> levels{kAllLevels.begin(), kAllLevels.end()};
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

}  // namespace volsearch
