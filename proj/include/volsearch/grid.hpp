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
#include <string>
#include <string_view>
#include <vector>

#include "volsearch/evaluator.hpp"
#include "volsearch/pipeline.hpp"

namespace volsearch {

/// A benchmark grid: every embedding set is indexed with every index spec
/// and queried with every variant.
struct GridConfig {
  struct Embedding {
    std::string name;
    std::filesystem::path db;
    std::filesystem::path queries;
  };

  std::vector<Embedding> embeddings;
  std::vector<IndexSpec> indexes;
  std::vector<Variant> variants;
  std::vector<LabelLevel> levels{kAllLevels.begin(), kAllLevels.end()};
  /// Sampling seed, and the default index seed.
  std::uint64_t seed = 0;
};

/// Parses the JSON config. Relative paths resolve against `base_dir`.
/// Throws kConfig with the line (syntax errors) or field path (schema
/// errors).
///
///   {
///     "seed": 7,
///     "levels": ["modality", "region", "organ"],
///     "embeddings": [{"name": "...", "db": "db.embv", "queries": "q.embv"}],
///     "indexes": [{"kind": "exact"},
///                 {"kind": "lsh", "bits": 1024, "rerank": 0},
///                 {"kind": "hnsw", "M": 16, "ef_construction": 200, "ef_search": 64}],
///     "sampling": ["all", "random:40", "mm:7", "step:5", "slicewise",
///                  {"sampling": "all", "weighting": "gaussian"}],
///     "weightings": ["uniform"]
///   }
///
/// Plain sampling strings are crossed with "weightings"; objects name their
/// weighting; "slicewise" appears once.
GridConfig parse_grid_config(std::string_view text, const std::filesystem::path& base_dir = {});
GridConfig read_grid_config(const std::filesystem::path& path);

struct GridCell {
  std::string embedding;
  std::string index;
  std::string variant;
  RetrievalOutput output;
  /// One per configured level, in config order.
  std::vector<EvalReport> reports;
};

struct GridResult {
  GridConfig config;
  /// Embedding-major, then index, then variant, all in config order.
  std::vector<GridCell> cells;

  const GridCell* find(std::string_view embedding, std::string_view index, std::string_view variant) const;
};

/// Runs up to `jobs` index builds or cells at once. Datasets and indexes
/// are shared read-only between cells; results do not depend on `jobs`.
GridResult run_grid(const GridConfig& config, std::size_t jobs = 1);

/// Writes cells/<cell>/{predictions.tsv, report_<level>.{txt,json}},
/// recall_<level>.tsv and precision_<level>.tsv matrices (rows embedding x
/// index x class, columns variants), summary_<level>.tsv (median and max
/// recall across variants) and grid.json.
void write_grid_outputs(const GridResult& result, const std::filesystem::path& out_dir);

/// Filesystem-safe form of a cell name.
std::string cell_directory_name(std::string_view embedding, std::string_view index, std::string_view variant);

}  // namespace volsearch
