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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "volsearch/core.hpp"

namespace volsearch {

/// Per-class scores at one label level. Classes are the enum codes of the
/// level, so the matrices are always square over the full class set.
struct EvalReport {
  LabelLevel level = LabelLevel::kModality;
  /// confusion[true][predicted]
  std::vector<std::vector<std::uint64_t>> confusion;
  /// diag / row sum; 0 when the row is empty.
  std::vector<double> recall;
  /// diag / column sum; 0 when the column is empty.
  std::vector<double> precision;
  /// Macro averages over classes present among the queries. Precision
  /// additionally skips classes that were never predicted.
  double overall_recall = 0.0;
  double overall_precision = 0.0;

  std::size_t classes() const { return confusion.size(); }
  std::uint64_t row_sum(std::size_t c) const;
  std::uint64_t column_sum(std::size_t c) const;
  std::uint64_t total() const;
  bool present(std::size_t c) const { return row_sum(c) > 0; }

  bool operator==(const EvalReport&) const = default;
};

struct Prediction {
  std::string query_volume_id;
  std::string predicted_volume_id;

  bool operator==(const Prediction&) const = default;
};

/// Builds the report from parallel label lists (no size checks).
EvalReport report_from_labels(LabelLevel level, std::span<const std::size_t> truths,
                              std::span<const std::size_t> predictions);

/// The true class is the query volume's label, the predicted class the
/// retrieved volume's label. Throws kNotFound naming an unknown id.
EvalReport evaluate(std::span<const Prediction> predictions, const VolumeCatalog& db, const VolumeCatalog& queries,
                    LabelLevel level);

/// Scores slices instead of volumes. Throws kInvalidArgument for an empty
/// or length-mismatched input.
EvalReport evaluate_slicewise(std::span<const std::size_t> predictions, std::span<const std::size_t> truths,
                              LabelLevel level);

/// Re-buckets an organ-level report into a coarser level via the taxonomy.
EvalReport coarsen(const EvalReport& organ_report, LabelLevel level);

struct ClassSummary {
  std::size_t label = 0;
  double median_recall = 0.0;
  double max_recall = 0.0;
  /// Configs in which the class was present.
  std::size_t configs = 0;
};

/// Per class present in at least one report: median (mean of the middle
/// pair for even counts) and maximum recall over the reports where it is
/// present. Throws kInvalidArgument for an empty map or mixed levels.
std::vector<ClassSummary> summarize_across_configs(const std::map<std::string, EvalReport>& reports);

}  // namespace volsearch
