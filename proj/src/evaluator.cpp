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

#include "volsearch/evaluator.hpp"

#include <algorithm>

#include "volsearch/error.hpp"

namespace volsearch {

std::uint64_t EvalReport::row_sum(std::size_t c) const {
  std::uint64_t s = 0;
  for (auto x : confusion[c]) s += x;
  return s;
}

std::uint64_t EvalReport::column_sum(std::size_t c) const {
  std::uint64_t s = 0;
  for (const auto& row : confusion) s += row[c];
  return s;
}

std::uint64_t EvalReport::total() const {
  std::uint64_t s = 0;
  for (std::size_t c = 0; c < classes(); ++c) s += row_sum(c);
  return s;
}

namespace {

void finish(EvalReport& r) {
  const std::size_t n = r.classes();
  r.recall.assign(n, 0.0);
  r.precision.assign(n, 0.0);
  double recall_sum = 0.0;
  double precision_sum = 0.0;
  std::size_t recall_count = 0;
  std::size_t precision_count = 0;
  for (std::size_t c = 0; c < n; ++c) {
    const auto row = r.row_sum(c);
    const auto col = r.column_sum(c);
    const auto diag = static_cast<double>(r.confusion[c][c]);
    if (row > 0) r.recall[c] = diag / static_cast<double>(row);
    if (col > 0) r.precision[c] = diag / static_cast<double>(col);
    if (row > 0) {
      recall_sum += r.recall[c];
      ++recall_count;
      if (col > 0) {
        precision_sum += r.precision[c];
        ++precision_count;
      }
    }
  }
  r.overall_recall = recall_count ? recall_sum / static_cast<double>(recall_count) : 0.0;
  r.overall_precision = precision_count ? precision_sum / static_cast<double>(precision_count) : 0.0;
}

EvalReport empty_report(LabelLevel level) {
  EvalReport r;
  r.level = level;
  const std::size_t n = num_classes(level);
  r.confusion.assign(n, std::vector<std::uint64_t>(n, 0));
  return r;
}

}  // namespace

EvalReport report_from_labels(LabelLevel level, std::span<const std::size_t> truths,
                              std::span<const std::size_t> predictions) {
  EvalReport r = empty_report(level);
  const std::size_t n = r.classes();
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] >= n || predictions[i] >= n) {
      throw Error(ErrorCode::kInvalidArgument, "label code out of range for level " + std::string(to_string(level)));
    }
    ++r.confusion[truths[i]][predictions[i]];
  }
  finish(r);
  return r;
}

EvalReport evaluate(std::span<const Prediction> predictions, const VolumeCatalog& db, const VolumeCatalog& queries,
                    LabelLevel level) {
  std::vector<std::size_t> truths;
  std::vector<std::size_t> predicted;
  truths.reserve(predictions.size());
  predicted.reserve(predictions.size());
  for (const auto& p : predictions) {
    const auto* q = queries.find(p.query_volume_id);
    if (!q) throw Error(ErrorCode::kNotFound, "unknown query volume id '" + p.query_volume_id + "'");
    const auto* d = db.find(p.predicted_volume_id);
    if (!d) throw Error(ErrorCode::kNotFound, "unknown database volume id '" + p.predicted_volume_id + "'");
    truths.push_back(label_of(*q, level));
    predicted.push_back(label_of(*d, level));
  }
  return report_from_labels(level, truths, predicted);
}

EvalReport evaluate_slicewise(std::span<const std::size_t> predictions, std::span<const std::size_t> truths,
                              LabelLevel level) {
  if (predictions.size() != truths.size()) {
    throw Error(ErrorCode::kInvalidArgument, "slice-wise evaluation needs equal-length lists (" +
                                                 std::to_string(predictions.size()) + " predictions, " +
                                                 std::to_string(truths.size()) + " truths)");
  }
  if (predictions.empty()) throw Error(ErrorCode::kInvalidArgument, "slice-wise evaluation of an empty list");
  return report_from_labels(level, truths, predictions);
}

EvalReport coarsen(const EvalReport& organ_report, LabelLevel level) {
  if (organ_report.level != LabelLevel::kOrgan) {
    throw Error(ErrorCode::kInvalidArgument, "only organ-level reports can be coarsened");
  }
  auto bucket = [level](std::size_t organ) {
    const auto& row = kTaxonomy[organ];
    switch (level) {
      case LabelLevel::kModality: return static_cast<std::size_t>(row.modality);
      case LabelLevel::kBodyRegion: return static_cast<std::size_t>(row.body_region);
      case LabelLevel::kOrgan: return organ;
    }
    return organ;
  };
  EvalReport r = empty_report(level);
  for (std::size_t t = 0; t < kNumOrgans; ++t) {
    for (std::size_t p = 0; p < kNumOrgans; ++p) r.confusion[bucket(t)][bucket(p)] += organ_report.confusion[t][p];
  }
  finish(r);
  return r;
}

std::vector<ClassSummary> summarize_across_configs(const std::map<std::string, EvalReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::kInvalidArgument, "no reports to summarize");
  const LabelLevel level = reports.begin()->second.level;
  for (const auto& [name, r] : reports) {
    if (r.level != level) throw Error(ErrorCode::kInvalidArgument, "report '" + name + "' is at a different level");
  }

  std::vector<ClassSummary> out;
  for (std::size_t c = 0; c < num_classes(level); ++c) {
    std::vector<double> values;
    for (const auto& [name, r] : reports) {
      if (r.present(c)) values.push_back(r.recall[c]);
    }
    if (values.empty()) continue;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const double median = n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
    out.push_back({c, median, values.back(), n});
  }
  return out;
}

}  // namespace volsearch
