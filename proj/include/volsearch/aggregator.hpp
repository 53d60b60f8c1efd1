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
#include <string_view>
#include <vector>

#include "volsearch/core.hpp"
#include "volsearch/search_index.hpp"
#include "volsearch/slice_store.hpp"

namespace volsearch {

/// Nearest database slice for one sampled query slice.
struct SliceMatch {
  std::uint32_t query_slice = 0;
  SliceRef matched;
  double distance = 0.0;

  bool operator==(const SliceMatch&) const = default;
};

/// One k=1 search per sampled index, returned in the order of `indices`.
/// With num_threads > 1 the searches fan out; the result is unchanged.
/// Throws kInvalidArgument for an index outside the volume.
std::vector<SliceMatch> match_slices(const SliceStore& queries, std::size_t volume,
                                     std::span<const std::uint32_t> indices, const SearchIndex& index,
                                     std::size_t num_threads = 1);

struct HitEntry {
  double score = 0.0;
  double cumulative_distance = 0.0;
  std::size_t hits = 0;

  bool operator==(const HitEntry&) const = default;
};

/// volume id -> accumulated score, ordered by id.
using HitTable = std::map<std::string, HitEntry, std::less<>>;

struct WeightingPolicy {
  enum class Kind : std::uint8_t { kUniform, kGaussian };

  Kind kind = Kind::kUniform;
  /// Gaussian sigma as a fraction of the query volume length.
  double sigma_fraction = 1.0 / 6.0;

  static WeightingPolicy uniform() { return {}; }
  static WeightingPolicy gaussian(double fraction = 1.0 / 6.0) { return {Kind::kGaussian, fraction}; }

  /// Weight of query slice `slice` in a volume of `num_slices` slices.
  double weight(std::uint32_t slice, std::uint32_t num_slices) const;

  /// "uniform", "gaussian" or "gaussian:F".
  std::string token() const;
};

/// exp(-(i - c)^2 / (2 sigma^2)), c = (n - 1) / 2, sigma = fraction * n.
double gaussian_weight(std::uint32_t slice, std::uint32_t num_slices, double sigma_fraction);

WeightingPolicy parse_weighting(std::string_view token);

struct AggregateResult {
  std::string winner;
  HitTable table;
};

/// Folds matches into a hit table and picks the highest score; ties go to
/// the smaller cumulative matched distance, then the smaller volume id.
/// Sums are taken in query-slice order, so the result does not depend on
/// the order of `matches`. Throws kInvalidArgument on an empty list.
AggregateResult aggregate(std::span<const SliceMatch> matches, std::uint32_t num_query_slices,
                          const WeightingPolicy& policy);

/// Label of each matched slice's volume at `level`, one per match.
/// Throws kNotFound for a match outside the catalog.
std::vector<std::size_t> slicewise_predictions(std::span<const SliceMatch> matches, const VolumeCatalog& db,
                                               LabelLevel level);

}  // namespace volsearch
