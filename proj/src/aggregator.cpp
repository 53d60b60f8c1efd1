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

#include "volsearch/aggregator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <tuple>

#include "parallel.hpp"
#include "volsearch/error.hpp"

namespace volsearch {

std::vector<SliceMatch> match_slices(const SliceStore& queries, std::size_t volume,
                                     std::span<const std::uint32_t> indices, const SearchIndex& index,
                                     std::size_t num_threads) {
  if (volume >= queries.volumes().size()) {
    throw Error(ErrorCode::kInvalidArgument, "query volume " + std::to_string(volume) + " does not exist");
  }
  const auto& record = queries.volume(volume);
  for (std::uint32_t s : indices) {
    if (s >= record.num_slices) {
      throw Error(ErrorCode::kInvalidArgument, "slice " + std::to_string(s) + " is outside query volume '" +
                                                   record.volume_id + "' (" + std::to_string(record.num_slices) +
                                                   " slices)");
    }
  }

  std::vector<SliceMatch> out(indices.size());
  auto run_one = [&](std::size_t i) {
    const auto hits = index.search(queries.slice(volume, indices[i]), 1);
    if (hits.empty()) throw Error(ErrorCode::kEmptyDataset, "search returned no hit");
    out[i] = {indices[i], hits.front().ref, hits.front().distance};
  };

  detail::parallel_for(indices.size(), num_threads, run_one);
  return out;
}

double gaussian_weight(std::uint32_t slice, std::uint32_t num_slices, double sigma_fraction) {
  const double center = (static_cast<double>(num_slices) - 1.0) / 2.0;
  const double sigma = sigma_fraction * static_cast<double>(num_slices);
  const double d = static_cast<double>(slice) - center;
  return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

double WeightingPolicy::weight(std::uint32_t slice, std::uint32_t num_slices) const {
  return kind == Kind::kUniform ? 1.0 : gaussian_weight(slice, num_slices, sigma_fraction);
}

std::string WeightingPolicy::token() const {
  if (kind == Kind::kUniform) return "uniform";
  if (sigma_fraction == 1.0 / 6.0) return "gaussian";
  std::ostringstream os;
  os << "gaussian:" << sigma_fraction;
  return os.str();
}

WeightingPolicy parse_weighting(std::string_view token) {
  if (token == "uniform") return WeightingPolicy::uniform();
  if (token == "gaussian") return WeightingPolicy::gaussian();
  if (token.starts_with("gaussian:")) {
    const auto arg = token.substr(9);
    double f = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), f);
    if (ec == std::errc() && ptr == arg.data() + arg.size() && f > 0.0 && std::isfinite(f)) {
      return WeightingPolicy::gaussian(f);
    }
  }
  throw Error(ErrorCode::kInvalidArgument,
              "invalid weighting '" + std::string(token) + "'; valid: uniform | gaussian | gaussian:F (F > 0)");
}

AggregateResult aggregate(std::span<const SliceMatch> matches, std::uint32_t num_query_slices,
                          const WeightingPolicy& policy) {
  if (matches.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot aggregate an empty match list");
  if (policy.kind == WeightingPolicy::Kind::kGaussian && !(policy.sigma_fraction > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gaussian sigma fraction must be positive");
  }

  std::vector<const SliceMatch*> ordered;
  ordered.reserve(matches.size());
  for (const auto& m : matches) ordered.push_back(&m);
  std::sort(ordered.begin(), ordered.end(), [](const SliceMatch* a, const SliceMatch* b) {
    return std::tie(a->query_slice, a->distance, a->matched) < std::tie(b->query_slice, b->distance, b->matched);
  });

  AggregateResult result;
  for (const SliceMatch* m : ordered) {
    auto& entry = result.table[m->matched.volume_id];
    entry.score += policy.weight(m->query_slice, num_query_slices);
    entry.cumulative_distance += m->distance;
    ++entry.hits;
  }

  const auto* best = &*result.table.begin();
  for (const auto& item : result.table) {
    const auto& [id, e] = item;
    const auto& b = best->second;
    // Map order already makes the id tie-break lexicographic.
    if (e.score > b.score || (e.score == b.score && e.cumulative_distance < b.cumulative_distance)) best = &item;
  }
  result.winner = best->first;
  return result;
}

std::vector<std::size_t> slicewise_predictions(std::span<const SliceMatch> matches, const VolumeCatalog& db,
                                               LabelLevel level) {
  std::vector<std::size_t> out;
  out.reserve(matches.size());
  for (const auto& m : matches) out.push_back(label_of(db.at(m.matched.volume_id), level));
  return out;
}

}  // namespace volsearch
