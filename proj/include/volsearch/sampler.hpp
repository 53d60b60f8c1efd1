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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace volsearch {

/// Ascending, distinct slice indices; all of them when n >= num_slices,
/// otherwise n drawn uniformly without replacement.
std::vector<std::uint32_t> sample_random(std::uint32_t num_slices, std::uint32_t n, std::uint64_t seed);

/// Every step-th slice from index 0 with step = max(1, round(gap / spacing)),
/// rounding half away from zero. Throws kInvalidArgument unless spacing > 0.
std::vector<std::uint32_t> sample_equidistant_mm(std::uint32_t num_slices, double spacing_mm, double gap_mm);

/// Every step-th slice from index 0, whatever the spacing. step >= 1.
std::vector<std::uint32_t> sample_fixed_step(std::uint32_t num_slices, std::uint32_t step);

std::vector<std::uint32_t> sample_all(std::uint32_t num_slices);

struct SamplingPlan {
  enum class Kind : std::uint8_t { kAll, kRandom, kEquidistantMm, kFixedStep };

  Kind kind = Kind::kAll;
  std::uint32_t count = 0;  // kRandom: n; kFixedStep: step
  double gap_mm = 0.0;      // kEquidistantMm
  std::uint64_t seed = 0;   // kRandom only

  static SamplingPlan all() { return {}; }
  static SamplingPlan random(std::uint32_t n, std::uint64_t seed = 0) { return {Kind::kRandom, n, 0.0, seed}; }
  static SamplingPlan equidistant_mm(double gap) { return {Kind::kEquidistantMm, 0, gap, 0}; }
  static SamplingPlan fixed_step(std::uint32_t step) { return {Kind::kFixedStep, step, 0.0, 0}; }

  /// "all", "random:N", "mm:G", "step:S".
  std::string token() const;

  /// Indices for one volume. `stream` decorrelates random draws between
  /// volumes that share the plan seed.
  std::vector<std::uint32_t> sample(std::uint32_t num_slices, double spacing_mm, std::uint64_t stream = 0) const;
};

/// Parses the sampling tokens above; throws kInvalidArgument on anything
/// else, including n = 0, step = 0 or gap <= 0.
SamplingPlan parse_sampling_plan(std::string_view token);

}  // namespace volsearch
