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
#include <span>
#include <string_view>

namespace volsearch {

enum class Metric : std::uint8_t { kL2 = 0, kCosine = 1 };

std::string_view to_string(Metric metric);
/// "l2" or "cosine".
std::optional<Metric> parse_metric(std::string_view name);

double dot(std::span<const float> a, std::span<const float> b);
double squared_norm(std::span<const float> a);

/// L2: Euclidean distance. Cosine: 1 - cos(a, b), clamped to [0, 2].
/// Throws kDimensionMismatch, and kZeroVector for a zero input under Cosine.
double distance(Metric metric, std::span<const float> a, std::span<const float> b);

/// Same as distance() without the argument checks. Every index ranks with
/// this one kernel so exact and re-ranked results agree bit-for-bit.
double distance_unchecked(Metric metric, std::span<const float> a, std::span<const float> b);

}  // namespace volsearch
