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

#include "volsearch/distance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "volsearch/error.hpp"

namespace volsearch {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kL2: return "l2";
    case Metric::kCosine: return "cosine";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view name) {
  if (name == "l2" || name == "L2") return Metric::kL2;
  if (name == "cosine" || name == "cos") return Metric::kCosine;
  return std::nullopt;
}

// Four independent accumulators; the summation order is fixed, which keeps
// results reproducible and makes dot(-a, b) == -dot(a, b) exactly.
double dot(std::span<const float> a, std::span<const float> b) {
  const std::size_t n = a.size();
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += static_cast<double>(a[i]) * b[i];
    s1 += static_cast<double>(a[i + 1]) * b[i + 1];
    s2 += static_cast<double>(a[i + 2]) * b[i + 2];
    s3 += static_cast<double>(a[i + 3]) * b[i + 3];
  }
  for (; i < n; ++i) s0 += static_cast<double>(a[i]) * b[i];
  return (s0 + s1) + (s2 + s3);
}

double squared_norm(std::span<const float> a) { return dot(a, a); }

namespace {

double squared_l2(std::span<const float> a, std::span<const float> b) {
  const std::size_t n = a.size();
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double d0 = static_cast<double>(a[i]) - b[i];
    const double d1 = static_cast<double>(a[i + 1]) - b[i + 1];
    const double d2 = static_cast<double>(a[i + 2]) - b[i + 2];
    const double d3 = static_cast<double>(a[i + 3]) - b[i + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s0 += d * d;
  }
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

double distance_unchecked(Metric metric, std::span<const float> a, std::span<const float> b) {
  if (metric == Metric::kL2) return std::sqrt(squared_l2(a, b));
  const double denom = std::sqrt(squared_norm(a) * squared_norm(b));
  return std::clamp(1.0 - dot(a, b) / denom, 0.0, 2.0);
}

double distance(Metric metric, std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  if (metric == Metric::kCosine && (squared_norm(a) == 0.0 || squared_norm(b) == 0.0)) {
    throw Error(ErrorCode::kZeroVector, "cosine distance is undefined for a zero vector");
  }
  return distance_unchecked(metric, a, b);
}

}  // namespace volsearch
