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

#include "volsearch/sampler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "volsearch/error.hpp"
#include "volsearch/random.hpp"

namespace volsearch {

std::vector<std::uint32_t> sample_all(std::uint32_t num_slices) {
  std::vector<std::uint32_t> out(num_slices);
  std::iota(out.begin(), out.end(), 0U);
  return out;
}

std::vector<std::uint32_t> sample_random(std::uint32_t num_slices, std::uint32_t n, std::uint64_t seed) {
  if (n >= num_slices) return sample_all(num_slices);
  // Partial Fisher-Yates over [0, num_slices).
  std::vector<std::uint32_t> pool = sample_all(num_slices);
  Rng rng(seed);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::uint32_t>(rng.below(num_slices - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::uint32_t> sample_fixed_step(std::uint32_t num_slices, std::uint32_t step) {
  if (step == 0) throw Error(ErrorCode::kInvalidArgument, "sampling step must be at least 1");
  std::vector<std::uint32_t> out;
  out.reserve(num_slices / step + 1);
  for (std::uint64_t i = 0; i < num_slices; i += step) out.push_back(static_cast<std::uint32_t>(i));
  return out;
}

std::vector<std::uint32_t> sample_equidistant_mm(std::uint32_t num_slices, double spacing_mm, double gap_mm) {
  if (!(spacing_mm > 0.0)) throw Error(ErrorCode::kInvalidArgument, "slice spacing must be positive");
  if (!(gap_mm > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sampling gap must be positive");
  // std::round rounds halfway cases away from zero.
  const double ratio = std::round(gap_mm / spacing_mm);
  const double clamped = std::clamp(ratio, 1.0, static_cast<double>(UINT32_MAX));
  return sample_fixed_step(num_slices, static_cast<std::uint32_t>(clamped));
}

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string SamplingPlan::token() const {
  switch (kind) {
    case Kind::kAll: return "all";
    case Kind::kRandom: return "random:" + std::to_string(count);
    case Kind::kEquidistantMm: return "mm:" + format_number(gap_mm);
    case Kind::kFixedStep: return "step:" + std::to_string(count);
  }
  return "?";
}

std::vector<std::uint32_t> SamplingPlan::sample(std::uint32_t num_slices, double spacing_mm,
                                                std::uint64_t stream) const {
  switch (kind) {
    case Kind::kAll: return sample_all(num_slices);
    case Kind::kRandom: return sample_random(num_slices, count, mix_seed(seed, stream));
    case Kind::kEquidistantMm: return sample_equidistant_mm(num_slices, spacing_mm, gap_mm);
    case Kind::kFixedStep: return sample_fixed_step(num_slices, count);
  }
  return {};
}

SamplingPlan parse_sampling_plan(std::string_view token) {
  auto bad = [&token](std::string_view why) {
    return Error(ErrorCode::kInvalidArgument, "invalid sampling '" + std::string(token) + "' (" + std::string(why) +
                                                  "); valid: all | random:N | mm:G | step:S | slicewise");
  };
  if (token == "all") return SamplingPlan::all();

  const auto colon = token.find(':');
  if (colon == std::string_view::npos) throw bad("unknown token");
  const auto head = token.substr(0, colon);
  const auto arg = token.substr(colon + 1);

  if (head == "random" || head == "step") {
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
    if (ec != std::errc() || ptr != arg.data() + arg.size() || value == 0) throw bad("expected a positive integer");
    return head == "random" ? SamplingPlan::random(value) : SamplingPlan::fixed_step(value);
  }
  if (head == "mm") {
    double gap = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), gap);
    if (ec != std::errc() || ptr != arg.data() + arg.size() || !(gap > 0.0) || !std::isfinite(gap)) {
      throw bad("expected a positive gap in mm");
    }
    return SamplingPlan::equidistant_mm(gap);
  }
  throw bad("unknown token");
}

}  // namespace volsearch
