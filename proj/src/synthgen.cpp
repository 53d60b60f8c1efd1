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

#include "volsearch/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

#include "volsearch/error.hpp"
#include "volsearch/random.hpp"

namespace volsearch {

namespace {

std::string numbered(std::string_view prefix, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03zu", i);
  return std::string(prefix) + buf;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<float> draw_point(const std::vector<double>& center, const std::vector<double>* offset, Rng& rng) {
  std::vector<float> out(center.size());
  for (std::size_t j = 0; j < center.size(); ++j) {
    double x = center[j] + rng.normal();
    if (offset) x += (*offset)[j];
    out[j] = static_cast<float>(x);
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> cluster_centers(std::size_t count, std::size_t dim, double separation,
                                                 std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> centers(count, std::vector<double>(dim));
  for (auto& c : centers) {
    for (auto& x : c) x = rng.normal();
  }
  if (count <= dim) {
    // Gram-Schmidt; a random Gaussian frame is independent with probability 1.
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t p = 0; p < i; ++p) {
        double proj = 0;
        for (std::size_t j = 0; j < dim; ++j) proj += centers[i][j] * centers[p][j];
        for (std::size_t j = 0; j < dim; ++j) centers[i][j] -= proj * centers[p][j];
      }
      double norm = 0;
      for (double x : centers[i]) norm += x * x;
      norm = std::sqrt(norm);
      for (auto& x : centers[i]) x /= norm;
    }
    const double radius = separation / std::sqrt(2.0);
    for (auto& c : centers) {
      for (auto& x : c) x *= radius;
    }
  } else {
    // Two N(0, s^2 I) points are s * sqrt(2 dim) apart on average.
    const double s = separation / std::sqrt(2.0 * static_cast<double>(dim));
    for (auto& c : centers) {
      for (auto& x : c) x *= s;
    }
  }
  return centers;
}

SynthData generate(const SynthSpec& spec) {
  if (spec.dim == 0) throw Error(ErrorCode::kInvalidArgument, "synth: dim must be positive");
  if (spec.organs.empty()) throw Error(ErrorCode::kInvalidArgument, "synth: at least one organ is required");
  if (std::set<Organ>(spec.organs.begin(), spec.organs.end()).size() != spec.organs.size()) {
    throw Error(ErrorCode::kInvalidArgument, "synth: organ list has duplicates");
  }
  if (spec.min_slices == 0 || spec.min_slices > spec.max_slices) {
    throw Error(ErrorCode::kInvalidArgument, "synth: slice range must be non-empty and positive");
  }
  if (!(spec.min_spacing_mm > 0.0F) || spec.min_spacing_mm > spec.max_spacing_mm) {
    throw Error(ErrorCode::kInvalidArgument, "synth: spacing range must be non-empty and positive");
  }
  if (!(spec.cluster_separation >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "synth: separation must be >= 0");
  if (!(spec.noise_fraction >= 0.0 && spec.noise_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "synth: noise fraction must lie in [0, 1)");
  }
  if (!(spec.volume_offset >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "synth: volume offset must be >= 0");
  if (spec.volumes_per_organ == 0) throw Error(ErrorCode::kInvalidArgument, "synth: need at least one volume per organ");

  // The extra center is the shared background cluster used for noise slices.
  const auto centers =
      cluster_centers(spec.organs.size() + 1, spec.dim, spec.cluster_separation, mix_seed(spec.seed, 0));
  const auto& background = centers.back();

  Rng rng(mix_seed(spec.seed, 1));
  SynthData out;
  auto emit = [&](Dataset& ds, std::size_t organ_pos, std::string id) {
    const Organ organ = spec.organs[organ_pos];
    const auto slices = static_cast<std::uint32_t>(rng.between(spec.min_slices, spec.max_slices));
    const auto spacing = static_cast<float>(rng.uniform(spec.min_spacing_mm, spec.max_spacing_mm));
    std::vector<double> offset(spec.dim);
    for (auto& x : offset) x = spec.volume_offset * rng.normal();

    ds.volumes.push_back(make_volume(id, organ, spacing, slices));
    for (std::uint32_t s = 0; s < slices; ++s) {
      const bool noise = spec.noise_fraction > 0.0 && rng.uniform01() < spec.noise_fraction;
      auto values = noise ? draw_point(background, nullptr, rng) : draw_point(centers[organ_pos], &offset, rng);
      ds.embeddings.push_back({SliceRef{id, s}, EmbeddingVector(std::move(values))});
    }
  };

  for (std::size_t o = 0; o < spec.organs.size(); ++o) {
    const std::string name = lower(to_string(spec.organs[o]));
    for (std::size_t v = 0; v < spec.volumes_per_organ; ++v) emit(out.database, o, numbered(name + "_db", v));
  }
  for (std::size_t o = 0; o < spec.organs.size(); ++o) {
    const std::string name = lower(to_string(spec.organs[o]));
    for (std::size_t v = 0; v < spec.queries_per_organ; ++v) emit(out.queries, o, numbered(name + "_q", v));
  }
  return out;
}

MixtureData generate_mixture(const MixtureSpec& spec) {
  if (spec.dim == 0 || spec.clusters == 0 || spec.points < spec.clusters) {
    throw Error(ErrorCode::kInvalidArgument, "mixture: need dim > 0 and at least one point per cluster");
  }
  const auto centers = cluster_centers(spec.clusters, spec.dim, spec.cluster_separation, mix_seed(spec.seed, 0));
  Rng rng(mix_seed(spec.seed, 1));

  MixtureData out;
  for (std::size_t c = 0; c < spec.clusters; ++c) {
    const std::size_t count = spec.points / spec.clusters + (c < spec.points % spec.clusters ? 1 : 0);
    const std::string id = numbered("c", c);
    out.database.volumes.push_back(make_volume(id, kTaxonomy[c % kNumOrgans].organ, 1.0F,
                                               static_cast<std::uint32_t>(count)));
    for (std::size_t s = 0; s < count; ++s) {
      out.database.embeddings.push_back(
          {SliceRef{id, static_cast<std::uint32_t>(s)}, EmbeddingVector(draw_point(centers[c], nullptr, rng))});
    }
  }
  Rng query_rng(mix_seed(spec.seed, 2));
  for (std::size_t q = 0; q < spec.queries; ++q) {
    const std::size_t c = query_rng.below(spec.clusters);
    out.query_cluster.push_back(c);
    out.queries.push_back(draw_point(centers[c], nullptr, query_rng));
  }
  return out;
}

}  // namespace volsearch
