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
#include <vector>

#include "volsearch/core.hpp"

namespace volsearch {

/// Labeled organ-cluster data standing in for real slice embeddings.
/// Distances are in units of the per-coordinate intra-cluster standard
/// deviation.
struct SynthSpec {
  std::size_t dim = 128;
  std::vector<Organ> organs = {kTaxonomy[0].organ, kTaxonomy[1].organ, kTaxonomy[2].organ, kTaxonomy[3].organ,
                               kTaxonomy[4].organ, kTaxonomy[5].organ, kTaxonomy[6].organ, kTaxonomy[7].organ,
                               kTaxonomy[8].organ, kTaxonomy[9].organ};
  std::size_t volumes_per_organ = 4;
  std::size_t queries_per_organ = 2;
  std::uint32_t min_slices = 20;
  std::uint32_t max_slices = 40;
  float min_spacing_mm = 1.0F;
  float max_spacing_mm = 5.0F;
  /// Distance between any two organ centers.
  double cluster_separation = 12.0;
  /// Probability that a slice is replaced by a background vector.
  double noise_fraction = 0.0;
  /// Standard deviation of the per-volume offset.
  double volume_offset = 0.5;
  std::uint64_t seed = 0;
};

struct SynthData {
  Dataset database;
  Dataset queries;
};

/// Throws kInvalidArgument for an invalid spec (empty organ list, repeated
/// organ, empty ranges, negative separation, noise outside [0, 1)).
SynthData generate(const SynthSpec& spec);

/// Unlabeled Gaussian mixture for index fidelity checks. The database holds
/// one volume per cluster ("c000", "c001", ...) with organ labels cycling
/// through the taxonomy; queries are fresh draws from the same mixture.
struct MixtureSpec {
  std::size_t dim = 128;
  std::size_t clusters = 100;
  std::size_t points = 10000;
  std::size_t queries = 1000;
  double cluster_separation = 10.0;
  std::uint64_t seed = 0;
};

struct MixtureData {
  Dataset database;
  std::vector<std::vector<float>> queries;
  std::vector<std::size_t> query_cluster;
};

MixtureData generate_mixture(const MixtureSpec& spec);

/// count centers whose pairwise distances all equal `separation` (a scaled
/// random orthonormal frame) when dim >= count; otherwise isotropic Gaussian
/// centers with that expected pairwise distance.
std::vector<std::vector<double>> cluster_centers(std::size_t count, std::size_t dim, double separation,
                                                 std::uint64_t seed);

}  // namespace volsearch
