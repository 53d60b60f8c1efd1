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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace volsearch {

// Byte codes of these enums are part of the EMBV file format.
enum class Modality : std::uint8_t { kCT = 0, kMR = 1 };

enum class BodyRegion : std::uint8_t { kHead = 0, kChest = 1, kAbdomen = 2, kPelvis = 3 };

enum class Organ : std::uint8_t {
  kBrain = 0,
  kColon = 1,
  kHepaticVessels = 2,
  kHippocampus = 3,
  kHeart = 4,
  kLiver = 5,
  kLung = 6,
  kPancreas = 7,
  kProstate = 8,
  kSpleen = 9,
};

inline constexpr std::size_t kNumModalities = 2;
inline constexpr std::size_t kNumBodyRegions = 4;
inline constexpr std::size_t kNumOrgans = 10;

struct TaxonomyRow {
  Organ organ;
  Modality modality;
  BodyRegion body_region;
};

/// The fixed organ -> (modality, body region) table of the MSD corpus.
inline constexpr std::array<TaxonomyRow, kNumOrgans> kTaxonomy = {{
    {Organ::kBrain, Modality::kMR, BodyRegion::kHead},
    {Organ::kColon, Modality::kCT, BodyRegion::kAbdomen},
    {Organ::kHepaticVessels, Modality::kCT, BodyRegion::kAbdomen},
    {Organ::kHippocampus, Modality::kMR, BodyRegion::kHead},
    {Organ::kHeart, Modality::kMR, BodyRegion::kChest},
    {Organ::kLiver, Modality::kCT, BodyRegion::kAbdomen},
    {Organ::kLung, Modality::kCT, BodyRegion::kChest},
    {Organ::kPancreas, Modality::kCT, BodyRegion::kAbdomen},
    {Organ::kProstate, Modality::kMR, BodyRegion::kPelvis},
    {Organ::kSpleen, Modality::kCT, BodyRegion::kAbdomen},
}};

constexpr const TaxonomyRow& taxonomy_row(Organ organ) {
  return kTaxonomy[static_cast<std::size_t>(organ)];
}

constexpr BodyRegion organ_to_body_region(Organ organ) { return taxonomy_row(organ).body_region; }

constexpr Modality organ_to_modality(Organ organ) { return taxonomy_row(organ).modality; }

std::string_view to_string(Modality modality);
std::string_view to_string(BodyRegion region);
std::string_view to_string(Organ organ);

/// Case-insensitive; accepts "hepaticvessels", "hepatic-vessels" and "hepatic_vessels".
std::optional<Organ> parse_organ(std::string_view name);

/// Granularity at which retrieval results are scored.
enum class LabelLevel : std::uint8_t { kModality, kBodyRegion, kOrgan };

inline constexpr std::array<LabelLevel, 3> kAllLevels = {LabelLevel::kModality, LabelLevel::kBodyRegion,
                                                        LabelLevel::kOrgan};

std::string_view to_string(LabelLevel level);
/// Accepts "modality", "region" / "body_region", "organ".
std::optional<LabelLevel> parse_level(std::string_view name);

std::size_t num_classes(LabelLevel level);
std::string_view class_name(LabelLevel level, std::size_t label);

/// Point in embedding space. Non-empty and finite by construction.
class EmbeddingVector {
 public:
  explicit EmbeddingVector(std::vector<float> values);

  std::size_t dim() const { return values_.size(); }
  std::span<const float> values() const { return values_; }

  bool operator==(const EmbeddingVector&) const = default;

 private:
  std::vector<float> values_;
};

struct SliceRef {
  std::string volume_id;
  std::uint32_t slice_index = 0;

  auto operator<=>(const SliceRef&) const = default;
};

struct VolumeRecord {
  std::string volume_id;
  Modality modality = Modality::kCT;
  BodyRegion body_region = BodyRegion::kHead;
  Organ organ = Organ::kBrain;
  float slice_spacing_mm = 1.0F;
  std::uint32_t num_slices = 0;

  bool operator==(const VolumeRecord&) const = default;
};

/// Volume record whose modality and region are taken from the taxonomy.
VolumeRecord make_volume(std::string volume_id, Organ organ, float slice_spacing_mm, std::uint32_t num_slices);

std::size_t label_of(const VolumeRecord& volume, LabelLevel level);

struct SliceEmbedding {
  SliceRef ref;
  EmbeddingVector vector;

  bool operator==(const SliceEmbedding&) const = default;
};

/// Volume table plus per-slice embeddings. Embeddings may be in any order;
/// equality ignores their order.
struct Dataset {
  std::vector<VolumeRecord> volumes;
  std::vector<SliceEmbedding> embeddings;

  /// Dimension of the first embedding, 0 when there are none.
  std::size_t dim() const;
  const VolumeRecord* find_volume(std::string_view volume_id) const;

  friend bool operator==(const Dataset& a, const Dataset& b);
};

enum class ViolationRule {
  kEmptyVolumeId,
  kDuplicateVolume,
  kZeroSlices,
  kBadSpacing,
  kTaxonomyBodyRegion,
  kTaxonomyModality,
  kUnknownVolume,
  kSliceOutOfRange,
  kDuplicateEmbedding,
  kMissingEmbedding,
  kDimensionMismatch,
};

std::string_view to_string(ViolationRule rule);

struct Violation {
  ViolationRule rule;
  std::string volume_id;
  std::optional<std::uint32_t> slice_index;
  std::string message;
};

/// Empty result iff every dataset invariant holds. Violations are reported
/// in a deterministic order: volume table first, then embeddings.
std::vector<Violation> validate_dataset(const Dataset& ds);

/// Throws Error(kInvalidDataset) summarizing the violations, if any.
void require_valid(const Dataset& ds);

/// Volume lookup by id.
class VolumeCatalog {
 public:
  explicit VolumeCatalog(std::span<const VolumeRecord> volumes);

  const VolumeRecord* find(std::string_view volume_id) const;
  /// Throws Error(kNotFound) naming the id.
  const VolumeRecord& at(std::string_view volume_id) const;
  std::size_t size() const { return volumes_.size(); }

 private:
  std::vector<VolumeRecord> volumes_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace volsearch
