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

#include "volsearch/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "volsearch/error.hpp"

namespace volsearch {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kZeroVector: return "zero-vector";
    case ErrorCode::kEmptyDataset: return "empty-dataset";
    case ErrorCode::kDuplicateRef: return "duplicate-ref";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kInvalidDataset: return "invalid-dataset";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kBadVersion: return "bad-version";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kRecordCountMismatch: return "record-count-mismatch";
    case ErrorCode::kCorrupt: return "corrupt";
    case ErrorCode::kConfig: return "config";
  }
  return "unknown";
}

std::string_view to_string(Modality modality) {
  switch (modality) {
    case Modality::kCT: return "CT";
    case Modality::kMR: return "MR";
  }
  return "?";
}

std::string_view to_string(BodyRegion region) {
  switch (region) {
    case BodyRegion::kHead: return "Head";
    case BodyRegion::kChest: return "Chest";
    case BodyRegion::kAbdomen: return "Abdomen";
    case BodyRegion::kPelvis: return "Pelvis";
  }
  return "?";
}

std::string_view to_string(Organ organ) {
  switch (organ) {
    case Organ::kBrain: return "Brain";
    case Organ::kColon: return "Colon";
    case Organ::kHepaticVessels: return "HepaticVessels";
    case Organ::kHippocampus: return "Hippocampus";
    case Organ::kHeart: return "Heart";
    case Organ::kLiver: return "Liver";
    case Organ::kLung: return "Lung";
    case Organ::kPancreas: return "Pancreas";
    case Organ::kProstate: return "Prostate";
    case Organ::kSpleen: return "Spleen";
  }
  return "?";
}

namespace {

std::string fold_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::optional<Organ> parse_organ(std::string_view name) {
  const std::string folded = fold_name(name);
  for (const auto& row : kTaxonomy) {
    if (fold_name(to_string(row.organ)) == folded) return row.organ;
  }
  return std::nullopt;
}

std::string_view to_string(LabelLevel level) {
  switch (level) {
    case LabelLevel::kModality: return "modality";
    case LabelLevel::kBodyRegion: return "region";
    case LabelLevel::kOrgan: return "organ";
  }
  return "?";
}

std::optional<LabelLevel> parse_level(std::string_view name) {
  const std::string folded = fold_name(name);
  if (folded == "modality") return LabelLevel::kModality;
  if (folded == "region" || folded == "bodyregion") return LabelLevel::kBodyRegion;
  if (folded == "organ") return LabelLevel::kOrgan;
  return std::nullopt;
}

std::size_t num_classes(LabelLevel level) {
  switch (level) {
    case LabelLevel::kModality: return kNumModalities;
    case LabelLevel::kBodyRegion: return kNumBodyRegions;
    case LabelLevel::kOrgan: return kNumOrgans;
  }
  return 0;
}

std::string_view class_name(LabelLevel level, std::size_t label) {
  switch (level) {
    case LabelLevel::kModality: return to_string(static_cast<Modality>(label));
    case LabelLevel::kBodyRegion: return to_string(static_cast<BodyRegion>(label));
    case LabelLevel::kOrgan: return to_string(static_cast<Organ>(label));
  }
  return "?";
}

EmbeddingVector::EmbeddingVector(std::vector<float> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::kInvalidArgument, "embedding vector must have dim > 0");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::kInvalidArgument, "embedding component " + std::to_string(i) + " is not finite");
    }
  }
}

VolumeRecord make_volume(std::string volume_id, Organ organ, float slice_spacing_mm, std::uint32_t num_slices) {
  return VolumeRecord{std::move(volume_id), organ_to_modality(organ), organ_to_body_region(organ), organ,
                      slice_spacing_mm, num_slices};
}

std::size_t label_of(const VolumeRecord& volume, LabelLevel level) {
  switch (level) {
    case LabelLevel::kModality: return static_cast<std::size_t>(volume.modality);
    case LabelLevel::kBodyRegion: return static_cast<std::size_t>(volume.body_region);
    case LabelLevel::kOrgan: return static_cast<std::size_t>(volume.organ);
  }
  return 0;
}

std::size_t Dataset::dim() const { return embeddings.empty() ? 0 : embeddings.front().vector.dim(); }

const VolumeRecord* Dataset::find_volume(std::string_view volume_id) const {
  for (const auto& v : volumes) {
    if (v.volume_id == volume_id) return &v;
  }
  return nullptr;
}

bool operator==(const Dataset& a, const Dataset& b) {
  if (a.volumes != b.volumes || a.embeddings.size() != b.embeddings.size()) return false;
  auto sorted = [](const Dataset& ds) {
    std::vector<const SliceEmbedding*> out;
    out.reserve(ds.embeddings.size());
    for (const auto& e : ds.embeddings) out.push_back(&e);
    std::sort(out.begin(), out.end(), [](auto* x, auto* y) { return x->ref < y->ref; });
    return out;
  };
  const auto sa = sorted(a);
  const auto sb = sorted(b);
  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (!(*sa[i] == *sb[i])) return false;
  }
  return true;
}

std::string_view to_string(ViolationRule rule) {
  switch (rule) {
    case ViolationRule::kEmptyVolumeId: return "empty-volume-id";
    case ViolationRule::kDuplicateVolume: return "duplicate-volume";
    case ViolationRule::kZeroSlices: return "zero-slices";
    case ViolationRule::kBadSpacing: return "bad-spacing";
    case ViolationRule::kTaxonomyBodyRegion: return "taxonomy-body-region";
    case ViolationRule::kTaxonomyModality: return "taxonomy-modality";
    case ViolationRule::kUnknownVolume: return "unknown-volume";
    case ViolationRule::kSliceOutOfRange: return "slice-out-of-range";
    case ViolationRule::kDuplicateEmbedding: return "duplicate-embedding";
    case ViolationRule::kMissingEmbedding: return "missing-embedding";
    case ViolationRule::kDimensionMismatch: return "dimension-mismatch";
  }
  return "?";
}

std::vector<Violation> validate_dataset(const Dataset& ds) {
  std::vector<Violation> out;
  auto report = [&out](ViolationRule rule, const std::string& volume_id, std::optional<std::uint32_t> slice,
                       std::string message) { out.push_back({rule, volume_id, slice, std::move(message)}); };

  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < ds.volumes.size(); ++i) {
    const auto& v = ds.volumes[i];
    if (v.volume_id.empty()) report(ViolationRule::kEmptyVolumeId, v.volume_id, std::nullopt, "volume id is empty");
    if (!position.emplace(v.volume_id, i).second) {
      report(ViolationRule::kDuplicateVolume, v.volume_id, std::nullopt, "volume id appears more than once");
    }
    if (v.num_slices == 0) report(ViolationRule::kZeroSlices, v.volume_id, std::nullopt, "volume has no slices");
    if (!(v.slice_spacing_mm > 0.0F) || !std::isfinite(v.slice_spacing_mm)) {
      report(ViolationRule::kBadSpacing, v.volume_id, std::nullopt, "slice spacing must be a positive real");
    }
    if (static_cast<std::size_t>(v.organ) >= kNumOrgans) {
      report(ViolationRule::kTaxonomyBodyRegion, v.volume_id, std::nullopt, "organ code out of range");
      continue;
    }
    const auto& row = taxonomy_row(v.organ);
    if (row.body_region != v.body_region) {
      report(ViolationRule::kTaxonomyBodyRegion, v.volume_id, std::nullopt,
             std::string(to_string(v.organ)) + " belongs to " + std::string(to_string(row.body_region)) +
                 ", not " + std::string(to_string(v.body_region)));
    }
    if (row.modality != v.modality) {
      report(ViolationRule::kTaxonomyModality, v.volume_id, std::nullopt,
             std::string(to_string(v.organ)) + " is imaged with " + std::string(to_string(row.modality)) +
                 ", not " + std::string(to_string(v.modality)));
    }
  }

  // Per volume, how often each slice index is covered.
  std::vector<std::vector<std::uint32_t>> coverage(ds.volumes.size());
  for (std::size_t i = 0; i < ds.volumes.size(); ++i) coverage[i].assign(ds.volumes[i].num_slices, 0);

  const std::size_t dim = ds.dim();
  for (const auto& e : ds.embeddings) {
    const auto& ref = e.ref;
    if (e.vector.dim() != dim) {
      report(ViolationRule::kDimensionMismatch, ref.volume_id, ref.slice_index,
             "embedding dim " + std::to_string(e.vector.dim()) + " differs from dataset dim " + std::to_string(dim));
    }
    const auto it = position.find(ref.volume_id);
    if (it == position.end()) {
      report(ViolationRule::kUnknownVolume, ref.volume_id, ref.slice_index, "embedding references unknown volume");
      continue;
    }
    auto& slots = coverage[it->second];
    if (ref.slice_index >= slots.size()) {
      report(ViolationRule::kSliceOutOfRange, ref.volume_id, ref.slice_index,
             "slice index beyond num_slices " + std::to_string(slots.size()));
      continue;
    }
    if (++slots[ref.slice_index] == 2) {
      report(ViolationRule::kDuplicateEmbedding, ref.volume_id, ref.slice_index, "slice has more than one embedding");
    }
  }

  for (std::size_t i = 0; i < ds.volumes.size(); ++i) {
    // A duplicated id shares coverage with its first occurrence.
    if (position.at(ds.volumes[i].volume_id) != i) continue;
    for (std::uint32_t s = 0; s < coverage[i].size(); ++s) {
      if (coverage[i][s] == 0) {
        report(ViolationRule::kMissingEmbedding, ds.volumes[i].volume_id, s, "slice has no embedding");
      }
    }
  }
  return out;
}

void require_valid(const Dataset& ds) {
  const auto violations = validate_dataset(ds);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "dataset has " << violations.size() << " violation(s); first: [" << to_string(violations.front().rule)
      << "] volume '" << violations.front().volume_id << "'";
  if (violations.front().slice_index) msg << " slice " << *violations.front().slice_index;
  msg << ": " << violations.front().message;
  throw Error(ErrorCode::kInvalidDataset, msg.str());
}

VolumeCatalog::VolumeCatalog(std::span<const VolumeRecord> volumes) : volumes_(volumes.begin(), volumes.end()) {
  for (std::size_t i = 0; i < volumes_.size(); ++i) index_.emplace(volumes_[i].volume_id, i);
}

const VolumeRecord* VolumeCatalog::find(std::string_view volume_id) const {
  const auto it = index_.find(std::string(volume_id));
  return it == index_.end() ? nullptr : &volumes_[it->second];
}

const VolumeRecord& VolumeCatalog::at(std::string_view volume_id) const {
  const auto* v = find(volume_id);
  if (!v) throw Error(ErrorCode::kNotFound, "unknown volume id '" + std::string(volume_id) + "'");
  return *v;
}

}  // namespace volsearch
