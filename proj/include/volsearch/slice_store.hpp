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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "volsearch/core.hpp"

namespace volsearch {

/// Contiguous row-major copy of a valid dataset in storage order: volume
/// table order, then ascending slice index. Row positions define the
/// deterministic tie-break used by every index.
class SliceStore {
 public:
  /// Throws Error(kInvalidDataset) when the dataset fails validation.
  explicit SliceStore(const Dataset& ds);

  std::size_t size() const { return refs_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return refs_.empty(); }

  std::span<const float> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  const SliceRef& ref(std::size_t i) const { return refs_[i]; }
  std::size_t volume_of(std::size_t row) const { return row_volume_[row]; }

  const std::vector<VolumeRecord>& volumes() const { return volumes_; }
  const VolumeRecord& volume(std::size_t v) const { return volumes_[v]; }
  std::optional<std::size_t> find_volume(std::string_view volume_id) const;

  /// Rows of volume v, one per slice in ascending slice order.
  std::size_t volume_first_row(std::size_t v) const { return volume_offsets_[v]; }
  std::span<const float> slice(std::size_t v, std::uint32_t slice_index) const {
    return row(volume_offsets_[v] + slice_index);
  }

  std::optional<std::size_t> find_row(const SliceRef& ref) const;

  /// Rebuilds the dataset in storage order.
  Dataset to_dataset() const;

 private:
  std::size_t dim_ = 0;
  std::vector<VolumeRecord> volumes_;
  std::vector<std::size_t> volume_offsets_;
  std::unordered_map<std::string, std::size_t> volume_index_;
  std::vector<SliceRef> refs_;
  std::vector<std::uint32_t> row_volume_;
  std::vector<float> data_;
};

}  // namespace volsearch
