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

#include "volsearch/slice_store.hpp"

#include <algorithm>

#include "volsearch/error.hpp"

namespace volsearch {

SliceStore::SliceStore(const Dataset& ds) : dim_(ds.dim()), volumes_(ds.volumes) {
  require_valid(ds);

  std::size_t total = 0;
  volume_offsets_.reserve(volumes_.size());
  for (std::size_t v = 0; v < volumes_.size(); ++v) {
    volume_index_.emplace(volumes_[v].volume_id, v);
    volume_offsets_.push_back(total);
    total += volumes_[v].num_slices;
  }

  refs_.resize(total);
  row_volume_.resize(total);
  data_.resize(total * dim_);
  for (const auto& e : ds.embeddings) {
    const std::size_t v = volume_index_.at(e.ref.volume_id);
    const std::size_t r = volume_offsets_[v] + e.ref.slice_index;
    refs_[r] = e.ref;
    row_volume_[r] = static_cast<std::uint32_t>(v);
    std::copy(e.vector.values().begin(), e.vector.values().end(), data_.begin() + static_cast<std::ptrdiff_t>(r * dim_));
  }
}

std::optional<std::size_t> SliceStore::find_volume(std::string_view volume_id) const {
  const auto it = volume_index_.find(std::string(volume_id));
  if (it == volume_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> SliceStore::find_row(const SliceRef& ref) const {
  const auto v = find_volume(ref.volume_id);
  if (!v || ref.slice_index >= volumes_[*v].num_slices) return std::nullopt;
  return volume_offsets_[*v] + ref.slice_index;
}

Dataset SliceStore::to_dataset() const {
  Dataset ds;
  ds.volumes = volumes_;
  ds.embeddings.reserve(size());
  for (std::size_t r = 0; r < size(); ++r) {
    const auto values = row(r);
    ds.embeddings.push_back({refs_[r], EmbeddingVector(std::vector<float>(values.begin(), values.end()))});
  }
  return ds;
}

}  // namespace volsearch
