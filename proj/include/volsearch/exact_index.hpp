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

#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "volsearch/search_index.hpp"
#include "volsearch/slice_store.hpp"

namespace volsearch {

/// Brute-force scan. With num_threads > 1 the rows are split into
/// contiguous chunks whose partial results merge to exactly the
/// single-threaded answer. An empty store yields no hits.
std::vector<SearchHit> exact_search(const SliceStore& store, Metric metric, std::span<const float> query,
                                    std::size_t k, std::size_t num_threads = 1);

class ExactIndex final : public SearchIndex {
 public:
  explicit ExactIndex(std::shared_ptr<const SliceStore> store, Metric metric = Metric::kL2,
                      std::size_t num_threads = 1);

  IndexKind kind() const override { return IndexKind::kExact; }
  std::size_t dim() const override { return store_->dim(); }
  std::size_t size() const override { return store_->size(); }
  std::vector<SearchHit> search(std::span<const float> query, std::size_t k) const override;

  Metric metric() const { return metric_; }

  /// EXA1 file: the metric plus the shape of the referenced dataset.
  void save(const std::filesystem::path& path) const;
  static ExactIndex load(const std::filesystem::path& path, std::shared_ptr<const SliceStore> store);

 private:
  std::shared_ptr<const SliceStore> store_;
  Metric metric_;
  std::size_t num_threads_;
};

}  // namespace volsearch
