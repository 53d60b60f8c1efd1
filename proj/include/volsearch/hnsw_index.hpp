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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "volsearch/random.hpp"
#include "volsearch/search_index.hpp"
#include "volsearch/slice_store.hpp"

namespace volsearch {

struct HnswParams {
  std::size_t M = 16;
  std::size_t M0 = 32;
  std::size_t ef_construction = 200;
  std::size_t ef_search = 64;
  double level_scale = 1.0 / std::log(16.0);
  std::uint64_t seed = 0;
  Metric metric = Metric::kL2;

  /// M0 = 2M and level_scale = 1/ln(M); M must be at least 2.
  static HnswParams with_m(std::size_t m);
};

/// Structural check of a graph; reachability problems are reported, not fatal.
struct HnswAudit {
  bool layers_nested = true;
  bool degree_caps_hold = true;
  bool references_valid = true;
  std::size_t unreachable_nodes = 0;
  std::vector<std::string> problems;

  bool structurally_sound() const { return layers_nested && degree_caps_hold && references_valid; }
};

/// Hierarchical navigable small world graph over owned copies of the
/// inserted vectors. Neighbor selection keeps the closest candidates.
/// Inserts are single-writer; a finished graph is safe to search from
/// many threads.
class HnswIndex final : public SearchIndex {
 public:
  HnswIndex(std::size_t dim, const HnswParams& params);

  /// Inserts every row in storage order, so node ids equal store rows.
  static HnswIndex build(const SliceStore& store, const HnswParams& params);

  /// Throws kDuplicateRef and kDimensionMismatch. The node's row is its
  /// insertion ordinal.
  void insert(const SliceRef& ref, std::span<const float> v);

  IndexKind kind() const override { return IndexKind::kHnsw; }
  std::size_t dim() const override { return dim_; }
  std::size_t size() const override { return refs_.size(); }

  /// Uses params().ef_search. Throws kEmptyDataset on an empty graph.
  std::vector<SearchHit> search(std::span<const float> query, std::size_t k) const override;
  std::vector<SearchHit> search(std::span<const float> query, std::size_t k, std::size_t ef_search) const;

  const HnswParams& params() const { return params_; }
  std::size_t entry_point() const { return entry_; }
  int max_level() const { return max_level_; }
  int level(std::size_t node) const { return static_cast<int>(links_[node].size()) - 1; }
  std::span<const std::uint32_t> neighbors(std::size_t node, int layer) const {
    return links_[node][static_cast<std::size_t>(layer)];
  }
  const SliceRef& ref(std::size_t node) const { return refs_[node]; }

  HnswAudit audit() const;

  /// Identical nodes, levels, links, entry point and parameters.
  bool same_graph(const HnswIndex& other) const;

  /// HNS1 file: parameters and graph structure; vectors are re-attached
  /// from the dataset on load by matching slice refs.
  void save(const std::filesystem::path& path) const;
  static HnswIndex load(const std::filesystem::path& path, const SliceStore& store);

 private:
  std::span<const float> vec(std::size_t node) const { return {data_.data() + node * dim_, dim_}; }
  double dist(std::span<const float> q, std::size_t node) const {
    return distance_unchecked(params_.metric, q, vec(node));
  }
  std::size_t cap(int layer) const { return layer == 0 ? params_.M0 : params_.M; }
  int draw_level();
  void insert_node(std::size_t node, int node_level);

  Candidate greedy_closest(std::span<const float> q, Candidate start, int layer) const;
  std::vector<Candidate> search_layer(std::span<const float> q, const std::vector<Candidate>& entry, std::size_t ef,
                                      int layer, std::vector<std::uint32_t>& visited, std::uint32_t stamp) const;
  void check_query(std::span<const float> q) const;

  std::size_t dim_;
  HnswParams params_;
  Rng rng_;
  std::vector<float> data_;
  std::vector<SliceRef> refs_;
  std::vector<std::size_t> rows_;
  std::unordered_set<std::string> ref_keys_;
  // links_[node][layer] = neighbor ids at that layer.
  std::vector<std::vector<std::vector<std::uint32_t>>> links_;
  std::size_t entry_ = 0;
  int max_level_ = -1;
  std::vector<std::uint32_t> build_visited_;
  std::uint32_t build_stamp_ = 0;
};

}  // namespace volsearch
