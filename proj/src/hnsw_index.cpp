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

#include "volsearch/hnsw_index.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <queue>

#include "binary_io.hpp"
#include "volsearch/error.hpp"

namespace volsearch {

namespace {

constexpr char kHnswMagic[4] = {'H', 'N', 'S', '1'};
constexpr std::uint32_t kHnswVersion = 1;

std::string ref_key(const SliceRef& ref) { return ref.volume_id + '\0' + std::to_string(ref.slice_index); }

std::string ref_text(const SliceRef& ref) { return ref.volume_id + ":" + std::to_string(ref.slice_index); }

void validate(const HnswParams& p) {
  if (p.M == 0) throw Error(ErrorCode::kInvalidArgument, "HNSW M must be positive");
  if (p.M0 < p.M) throw Error(ErrorCode::kInvalidArgument, "HNSW M0 must be at least M");
  if (p.ef_construction == 0 || p.ef_search == 0) {
    throw Error(ErrorCode::kInvalidArgument, "HNSW ef parameters must be positive");
  }
  if (!(p.level_scale > 0.0) || !std::isfinite(p.level_scale)) {
    throw Error(ErrorCode::kInvalidArgument, "HNSW level_scale must be a positive real");
  }
}

}  // namespace

HnswParams HnswParams::with_m(std::size_t m) {
  if (m < 2) throw Error(ErrorCode::kInvalidArgument, "HNSW M must be at least 2 to derive level_scale");
  HnswParams p;
  p.M = m;
  p.M0 = 2 * m;
  p.level_scale = 1.0 / std::log(static_cast<double>(m));
  return p;
}

HnswIndex::HnswIndex(std::size_t dim, const HnswParams& params) : dim_(dim), params_(params), rng_(params.seed) {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "HNSW dimension must be positive");
  validate(params_);
}

HnswIndex HnswIndex::build(const SliceStore& store, const HnswParams& params) {
  if (store.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot build an HNSW index over no records");
  HnswIndex index(store.dim(), params);
  index.data_.reserve(store.size() * store.dim());
  for (std::size_t r = 0; r < store.size(); ++r) index.insert(store.ref(r), store.row(r));
  return index;
}

int HnswIndex::draw_level() {
  return static_cast<int>(std::floor(-std::log(rng_.uniform_open01()) * params_.level_scale));
}

void HnswIndex::insert(const SliceRef& ref, std::span<const float> v) {
  check_query_dim(dim_, v.size());
  if (params_.metric == Metric::kCosine && squared_norm(v) == 0.0) {
    throw Error(ErrorCode::kZeroVector, "cannot index zero vector " + ref_text(ref) + " under cosine");
  }
  if (!ref_keys_.insert(ref_key(ref)).second) {
    throw Error(ErrorCode::kDuplicateRef, "slice " + ref_text(ref) + " is already in the graph");
  }
  const std::size_t node = refs_.size();
  data_.insert(data_.end(), v.begin(), v.end());
  refs_.push_back(ref);
  rows_.push_back(node);
  const int node_level = draw_level();
  links_.emplace_back(static_cast<std::size_t>(node_level) + 1);
  insert_node(node, node_level);
}

void HnswIndex::insert_node(std::size_t node, int node_level) {
  if (node == 0) {
    entry_ = 0;
    max_level_ = node_level;
    return;
  }
  const auto q = vec(node);
  Candidate ep{dist(q, entry_), entry_};
  for (int l = max_level_; l > node_level; --l) ep = greedy_closest(q, ep, l);

  std::vector<Candidate> entry{ep};
  build_visited_.resize(refs_.size(), 0);
  for (int l = std::min(node_level, max_level_); l >= 0; --l) {
    if (++build_stamp_ == 0) {
      std::fill(build_visited_.begin(), build_visited_.end(), 0);
      build_stamp_ = 1;
    }
    auto found = search_layer(q, entry, params_.ef_construction, l, build_visited_, build_stamp_);
    const std::size_t limit = cap(l);
    const std::size_t take = std::min(limit, found.size());

    auto& mine = links_[node][static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < take; ++i) mine.push_back(static_cast<std::uint32_t>(found[i].row));

    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t other = found[i].row;
      auto& theirs = links_[other][static_cast<std::size_t>(l)];
      theirs.push_back(static_cast<std::uint32_t>(node));
      if (theirs.size() > limit) {
        const auto base = vec(other);
        std::vector<Candidate> ranked;
        ranked.reserve(theirs.size());
        for (std::uint32_t x : theirs) ranked.push_back({dist(base, x), x});
        std::sort(ranked.begin(), ranked.end());
        theirs.clear();
        for (std::size_t j = 0; j < limit; ++j) theirs.push_back(static_cast<std::uint32_t>(ranked[j].row));
      }
    }
    entry = std::move(found);
  }

  if (node_level > max_level_) {
    entry_ = node;
    max_level_ = node_level;
  }
}

Candidate HnswIndex::greedy_closest(std::span<const float> q, Candidate start, int layer) const {
  Candidate cur = start;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::uint32_t n : neighbors(cur.row, layer)) {
      const Candidate c{dist(q, n), n};
      if (c < cur) {
        cur = c;
        moved = true;
      }
    }
  }
  return cur;
}

std::vector<Candidate> HnswIndex::search_layer(std::span<const float> q, const std::vector<Candidate>& entry,
                                               std::size_t ef, int layer, std::vector<std::uint32_t>& visited,
                                               std::uint32_t stamp) const {
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> frontier;
  std::priority_queue<Candidate> best;
  for (const auto& e : entry) {
    if (visited[e.row] == stamp) continue;
    visited[e.row] = stamp;
    frontier.push(e);
    best.push(e);
    if (best.size() > ef) best.pop();
  }

  while (!frontier.empty()) {
    const Candidate c = frontier.top();
    if (best.size() >= ef && best.top() < c) break;
    frontier.pop();
    for (std::uint32_t n : neighbors(c.row, layer)) {
      if (visited[n] == stamp) continue;
      visited[n] = stamp;
      const Candidate cand{dist(q, n), n};
      if (best.size() < ef || cand < best.top()) {
        frontier.push(cand);
        best.push(cand);
        if (best.size() > ef) best.pop();
      }
    }
  }

  std::vector<Candidate> out(best.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = best.top();
    best.pop();
  }
  return out;
}

void HnswIndex::check_query(std::span<const float> q) const {
  if (refs_.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot search an empty HNSW graph");
  check_query_dim(dim_, q.size());
  if (params_.metric == Metric::kCosine && squared_norm(q) == 0.0) {
    throw Error(ErrorCode::kZeroVector, "cosine distance is undefined for a zero query vector");
  }
}

std::vector<SearchHit> HnswIndex::search(std::span<const float> query, std::size_t k) const {
  return search(query, k, params_.ef_search);
}

std::vector<SearchHit> HnswIndex::search(std::span<const float> query, std::size_t k, std::size_t ef_search) const {
  check_query(query);
  if (k == 0) return {};
  Candidate ep{dist(query, entry_), entry_};
  for (int l = max_level_; l > 0; --l) ep = greedy_closest(query, ep, l);

  std::vector<std::uint32_t> visited(refs_.size(), 0);
  auto found = search_layer(query, {ep}, std::max({ef_search, k, std::size_t{1}}), 0, visited, 1);
  if (found.size() > k) found.resize(k);

  std::vector<SearchHit> hits;
  hits.reserve(found.size());
  for (const auto& c : found) hits.push_back({refs_[c.row], c.distance, rows_[c.row]});
  return hits;
}

HnswAudit HnswIndex::audit() const {
  HnswAudit a;
  const std::size_t n = refs_.size();
  auto problem = [&a](std::string msg) {
    if (a.problems.size() < 32) a.problems.push_back(std::move(msg));
  };

  for (std::size_t node = 0; node < n; ++node) {
    if (links_[node].empty()) {
      a.layers_nested = false;
      problem("node " + std::to_string(node) + " has no layer-0 list");
      continue;
    }
    if (level(node) > max_level_) {
      a.layers_nested = false;
      problem("node " + std::to_string(node) + " is above the entry point level");
    }
    for (int l = 0; l <= level(node); ++l) {
      const auto list = neighbors(node, l);
      if (list.size() > cap(l)) {
        a.degree_caps_hold = false;
        problem("node " + std::to_string(node) + " layer " + std::to_string(l) + " has " +
                std::to_string(list.size()) + " neighbors");
      }
      std::vector<std::uint32_t> sorted(list.begin(), list.end());
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        a.references_valid = false;
        problem("node " + std::to_string(node) + " layer " + std::to_string(l) + " repeats a neighbor");
      }
      for (std::uint32_t x : list) {
        // A link at layer l must point to a node that exists at layer l.
        if (x >= n || x == node || level(x) < l) {
          a.references_valid = false;
          problem("node " + std::to_string(node) + " layer " + std::to_string(l) + " links to invalid node " +
                  std::to_string(x));
        }
      }
    }
  }
  if (n > 0 && (entry_ >= n || level(entry_) != max_level_)) {
    a.layers_nested = false;
    problem("entry point is not a node of maximum level");
  }

  if (n > 0 && a.references_valid) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> queue{entry_};
    seen[entry_] = 1;
    std::size_t reached = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (std::uint32_t x : neighbors(queue[head], 0)) {
        if (!seen[x]) {
          seen[x] = 1;
          ++reached;
          queue.push_back(x);
        }
      }
    }
    a.unreachable_nodes = n - reached;
    if (a.unreachable_nodes > 0) {
      problem(std::to_string(a.unreachable_nodes) + " node(s) unreachable from the entry point at layer 0");
    }
  }
  return a;
}

bool HnswIndex::same_graph(const HnswIndex& other) const {
  const auto& p = params_;
  const auto& o = other.params_;
  return dim_ == other.dim_ && p.M == o.M && p.M0 == o.M0 && p.ef_construction == o.ef_construction &&
         p.ef_search == o.ef_search && p.level_scale == o.level_scale && p.seed == o.seed && p.metric == o.metric &&
         refs_ == other.refs_ && links_ == other.links_ && entry_ == other.entry_ &&
         max_level_ == other.max_level_ && data_ == other.data_;
}

void HnswIndex::save(const std::filesystem::path& path) const {
  detail::ByteWriter w;
  w.raw(std::string_view(kHnswMagic, 4));
  w.u32(kHnswVersion);
  w.u32(static_cast<std::uint32_t>(dim_));
  w.u8(static_cast<std::uint8_t>(params_.metric));
  w.u32(static_cast<std::uint32_t>(params_.M));
  w.u32(static_cast<std::uint32_t>(params_.M0));
  w.u32(static_cast<std::uint32_t>(params_.ef_construction));
  w.u32(static_cast<std::uint32_t>(params_.ef_search));
  w.u64(std::bit_cast<std::uint64_t>(params_.level_scale));
  w.u64(params_.seed);
  w.u64(refs_.size());
  w.u64(entry_);
  w.u32(static_cast<std::uint32_t>(std::max(max_level_, 0)));
  for (std::size_t node = 0; node < refs_.size(); ++node) {
    w.u16(static_cast<std::uint16_t>(refs_[node].volume_id.size()));
    w.raw(refs_[node].volume_id);
    w.u32(refs_[node].slice_index);
    w.u32(static_cast<std::uint32_t>(level(node)));
    for (const auto& list : links_[node]) {
      w.u32(static_cast<std::uint32_t>(list.size()));
      for (std::uint32_t x : list) w.u32(x);
    }
  }
  detail::write_file(path, w.bytes());
}

HnswIndex HnswIndex::load(const std::filesystem::path& path, const SliceStore& store) {
  const auto bytes = detail::read_file(path);
  detail::ByteReader r(bytes, "HNS1");
  if (bytes.size() < 4 || r.raw(4) != std::string_view(kHnswMagic, 4)) {
    throw Error(ErrorCode::kBadMagic, path.string() + ": not an HNS1 index file");
  }
  if (r.u32() != kHnswVersion) throw Error(ErrorCode::kBadVersion, path.string() + ": unsupported HNS1 version");
  const std::uint32_t dim = r.u32();
  HnswParams params;
  const std::uint8_t metric = r.u8();
  if (metric > static_cast<std::uint8_t>(Metric::kCosine)) {
    throw Error(ErrorCode::kCorrupt, path.string() + ": unknown metric code");
  }
  params.metric = static_cast<Metric>(metric);
  params.M = r.u32();
  params.M0 = r.u32();
  params.ef_construction = r.u32();
  params.ef_search = r.u32();
  params.level_scale = std::bit_cast<double>(r.u64());
  params.seed = r.u64();
  const std::uint64_t n = r.u64();
  const std::uint64_t entry = r.u64();
  const std::uint32_t max_level = r.u32();
  if (dim != store.dim()) throw Error(ErrorCode::kInvalidArgument, path.string() + ": index dim differs from dataset");

  HnswIndex index(dim, params);
  index.data_.reserve(n * dim);
  for (std::uint64_t node = 0; node < n; ++node) {
    SliceRef ref;
    ref.volume_id = r.raw(r.u16());
    ref.slice_index = r.u32();
    const auto row = store.find_row(ref);
    if (!row) throw Error(ErrorCode::kNotFound, path.string() + ": slice " + ref_text(ref) + " not in dataset");
    if (!index.ref_keys_.insert(ref_key(ref)).second) {
      throw Error(ErrorCode::kCorrupt, path.string() + ": slice " + ref_text(ref) + " stored twice");
    }
    const auto v = store.row(*row);
    index.data_.insert(index.data_.end(), v.begin(), v.end());
    index.refs_.push_back(std::move(ref));
    index.rows_.push_back(*row);
    const std::uint32_t node_level = r.u32();
    if (node_level > max_level) throw Error(ErrorCode::kCorrupt, path.string() + ": node above maximum level");
    auto& layers = index.links_.emplace_back(std::size_t{node_level} + 1);
    for (auto& list : layers) {
      const std::uint32_t count = r.u32();
      r.need(std::size_t{count} * 4);
      list.resize(count);
      for (auto& x : list) {
        x = r.u32();
        if (x >= n) throw Error(ErrorCode::kCorrupt, path.string() + ": neighbor id out of range");
      }
    }
    index.draw_level();  // keep the level generator in step for later inserts
  }
  if (r.remaining() != 0) throw Error(ErrorCode::kCorrupt, path.string() + ": trailing bytes in HNS1 file");
  if (n > 0) {
    if (entry >= n) throw Error(ErrorCode::kCorrupt, path.string() + ": entry point out of range");
    index.entry_ = entry;
    index.max_level_ = static_cast<int>(max_level);
  }
  return index;
}

}  // namespace volsearch
