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

#include "volsearch/lsh_index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "binary_io.hpp"
#include "volsearch/error.hpp"
#include "volsearch/random.hpp"

namespace volsearch {

namespace {

constexpr char kLshMagic[4] = {'L', 'S', 'H', '1'};
constexpr std::uint32_t kLshVersion = 1;

void normalize(std::span<float> v) {
  const double norm = std::sqrt(squared_norm(v));
  if (norm == 0.0) throw Error(ErrorCode::kInvalidArgument, "hyperplane normal must be non-zero");
  for (auto& x : v) x = static_cast<float>(x / norm);
}

}  // namespace

std::string Signature::to_string() const {
  std::string out(num_bits_, '0');
  for (std::size_t i = 0; i < num_bits_; ++i) {
    if (bit(i)) out[i] = '1';
  }
  return out;
}

std::size_t hamming_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += static_cast<std::size_t>(std::popcount(a[i] ^ b[i]));
  return d;
}

LshIndex::LshIndex(std::shared_ptr<const SliceStore> store, LshParams params, std::vector<float> planes)
    : store_(std::move(store)), params_(params), words_((params.num_bits + 63) / 64), planes_(std::move(planes)) {
  codes_.assign(store_->size() * words_, 0);
  for (std::size_t r = 0; r < store_->size(); ++r) {
    encode_into(store_->row(r), {codes_.data() + r * words_, words_});
  }
}

LshIndex LshIndex::build(std::shared_ptr<const SliceStore> store, const LshParams& params) {
  if (!store || store->empty()) throw Error(ErrorCode::kEmptyDataset, "cannot build an LSH index over no records");
  if (params.num_bits == 0) throw Error(ErrorCode::kInvalidArgument, "LSH needs at least one bit");

  const std::size_t dim = store->dim();
  Rng rng(params.seed);
  std::vector<float> planes(params.num_bits * dim);
  for (std::size_t i = 0; i < params.num_bits; ++i) {
    std::span<float> plane(planes.data() + i * dim, dim);
    do {
      for (auto& x : plane) x = static_cast<float>(rng.normal());
    } while (squared_norm(plane) == 0.0);
    normalize(plane);
  }
  return LshIndex(std::move(store), params, std::move(planes));
}

LshIndex LshIndex::with_hyperplanes(std::shared_ptr<const SliceStore> store, LshParams params,
                                    const std::vector<std::vector<float>>& normals) {
  if (!store || store->empty()) throw Error(ErrorCode::kEmptyDataset, "cannot build an LSH index over no records");
  if (normals.empty()) throw Error(ErrorCode::kInvalidArgument, "LSH needs at least one bit");
  const std::size_t dim = store->dim();
  std::vector<float> planes;
  planes.reserve(normals.size() * dim);
  for (const auto& n : normals) {
    check_query_dim(dim, n.size());
    planes.insert(planes.end(), n.begin(), n.end());
    normalize({planes.data() + planes.size() - dim, dim});
  }
  params.num_bits = normals.size();
  return LshIndex(std::move(store), params, std::move(planes));
}

void LshIndex::encode_into(std::span<const float> v, std::span<std::uint64_t> out) const {
  std::fill(out.begin(), out.end(), 0);
  for (std::size_t i = 0; i < params_.num_bits; ++i) {
    if (dot(hyperplane(i), v) > 0.0) out[i / 64] |= std::uint64_t{1} << (i % 64);
  }
}

Signature LshIndex::encode(std::span<const float> v) const {
  check_query_dim(dim(), v.size());
  Signature sig(params_.num_bits);
  for (std::size_t i = 0; i < params_.num_bits; ++i) {
    if (dot(hyperplane(i), v) > 0.0) sig.set(i);
  }
  return sig;
}

Signature LshIndex::signature(std::size_t row) const {
  Signature sig(params_.num_bits);
  const auto words = row_words(row);
  for (std::size_t i = 0; i < params_.num_bits; ++i) {
    if ((words[i / 64] >> (i % 64)) & 1U) sig.set(i);
  }
  return sig;
}

std::vector<SearchHit> LshIndex::search(std::span<const float> query, std::size_t k) const {
  check_query_dim(dim(), query.size());
  if (k == 0) return {};
  std::vector<std::uint64_t> code(words_);
  encode_into(query, code);

  const std::size_t n = size();
  std::vector<Candidate> ranked(n);
  for (std::size_t r = 0; r < n; ++r) {
    ranked[r] = {static_cast<double>(hamming_distance(code, row_words(r))), r};
  }

  const std::size_t depth = std::min(n, params_.rerank_depth > 0 ? std::max(k, params_.rerank_depth) : k);
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(depth), ranked.end());
  ranked.resize(depth);

  if (params_.rerank_depth > 0) {
    if (params_.metric == Metric::kCosine && squared_norm(query) == 0.0) {
      throw Error(ErrorCode::kZeroVector, "cosine re-ranking is undefined for a zero query vector");
    }
    for (auto& c : ranked) {
      const auto row = store_->row(c.row);
      if (params_.metric == Metric::kCosine && squared_norm(row) == 0.0) {
        throw Error(ErrorCode::kZeroVector, "cosine re-ranking hit a zero stored vector");
      }
      c.distance = distance_unchecked(params_.metric, query, row);
    }
    std::sort(ranked.begin(), ranked.end());
    if (ranked.size() > k) ranked.resize(k);
  }

  std::vector<SearchHit> hits;
  hits.reserve(ranked.size());
  for (const auto& c : ranked) hits.push_back({store_->ref(c.row), c.distance, c.row});
  return hits;
}

bool LshIndex::operator==(const LshIndex& other) const {
  return params_.num_bits == other.params_.num_bits && params_.seed == other.params_.seed &&
         params_.rerank_depth == other.params_.rerank_depth && params_.metric == other.params_.metric &&
         planes_ == other.planes_ && codes_ == other.codes_;
}

void LshIndex::save(const std::filesystem::path& path) const {
  detail::ByteWriter w;
  w.raw(std::string_view(kLshMagic, 4));
  w.u32(kLshVersion);
  w.u32(static_cast<std::uint32_t>(dim()));
  w.u32(static_cast<std::uint32_t>(params_.num_bits));
  w.u64(params_.seed);
  w.u64(params_.rerank_depth);
  w.u8(static_cast<std::uint8_t>(params_.metric));
  w.u64(size());
  for (float x : planes_) w.f32(x);
  for (std::uint64_t word : codes_) w.u64(word);
  detail::write_file(path, w.bytes());
}

LshIndex LshIndex::load(const std::filesystem::path& path, std::shared_ptr<const SliceStore> store) {
  const auto bytes = detail::read_file(path);
  detail::ByteReader r(bytes, "LSH1");
  if (bytes.size() < 4 || r.raw(4) != std::string_view(kLshMagic, 4)) {
    throw Error(ErrorCode::kBadMagic, path.string() + ": not an LSH1 index file");
  }
  if (r.u32() != kLshVersion) throw Error(ErrorCode::kBadVersion, path.string() + ": unsupported LSH1 version");
  const std::uint32_t dim = r.u32();
  LshParams params;
  params.num_bits = r.u32();
  params.seed = r.u64();
  params.rerank_depth = r.u64();
  const std::uint8_t metric = r.u8();
  if (metric > static_cast<std::uint8_t>(Metric::kCosine)) {
    throw Error(ErrorCode::kCorrupt, path.string() + ": unknown metric code");
  }
  params.metric = static_cast<Metric>(metric);
  const std::uint64_t records = r.u64();
  if (!store || dim != store->dim() || records != store->size()) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": index was built for a different dataset");
  }
  if (params.num_bits == 0) throw Error(ErrorCode::kCorrupt, path.string() + ": zero-bit LSH index");
  r.need(std::size_t{params.num_bits} * dim * 4);
  std::vector<float> planes(std::size_t{params.num_bits} * dim);
  for (auto& x : planes) x = r.f32();
  const std::size_t words = (params.num_bits + 63) / 64;
  r.need(records * words * 8);
  std::vector<std::uint64_t> codes(records * words);
  for (auto& word : codes) word = r.u64();
  if (r.remaining() != 0) throw Error(ErrorCode::kCorrupt, path.string() + ": trailing bytes in LSH1 file");

  LshIndex index(std::move(store), params, std::move(planes));
  if (index.codes_ != codes) {
    throw Error(ErrorCode::kCorrupt, path.string() + ": stored signatures do not match the dataset");
  }
  return index;
}

}  // namespace volsearch
