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

#include "volsearch/exact_index.hpp"

#include <algorithm>
#include <queue>
#include <string>
#include <thread>

#include "binary_io.hpp"
#include "volsearch/error.hpp"

namespace volsearch {

namespace {

constexpr char kExactMagic[4] = {'E', 'X', 'A', '1'};
constexpr std::uint32_t kExactVersion = 1;

// Bounded max-heap scan over rows [begin, end).
std::vector<Candidate> scan_top_k(const SliceStore& store, Metric metric, std::span<const float> query,
                                  std::size_t k, std::size_t begin, std::size_t end) {
  std::priority_queue<Candidate> heap;
  for (std::size_t r = begin; r < end; ++r) {
    const auto row = store.row(r);
    if (metric == Metric::kCosine && squared_norm(row) == 0.0) {
      throw Error(ErrorCode::kZeroVector, "stored slice " + store.ref(r).volume_id + ":" +
                                              std::to_string(store.ref(r).slice_index) +
                                              " is a zero vector; cosine distance is undefined");
    }
    const Candidate c{distance_unchecked(metric, query, row), r};
    if (heap.size() < k) {
      heap.push(c);
    } else if (c < heap.top()) {
      heap.pop();
      heap.push(c);
    }
  }
  std::vector<Candidate> out;
  out.reserve(heap.size());
  while (!heap.empty()) {
    out.push_back(heap.top());
    heap.pop();
  }
  return out;
}

}  // namespace

std::vector<SearchHit> exact_search(const SliceStore& store, Metric metric, std::span<const float> query,
                                    std::size_t k, std::size_t num_threads) {
  if (store.empty() || k == 0) return {};
  check_query_dim(store.dim(), query.size());
  if (metric == Metric::kCosine && squared_norm(query) == 0.0) {
    throw Error(ErrorCode::kZeroVector, "cosine distance is undefined for a zero query vector");
  }

  const std::size_t n = store.size();
  const std::size_t workers = std::clamp<std::size_t>(num_threads, 1, n);
  std::vector<Candidate> merged;
  if (workers == 1) {
    merged = scan_top_k(store, metric, query, k, 0, n);
  } else {
    std::vector<std::vector<Candidate>> parts(workers);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          parts[w] = scan_top_k(store, metric, query, k, n * w / workers, n * (w + 1) / workers);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (auto& p : parts) merged.insert(merged.end(), p.begin(), p.end());
  }

  std::sort(merged.begin(), merged.end());
  if (merged.size() > k) merged.resize(k);

  std::vector<SearchHit> hits;
  hits.reserve(merged.size());
  for (const auto& c : merged) hits.push_back({store.ref(c.row), c.distance, c.row});
  return hits;
}

ExactIndex::ExactIndex(std::shared_ptr<const SliceStore> store, Metric metric, std::size_t num_threads)
    : store_(std::move(store)), metric_(metric), num_threads_(num_threads) {
  if (!store_) throw Error(ErrorCode::kInvalidArgument, "exact index needs a dataset");
}

std::vector<SearchHit> ExactIndex::search(std::span<const float> query, std::size_t k) const {
  return exact_search(*store_, metric_, query, k, num_threads_);
}

void ExactIndex::save(const std::filesystem::path& path) const {
  detail::ByteWriter w;
  w.raw(std::string_view(kExactMagic, 4));
  w.u32(kExactVersion);
  w.u8(static_cast<std::uint8_t>(metric_));
  w.u32(static_cast<std::uint32_t>(store_->dim()));
  w.u64(store_->size());
  detail::write_file(path, w.bytes());
}

ExactIndex ExactIndex::load(const std::filesystem::path& path, std::shared_ptr<const SliceStore> store) {
  const auto bytes = detail::read_file(path);
  detail::ByteReader r(bytes, "EXA1");
  if (bytes.size() < 4 || r.raw(4) != std::string_view(kExactMagic, 4)) {
    throw Error(ErrorCode::kBadMagic, path.string() + ": not an EXA1 index file");
  }
  if (r.u32() != kExactVersion) throw Error(ErrorCode::kBadVersion, path.string() + ": unsupported EXA1 version");
  const std::uint8_t metric = r.u8();
  if (metric > static_cast<std::uint8_t>(Metric::kCosine)) {
    throw Error(ErrorCode::kCorrupt, path.string() + ": unknown metric code");
  }
  const std::uint32_t dim = r.u32();
  const std::uint64_t records = r.u64();
  if (dim != store->dim() || records != store->size()) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": index was built for a different dataset");
  }
  return ExactIndex(std::move(store), static_cast<Metric>(metric));
}

}  // namespace volsearch
