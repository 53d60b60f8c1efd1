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
#include <string_view>
#include <vector>

#include "volsearch/core.hpp"
#include "volsearch/distance.hpp"

namespace volsearch {

struct SearchHit {
  SliceRef ref;
  double distance = 0.0;
  /// Storage position of the hit in the indexed dataset.
  std::size_t row = 0;

  bool operator==(const SearchHit&) const = default;
};

enum class IndexKind : std::uint8_t { kExact, kLsh, kHnsw };

std::string_view to_string(IndexKind kind);
std::optional<IndexKind> parse_index_kind(std::string_view name);

/// Read-only k-nearest-neighbor interface. Implementations are immutable
/// once built, so search() may be called concurrently.
class SearchIndex {
 public:
  virtual ~SearchIndex() = default;

  virtual IndexKind kind() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::size_t size() const = 0;

  /// Up to k hits, ascending distance, ties broken by storage row.
  /// Throws kDimensionMismatch when the query has the wrong length.
  virtual std::vector<SearchHit> search(std::span<const float> query, std::size_t k) const = 0;
};

/// (distance, row) pair; the lexicographic order is the ranking order of
/// every index.
struct Candidate {
  double distance;
  std::size_t row;

  auto operator<=>(const Candidate&) const = default;
};

void check_query_dim(std::size_t expected, std::size_t got);

}  // namespace volsearch
