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

#include "volsearch/search_index.hpp"

#include <string>

#include "volsearch/error.hpp"

namespace volsearch {

std::string_view to_string(IndexKind kind) {
  switch (kind) {
    case IndexKind::kExact: return "exact";
    case IndexKind::kLsh: return "lsh";
    case IndexKind::kHnsw: return "hnsw";
  }
  return "?";
}

std::optional<IndexKind> parse_index_kind(std::string_view name) {
  if (name == "exact") return IndexKind::kExact;
  if (name == "lsh") return IndexKind::kLsh;
  if (name == "hnsw") return IndexKind::kHnsw;
  return std::nullopt;
}

void check_query_dim(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw Error(ErrorCode::kDimensionMismatch,
                "query has dim " + std::to_string(got) + ", index expects " + std::to_string(expected));
  }
}

}  // namespace volsearch
