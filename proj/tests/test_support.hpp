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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <unistd.h>
#include <vector>

#include "volsearch/core.hpp"
#include "volsearch/error.hpp"
#include "volsearch/random.hpp"

/// Expects stmt to throw volsearch::Error with the given code.
#define EXPECT_VS_ERROR(stmt, expected)                                  \
  do {                                                                   \
    try {                                                                \
      stmt;                                                              \
      ADD_FAILURE() << "no error from " #stmt;                           \
    } catch (const ::volsearch::Error& e) {                              \
      EXPECT_EQ(e.code(), expected) << e.what();                         \
    }                                                                    \
  } while (0)

namespace vstest {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("volsearch_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

template <typename T>
void shuffle(std::vector<T>& items, volsearch::Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[rng.below(i)]);
}

/// Valid dataset with random shape and contents; embeddings are shuffled
/// so storage order has to be restored by the code under test. Values
/// include signed zeros and subnormals to catch lossy float handling.
inline volsearch::Dataset random_dataset(std::uint64_t seed, std::size_t max_volumes = 5,
                                         std::uint32_t max_slices = 6, std::size_t max_dim = 8) {
  using namespace volsearch;
  Rng rng(seed);
  Dataset ds;
  const auto num_volumes = static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(max_volumes)));
  const auto dim = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_dim)));
  for (std::size_t v = 0; v < num_volumes; ++v) {
    std::string id = "v" + std::to_string(v) + "_";
    const auto extra = rng.between(0, 10);
    for (std::int64_t i = 0; i < extra; ++i) id.push_back(static_cast<char>('a' + rng.below(26)));
    const auto organ = kTaxonomy[rng.below(kNumOrgans)].organ;
    const auto slices = static_cast<std::uint32_t>(rng.between(1, max_slices));
    ds.volumes.push_back(make_volume(id, organ, static_cast<float>(rng.uniform(0.1, 8.0)), slices));
    for (std::uint32_t s = 0; s < slices; ++s) {
      std::vector<float> values(dim);
      for (auto& x : values) {
        const auto pick = rng.below(20);
        if (pick == 0) {
          x = -0.0F;
        } else if (pick == 1) {
          x = 1.0e-40F;
        } else {
          x = static_cast<float>(rng.normal() * 100.0);
        }
      }
      ds.embeddings.push_back({{id, s}, EmbeddingVector(std::move(values))});
    }
  }
  for (std::size_t i = ds.embeddings.size(); i > 1; --i) std::swap(ds.embeddings[i - 1], ds.embeddings[rng.below(i)]);
  return ds;
}

/// One volume per entry of `organs`, each with `slices` slices whose
/// embeddings are `rows` laid out in order (volume-major).
inline volsearch::Dataset dataset_from_rows(const std::vector<std::pair<std::string, volsearch::Organ>>& volumes,
                                            std::uint32_t slices, const std::vector<std::vector<float>>& rows) {
  using namespace volsearch;
  Dataset ds;
  std::size_t next = 0;
  for (const auto& [id, organ] : volumes) {
    ds.volumes.push_back(make_volume(id, organ, 2.0F, slices));
    for (std::uint32_t s = 0; s < slices; ++s) ds.embeddings.push_back({{id, s}, EmbeddingVector(rows.at(next++))});
  }
  return ds;
}

}  // namespace vstest
