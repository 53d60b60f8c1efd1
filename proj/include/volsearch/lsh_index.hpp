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
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "volsearch/search_index.hpp"
#include "volsearch/slice_store.hpp"

namespace volsearch {

struct LshParams {
  std::size_t num_bits = 1024;
  std::uint64_t seed = 0;
  /// 0 ranks purely by Hamming distance; R > 0 re-ranks the best max(k, R)
  /// Hamming candidates by exact distance.
  std::size_t rerank_depth = 0;
  Metric metric = Metric::kL2;
};

/// num_bits-long bit string, packed little-endian into 64-bit words.
class Signature {
 public:
  explicit Signature(std::size_t num_bits) : num_bits_(num_bits), words_((num_bits + 63) / 64, 0) {}

  std::size_t size() const { return num_bits_; }
  bool bit(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  std::span<const std::uint64_t> words() const { return words_; }

  /// "1011...", bit 0 first.
  std::string to_string() const;

  bool operator==(const Signature&) const = default;

 private:
  std::size_t num_bits_;
  std::vector<std::uint64_t> words_;
};

std::size_t hamming_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

/// Random-hyperplane LSH: bit i of a signature is 1 iff the i-th unit
/// hyperplane normal has a strictly positive dot product with the vector.
class LshIndex final : public SearchIndex {
 public:
  /// Hyperplanes are i.i.d. isotropic Gaussian draws, normalized, from a
  /// generator seeded with params.seed. Throws kEmptyDataset.
  static LshIndex build(std::shared_ptr<const SliceStore> store, const LshParams& params);

  /// Uses the given hyperplane normals (normalized here) instead of random
  /// draws; params.num_bits is taken from their count.
  static LshIndex with_hyperplanes(std::shared_ptr<const SliceStore> store, LshParams params,
                                   const std::vector<std::vector<float>>& normals);

  IndexKind kind() const override { return IndexKind::kLsh; }
  std::size_t dim() const override { return store_->dim(); }
  std::size_t size() const override { return store_->size(); }
  std::vector<SearchHit> search(std::span<const float> query, std::size_t k) const override;

  const LshParams& params() const { return params_; }
  std::size_t num_bits() const { return params_.num_bits; }
  std::span<const float> hyperplane(std::size_t i) const { return {planes_.data() + i * dim(), dim()}; }

  /// Throws kDimensionMismatch.
  Signature encode(std::span<const float> v) const;
  Signature signature(std::size_t row) const;

  /// Same params, hyperplanes and signatures.
  bool operator==(const LshIndex& other) const;

  /// LSH1 file; the dataset itself is not stored and must be supplied on load.
  void save(const std::filesystem::path& path) const;
  static LshIndex load(const std::filesystem::path& path, std::shared_ptr<const SliceStore> store);

 private:
  LshIndex(std::shared_ptr<const SliceStore> store, LshParams params, std::vector<float> planes);

  void encode_into(std::span<const float> v, std::span<std::uint64_t> out) const;
  std::span<const std::uint64_t> row_words(std::size_t row) const {
    return {codes_.data() + row * words_, words_};
  }

  std::shared_ptr<const SliceStore> store_;
  LshParams params_;
  std::size_t words_;
  std::vector<float> planes_;
  std::vector<std::uint64_t> codes_;
};

}  // namespace volsearch
