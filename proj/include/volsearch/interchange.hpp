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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "volsearch/core.hpp"

namespace volsearch {

/// EMBV v1, all integers little-endian:
///
///   "EMBV" | version u32 | dim u32 | n_volumes u32 | n_records u64
///   per volume: id_len u16 | id bytes | modality u8 | body_region u8 |
///               organ u8 | spacing f32 | num_slices u32
///   per record (volume table order, ascending slice): dim x f32
inline constexpr char kEmbvMagic[4] = {'E', 'M', 'B', 'V'};
inline constexpr std::uint32_t kEmbvVersion = 1;
inline constexpr std::size_t kEmbvHeaderBytes = 24;

/// Refuses (Error kInvalidDataset) datasets that fail validation.
std::vector<std::uint8_t> encode_dataset(const Dataset& ds);

/// Errors: kBadMagic, kBadVersion, kTruncated, kRecordCountMismatch, and
/// kCorrupt for bad enum codes, non-finite values or trailing bytes.
Dataset decode_dataset(std::span<const std::uint8_t> bytes);

/// Returns the number of bytes written.
std::uint64_t write_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace volsearch
