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

#include "volsearch/interchange.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "binary_io.hpp"
#include "volsearch/error.hpp"
#include "volsearch/slice_store.hpp"

namespace volsearch {

namespace detail {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failure on '" + path.string() + "'");
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failure on '" + path.string() + "'");
}

}  // namespace detail

std::vector<std::uint8_t> encode_dataset(const Dataset& ds) {
  const SliceStore store(ds);

  detail::ByteWriter w;
  w.raw(std::string_view(kEmbvMagic, 4));
  w.u32(kEmbvVersion);
  w.u32(static_cast<std::uint32_t>(store.dim()));
  w.u32(static_cast<std::uint32_t>(store.volumes().size()));
  w.u64(store.size());
  for (const auto& v : store.volumes()) {
    if (v.volume_id.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(ErrorCode::kInvalidArgument, "volume id longer than 65535 bytes");
    }
    w.u16(static_cast<std::uint16_t>(v.volume_id.size()));
    w.raw(v.volume_id);
    w.u8(static_cast<std::uint8_t>(v.modality));
    w.u8(static_cast<std::uint8_t>(v.body_region));
    w.u8(static_cast<std::uint8_t>(v.organ));
    w.f32(v.slice_spacing_mm);
    w.u32(v.num_slices);
  }
  for (std::size_t r = 0; r < store.size(); ++r) {
    for (float x : store.row(r)) w.f32(x);
  }
  return w.take();
}

Dataset decode_dataset(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "EMBV");
  if (bytes.size() >= 4 && std::string_view(reinterpret_cast<const char*>(bytes.data()), 4) !=
                               std::string_view(kEmbvMagic, 4)) {
    throw Error(ErrorCode::kBadMagic, "not an EMBV file (bad magic)");
  }
  r.raw(4);
  const std::uint32_t version = r.u32();
  if (version != kEmbvVersion) {
    throw Error(ErrorCode::kBadVersion, "unsupported EMBV version " + std::to_string(version));
  }
  const std::uint32_t dim = r.u32();
  const std::uint32_t n_volumes = r.u32();
  const std::uint64_t n_records = r.u64();

  Dataset ds;
  ds.volumes.reserve(n_volumes);
  std::uint64_t slice_total = 0;
  for (std::uint32_t i = 0; i < n_volumes; ++i) {
    VolumeRecord v;
    const std::uint16_t id_len = r.u16();
    v.volume_id = r.raw(id_len);
    const std::uint8_t modality = r.u8();
    const std::uint8_t region = r.u8();
    const std::uint8_t organ = r.u8();
    if (modality >= kNumModalities || region >= kNumBodyRegions || organ >= kNumOrgans) {
      throw Error(ErrorCode::kCorrupt, "volume '" + v.volume_id + "' has an out-of-range label code");
    }
    v.modality = static_cast<Modality>(modality);
    v.body_region = static_cast<BodyRegion>(region);
    v.organ = static_cast<Organ>(organ);
    v.slice_spacing_mm = r.f32();
    v.num_slices = r.u32();
    slice_total += v.num_slices;
    ds.volumes.push_back(std::move(v));
  }

  if (slice_total != n_records) {
    throw Error(ErrorCode::kRecordCountMismatch, "header declares " + std::to_string(n_records) +
                                                     " records but the volume table sums to " +
                                                     std::to_string(slice_total));
  }
  if (n_records > 0 && dim == 0) throw Error(ErrorCode::kCorrupt, "dim is 0 but records are present");

  const std::uint64_t record_bytes = std::uint64_t{dim} * 4;
  if (record_bytes > 0 && r.remaining() / record_bytes < n_records) {
    throw Error(ErrorCode::kTruncated, "header declares " + std::to_string(n_records) + " records, file holds " +
                                           std::to_string(r.remaining() / record_bytes));
  }

  ds.embeddings.reserve(n_records);
  for (const auto& v : ds.volumes) {
    for (std::uint32_t s = 0; s < v.num_slices; ++s) {
      std::vector<float> values(dim);
      for (auto& x : values) {
        x = r.f32();
        if (!std::isfinite(x)) {
          throw Error(ErrorCode::kCorrupt, "non-finite value in volume '" + v.volume_id + "' slice " +
                                               std::to_string(s));
        }
      }
      ds.embeddings.push_back({SliceRef{v.volume_id, s}, EmbeddingVector(std::move(values))});
    }
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::kCorrupt, std::to_string(r.remaining()) + " trailing bytes after the last record");
  }
  return ds;
}

std::uint64_t write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  const auto bytes = encode_dataset(ds);
  detail::write_file(path, bytes);
  return bytes.size();
}

Dataset read_dataset(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  try {
    return decode_dataset(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace volsearch
