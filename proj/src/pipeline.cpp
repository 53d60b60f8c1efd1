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

#include "volsearch/pipeline.hpp"

#include <charconv>

#include "binary_io.hpp"
#include "volsearch/error.hpp"
#include "volsearch/exact_index.hpp"

namespace volsearch {

std::string IndexSpec::token() const {
  std::string out(to_string(kind));
  switch (kind) {
    case IndexKind::kExact: break;
    case IndexKind::kLsh:
      out += "-b" + std::to_string(lsh.num_bits);
      if (lsh.rerank_depth > 0) out += "-r" + std::to_string(lsh.rerank_depth);
      break;
    case IndexKind::kHnsw:
      out += "-m" + std::to_string(hnsw.M) + "-ef" + std::to_string(hnsw.ef_search);
      break;
  }
  if (metric != Metric::kL2) out += "-" + std::string(to_string(metric));
  return out;
}

std::shared_ptr<const SearchIndex> build_index(std::shared_ptr<const SliceStore> db, const IndexSpec& spec) {
  switch (spec.kind) {
    case IndexKind::kExact: return std::make_shared<ExactIndex>(std::move(db), spec.metric, spec.threads);
    case IndexKind::kLsh: {
      LshParams p = spec.lsh;
      p.metric = spec.metric;
      return std::make_shared<LshIndex>(LshIndex::build(std::move(db), p));
    }
    case IndexKind::kHnsw: {
      HnswParams p = spec.hnsw;
      p.metric = spec.metric;
      return std::make_shared<HnswIndex>(HnswIndex::build(*db, p));
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown index kind");
}

std::shared_ptr<const SearchIndex> load_index(const std::filesystem::path& path, IndexKind kind,
                                              std::shared_ptr<const SliceStore> db) {
  switch (kind) {
    case IndexKind::kExact: return std::make_shared<ExactIndex>(ExactIndex::load(path, std::move(db)));
    case IndexKind::kLsh: return std::make_shared<LshIndex>(LshIndex::load(path, std::move(db)));
    case IndexKind::kHnsw: return std::make_shared<HnswIndex>(HnswIndex::load(path, *db));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown index kind");
}

void save_index(const SearchIndex& index, const std::filesystem::path& path) {
  switch (index.kind()) {
    case IndexKind::kExact: static_cast<const ExactIndex&>(index).save(path); return;
    case IndexKind::kLsh: static_cast<const LshIndex&>(index).save(path); return;
    case IndexKind::kHnsw: static_cast<const HnswIndex&>(index).save(path); return;
  }
}

std::string Variant::token() const {
  if (slicewise) return "slicewise";
  std::string out = sampling.token();
  if (weighting.kind != WeightingPolicy::Kind::kUniform) out += "/" + weighting.token();
  return out;
}

Variant parse_variant(std::string_view sampling, std::string_view weighting) {
  if (sampling == "slicewise") return Variant::slice_wise();
  return Variant{false, parse_sampling_plan(sampling), parse_weighting(weighting)};
}

RetrievalOutput run_retrieval(const SliceStore& queries, const SearchIndex& index, const Variant& variant,
                              std::uint64_t seed, std::size_t num_threads) {
  if (queries.dim() != index.dim() && !queries.empty()) {
    throw Error(ErrorCode::kDimensionMismatch, "query dim " + std::to_string(queries.dim()) +
                                                   " differs from index dim " + std::to_string(index.dim()));
  }
  RetrievalOutput out;
  out.slicewise = variant.slicewise;
  SamplingPlan plan = variant.sampling;
  plan.seed = seed;

  for (std::size_t v = 0; v < queries.volumes().size(); ++v) {
    const auto& record = queries.volume(v);
    if (variant.slicewise) {
      const auto all = sample_all(record.num_slices);
      for (const auto& m : match_slices(queries, v, all, index, num_threads)) {
        out.slices.push_back({record.volume_id, m.query_slice, m.matched.volume_id});
      }
      continue;
    }
    const auto indices = plan.sample(record.num_slices, record.slice_spacing_mm, v);
    const auto matches = match_slices(queries, v, indices, index, num_threads);
    out.volumes.push_back({record.volume_id, aggregate(matches, record.num_slices, variant.weighting).winner});
  }
  return out;
}

std::vector<EvalReport> evaluate_output(const RetrievalOutput& output, const VolumeCatalog& db,
                                        const VolumeCatalog& queries, std::span<const LabelLevel> levels) {
  std::vector<EvalReport> out;
  if (!output.slicewise) {
    for (auto level : levels) out.push_back(evaluate(output.volumes, db, queries, level));
    return out;
  }
  for (auto level : levels) {
    std::vector<std::size_t> truths;
    std::vector<std::size_t> predicted;
    truths.reserve(output.slices.size());
    predicted.reserve(output.slices.size());
    for (const auto& s : output.slices) {
      truths.push_back(label_of(queries.at(s.query_volume_id), level));
      predicted.push_back(label_of(db.at(s.predicted_volume_id), level));
    }
    out.push_back(evaluate_slicewise(predicted, truths, level));
  }
  return out;
}

std::string format_predictions(const RetrievalOutput& output) {
  std::string out;
  if (output.slicewise) {
    for (const auto& s : output.slices) {
      out += s.query_volume_id + '\t' + std::to_string(s.query_slice) + '\t' + s.predicted_volume_id + '\n';
    }
  } else {
    for (const auto& p : output.volumes) out += p.query_volume_id + '\t' + p.predicted_volume_id + '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) return out;
    start = tab + 1;
  }
}

}  // namespace

RetrievalOutput parse_predictions(std::string_view text) {
  RetrievalOutput out;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    auto bad = [&](const std::string& why) {
      return Error(ErrorCode::kCorrupt, "predictions line " + std::to_string(line_no) + ": " + why);
    };
    const auto fields = split_tabs(line);
    if (fields.size() != 2 && fields.size() != 3) {
      throw bad("expected 2 or 3 tab-separated fields, got " + std::to_string(fields.size()));
    }
    if (columns == 0) {
      columns = fields.size();
      out.slicewise = columns == 3;
    } else if (fields.size() != columns) {
      throw bad("mixes " + std::to_string(columns) + "-column and " + std::to_string(fields.size()) +
                "-column lines");
    }
    for (auto f : fields) {
      if (f.empty()) throw bad("empty field");
    }
    if (columns == 2) {
      out.volumes.push_back({std::string(fields[0]), std::string(fields[1])});
      continue;
    }
    std::uint32_t slice = 0;
    const auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), slice);
    if (ec != std::errc() || ptr != fields[1].data() + fields[1].size()) {
      throw bad("slice index '" + std::string(fields[1]) + "' is not a non-negative integer");
    }
    out.slices.push_back({std::string(fields[0]), slice, std::string(fields[2])});
  }
  return out;
}

void write_predictions(const RetrievalOutput& output, const std::filesystem::path& path) {
  const std::string text = format_predictions(output);
  detail::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

RetrievalOutput read_predictions(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  try {
    return parse_predictions(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace volsearch
