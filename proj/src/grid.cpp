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

#include "volsearch/grid.hpp"

#include <cstdio>
#include <map>
#include <memory>
#include <set>

#include "binary_io.hpp"
#include "parallel.hpp"
#include "report_json.hpp"
#include "volsearch/error.hpp"
#include "volsearch/interchange.hpp"
#include "volsearch/report_io.hpp"

namespace volsearch {

namespace {

using Json = nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kConfig, "config field '" + field + "': " + why);
}

void check_keys(const Json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) field_error(where.empty() ? key : where + "." + key, "unknown key");
  }
}

const Json& require(const Json& obj, const std::string& where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) field_error(where + "." + key, "missing");
  return *it;
}

std::string get_string(const Json& v, const std::string& field) {
  if (!v.is_string()) field_error(field, "expected a string");
  auto s = v.get<std::string>();
  if (s.empty()) field_error(field, "must not be empty");
  return s;
}

std::uint64_t get_uint(const Json& v, const std::string& field, std::uint64_t min_value) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    field_error(field, "expected a non-negative integer");
  }
  const auto x = v.get<std::uint64_t>();
  if (x < min_value) field_error(field, "must be at least " + std::to_string(min_value));
  return x;
}

const Json& get_array(const Json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) field_error(field, "expected a non-empty array");
  return v;
}

template <typename Fn>
auto rethrow_as_field(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    field_error(field, e.what());
  }
}

IndexSpec parse_index(const Json& v, const std::string& where, std::uint64_t default_seed) {
  if (!v.is_object()) field_error(where, "expected an object");
  check_keys(v, where, {"kind", "metric", "bits", "rerank", "M", "M0", "ef_construction", "ef_search", "seed",
                        "threads"});
  IndexSpec spec;
  const auto kind_name = get_string(require(v, where, "kind"), where + ".kind");
  const auto kind = parse_index_kind(kind_name);
  if (!kind) field_error(where + ".kind", "unknown index kind '" + kind_name + "'; valid: exact | lsh | hnsw");
  spec.kind = *kind;
  if (v.contains("metric")) {
    const auto name = get_string(v["metric"], where + ".metric");
    const auto metric = parse_metric(name);
    if (!metric) field_error(where + ".metric", "unknown metric '" + name + "'; valid: l2 | cosine");
    spec.metric = *metric;
  }
  const std::uint64_t seed = v.contains("seed") ? get_uint(v["seed"], where + ".seed", 0) : default_seed;

  auto only_for = [&](const char* key, IndexKind k) {
    if (v.contains(key) && spec.kind != k) {
      field_error(where + "." + key, "does not apply to index kind '" + kind_name + "'");
    }
  };
  only_for("bits", IndexKind::kLsh);
  only_for("rerank", IndexKind::kLsh);
  for (const char* key : {"M", "M0", "ef_construction", "ef_search"}) only_for(key, IndexKind::kHnsw);
  only_for("threads", IndexKind::kExact);

  switch (spec.kind) {
    case IndexKind::kExact:
      if (v.contains("threads")) spec.threads = get_uint(v["threads"], where + ".threads", 1);
      break;
    case IndexKind::kLsh:
      spec.lsh.seed = seed;
      if (v.contains("bits")) spec.lsh.num_bits = get_uint(v["bits"], where + ".bits", 1);
      if (v.contains("rerank")) spec.lsh.rerank_depth = get_uint(v["rerank"], where + ".rerank", 0);
      break;
    case IndexKind::kHnsw:
      if (v.contains("M")) spec.hnsw = HnswParams::with_m(get_uint(v["M"], where + ".M", 2));
      spec.hnsw.seed = seed;
      if (v.contains("M0")) spec.hnsw.M0 = get_uint(v["M0"], where + ".M0", 1);
      if (v.contains("ef_construction")) {
        spec.hnsw.ef_construction = get_uint(v["ef_construction"], where + ".ef_construction", 1);
      }
      if (v.contains("ef_search")) spec.hnsw.ef_search = get_uint(v["ef_search"], where + ".ef_search", 1);
      break;
  }
  return spec;
}

}  // namespace

GridConfig parse_grid_config(std::string_view text, const std::filesystem::path& base_dir) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("config ") + e.what());
  }
  if (!root.is_object()) field_error("(root)", "expected an object");
  check_keys(root, "", {"seed", "levels", "embeddings", "indexes", "sampling", "weightings"});

  GridConfig cfg;
  if (root.contains("seed")) cfg.seed = get_uint(root["seed"], "seed", 0);

  if (root.contains("levels")) {
    cfg.levels.clear();
    const auto& levels = get_array(root["levels"], "levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const std::string field = "levels[" + std::to_string(i) + "]";
      const auto name = get_string(levels[i], field);
      if (name == "all") {
        cfg.levels.insert(cfg.levels.end(), kAllLevels.begin(), kAllLevels.end());
        continue;
      }
      const auto level = parse_level(name);
      if (!level) field_error(field, "unknown level '" + name + "'; valid: modality | region | organ | all");
      cfg.levels.push_back(*level);
    }
    std::set<LabelLevel> seen;
    for (auto l : cfg.levels) {
      if (!seen.insert(l).second) field_error("levels", "level '" + std::string(to_string(l)) + "' repeated");
    }
  }

  const auto& embeddings = get_array(require(root, "(root)", "embeddings"), "embeddings");
  std::set<std::string> names;
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    const std::string where = "embeddings[" + std::to_string(i) + "]";
    const auto& e = embeddings[i];
    if (!e.is_object()) field_error(where, "expected an object");
    check_keys(e, where, {"name", "db", "queries"});
    GridConfig::Embedding emb;
    emb.name = get_string(require(e, where, "name"), where + ".name");
    emb.db = base_dir / get_string(require(e, where, "db"), where + ".db");
    emb.queries = base_dir / get_string(require(e, where, "queries"), where + ".queries");
    if (!names.insert(emb.name).second) field_error(where + ".name", "duplicate embedding name '" + emb.name + "'");
    cfg.embeddings.push_back(std::move(emb));
  }

  const auto& indexes = get_array(require(root, "(root)", "indexes"), "indexes");
  std::set<std::string> index_tokens;
  for (std::size_t i = 0; i < indexes.size(); ++i) {
    const std::string where = "indexes[" + std::to_string(i) + "]";
    auto spec = parse_index(indexes[i], where, cfg.seed);
    if (!index_tokens.insert(spec.token()).second) field_error(where, "duplicate index '" + spec.token() + "'");
    cfg.indexes.push_back(spec);
  }

  std::vector<std::string> weightings{"uniform"};
  if (root.contains("weightings")) {
    weightings.clear();
    const auto& w = get_array(root["weightings"], "weightings");
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::string field = "weightings[" + std::to_string(i) + "]";
      weightings.push_back(get_string(w[i], field));
      rethrow_as_field(field, [&] { return parse_weighting(weightings.back()); });
    }
  }

  const auto& sampling = get_array(require(root, "(root)", "sampling"), "sampling");
  std::set<std::string> variant_tokens;
  auto add_variant = [&](const Variant& v, const std::string& field) {
    if (!variant_tokens.insert(v.token()).second) field_error(field, "duplicate variant '" + v.token() + "'");
    cfg.variants.push_back(v);
  };
  for (std::size_t i = 0; i < sampling.size(); ++i) {
    const std::string field = "sampling[" + std::to_string(i) + "]";
    const auto& s = sampling[i];
    if (s.is_object()) {
      check_keys(s, field, {"sampling", "weighting"});
      const auto plan = get_string(require(s, field, "sampling"), field + ".sampling");
      const auto weighting =
          s.contains("weighting") ? get_string(s["weighting"], field + ".weighting") : std::string("uniform");
      add_variant(rethrow_as_field(field, [&] { return parse_variant(plan, weighting); }), field);
      continue;
    }
    const auto plan = get_string(s, field);
    if (plan == "slicewise") {
      add_variant(Variant::slice_wise(), field);
      continue;
    }
    for (const auto& w : weightings) {
      add_variant(rethrow_as_field(field, [&] { return parse_variant(plan, w); }), field);
    }
  }
  return cfg;
}

GridConfig read_grid_config(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  try {
    return parse_grid_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                             path.parent_path());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

const GridCell* GridResult::find(std::string_view embedding, std::string_view index, std::string_view variant) const {
  for (const auto& c : cells) {
    if (c.embedding == embedding && c.index == index && c.variant == variant) return &c;
  }
  return nullptr;
}

GridResult run_grid(const GridConfig& config, std::size_t jobs) {
  if (config.embeddings.empty() || config.indexes.empty() || config.variants.empty()) {
    throw Error(ErrorCode::kConfig, "grid needs at least one embedding, index and variant");
  }
  struct Loaded {
    std::shared_ptr<const SliceStore> db;
    std::shared_ptr<const SliceStore> queries;
    std::unique_ptr<VolumeCatalog> db_catalog;
    std::unique_ptr<VolumeCatalog> query_catalog;
  };
  std::vector<Loaded> data(config.embeddings.size());
  detail::parallel_for(data.size(), jobs, [&](std::size_t e) {
    const auto& emb = config.embeddings[e];
    auto db = std::make_shared<const SliceStore>(read_dataset(emb.db));
    auto queries = std::make_shared<const SliceStore>(read_dataset(emb.queries));
    if (!queries->empty() && db->dim() != queries->dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "embedding '" + emb.name + "': database dim " +
                                                     std::to_string(db->dim()) + " differs from query dim " +
                                                     std::to_string(queries->dim()));
    }
    data[e].db_catalog = std::make_unique<VolumeCatalog>(db->volumes());
    data[e].query_catalog = std::make_unique<VolumeCatalog>(queries->volumes());
    data[e].db = std::move(db);
    data[e].queries = std::move(queries);
  });

  const std::size_t num_indexes = config.indexes.size();
  std::vector<std::shared_ptr<const SearchIndex>> built(data.size() * num_indexes);
  detail::parallel_for(built.size(), jobs, [&](std::size_t i) {
    built[i] = build_index(data[i / num_indexes].db, config.indexes[i % num_indexes]);
  });

  GridResult result;
  result.config = config;
  const std::size_t num_variants = config.variants.size();
  result.cells.resize(built.size() * num_variants);
  detail::parallel_for(result.cells.size(), jobs, [&](std::size_t i) {
    const std::size_t pair = i / num_variants;
    const std::size_t e = pair / num_indexes;
    const auto& variant = config.variants[i % num_variants];
    auto& cell = result.cells[i];
    cell.embedding = config.embeddings[e].name;
    cell.index = config.indexes[pair % num_indexes].token();
    cell.variant = variant.token();
    cell.output = run_retrieval(*data[e].queries, *built[pair], variant, config.seed);
    cell.reports = evaluate_output(cell.output, *data[e].db_catalog, *data[e].query_catalog, config.levels);
  });
  return result;
}

std::string cell_directory_name(std::string_view embedding, std::string_view index, std::string_view variant) {
  std::string out = std::string(embedding) + "__" + std::string(index) + "__" + std::string(variant);
  for (char& c : out) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                      c == '_' || c == '.';
    if (!keep) c = '_';
  }
  return out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  detail::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

enum class Measure { kRecall, kPrecision };

std::string matrix_tsv(const GridResult& result, std::size_t level_pos, Measure measure) {
  const auto& cfg = result.config;
  const LabelLevel level = cfg.levels[level_pos];
  const std::size_t nv = cfg.variants.size();
  std::string out = "embedding\tindex\tclass";
  for (const auto& v : cfg.variants) out += "\t" + v.token();
  out += "\n";

  for (std::size_t pair = 0; pair * nv < result.cells.size(); ++pair) {
    const GridCell* first = &result.cells[pair * nv];
    std::vector<bool> shown(num_classes(level), false);
    for (std::size_t v = 0; v < nv; ++v) {
      const auto& r = first[v].reports[level_pos];
      for (std::size_t c = 0; c < r.classes(); ++c) shown[c] = shown[c] || r.present(c);
    }
    const std::string prefix = first->embedding + "\t" + first->index + "\t";
    for (std::size_t c = 0; c < shown.size(); ++c) {
      if (!shown[c]) continue;
      out += prefix + std::string(class_name(level, c));
      for (std::size_t v = 0; v < nv; ++v) {
        const auto& r = first[v].reports[level_pos];
        if (!r.present(c)) {
          out += "\t-";
        } else {
          out += "\t" + fixed4(measure == Measure::kRecall ? r.recall[c] : r.precision[c]);
        }
      }
      out += "\n";
    }
    out += prefix + "Overall average";
    for (std::size_t v = 0; v < nv; ++v) {
      const auto& r = first[v].reports[level_pos];
      out += "\t" + fixed4(measure == Measure::kRecall ? r.overall_recall : r.overall_precision);
    }
    out += "\n";
  }
  return out;
}

std::string summary_tsv(const GridResult& result, std::size_t level_pos) {
  const auto& cfg = result.config;
  const LabelLevel level = cfg.levels[level_pos];
  const std::size_t nv = cfg.variants.size();
  std::string out = "embedding\tindex\tclass\tmedian_recall\tmax_recall\tvariants\n";
  for (std::size_t pair = 0; pair * nv < result.cells.size(); ++pair) {
    const GridCell* first = &result.cells[pair * nv];
    std::map<std::string, EvalReport> reports;
    for (std::size_t v = 0; v < nv; ++v) reports.emplace(first[v].variant, first[v].reports[level_pos]);
    for (const auto& s : summarize_across_configs(reports)) {
      out += first->embedding + "\t" + first->index + "\t" + std::string(class_name(level, s.label)) + "\t" +
             fixed4(s.median_recall) + "\t" + fixed4(s.max_recall) + "\t" + std::to_string(s.configs) + "\n";
    }
  }
  return out;
}

}  // namespace

void write_grid_outputs(const GridResult& result, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "cells", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + (out_dir / "cells").string() + ": " + ec.message());

  const auto& cfg = result.config;
  nlohmann::ordered_json doc;
  doc["seed"] = cfg.seed;
  doc["levels"] = nlohmann::ordered_json::array();
  for (auto l : cfg.levels) doc["levels"].push_back(to_string(l));
  doc["variants"] = nlohmann::ordered_json::array();
  for (const auto& v : cfg.variants) doc["variants"].push_back(v.token());
  doc["cells"] = nlohmann::ordered_json::array();

  for (const auto& cell : result.cells) {
    const auto dir = out_dir / "cells" / cell_directory_name(cell.embedding, cell.index, cell.variant);
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
    write_predictions(cell.output, dir / "predictions.tsv");

    nlohmann::ordered_json reports;
    for (const auto& r : cell.reports) {
      const std::string level(to_string(r.level));
      write_text(dir / ("report_" + level + ".txt"), format_report(r));
      write_text(dir / ("report_" + level + ".json"), report_to_json(r));
      reports[level] = detail::report_json(r);
    }
    doc["cells"].push_back(
        {{"embedding", cell.embedding}, {"index", cell.index}, {"variant", cell.variant}, {"reports", reports}});
  }

  for (std::size_t l = 0; l < cfg.levels.size(); ++l) {
    const std::string level(to_string(cfg.levels[l]));
    write_text(out_dir / ("recall_" + level + ".tsv"), matrix_tsv(result, l, Measure::kRecall));
    write_text(out_dir / ("precision_" + level + ".tsv"), matrix_tsv(result, l, Measure::kPrecision));
    write_text(out_dir / ("summary_" + level + ".tsv"), summary_tsv(result, l));
  }
  write_text(out_dir / "grid.json", doc.dump(2) + "\n");
}

}  // namespace volsearch
