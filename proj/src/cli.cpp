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

#include "volsearch/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <ostream>

#include "binary_io.hpp"
#include "volsearch/error.hpp"
#include "volsearch/grid.hpp"
#include "volsearch/interchange.hpp"
#include "volsearch/pipeline.hpp"
#include "volsearch/report_io.hpp"
#include "volsearch/synthgen.hpp"

namespace volsearch {

namespace {

/// Bad flag values that CLI11 itself cannot see; they exit with kExitUsage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Fn>
auto usage(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

std::size_t default_jobs() {
  const char* env = std::getenv("VOLSEARCH_JOBS");
  if (!env || !*env) return 1;
  std::size_t n = 0;
  const std::string_view s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || ptr != s.data() + s.size() || n == 0) {
    throw UsageError("VOLSEARCH_JOBS must be a positive integer, got '" + std::string(s) + "'");
  }
  return n;
}

template <typename T>
std::pair<T, T> parse_range(const std::string& text, const char* flag) {
  auto parse_one = [&](std::string_view s) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      throw UsageError(std::string(flag) + " expects A..B or a single value, got '" + text + "'");
    }
    return v;
  };
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const T v = parse_one(text);
    return {v, v};
  }
  const T lo = parse_one(std::string_view(text).substr(0, dots));
  const T hi = parse_one(std::string_view(text).substr(dots + 2));
  if (hi < lo) throw UsageError(std::string(flag) + " range '" + text + "' is empty");
  return {lo, hi};
}

std::vector<Organ> parse_organ_list(const std::string& text) {
  std::vector<Organ> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string name = text.substr(start, comma - start);
    const auto organ = parse_organ(name);
    if (!organ) {
      std::string valid;
      for (const auto& row : kTaxonomy) valid += (valid.empty() ? "" : ", ") + std::string(to_string(row.organ));
      throw UsageError("unknown organ '" + name + "'; valid: " + valid);
    }
    out.push_back(*organ);
    start = comma + 1;
  }
  return out;
}

std::vector<LabelLevel> parse_levels(const std::string& text) {
  if (text == "all") return {kAllLevels.begin(), kAllLevels.end()};
  const auto level = parse_level(text);
  if (!level) throw UsageError("unknown level '" + text + "'; valid: modality | region | organ | all");
  return {*level};
}

struct IndexOptions {
  std::string kind = "exact";
  std::string metric = "l2";
  std::size_t bits = 1024;
  std::size_t rerank = 0;
  std::size_t m = 16;
  std::size_t m0 = 0;
  std::size_t ef_construction = 200;
  std::size_t ef_search = 64;
  std::size_t threads = 1;
};

void add_index_options(CLI::App* cmd, IndexOptions& o, const std::string& kind_flag) {
  cmd->add_option(kind_flag, o.kind, "exact | lsh | hnsw")->capture_default_str();
  cmd->add_option("--metric", o.metric, "l2 | cosine")->capture_default_str();
  cmd->add_option("--bits", o.bits, "LSH signature length")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--rerank", o.rerank, "LSH exact re-rank depth (0 = Hamming only)")->capture_default_str();
  cmd->add_option("--M", o.m, "HNSW links per node above layer 0")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  cmd->add_option("--M0", o.m0, "HNSW links per node on layer 0 (default 2M)");
  cmd->add_option("--ef-construction", o.ef_construction, "HNSW build beam width")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--ef-search", o.ef_search, "HNSW query beam width")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--threads", o.threads, "exact scan threads")->capture_default_str()->check(CLI::PositiveNumber);
}

IndexSpec to_index_spec(const IndexOptions& o, std::uint64_t seed) {
  IndexSpec spec;
  const auto kind = parse_index_kind(o.kind);
  if (!kind) throw UsageError("unknown index kind '" + o.kind + "'; valid: exact | lsh | hnsw");
  const auto metric = parse_metric(o.metric);
  if (!metric) throw UsageError("unknown metric '" + o.metric + "'; valid: l2 | cosine");
  spec.kind = *kind;
  spec.metric = *metric;
  spec.threads = o.threads;
  spec.lsh.num_bits = o.bits;
  spec.lsh.rerank_depth = o.rerank;
  spec.lsh.seed = seed;
  spec.hnsw = HnswParams::with_m(o.m);
  if (o.m0 > 0) spec.hnsw.M0 = o.m0;
  spec.hnsw.ef_construction = o.ef_construction;
  spec.hnsw.ef_search = o.ef_search;
  spec.hnsw.seed = seed;
  return spec;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  detail::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::size_t total_slices(const Dataset& ds) { return ds.embeddings.size(); }

// --- synth -----------------------------------------------------------------

struct SynthOptions {
  std::string organs;
  std::size_t volumes = 4;
  std::size_t queries = 2;
  std::string slices = "20..40";
  std::string spacing = "1..5";
  std::size_t dim = 128;
  double sep = 12.0;
  double noise = 0.0;
  double offset = 0.5;
  std::uint64_t seed = 0;
  std::string out;
  std::string out_queries;
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
  SynthSpec spec;
  if (!o.organs.empty()) spec.organs = parse_organ_list(o.organs);
  spec.volumes_per_organ = o.volumes;
  spec.queries_per_organ = o.queries;
  std::tie(spec.min_slices, spec.max_slices) = parse_range<std::uint32_t>(o.slices, "--slices");
  std::tie(spec.min_spacing_mm, spec.max_spacing_mm) = parse_range<float>(o.spacing, "--spacing");
  spec.dim = o.dim;
  spec.cluster_separation = o.sep;
  spec.noise_fraction = o.noise;
  spec.volume_offset = o.offset;
  spec.seed = o.seed;
  const auto data = usage([&] { return generate(spec); });

  std::filesystem::path queries_path = o.out_queries;
  if (queries_path.empty()) {
    queries_path = std::filesystem::path(o.out);
    queries_path.replace_filename(queries_path.stem().string() + "_queries" + queries_path.extension().string());
  }
  write_dataset(data.database, o.out);
  write_dataset(data.queries, queries_path);
  out << "database: " << data.database.volumes.size() << " volumes, " << total_slices(data.database)
      << " slices, dim " << data.database.dim() << " -> " << o.out << "\n";
  out << "queries: " << data.queries.volumes.size() << " volumes, " << total_slices(data.queries) << " slices -> "
      << queries_path.string() << "\n";
  return kExitOk;
}

// --- build -----------------------------------------------------------------

struct BuildOptions {
  IndexOptions index;
  std::uint64_t seed = 0;
  std::string in;
  std::string out;
};

int cmd_build(const BuildOptions& o, std::ostream& out) {
  const auto spec = to_index_spec(o.index, o.seed);
  auto store = std::make_shared<const SliceStore>(read_dataset(o.in));
  const auto index = build_index(store, spec);
  save_index(*index, o.out);
  out << "built " << spec.token() << " over " << store->size() << " slices -> " << o.out << "\n";
  return kExitOk;
}

// --- retrieve --------------------------------------------------------------

struct RetrieveOptions {
  IndexOptions index;
  std::string index_file;
  std::string db;
  std::string queries;
  std::string sampling = "all";
  std::string weighting = "uniform";
  std::uint64_t seed = 0;
  std::string out;
  std::size_t jobs = 0;
};

int cmd_retrieve(const RetrieveOptions& o, std::ostream& out) {
  RunConfig run;
  run.index = to_index_spec(o.index, o.seed);
  run.variant = usage([&] { return parse_variant(o.sampling, o.weighting); });
  run.db_path = o.db;
  run.queries_path = o.queries;
  run.index_path = o.index_file;
  run.seed = o.seed;
  run.threads = o.jobs > 0 ? o.jobs : default_jobs();

  auto db = std::make_shared<const SliceStore>(read_dataset(run.db_path));
  const SliceStore queries(read_dataset(run.queries_path));
  const auto index =
      run.index_path.empty() ? build_index(db, run.index) : load_index(run.index_path, run.index.kind, db);
  const auto output = run_retrieval(queries, *index, run.variant, run.seed, run.threads);
  write_predictions(output, o.out);
  out << (output.slicewise ? output.slices.size() : output.volumes.size())
      << (output.slicewise ? " slice" : " volume") << " predictions (" << run.index.token() << ", "
      << run.variant.token() << ") -> " << o.out << "\n";
  return kExitOk;
}

// --- evaluate --------------------------------------------------------------

struct EvaluateOptions {
  std::string predictions;
  std::string db;
  std::string queries;
  std::string level = "all";
  std::string out_dir;
};

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
  const auto levels = parse_levels(o.level);
  const auto predictions = read_predictions(o.predictions);
  const auto db = read_dataset(o.db);
  const auto queries = read_dataset(o.queries);
  const VolumeCatalog db_catalog(db.volumes);
  const VolumeCatalog query_catalog(queries.volumes);
  const auto reports = evaluate_output(predictions, db_catalog, query_catalog, levels);

  if (!o.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(o.out_dir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + o.out_dir + ": " + ec.message());
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (i > 0) out << "\n";
    const std::string table = format_report(reports[i]);
    out << table;
    if (o.out_dir.empty()) continue;
    const std::string level(to_string(reports[i].level));
    const std::filesystem::path dir(o.out_dir);
    write_text(dir / ("report_" + level + ".txt"), table);
    write_text(dir / ("report_" + level + ".json"), report_to_json(reports[i]));
  }
  return kExitOk;
}

// --- grid ------------------------------------------------------------------

struct GridOptions {
  std::string config;
  std::string out_dir;
  std::size_t jobs = 0;
};

int cmd_grid(const GridOptions& o, std::ostream& out) {
  const std::size_t jobs = o.jobs > 0 ? o.jobs : default_jobs();
  const auto config = read_grid_config(o.config);
  const auto result = run_grid(config, jobs);
  write_grid_outputs(result, o.out_dir);
  for (const auto& cell : result.cells) {
    out << cell.embedding << "\t" << cell.index << "\t" << cell.variant;
    for (const auto& r : cell.reports) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", r.overall_recall);
      out << "\t" << to_string(r.level) << "=" << buf;
    }
    out << "\n";
  }
  out << result.cells.size() << " cells -> " << o.out_dir << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Slice-embedding volume retrieval: build indexes, retrieve, evaluate.", "volsearch"};
  app.require_subcommand(1);

  SynthOptions synth;
  auto* c_synth = app.add_subcommand("synth", "generate a labeled synthetic database and query set");
  c_synth->add_option("--organs", synth.organs, "comma-separated organ names (default: all ten)");
  c_synth->add_option("--volumes", synth.volumes, "database volumes per organ")->capture_default_str();
  c_synth->add_option("--queries", synth.queries, "query volumes per organ")->capture_default_str();
  c_synth->add_option("--slices", synth.slices, "slices per volume, A..B")->capture_default_str();
  c_synth->add_option("--spacing", synth.spacing, "slice spacing in mm, A..B")->capture_default_str();
  c_synth->add_option("--dim", synth.dim, "embedding dimension")->capture_default_str()->check(CLI::PositiveNumber);
  c_synth->add_option("--sep", synth.sep, "organ center distance in noise std units")->capture_default_str();
  c_synth->add_option("--noise", synth.noise, "fraction of background slices")->capture_default_str();
  c_synth->add_option("--offset", synth.offset, "per-volume offset std")->capture_default_str();
  c_synth->add_option("--seed", synth.seed, "random seed")->capture_default_str();
  c_synth->add_option("--out", synth.out, "database file")->required();
  c_synth->add_option("--out-queries", synth.out_queries, "query file (default: <out>_queries.embv)");

  BuildOptions build;
  auto* c_build = app.add_subcommand("build", "build and persist an index");
  add_index_options(c_build, build.index, "--index");
  c_build->add_option("--seed", build.seed, "index seed")->capture_default_str();
  c_build->add_option("--in", build.in, "database file")->required();
  c_build->add_option("--out", build.out, "index file")->required();

  RetrieveOptions retrieve;
  auto* c_retrieve = app.add_subcommand("retrieve", "predict the closest database volume for each query volume");
  add_index_options(c_retrieve, retrieve.index, "--index-kind");
  c_retrieve->add_option("--index-file", retrieve.index_file, "prebuilt index (built on the fly when absent)");
  c_retrieve->add_option("--db", retrieve.db, "database file")->required();
  c_retrieve->add_option("--queries", retrieve.queries, "query file")->required();
  c_retrieve->add_option("--sampling", retrieve.sampling, "all | random:N | mm:G | step:S | slicewise")
      ->capture_default_str();
  c_retrieve->add_option("--weighting", retrieve.weighting, "uniform | gaussian | gaussian:F")->capture_default_str();
  c_retrieve->add_option("--seed", retrieve.seed, "sampling and index seed")->capture_default_str();
  c_retrieve->add_option("--out", retrieve.out, "predictions file")->required();
  c_retrieve->add_option("--jobs", retrieve.jobs, "search threads (default: VOLSEARCH_JOBS or 1)");

  EvaluateOptions evaluate;
  auto* c_evaluate = app.add_subcommand("evaluate", "score a predictions file");
  c_evaluate->add_option("--predictions", evaluate.predictions, "predictions file")->required();
  c_evaluate->add_option("--db", evaluate.db, "database file")->required();
  c_evaluate->add_option("--queries", evaluate.queries, "query file")->required();
  c_evaluate->add_option("--level", evaluate.level, "modality | region | organ | all")->capture_default_str();
  c_evaluate->add_option("--out-dir", evaluate.out_dir, "directory for report files");

  GridOptions grid;
  auto* c_grid = app.add_subcommand("grid", "run an index x sampling x weighting benchmark grid");
  c_grid->add_option("--config", grid.config, "JSON grid config")->required();
  c_grid->add_option("--out-dir", grid.out_dir, "output directory")->required();
  c_grid->add_option("--jobs", grid.jobs, "concurrent cells (default: VOLSEARCH_JOBS or 1)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_synth->parsed()) return cmd_synth(synth, out);
    if (c_build->parsed()) return cmd_build(build, out);
    if (c_retrieve->parsed()) return cmd_retrieve(retrieve, out);
    if (c_evaluate->parsed()) return cmd_evaluate(evaluate, out);
    if (c_grid->parsed()) return cmd_grid(grid, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace volsearch
