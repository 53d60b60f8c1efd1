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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <unistd.h>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "volsearch/aggregator.hpp"
#include "volsearch/cli.hpp"
#include "volsearch/error.hpp"
#include "volsearch/evaluator.hpp"
#include "volsearch/exact_index.hpp"
#include "volsearch/hnsw_index.hpp"
#include "volsearch/interchange.hpp"
#include "volsearch/lsh_index.hpp"
#include "volsearch/random.hpp"
#include "volsearch/sampler.hpp"
#include "volsearch/synthgen.hpp"

using namespace volsearch;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

// Collects the first few problems of one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (problems_.size() < 5) problems_.push_back(what);
    ++count_;
  }
  bool ok() const { return count_ == 0; }
  std::string summary() const {
    std::string out;
    for (const auto& p : problems_) out += (out.empty() ? "" : "; ") + p;
    if (count_ > problems_.size()) out += "; ... " + std::to_string(count_) + " total";
    return out;
  }

 private:
  std::vector<std::string> problems_;
  std::size_t count_ = 0;
};

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  if (code != kExitOk) std::fprintf(stderr, "volsearch %s failed: %s", args[0].c_str(), err.str().c_str());
  return code;
}

// Mixture shared by the two index fidelity checks.
struct Fidelity {
  MixtureData mixture;
  std::shared_ptr<const SliceStore> store;
  std::unique_ptr<ExactIndex> exact;
  std::vector<SearchHit> truth;  // exact top-1 per query
  double exact_seconds = 0;
};

Fidelity make_fidelity() {
  Fidelity f;
  MixtureSpec spec;
  spec.dim = 128;
  spec.clusters = 100;
  spec.points = 10000;
  spec.queries = 1000;
  spec.cluster_separation = 10.0;
  spec.seed = 7;
  f.mixture = generate_mixture(spec);
  f.store = std::make_shared<const SliceStore>(f.mixture.database);
  f.exact = std::make_unique<ExactIndex>(f.store, Metric::kL2);
  const auto start = Clock::now();
  for (const auto& q : f.mixture.queries) f.truth.push_back(f.exact->search(q, 1).at(0));
  f.exact_seconds = seconds_since(start);
  return f;
}

void hnsw_fidelity(const Fidelity& f) {
  const auto start = Clock::now();
  HnswParams params;
  params.ef_search = 64;
  params.seed = 7;
  const auto index = HnswIndex::build(*f.store, params);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < f.mixture.queries.size(); ++i) {
    const auto hit = index.search(f.mixture.queries[i], 1).at(0);
    // A different row at the same distance is an equally exact answer.
    agree += hit.row == f.truth[i].row || hit.distance == f.truth[i].distance;
  }
  const double secs = seconds_since(start);
  const double recall = static_cast<double>(agree) / static_cast<double>(f.mixture.queries.size());
  report("hnsw-fidelity", recall >= 0.95 && secs < 60.0,
         "recall@1 vs exact " + fmt("%.4f", recall) + " (>= 0.95) over 1000 queries, ef_search 64, build+search " +
             fmt("%.1f", secs) + " s (< 60 s)");
}

void lsh_fidelity(const Fidelity& f) {
  LshParams params;
  params.num_bits = 1024;
  params.seed = 7;
  const auto hamming = LshIndex::build(f.store, params);
  std::size_t agree = 0;
  std::size_t agree_true = 0;
  for (std::size_t i = 0; i < f.mixture.queries.size(); ++i) {
    const auto hit = hamming.search(f.mixture.queries[i], 1).at(0);
    agree += hit.ref.volume_id == f.truth[i].ref.volume_id;
    agree_true += f.store->volume_of(hit.row) == f.mixture.query_cluster[i];
  }
  const double agreement = static_cast<double>(agree) / static_cast<double>(f.mixture.queries.size());

  params.rerank_depth = f.store->size();
  const auto full = LshIndex::build(f.store, params);
  std::size_t equal = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    equal += full.search(f.mixture.queries[i], 10) == f.exact->search(f.mixture.queries[i], 10);
  }
  report("lsh-fidelity", agreement >= 0.99 && equal == 100,
         "1024 bits, rerank 0: top-1 cluster agreement with exact " + fmt("%.4f", agreement) +
             " (>= 0.99; vs generating cluster " +
             fmt("%.4f", static_cast<double>(agree_true) / static_cast<double>(f.mixture.queries.size())) +
             "); rerank = n: " + std::to_string(equal) + "/100 top-10 lists identical to exact");
}

void lsh_angle_law() {
  constexpr std::size_t kDim = 128;
  constexpr std::size_t kBits = 4096;
  Rng rng(31);
  Dataset ds;
  for (int p = 0; p < 100; ++p) {
    std::vector<double> a(kDim);
    std::vector<double> b(kDim);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    double aa = 0;
    double ab = 0;
    for (std::size_t i = 0; i < kDim; ++i) {
      aa += a[i] * a[i];
      ab += a[i] * b[i];
    }
    std::vector<float> fa(kDim);
    std::vector<float> fb(kDim);
    for (std::size_t i = 0; i < kDim; ++i) {
      fa[i] = static_cast<float>(a[i]);
      fb[i] = static_cast<float>(b[i] - ab / aa * a[i]);
    }
    const std::string id = "p" + std::to_string(p);
    ds.volumes.push_back(make_volume(id, Organ::kLiver, 1.0F, 2));
    ds.embeddings.push_back({{id, 0}, EmbeddingVector(std::move(fa))});
    ds.embeddings.push_back({{id, 1}, EmbeddingVector(std::move(fb))});
  }
  LshParams params;
  params.num_bits = kBits;
  params.seed = 5;
  const auto index = LshIndex::build(std::make_shared<const SliceStore>(ds), params);
  Check check;
  double lo = 1;
  double hi = 0;
  double sum = 0;
  for (std::size_t p = 0; p < 100; ++p) {
    const auto frac = static_cast<double>(hamming_distance(index.signature(2 * p).words(),
                                                           index.signature(2 * p + 1).words())) /
                      static_cast<double>(kBits);
    lo = std::min(lo, frac);
    hi = std::max(hi, frac);
    sum += frac;
    check.expect(std::abs(frac - 0.5) <= 0.05, "pair " + std::to_string(p) + " " + fmt("%.4f", frac));
  }
  report("lsh-angle-law", check.ok(),
         "differing-bit fraction at pi/2 over 100 pairs, 4096 bits: mean " + fmt("%.4f", sum / 100) + ", range [" +
             fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "] (0.5 +- 0.05)" +
             (check.ok() ? "" : "; " + check.summary()));
}

void aggregation_oracle() {
  Rng rng(2718);
  Check check;
  std::size_t unique = 0;
  std::size_t ties = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto volumes = static_cast<std::size_t>(rng.between(1, 6));
    const auto n = static_cast<std::uint32_t>(rng.between(1, 40));
    std::vector<SliceMatch> matches;
    for (std::uint32_t s = 0; s < n; ++s) {
      const auto v = rng.below(volumes);
      matches.push_back({s, {"vol" + std::to_string(v), 0}, static_cast<double>(rng.below(8)) * 0.125});
    }
    // Brute force: enumerate candidates, count occurrences.
    std::map<std::string, std::pair<std::size_t, double>> tally;
    for (const auto& m : matches) {
      auto& [count, dist] = tally[m.matched.volume_id];
      ++count;
      dist += m.distance;
    }
    std::size_t top = 0;
    for (const auto& [id, e] : tally) top = std::max(top, e.first);
    std::vector<std::string> modes;
    for (const auto& [id, e] : tally) {
      if (e.first == top) modes.push_back(id);
    }
    std::string expected = modes.front();
    if (modes.size() > 1) {
      ++ties;
      for (const auto& id : modes) {
        if (tally[id].second < tally[expected].second) expected = id;
      }
    } else {
      ++unique;
    }
    const auto got = aggregate(matches, n, WeightingPolicy::uniform()).winner;
    check.expect(got == expected, "case " + std::to_string(t) + ": got " + got + ", expected " + expected);
  }
  report("aggregation-oracle", check.ok(),
         "1000 random match lists (" + std::to_string(unique) + " unique modes, " + std::to_string(ties) +
             " ties by cumulative distance) agree with brute force" + (check.ok() ? "" : "; " + check.summary()));
}

void gaussian_weighting() {
  Check check;
  Rng rng(99);
  for (int t = 0; t < 100; ++t) {
    const auto n = static_cast<std::uint32_t>(rng.between(1, 500));
    const double c = (n - 1) / 2.0;
    for (std::uint32_t i = 0; i < n; ++i) {
      const double w = gaussian_weight(i, n, 1.0 / 6.0);
      check.expect(w == gaussian_weight(n - 1 - i, n, 1.0 / 6.0), "asymmetric at n=" + std::to_string(n));
      if (i + 1 <= c) {
        check.expect(w < gaussian_weight(i + 1, n, 1.0 / 6.0), "not increasing toward center at n=" + std::to_string(n));
      }
    }
  }
  const double e2 = std::exp(-2.0);
  const double w0 = gaussian_weight(0, 3, 1.0 / 6.0);
  const double w1 = gaussian_weight(1, 3, 1.0 / 6.0);
  const double w2 = gaussian_weight(2, 3, 1.0 / 6.0);
  check.expect(std::abs(w0 - e2) <= 1e-6 && std::abs(w1 - 1.0) <= 1e-6 && std::abs(w2 - e2) <= 1e-6,
               "3-slice example gave [" + fmt("%.6f", w0) + ", " + fmt("%.6f", w1) + ", " + fmt("%.6f", w2) + "]");

  // The winner must stay the argmax when every weight is scaled by a positive constant.
  for (int t = 0; t < 200; ++t) {
    const auto n = static_cast<std::uint32_t>(rng.between(2, 40));
    std::vector<SliceMatch> matches;
    for (std::uint32_t s = 0; s < n; ++s) {
      matches.push_back({s, {"v" + std::to_string(rng.below(4)), 0}, rng.uniform(0.0, 2.0)});
    }
    const auto result = aggregate(matches, n, WeightingPolicy::gaussian());
    for (double scale : {1e-3, 0.5, 7.0, 1e4}) {
      std::map<std::string, std::pair<double, double>> score;
      for (const auto& m : matches) {
        auto& [s, d] = score[m.matched.volume_id];
        s += scale * gaussian_weight(m.query_slice, n, 1.0 / 6.0);
        d += m.distance;
      }
      const auto& best = score.at(result.winner);
      for (const auto& [id, e] : score) {
        const bool beats = e.first > best.first * (1 + 1e-12) ||
                           (std::abs(e.first - best.first) <= 1e-12 * best.first && e.second < best.second);
        check.expect(!beats, "winner " + result.winner + " beaten by " + id + " at scale " + fmt("%g", scale));
      }
    }
  }
  report("gaussian-weighting", check.ok(),
         "symmetric and decreasing from center for 100 lengths; [w0, w1, w2] = [" + fmt("%.6f", w0) + ", " +
             fmt("%.6f", w1) + ", " + fmt("%.6f", w2) + "] vs [0.135335, 1, 0.135335] (1e-6); winner invariant " +
             "under 4 weight scalings on 200 lists" + (check.ok() ? "" : "; " + check.summary()));
}

void sampler_arithmetic() {
  using V = std::vector<std::uint32_t>;
  Check check;
  check.expect(sample_random(3, 5, 1) == V{0, 1, 2}, "random(3, 5)");
  check.expect(sample_random(100, 10, 42) == sample_random(100, 10, 42) && sample_random(100, 10, 42).size() == 10,
               "random(100, 10) fixed seed");
  check.expect(sample_equidistant_mm(30, 1.0, 10.0) == V{0, 10, 20}, "mm(30, 1, 10)");
  check.expect(sample_equidistant_mm(6, 5.0, 3.0) == sample_all(6), "mm(spacing 5, gap 3)");
  check.expect(sample_equidistant_mm(1, 1.0, 10.0) == V{0}, "mm(1 slice)");
  check.expect(sample_fixed_step(12, 5) == V{0, 5, 10}, "step(12, 5)");
  check.expect(sample_fixed_step(7, 1) == sample_all(7), "step 1");
  check.expect(sample_fixed_step(2, 10) == V{0}, "step(2, 10)");
  check.expect(sample_equidistant_mm(10, 2.0, 7.0) == V{0, 4, 8}, "3.5 rounds away from zero");
  try {
    parse_sampling_plan("sometimes");
    check.expect(false, "bad token accepted");
  } catch (const Error& e) {
    check.expect(std::string(e.what()).find("all | random:N | mm:G | step:S | slicewise") != std::string::npos,
                 "bad token message lacks the valid list");
  }

  Rng rng(4242);
  for (int t = 0; t < 1000; ++t) {
    const auto n = static_cast<std::uint32_t>(rng.between(1, 400));
    const auto all = sample_all(n);
    const double spacing = rng.uniform(0.2, 6.0);
    const auto count = static_cast<std::uint32_t>(rng.between(1, 500));
    const V outs[] = {sample_random(n, count, rng.next_u64()),
                      sample_equidistant_mm(n, spacing, rng.uniform(0.1, 30.0)),
                      sample_fixed_step(n, static_cast<std::uint32_t>(rng.between(1, 50)))};
    for (const auto& o : outs) {
      const bool sorted = std::adjacent_find(o.begin(), o.end(), std::greater_equal<>()) == o.end();
      check.expect(!o.empty() && sorted && o.back() < n && std::includes(all.begin(), all.end(), o.begin(), o.end()),
                   "case " + std::to_string(t) + " not a sorted in-range subset");
    }
    check.expect(outs[0].size() == std::min(count, n), "case " + std::to_string(t) + " random count not clamped");
    check.expect(sample_equidistant_mm(n, spacing, spacing * rng.uniform(0.01, 1.0)) == sample_fixed_step(n, 1) &&
                     sample_fixed_step(n, 1) == all,
                 "case " + std::to_string(t) + " gap <= spacing is not every slice");
  }
  report("sampler-arithmetic", check.ok(),
         "worked examples exact; 1000 fuzz cases sorted, unique, nested in all, clamped" +
             (check.ok() ? "" : "; " + check.summary()));
}

void end_to_end(const std::filesystem::path& work) {
  const auto start = Clock::now();
  const auto db = work / "e2e_db.embv";
  const auto q = work / "e2e_q.embv";
  const std::string config = R"({
  "seed": 7,
  "embeddings": [{"name": "synth", "db": "e2e_db.embv", "queries": "e2e_q.embv"}],
  "indexes": [{"kind": "exact"},
              {"kind": "lsh", "bits": 1024},
              {"kind": "hnsw", "M": 16, "ef_construction": 200, "ef_search": 64}],
  "sampling": ["all", "mm:7", "random:40", {"sampling": "all", "weighting": "gaussian"}, "slicewise"]
})";
  std::ofstream(work / "e2e_grid.json") << config;
  if (cli({"synth", "--sep", "12", "--noise", "0.02", "--seed", "7", "--out", db.string(), "--out-queries",
           q.string()}) != kExitOk ||
      cli({"grid", "--config", (work / "e2e_grid.json").string(), "--out-dir", (work / "e2e_out").string()}) !=
          kExitOk) {
    report("end-to-end", false, "synth or grid command failed");
    return;
  }
  const auto secs = seconds_since(start);
  const auto doc = nlohmann::json::parse(read_all(work / "e2e_out" / "grid.json"));
  Check check;
  double min_modality = 1;
  double min_organ = 1;
  double max_sw_modality = 0;
  std::size_t cells = 0;
  for (const auto& cell : doc.at("cells")) {
    ++cells;
    const std::string name = cell.at("index").get<std::string>() + " " + cell.at("variant").get<std::string>();
    const double modality = cell.at("reports").at("modality").at("overall_recall");
    const double organ = cell.at("reports").at("organ").at("overall_recall");
    if (cell.at("variant") == "slicewise") {
      max_sw_modality = std::max(max_sw_modality, modality);
      check.expect(modality < 1.0, name + " modality " + fmt("%.4f", modality) + " not < 1");
      continue;
    }
    min_modality = std::min(min_modality, modality);
    min_organ = std::min(min_organ, organ);
    check.expect(modality == 1.0, name + " modality " + fmt("%.4f", modality));
    check.expect(organ >= 0.9, name + " organ " + fmt("%.4f", organ));
  }
  check.expect(cells == 15, std::to_string(cells) + " cells");
  check.expect(secs < 300, "took " + fmt("%.1f", secs) + " s");
  report("end-to-end", check.ok(),
         "10 organs, sep 12, noise 0.02: " + std::to_string(cells) +
             " cells; min volume-level modality recall " + fmt("%.4f", min_modality) + " (= 1), min organ recall " +
             fmt("%.4f", min_organ) + " (>= 0.9), max slice-wise modality recall " + fmt("%.4f", max_sw_modality) +
             " (< 1), " + fmt("%.1f", secs) + " s (< 300 s)" + (check.ok() ? "" : "; " + check.summary()));
}

Dataset random_dataset(std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  const auto volumes = rng.between(0, 5);
  const auto dim = static_cast<std::size_t>(rng.between(1, 8));
  for (std::int64_t v = 0; v < volumes; ++v) {
    const std::string id = "vol" + std::to_string(v) + std::string(static_cast<std::size_t>(rng.below(4)), 'x');
    const auto slices = static_cast<std::uint32_t>(rng.between(1, 6));
    ds.volumes.push_back(
        make_volume(id, kTaxonomy[rng.below(kNumOrgans)].organ, static_cast<float>(rng.uniform(0.1, 9)), slices));
    for (std::uint32_t s = 0; s < slices; ++s) {
      std::vector<float> x(dim);
      for (auto& f : x) {
        const auto pick = rng.below(10);
        f = pick == 0 ? -0.0F : pick == 1 ? 1e-42F : static_cast<float>(rng.normal() * 1e3);
      }
      ds.embeddings.push_back({{id, s}, EmbeddingVector(std::move(x))});
    }
  }
  return ds;
}

void interchange() {
  Check check;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto ds = random_dataset(seed);
    const auto bytes = encode_dataset(ds);
    const auto back = decode_dataset(bytes);
    check.expect(back == ds && encode_dataset(back) == bytes, "seed " + std::to_string(seed));
  }
  const std::vector<std::uint8_t> empty = {'E', 'M', 'B', 'V', 1, 0, 0, 0, 0, 0, 0, 0,
                                           0,   0,   0,   0,   0, 0, 0, 0, 0, 0, 0, 0};
  check.expect(encode_dataset(Dataset{}) == empty, "empty file bytes");
  Dataset one;
  one.volumes.push_back(make_volume("v", Organ::kLiver, 2.5F, 2));
  one.embeddings.push_back({{"v", 0}, EmbeddingVector({1.0F, 2.0F})});
  one.embeddings.push_back({{"v", 1}, EmbeddingVector({3.0F, 4.0F})});
  const std::vector<std::uint8_t> one_bytes = {
      'E', 'M', 'B', 'V', 1, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 1, 0, 'v', 0, 2, 5, 0x00,
      0x00, 0x20, 0x40, 2, 0, 0, 0, 0x00, 0x00, 0x80, 0x3F, 0x00, 0x00, 0x00, 0x40, 0x00, 0x00, 0x40, 0x40, 0x00,
      0x00, 0x80, 0x40};
  check.expect(one_bytes.size() == 54 && encode_dataset(one) == one_bytes, "one-volume file bytes");
  check.expect(decode_dataset(one_bytes) == one, "one-volume decode");
  report("interchange", check.ok(),
         "100 random datasets round-trip bit-identically; 24-byte empty and 54-byte one-volume files exact" +
             (check.ok() ? "" : "; " + check.summary()));
}

void evaluator() {
  Check check;
  const std::vector<VolumeRecord> db = {make_volume("A", Organ::kLiver, 1, 1), make_volume("C", Organ::kLung, 1, 1)};
  const std::vector<VolumeRecord> queries = {make_volume("a1", Organ::kLiver, 1, 1),
                                             make_volume("a2", Organ::kPancreas, 1, 1),
                                             make_volume("c1", Organ::kLung, 1, 1),
                                             make_volume("c2", Organ::kHeart, 1, 1)};
  const std::vector<Prediction> preds = {{"a1", "A"}, {"a2", "A"}, {"c1", "C"}, {"c2", "A"}};
  const auto r = evaluate(preds, VolumeCatalog(db), VolumeCatalog(queries), LabelLevel::kBodyRegion);
  const auto chest = static_cast<std::size_t>(BodyRegion::kChest);
  const auto abdomen = static_cast<std::size_t>(BodyRegion::kAbdomen);
  check.expect(r.confusion[abdomen][abdomen] == 2 && r.confusion[chest][abdomen] == 1 && r.confusion[chest][chest] == 1,
               "2x2 confusion");
  check.expect(r.recall[chest] == 0.5, "Chest recall " + fmt("%.4f", r.recall[chest]));
  check.expect(std::abs(r.precision[abdomen] - 2.0 / 3.0) < 1e-12, "Abdomen precision " + fmt("%.4f", r.precision[abdomen]));

  Rng rng(77);
  for (int t = 0; t < 100; ++t) {
    const auto n = static_cast<std::size_t>(rng.between(1, 80));
    std::vector<std::size_t> truth(n);
    std::vector<std::size_t> pred(n);
    std::vector<std::size_t> rt(n);
    std::vector<std::size_t> rp(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = rng.below(kNumOrgans);
      pred[i] = rng.below(kNumOrgans);
      rt[i] = static_cast<std::size_t>(kTaxonomy[truth[i]].body_region);
      rp[i] = static_cast<std::size_t>(kTaxonomy[pred[i]].body_region);
    }
    const auto organ = report_from_labels(LabelLevel::kOrgan, truth, pred);
    check.expect(coarsen(organ, LabelLevel::kBodyRegion).confusion ==
                     report_from_labels(LabelLevel::kBodyRegion, rt, rp).confusion,
                 "level consistency, set " + std::to_string(t));
  }

  auto ct_report = [](std::size_t hits) {
    std::vector<std::size_t> truth(10, 0);
    std::vector<std::size_t> pred(10, 1);
    std::fill_n(pred.begin(), hits, 0);
    return report_from_labels(LabelLevel::kModality, truth, pred);
  };
  auto s = summarize_across_configs({{"x", ct_report(4)}, {"y", ct_report(5)}, {"z", ct_report(7)}});
  check.expect(s.size() == 1 && s[0].median_recall == 0.5 && s[0].max_recall == 0.7, "median/max of {0.4, 0.5, 0.7}");
  s = summarize_across_configs({{"x", ct_report(4)}, {"y", ct_report(6)}});
  check.expect(s.size() == 1 && std::abs(s[0].median_recall - 0.5) < 1e-15, "median of {0.4, 0.6}");
  report("evaluator", check.ok(),
         "2x2 example Chest recall " + fmt("%.4f", r.recall[chest]) + ", Abdomen precision " +
             fmt("%.4f", r.precision[abdomen]) + "; organ->region consistency on 100 sets; median/max examples" +
             (check.ok() ? "" : "; " + check.summary()));
}

void determinism(const std::filesystem::path& work) {
  Check check;
  auto run_all = [&](const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto p = [&](const char* name) { return (dir / name).string(); };
    bool ok = cli({"synth", "--organs", "liver,lung,brain,prostate", "--dim", "32", "--noise", "0.05", "--seed", "3",
                   "--out", p("db.embv"), "--out-queries", p("q.embv")}) == kExitOk;
    for (const char* kind : {"exact", "lsh", "hnsw"}) {
      ok = ok && cli({"build", "--index", kind, "--seed", "3", "--in", p("db.embv"), "--out",
                      (dir / (std::string(kind) + ".idx")).string()}) == kExitOk;
    }
    ok = ok && cli({"retrieve", "--index-kind", "hnsw", "--index-file", p("hnsw.idx"), "--db", p("db.embv"),
                    "--queries", p("q.embv"), "--sampling", "random:5", "--seed", "9", "--out", p("pred.tsv")}) ==
                   kExitOk;
    ok = ok && cli({"retrieve", "--index-kind", "lsh", "--db", p("db.embv"), "--queries", p("q.embv"), "--sampling",
                    "slicewise", "--out", p("sw.tsv")}) == kExitOk;
    ok = ok && cli({"evaluate", "--predictions", p("pred.tsv"), "--db", p("db.embv"), "--queries", p("q.embv"),
                    "--out-dir", p("reports")}) == kExitOk;
    std::ofstream(dir / "grid.json") << R"({"seed": 2,
      "embeddings": [{"name": "e", "db": "db.embv", "queries": "q.embv"}],
      "indexes": [{"kind": "exact"}, {"kind": "lsh", "bits": 128}, {"kind": "hnsw", "M": 8}],
      "sampling": ["all", "random:3", "step:2", "slicewise"], "weightings": ["uniform", "gaussian"]})";
    ok = ok && cli({"grid", "--config", p("grid.json"), "--out-dir", p("grid_out"), "--jobs", "2"}) == kExitOk;
    return ok;
  };
  const bool ran = run_all(work / "det_a") && run_all(work / "det_b");
  check.expect(ran, "a command failed");
  std::size_t files = 0;
  if (ran) {
    for (const auto& e : std::filesystem::recursive_directory_iterator(work / "det_a")) {
      if (!e.is_regular_file()) continue;
      ++files;
      const auto rel = std::filesystem::relative(e.path(), work / "det_a");
      check.expect(read_all(e.path()) == read_all(work / "det_b" / rel), rel.string() + " differs");
    }
  }
  report("determinism", check.ok(),
         "synth, build x3, retrieve x2, evaluate and grid rerun: " + std::to_string(files) +
             " output files byte-identical" + (check.ok() ? "" : "; " + check.summary()));
}

}  // namespace

int main() {
  const auto work = std::filesystem::temp_directory_path() / ("volsearch_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(work);
  try {
    const auto fidelity = make_fidelity();
    hnsw_fidelity(fidelity);
    lsh_fidelity(fidelity);
    lsh_angle_law();
    aggregation_oracle();
    gaussian_weighting();
    sampler_arithmetic();
    end_to_end(work);
    interchange();
    evaluator();
    determinism(work);
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance: unexpected exception: %s\n", e.what());
    ++failures;
  }
  std::filesystem::remove_all(work);
  std::printf("%d failing criteria\n", failures);
  return failures == 0 ? 0 : 1;
}
