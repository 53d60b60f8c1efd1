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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "test_support.hpp"
#include "volsearch/exact_index.hpp"
#include "volsearch/hnsw_index.hpp"
#include "volsearch/synthgen.hpp"

using namespace volsearch;

namespace {

// Overlapping clusters; see AuditFlagsDisconnectedClusters for the
// well-separated case.
MixtureData small_mixture(std::uint64_t seed, std::size_t points = 1000, double separation = 4.0) {
  MixtureSpec spec;
  spec.cluster_separation = separation;
  spec.dim = 32;
  spec.clusters = 10;
  spec.points = points;
  spec.queries = 200;
  spec.seed = seed;
  return generate_mixture(spec);
}

HnswParams small_params(std::uint64_t seed) {
  HnswParams p = HnswParams::with_m(8);
  p.ef_construction = 64;
  p.seed = seed;
  return p;
}

}  // namespace

TEST(HnswParams, WithM) {
  const auto p = HnswParams::with_m(16);
  EXPECT_EQ(p.M, 16U);
  EXPECT_EQ(p.M0, 32U);
  EXPECT_DOUBLE_EQ(p.level_scale, 1.0 / std::log(16.0));
  EXPECT_VS_ERROR(HnswParams::with_m(1), ErrorCode::kInvalidArgument);
}

TEST(HnswInsert, FirstNodeIsEntryWithoutEdges) {
  HnswIndex g(2, HnswParams{});
  g.insert({"a", 0}, std::vector<float>{1.0F, 0.0F});
  EXPECT_EQ(g.size(), 1U);
  EXPECT_EQ(g.entry_point(), 0U);
  EXPECT_EQ(g.max_level(), g.level(0));
  for (int l = 0; l <= g.level(0); ++l) EXPECT_TRUE(g.neighbors(0, l).empty());
}

TEST(HnswInsert, TwoNodesAreMutualNeighbors) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    HnswParams p;
    p.seed = seed;
    HnswIndex g(2, p);
    g.insert({"a", 0}, std::vector<float>{1.0F, 0.0F});
    g.insert({"a", 1}, std::vector<float>{0.0F, 1.0F});
    const int shared = std::min(g.level(0), g.level(1));
    for (int l = 0; l <= shared; ++l) {
      ASSERT_EQ(g.neighbors(0, l).size(), 1U);
      ASSERT_EQ(g.neighbors(1, l).size(), 1U);
      EXPECT_EQ(g.neighbors(0, l)[0], 1U);
      EXPECT_EQ(g.neighbors(1, l)[0], 0U);
    }
  }
}

TEST(HnswInsert, Errors) {
  HnswIndex g(2, HnswParams{});
  g.insert({"a", 0}, std::vector<float>{1.0F, 0.0F});
  EXPECT_VS_ERROR(g.insert({"a", 0}, std::vector<float>{2.0F, 0.0F}), ErrorCode::kDuplicateRef);
  EXPECT_VS_ERROR(g.insert({"a", 1}, std::vector<float>{2.0F}), ErrorCode::kDimensionMismatch);
  EXPECT_EQ(g.size(), 1U);
}

TEST(HnswInsert, CapsAndNestingAfterClusteredBuild) {
  const auto mix = small_mixture(3);
  const SliceStore store(mix.database);
  const auto g = HnswIndex::build(store, small_params(3));
  const auto audit = g.audit();
  EXPECT_TRUE(audit.structurally_sound());
  EXPECT_TRUE(audit.layers_nested);
  EXPECT_TRUE(audit.degree_caps_hold);
  EXPECT_TRUE(audit.references_valid);
  // Independent re-check of the caps and references.
  for (std::size_t n = 0; n < g.size(); ++n) {
    for (int l = 0; l <= g.level(n); ++l) {
      const auto nb = g.neighbors(n, l);
      EXPECT_LE(nb.size(), l == 0 ? g.params().M0 : g.params().M);
      std::set<std::uint32_t> unique(nb.begin(), nb.end());
      EXPECT_EQ(unique.size(), nb.size());
      for (auto m : nb) {
        ASSERT_LT(m, g.size());
        EXPECT_NE(m, n);
        EXPECT_GE(g.level(m), l);
      }
    }
  }
  EXPECT_EQ(g.level(g.entry_point()), g.max_level());
}

TEST(HnswAudit, FlagsDisconnectedClusters) {
  // Keeping only the closest candidates never retains a cross-cluster link
  // once a cluster has more than M0 members, so far-apart clusters end up
  // in separate components. The audit reports this instead of failing.
  const auto mix = small_mixture(3, 1000, 20.0);
  const SliceStore store(mix.database);
  const auto g = HnswIndex::build(store, small_params(3));
  const auto audit = g.audit();
  EXPECT_TRUE(audit.structurally_sound());
  EXPECT_GT(audit.unreachable_nodes, 0U);
  EXPECT_FALSE(audit.problems.empty());
}

TEST(HnswInsert, LevelDistributionIsGeometric) {
  HnswIndex g(1, HnswParams{});
  for (std::uint32_t i = 0; i < 4000; ++i) g.insert({"v", i}, std::vector<float>{static_cast<float>(i)});
  std::size_t above = 0;
  for (std::size_t n = 0; n < g.size(); ++n) above += g.level(n) >= 1;
  // P(level >= 1) = 1/M = 1/16 -> 250 expected, sd about 15.
  EXPECT_GT(above, 180U);
  EXPECT_LT(above, 320U);
}

TEST(HnswBuild, Deterministic) {
  const auto mix = small_mixture(5, 600);
  const SliceStore store(mix.database);
  const auto a = HnswIndex::build(store, small_params(9));
  const auto b = HnswIndex::build(store, small_params(9));
  const auto c = HnswIndex::build(store, small_params(10));
  EXPECT_TRUE(a.same_graph(b));
  EXPECT_FALSE(a.same_graph(c));
}

TEST(HnswSearch, TinyGraphs) {
  HnswIndex one(2, HnswParams{});
  EXPECT_VS_ERROR(one.search(std::vector<float>{0.0F, 0.0F}, 1), ErrorCode::kEmptyDataset);
  one.insert({"a", 0}, std::vector<float>{1.0F, 1.0F});
  for (std::size_t k : {1, 3, 10}) {
    const auto hits = one.search(std::vector<float>{0.0F, 0.0F}, k);
    ASSERT_EQ(hits.size(), 1U);
    EXPECT_EQ(hits[0].ref, (SliceRef{"a", 0}));
  }
  HnswIndex two(2, HnswParams{});
  two.insert({"a", 0}, std::vector<float>{3.0F, 0.0F});
  two.insert({"a", 1}, std::vector<float>{1.0F, 0.0F});
  const auto hits = two.search(std::vector<float>{0.0F, 0.0F}, 2, 2);
  ASSERT_EQ(hits.size(), 2U);
  EXPECT_EQ(hits[0].row, 1U);
  EXPECT_DOUBLE_EQ(hits[0].distance, 1.0);
  EXPECT_EQ(hits[1].row, 0U);
  EXPECT_DOUBLE_EQ(hits[1].distance, 3.0);
  EXPECT_VS_ERROR(two.search(std::vector<float>{0.0F}, 1), ErrorCode::kDimensionMismatch);
}

TEST(HnswSearch, HitsMatchStoreAndExactDistances) {
  const auto mix = small_mixture(6);
  const SliceStore store(mix.database);
  const auto g = HnswIndex::build(store, small_params(6));
  for (const auto& q : mix.queries) {
    const auto hits = g.search(q, 5);
    ASSERT_EQ(hits.size(), 5U);
    for (std::size_t i = 0; i < hits.size(); ++i) {
      EXPECT_EQ(hits[i].ref, store.ref(hits[i].row));
      EXPECT_EQ(hits[i].distance, distance(Metric::kL2, q, store.row(hits[i].row)));
      if (i > 0) {
        EXPECT_LE(hits[i - 1].distance, hits[i].distance);
      }
    }
  }
}

TEST(HnswSearch, RecallDoesNotDropWithLargerEf) {
  const auto mix = small_mixture(7);
  const SliceStore store(mix.database);
  const auto g = HnswIndex::build(store, small_params(7));
  std::size_t r8 = 0, r64 = 0;
  for (const auto& q : mix.queries) {
    const auto truth = exact_search(store, Metric::kL2, q, 1)[0].row;
    r8 += g.search(q, 1, 8)[0].row == truth;
    r64 += g.search(q, 1, 64)[0].row == truth;
  }
  EXPECT_LE(r8, r64);
  EXPECT_GE(static_cast<double>(r64) / static_cast<double>(mix.queries.size()), 0.9);
}

TEST(HnswSearch, CosineMetric) {
  const auto mix = small_mixture(8, 400);
  const SliceStore store(mix.database);
  HnswParams p = small_params(8);
  p.metric = Metric::kCosine;
  const auto g = HnswIndex::build(store, p);
  std::size_t agree = 0;
  for (const auto& q : mix.queries) {
    agree += g.search(q, 1)[0].row == exact_search(store, Metric::kCosine, q, 1)[0].row;
  }
  EXPECT_GE(static_cast<double>(agree) / static_cast<double>(mix.queries.size()), 0.9);
}

TEST(HnswPersistence, SaveLoadRestoresGraph) {
  vstest::TempDir dir;
  const auto mix = small_mixture(9, 500);
  const SliceStore store(mix.database);
  const auto g = HnswIndex::build(store, small_params(9));
  g.save(dir / "h.idx");
  const auto back = HnswIndex::load(dir / "h.idx", store);
  EXPECT_TRUE(back.same_graph(g));
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(back.search(mix.queries[i], 3), g.search(mix.queries[i], 3));

  // Inserting after a load continues the same level sequence as the original.
  auto grown = g;
  auto grown_back = back;
  grown.insert({"extra", 0}, mix.queries[0]);
  grown_back.insert({"extra", 0}, mix.queries[0]);
  EXPECT_TRUE(grown.same_graph(grown_back));

  const auto bytes = vstest::read_text(dir / "h.idx");
  vstest::write_text(dir / "short.idx", bytes.substr(0, bytes.size() / 2));
  EXPECT_VS_ERROR(HnswIndex::load(dir / "short.idx", store), ErrorCode::kTruncated);
  vstest::write_text(dir / "magic.idx", "XXXX" + bytes.substr(4));
  EXPECT_VS_ERROR(HnswIndex::load(dir / "magic.idx", store), ErrorCode::kBadMagic);

  const auto other = small_mixture(10, 300);
  EXPECT_ANY_THROW(HnswIndex::load(dir / "h.idx", SliceStore(other.database)));
}
