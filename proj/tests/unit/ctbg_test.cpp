/*
 * Copyright 2026 The tgrec Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include "tgrec/ctbg.hpp"

namespace tgrec {
namespace {

std::vector<Interaction> random_interactions(std::mt19937_64& rng, int users, int items, int n) {
  std::uniform_int_distribution<int> u(0, users - 1);
  std::uniform_int_distribution<int> i(0, items - 1);
  std::uniform_int_distribution<int> t(0, 50);  // coarse so that ties occur
  std::vector<Interaction> out;
  for (int k = 0; k < n; ++k) out.push_back({u(rng), i(rng), static_cast<double>(t(rng))});
  return out;
}

TEST(Ctbg, SingleEdge) {
  const std::vector<Interaction> edges = {{0, 0, 1.0}};
  const auto g = build_graph(edges);
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_EQ(g.num_users(), 1);
  EXPECT_EQ(g.num_items(), 1);
  const auto adj = g.adjacency(NodeRef::user(0));
  ASSERT_EQ(adj.size(), 1u);
  EXPECT_EQ(adj[0], (Neighbor{0, 1.0}));
}

TEST(Ctbg, AdjacencySortedByTime) {
  const std::vector<Interaction> edges = {{0, 0, 3.0}, {0, 1, 1.0}};
  const auto g = build_graph(edges);
  const auto adj = g.adjacency(NodeRef::user(0));
  ASSERT_EQ(adj.size(), 2u);
  EXPECT_EQ(adj[0], (Neighbor{1, 1.0}));
  EXPECT_EQ(adj[1], (Neighbor{0, 3.0}));
}

TEST(Ctbg, TiesKeepInputOrder) {
  const std::vector<Interaction> edges = {{0, 2, 5.0}, {0, 0, 5.0}, {0, 1, 5.0}};
  const auto g = build_graph(edges);
  const auto adj = g.adjacency(NodeRef::user(0));
  ASSERT_EQ(adj.size(), 3u);
  EXPECT_EQ(adj[0].id, 2);
  EXPECT_EQ(adj[1].id, 0);
  EXPECT_EQ(adj[2].id, 1);
}

TEST(Ctbg, DuplicateTripletsAreDistinctEdges) {
  const std::vector<Interaction> edges = {{0, 0, 1.0}, {0, 0, 1.0}};
  const auto g = build_graph(edges);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.adjacency(NodeRef::item(0)).size(), 2u);
}

TEST(Ctbg, BuildRejectsBadInput) {
  EXPECT_THROW(build_graph(std::vector<Interaction>{}), std::invalid_argument);
  const std::vector<Interaction> bad_user = {{3, 0, 1.0}};
  EXPECT_THROW(build_graph(bad_user, 2, 2), std::invalid_argument);
  const std::vector<Interaction> bad_item = {{0, -1, 1.0}};
  EXPECT_THROW(build_graph(bad_item, 2, 2), std::invalid_argument);
  const std::vector<Interaction> negative = {{0, 0, -1.0}};
  EXPECT_THROW(build_graph(negative, 1, 1), std::invalid_argument);
  const std::vector<Interaction> nan = {{0, 0, std::nan("")}};
  EXPECT_THROW(build_graph(nan, 1, 1), std::invalid_argument);
}

TEST(Ctbg, ExplicitCountsAllowIsolatedNodes) {
  const std::vector<Interaction> edges = {{0, 0, 1.0}};
  const auto g = build_graph(edges, 3, 4);
  EXPECT_EQ(g.num_users(), 3);
  EXPECT_EQ(g.num_items(), 4);
  EXPECT_TRUE(g.adjacency(NodeRef::user(2)).empty());
  EXPECT_THROW(g.adjacency(NodeRef::user(3)), std::out_of_range);
}

TEST(Ctbg, NeighborsBeforeIsStrict) {
  const std::vector<Interaction> edges = {{0, 0, 1.0}, {0, 1, 3.0}};
  const auto g = build_graph(edges);
  const auto before = g.neighbors_before(NodeRef::user(0), 3.0);
  ASSERT_EQ(before.size(), 1u);
  EXPECT_EQ(before[0], (Neighbor{0, 1.0}));
  EXPECT_TRUE(g.neighbors_before(NodeRef::user(0), 0.5).empty());
}

TEST(Ctbg, NeighborsBeforeItemSide) {
  const std::vector<Interaction> edges = {{0, 0, 1.0}, {0, 1, 3.0}};
  const auto g = build_graph(edges);
  const auto before = g.neighbors_before(NodeRef::item(0), 2.0);
  ASSERT_EQ(before.size(), 1u);
  EXPECT_EQ(before[0], (Neighbor{0, 1.0}));
}

TEST(Ctbg, NeighborsBeforeUnknownNodeThrows) {
  const std::vector<Interaction> edges = {{0, 0, 1.0}};
  const auto g = build_graph(edges);
  EXPECT_THROW(g.neighbors_before(NodeRef::item(5), 1.0), std::out_of_range);
}

TEST(Ctbg, FlatteningRecoversInputMultiset) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto edges = random_interactions(rng, 5, 6, 40);
    const auto g = build_graph(edges, 5, 6);
    std::multiset<std::tuple<int, int, double>> want;
    std::multiset<std::tuple<int, int, double>> from_users;
    std::multiset<std::tuple<int, int, double>> from_items;
    for (const auto& e : edges) want.insert({e.user, e.item, e.timestamp});
    for (int u = 0; u < 5; ++u) {
      for (const auto& n : g.adjacency(NodeRef::user(u))) from_users.insert({u, n.id, n.timestamp});
    }
    for (int i = 0; i < 6; ++i) {
      for (const auto& n : g.adjacency(NodeRef::item(i))) from_items.insert({n.id, i, n.timestamp});
    }
    EXPECT_EQ(from_users, want);
    EXPECT_EQ(from_items, want);
  }
}

TEST(Ctbg, AdjacencyNonDecreasingInTime) {
  std::mt19937_64 rng(8);
  const auto edges = random_interactions(rng, 4, 4, 60);
  const auto g = build_graph(edges, 4, 4);
  for (int u = 0; u < 4; ++u) {
    const auto adj = g.adjacency(NodeRef::user(u));
    EXPECT_TRUE(std::is_sorted(adj.begin(), adj.end(),
                               [](const Neighbor& a, const Neighbor& b) { return a.timestamp < b.timestamp; }));
  }
}

TEST(Sampler, SinglePoolIsPaddedWithRepeats) {
  const std::vector<Interaction> edges = {{0, 0, 1.0}, {0, 1, 9.0}};
  const auto g = build_graph(edges);
  const auto s = sample_neighbors(g, NodeRef::user(0), 5.0, 5, 42);
  ASSERT_EQ(s.size(), 5u);
  for (const auto& n : s) {
    EXPECT_EQ(n.id, 0);
    EXPECT_EQ(n.timestamp, 1.0);
    EXPECT_EQ(n.position, 0);
  }
}

TEST(Sampler, EmptyPoolGivesEmptySample) {
  const std::vector<Interaction> edges = {{0, 0, 1.0}};
  const auto g = build_graph(edges);
  EXPECT_TRUE(sample_neighbors(g, NodeRef::user(0), 1.0, 3, 1).empty());
  EXPECT_THROW(sample_neighbors(g, NodeRef::user(0), 1.0, 0, 1), std::invalid_argument);
}

TEST(Sampler, Deterministic) {
  std::mt19937_64 rng(3);
  const auto edges = random_interactions(rng, 3, 10, 80);
  const auto g = build_graph(edges, 3, 10);
  for (int u = 0; u < 3; ++u) {
    EXPECT_EQ(sample_neighbors(g, NodeRef::user(u), 30.0, 4, 99),
              sample_neighbors(g, NodeRef::user(u), 30.0, 4, 99));
  }
}

TEST(Sampler, DrawIsSubsetOfPoolByEnumeration) {
  const std::vector<Interaction> edges = {{0, 0, 1.0}, {0, 1, 2.0}, {0, 2, 3.0}};
  const auto g = build_graph(edges);
  // Every 2-subset of the pool, listed by hand.
  const std::set<std::set<std::pair<int, double>>> subsets = {
      {{0, 1.0}, {1, 2.0}}, {{0, 1.0}, {2, 3.0}}, {{1, 2.0}, {2, 3.0}}};
  for (uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = sample_neighbors(g, NodeRef::user(0), 10.0, 2, seed);
    ASSERT_EQ(s.size(), 2u);
    std::set<std::pair<int, double>> got;
    for (const auto& n : s) got.insert({n.id, n.timestamp});
    EXPECT_TRUE(subsets.count(got)) << "seed " << seed;
  }
}

TEST(Sampler, PositionsIndexTheHistory) {
  std::mt19937_64 rng(4);
  const auto edges = random_interactions(rng, 2, 20, 60);
  const auto g = build_graph(edges, 2, 20);
  for (int u = 0; u < 2; ++u) {
    const auto pool = g.neighbors_before(NodeRef::user(u), 40.0);
    for (const auto& n : sample_neighbors(g, NodeRef::user(u), 40.0, 6, 5)) {
      ASSERT_GE(n.position, 0);
      ASSERT_LT(static_cast<size_t>(n.position), pool.size());
      EXPECT_EQ(pool[static_cast<size_t>(n.position)].id, n.id);
      EXPECT_EQ(pool[static_cast<size_t>(n.position)].timestamp, n.timestamp);
    }
  }
}

TEST(Sampler, UniformInclusionFrequency) {
  // Ten-edge pool, three draws: each edge is included with probability 0.3.
  std::vector<Interaction> edges;
  for (int k = 0; k < 10; ++k) edges.push_back({0, k, static_cast<double>(k + 1)});
  const auto g = build_graph(edges);
  const int trials = 3000;
  std::vector<int> hits(10, 0);
  for (int s = 0; s < trials; ++s) {
    for (const auto& n : sample_neighbors(g, NodeRef::user(0), 100.0, 3, static_cast<uint64_t>(s))) {
      ++hits[static_cast<size_t>(n.id)];
    }
  }
  const double mean = trials * 0.3;
  const double sd = std::sqrt(trials * 0.3 * 0.7);
  for (int h : hits) EXPECT_NEAR(h, mean, 4.0 * sd);
}

TEST(SamplerProperty, AllSampledTimesPrecedeQuery) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto edges = random_interactions(rng, 4, 8, 50);
    const auto g = build_graph(edges, 4, 8);
    const double t = std::uniform_real_distribution<double>(0.0, 55.0)(rng);
    for (int u = 0; u < 4; ++u) {
      for (const auto& n : sample_neighbors(g, NodeRef::user(u), t, 5, rng())) {
        EXPECT_LT(n.timestamp, t);
      }
    }
    for (int i = 0; i < 8; ++i) {
      for (const auto& n : sample_neighbors(g, NodeRef::item(i), t, 5, 17)) EXPECT_LT(n.timestamp, t);
    }
  }
}

TEST(SamplerProperty, FutureEdgesChangeNothing) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto edges = random_interactions(rng, 4, 8, 50);
    const double t = 25.5;
    const auto before = build_graph(edges, 4, 8);
    std::uniform_int_distribution<int> u(0, 3);
    std::uniform_int_distribution<int> i(0, 7);
    std::uniform_real_distribution<double> later(t, t + 40.0);
    for (int k = 0; k < 30; ++k) edges.push_back({u(rng), i(rng), later(rng)});
    std::shuffle(edges.begin(), edges.end(), rng);
    const auto after = build_graph(edges, 4, 8);
    for (int n = 0; n < 4; ++n) {
      const auto a = before.neighbors_before(NodeRef::user(n), t);
      const auto b = after.neighbors_before(NodeRef::user(n), t);
      // Same multiset; the order of equal-time edges may follow the shuffled input.
      std::multiset<std::pair<double, int>> ma;
      std::multiset<std::pair<double, int>> mb;
      for (const auto& x : a) ma.insert({x.timestamp, x.id});
      for (const auto& x : b) mb.insert({x.timestamp, x.id});
      EXPECT_EQ(ma, mb);
    }
  }
}

TEST(SamplerProperty, AppendedFutureEdgesLeaveSamplesIdentical) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    auto edges = random_interactions(rng, 4, 8, 50);
    const double t = 25.5;
    const auto before = build_graph(edges, 4, 8);
    for (int k = 0; k < 30; ++k) edges.push_back({k % 4, k % 8, t + k});
    const auto after = build_graph(edges, 4, 8);
    for (int n = 0; n < 4; ++n) {
      EXPECT_EQ(sample_neighbors(before, NodeRef::user(n), t, 6, 77),
                sample_neighbors(after, NodeRef::user(n), t, 6, 77));
    }
    for (int n = 0; n < 8; ++n) {
      EXPECT_EQ(sample_neighbors(before, NodeRef::item(n), t, 3, 78),
                sample_neighbors(after, NodeRef::item(n), t, 3, 78));
    }
  }
}

TEST(Split, ExactRatios) {
  std::vector<Interaction> edges;
  for (int k = 1; k <= 10; ++k) edges.push_back({0, k - 1, static_cast<double>(k)});
  const auto s = chronological_split(edges);
  ASSERT_EQ(s.train.size(), 8u);
  ASSERT_EQ(s.valid.size(), 1u);
  ASSERT_EQ(s.test.size(), 1u);
  EXPECT_EQ(s.train.front().timestamp, 1.0);
  EXPECT_EQ(s.train.back().timestamp, 8.0);
  EXPECT_EQ(s.valid[0].timestamp, 9.0);
  EXPECT_EQ(s.test[0].timestamp, 10.0);
  EXPECT_EQ(s.train_end, 8.0);
  EXPECT_EQ(s.valid_end, 9.0);
}

TEST(Split, FloorSizes) {
  std::vector<Interaction> edges;
  for (int k = 0; k < 5; ++k) edges.push_back({0, k, static_cast<double>(k)});
  const auto s = chronological_split(edges);
  EXPECT_EQ(s.train.size(), 4u);
  EXPECT_EQ(s.valid.size(), 0u);
  EXPECT_EQ(s.test.size(), 1u);
}

TEST(Split, ShuffledInputMatchesSortThenSplit) {
  std::vector<Interaction> sorted;
  for (int k = 1; k <= 10; ++k) sorted.push_back({k % 3, k, static_cast<double>(k)});
  auto shuffled = sorted;
  std::mt19937_64 rng(5);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto a = chronological_split(sorted);
  const auto b = chronological_split(shuffled);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.valid, b.valid);
  EXPECT_EQ(a.test, b.test);
}

TEST(Split, RejectsTinyInputAndBadRatios) {
  const std::vector<Interaction> two = {{0, 0, 1.0}, {0, 1, 2.0}};
  EXPECT_THROW(chronological_split(two), std::invalid_argument);
  std::vector<Interaction> ten;
  for (int k = 0; k < 10; ++k) ten.push_back({0, k, static_cast<double>(k)});
  EXPECT_THROW(chronological_split(ten, {0.5, 0.1, 0.1}), std::invalid_argument);
}

TEST(SplitProperty, ConcatenationIsSortedAndComplete) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto edges = random_interactions(rng, 5, 5, 3 + trial * 7);
    const auto s = chronological_split(edges);
    std::vector<Interaction> all = s.train;
    all.insert(all.end(), s.valid.begin(), s.valid.end());
    all.insert(all.end(), s.test.begin(), s.test.end());
    EXPECT_EQ(all.size(), edges.size());
    EXPECT_TRUE(std::is_sorted(all.begin(), all.end(), [](const Interaction& a, const Interaction& b) {
      return a.timestamp < b.timestamp;
    }));
    const size_t n = edges.size();
    EXPECT_EQ(s.train.size(), static_cast<size_t>(std::floor(0.8 * static_cast<double>(n))));
    EXPECT_EQ(s.valid.size(), static_cast<size_t>(std::floor(0.1 * static_cast<double>(n))));
  }
}

}  // namespace
}  // namespace tgrec
