// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "promap/refinement.hpp"
#include "test_support.hpp"

namespace promap {
namespace {

/// Slot by scanning the published label list [+, 0, -1..-10, -20..-100, -200..-1000, X].
int oracle_slot(Cost g) {
  std::vector<Cost> labels{0};
  for (Cost x = -1; x >= -10; --x) labels.push_back(x);
  for (Cost x = -20; x >= -100; x -= 10) labels.push_back(x);
  for (Cost x = -200; x >= -1000; x -= 100) labels.push_back(x);
  if (g > 0) return 0;
  if (g <= -1000) return 30;
  for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
    if (labels[i] >= g && g > labels[i + 1]) return static_cast<int>(i) + 1;
  }
  return -1;
}

double sigma_for(const BalanceSpec& b, const RefinementConfig& cfg) { return b.l_max - cfg.sigma_fraction * b.l_max; }

Graph path(VertexId n) { return gen_grid(1, n); }

TEST(BucketList, SlotsMatchPublishedBoundaries) {
  for (Cost g = -5000; g <= 5000; ++g) ASSERT_EQ(BucketList::slot_of(g), oracle_slot(g)) << g;
}

TEST(BucketList, ExampleGains) {
  EXPECT_EQ(BucketList::slot_of(5), 0);
  EXPECT_EQ(BucketList::slot_of(-15), 11);
  EXPECT_EQ(BucketList::slot_label(11), -10);
  EXPECT_EQ(BucketList::slot_of(-2000), 30);
  EXPECT_EQ(BucketList::slot_of(-1000), 30);
  BucketList lists(1, 2);
  const std::vector<BucketList::Entry> entries{{0, -2000, 7}, {0, -15, 3}, {0, 5, 9}};
  lists.build(entries);
  const auto order = lists.list(0);
  EXPECT_EQ(std::vector<VertexId>(order.begin(), order.end()), (std::vector<VertexId>{9, 3, 7}));
}

TEST(BucketList, MiniBucketsByVertexModRho) {
  BucketList lists(2, 3);
  const std::vector<BucketList::Entry> entries{{1, 0, 4}, {1, 0, 7}, {1, 0, 5}, {0, 0, 3}};
  lists.build(entries);
  const auto mini1 = lists.bucket(1, 1, 1);
  EXPECT_EQ(std::vector<VertexId>(mini1.begin(), mini1.end()), (std::vector<VertexId>{4, 7}));
  EXPECT_EQ(lists.bucket(1, 1, 2).size(), 1u);
  EXPECT_EQ(lists.list(0).size(), 1u);
}

TEST(LabelPropagation, AllLockedProducesNothing) {
  const Graph g = path(4);
  const Mapping m(g, 2, {0, 1, 0, 1});
  const BlockConnectivity conn(g, m);
  const std::vector<std::uint8_t> locked(4, 1);
  EXPECT_TRUE(label_propagation_pass(g, Topology::flat(2), m, conn, locked, {}).moves.empty());
}

TEST(LabelPropagation, IsolatedPositiveMove) {
  // Vertex 2 sits alone in block 0 next to 3 in block 1; both would like to
  // join the other, the lower id wins the ordering and moves.
  const Graph g = Graph::from_edges(4, {{0, 1, 1}, {2, 3, 1}});
  const Mapping m(g, 2, {0, 0, 0, 1});
  const BlockConnectivity conn(g, m);
  const auto p = label_propagation_pass(g, Topology::flat(2), m, conn, {}, {});
  ASSERT_EQ(p.moves.size(), 1u);
  EXPECT_EQ(p.moves[0].vertex, 2);
  EXPECT_EQ(p.moves[0].to, 1);
}

TEST(LabelPropagation, SecondFilterRejectsLaterOfTwo) {
  // a=0 in block 0, b=1 in block 1, heavy edge a-b; each keeps one lighter
  // anchor (2 and 3) in its own block. Both have gain +1 to the other block.
  const Graph g = Graph::from_edges(4, {{0, 1, 3}, {0, 2, 2}, {1, 3, 2}});
  const Mapping m(g, 2, {0, 1, 0, 1});
  const BlockConnectivity conn(g, m);
  const auto p = label_propagation_pass(g, Topology::flat(2), m, conn, {}, {});
  EXPECT_TRUE(p.candidates[0]);
  EXPECT_TRUE(p.candidates[1]);
  EXPECT_EQ(p.gains[0], 1);
  EXPECT_EQ(p.gains[1], 1);
  ASSERT_EQ(p.moves.size(), 1u);
  EXPECT_EQ(p.moves[0].vertex, 0);
  EXPECT_EQ(p.locked, (std::vector<std::uint8_t>{1, 0, 0, 0}));
}

TEST(LabelPropagation, JetFilterAdmitsMildlyNegativeMoves) {
  // Vertex 1 in block 0 with conn 4 to block 0 and 3 to block 1: gain -1.
  const Graph g = Graph::from_edges(3, {{0, 1, 4}, {1, 2, 3}});
  const Mapping m(g, 2, {0, 0, 1});
  const BlockConnectivity conn(g, m);
  RefinementConfig cfg;
  EXPECT_FALSE(label_propagation_pass(g, Topology::flat(2), m, conn, {}, cfg).candidates[1]);
  cfg.filter = FilterMode::kJet;
  cfg.jet_c = 0.5;  // floor(0.5 * 4) = 2 > 1
  EXPECT_TRUE(label_propagation_pass(g, Topology::flat(2), m, conn, {}, cfg).candidates[1]);
}

TEST(LabelPropagation, LockAlternation) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testing::random_graph(rng, 40, 0.1);
    const Topology t = Topology::parse("2:2", "1:10");
    Mapping m(g, 4, testing::random_assignment(rng, 40, 4));
    BlockConnectivity conn(g, m);
    const auto first = label_propagation_pass(g, t, m, conn, {}, {});
    apply_moves(g, m, conn, first.moves);
    const auto second = label_propagation_pass(g, t, m, conn, first.locked, {});
    for (const auto& mv : first.moves) EXPECT_FALSE(second.candidates[mv.vertex]);
  }
}

TEST(LabelPropagation, NeverIncreasesCostWhenApproximationIsExact) {
  std::mt19937_64 rng(32);
  int exact_instances = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Graph g = testing::random_graph(rng, 30, 0.08);
    const Topology t = testing::random_topology(rng);
    Mapping m(g, t.k(), testing::random_assignment(rng, 30, t.k()));
    BlockConnectivity conn(g, m);
    const auto p = label_propagation_pass(g, t, m, conn, {}, {});
    const auto earlier = [&](VertexId u, VertexId v) {
      return p.candidates[u] && (p.gains[u] > p.gains[v] || (p.gains[u] == p.gains[v] && u < v));
    };
    bool exact = true;
    for (const auto& mv : p.moves) {
      for (const VertexId u : g.neighbors(mv.vertex)) exact = exact && !(earlier(u, mv.vertex) && !p.locked[u]);
    }
    if (!exact) continue;
    ++exact_instances;
    const Cost before = total_cost(g, t, m);
    apply_moves(g, m, conn, p.moves);
    EXPECT_LE(total_cost(g, t, m), before);
  }
  EXPECT_GT(exact_instances, 20);
}

TEST(WeakRebalance, MovesExactlyOneVertex) {
  const Graph g = path(8);
  const Mapping m(g, 2, {0, 0, 0, 0, 0, 0, 1, 1});
  const BlockConnectivity conn(g, m);
  const BalanceSpec balance = BalanceSpec::with_limit(5.0, 8, 2);
  const RefinementConfig cfg;
  const auto p = weak_rebalance(g, Topology::flat(2), m, conn, sigma_for(balance, cfg), balance, cfg);
  ASSERT_EQ(p.moves.size(), 1u);
  EXPECT_EQ(p.moves[0].vertex, 5);  // boundary vertex, gain 0
  EXPECT_EQ(p.moves[0].to, 1);
  EXPECT_FALSE(p.incomplete);
}

TEST(WeakRebalance, BalancedInputIsEmpty) {
  const Graph g = path(8);
  const Mapping m(g, 2, {0, 0, 0, 0, 1, 1, 1, 1});
  const BlockConnectivity conn(g, m);
  const BalanceSpec balance = BalanceSpec::make(0.03, 8, 2);
  const RefinementConfig cfg;
  EXPECT_TRUE(weak_rebalance(g, Topology::flat(2), m, conn, sigma_for(balance, cfg), balance, cfg).moves.empty());
  EXPECT_TRUE(strong_rebalance(g, Topology::flat(2), m, conn, sigma_for(balance, cfg), balance, cfg).moves.empty());
}

TEST(WeakRebalance, NoEligibleDestinationIsIncomplete) {
  const Graph g = path(4);
  const Mapping m(g, 2, {0, 0, 0, 1});
  const BlockConnectivity conn(g, m);
  const BalanceSpec balance = BalanceSpec::with_limit(1.0, 4, 2);
  const RefinementConfig cfg;
  const auto p = weak_rebalance(g, Topology::flat(2), m, conn, sigma_for(balance, cfg), balance, cfg);
  EXPECT_TRUE(p.incomplete);
}

TEST(StrongRebalance, RestoresBalanceInOnePass) {
  const Graph g = path(8);
  Mapping m(g, 2, {0, 0, 0, 0, 0, 0, 1, 1});
  BlockConnectivity conn(g, m);
  const BalanceSpec balance = BalanceSpec::with_limit(5.0, 8, 2);
  const RefinementConfig cfg;
  const auto p = strong_rebalance(g, Topology::flat(2), m, conn, sigma_for(balance, cfg), balance, cfg);
  EXPECT_LE(p.moves.size(), 3u);
  apply_moves(g, m, conn, p.moves);
  EXPECT_LE(static_cast<double>(max_imbalance(m)), balance.l_max);
}

TEST(StrongRebalance, TargetsNeverExceedLMax) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = testing::random_graph(rng, 40, 0.1, 9, 3);
    const int k = static_cast<int>(testing::uniform(rng, 2, 6));
    std::vector<BlockId> a(40);
    // Skewed start: most vertices in block 0.
    for (auto& b : a) b = testing::uniform(rng, 0, 2) == 0 ? static_cast<BlockId>(testing::uniform(rng, 0, k - 1)) : 0;
    Mapping m(g, k, a);
    BlockConnectivity conn(g, m);
    const BalanceSpec balance = BalanceSpec::make(0.03, g.total_vertex_weight(), k);
    const RefinementConfig cfg;
    const std::vector<Weight> before(m.block_weights().begin(), m.block_weights().end());
    const auto p = strong_rebalance(g, testing::random_topology(rng), m, conn, sigma_for(balance, cfg), balance, cfg);
    std::vector<Weight> received(static_cast<std::size_t>(k), 0);
    for (const auto& mv : p.moves) received[mv.to] += g.vertex_weight(mv.vertex);
    for (int b = 0; b < k; ++b) {
      if (received[b] > 0) EXPECT_LE(static_cast<double>(before[b] + received[b]), balance.l_max);
    }
  }
}

TEST(Refine, LocallyOptimalInputUnchanged) {
  const Graph g = path(8);
  const Mapping m(g, 2, {0, 0, 0, 0, 1, 1, 1, 1});
  BlockConnectivity conn(g, m);
  const auto r = refine(g, Topology::flat(2), m, conn, {}, BalanceSpec::make(0.03, 8, 2));
  EXPECT_TRUE(r.balanced);
  EXPECT_EQ(r.cost, 2);
}

TEST(Refine, PathSplitSixTwoGetsBalanced) {
  const Graph g = path(8);
  const Mapping m(g, 2, {0, 0, 0, 0, 0, 0, 1, 1});
  BlockConnectivity conn(g, m);
  const BalanceSpec balance = BalanceSpec::make(0.03, 8, 2);
  EXPECT_DOUBLE_EQ(balance.l_max, 4.12);
  const auto r = refine(g, Topology::flat(2), m, conn, {}, balance);
  EXPECT_TRUE(r.balanced);
  EXPECT_LE(static_cast<double>(r.mapping.max_block_weight()), balance.l_max);
  EXPECT_EQ(r.cost, total_cost(g, Topology::flat(2), r.mapping));
}

TEST(Refine, RingNeverWorseFromBalancedStarts) {
  std::vector<std::tuple<VertexId, VertexId, Weight>> edges;
  for (VertexId v = 0; v < 16; ++v) edges.emplace_back(v, (v + 1) % 16, 1);
  const Graph ring = Graph::from_edges(16, edges);
  const Topology t = Topology::flat(4);
  const BalanceSpec balance = BalanceSpec::make(0.03, 16, 4);
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<BlockId> a(16);
    for (VertexId v = 0; v < 16; ++v) a[v] = v % 4;
    std::shuffle(a.begin(), a.end(), rng);
    const Mapping m(ring, 4, a);
    BlockConnectivity conn(ring, m);
    RefinementConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto r = refine(ring, t, m, conn, cfg, balance);
    EXPECT_TRUE(r.balanced);
    EXPECT_LE(r.cost, total_cost(ring, t, m));
    // conn must describe the returned mapping.
    for (VertexId v = 0; v < 16; ++v) {
      for (BlockId b = 0; b < 4; ++b) EXPECT_EQ(conn.conn(v, b), testing::oracle_conn(ring, r.mapping.assignment(), v, b));
    }
  }
}

TEST(Config, ValidateAndSchedule) {
  RefinementConfig bad;
  bad.phi = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = {};
  bad.rho = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = {};
  bad.sigma_fraction = 1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);

  const RefinementSchedule s;
  EXPECT_EQ(s.at_level(0, 4).i_max, 12);
  EXPECT_EQ(s.at_level(3, 4).i_max, 15);
  EXPECT_EQ(s.at_level(0, 4).iw_max, 10);
  EXPECT_EQ(s.at_level(2, 4).iw_max, 2);
  EXPECT_DOUBLE_EQ(s.at_level(0, 4).sigma_fraction, 0.005);
  EXPECT_DOUBLE_EQ(s.at_level(4, 4).sigma_fraction, 0.065);
  EXPECT_DOUBLE_EQ(s.at_level(2, 4).sigma_fraction, 0.035);
}

}  // namespace
}  // namespace promap
