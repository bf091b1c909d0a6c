// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <iostream>

#include "promap/pipelines.hpp"
#include "test_support.hpp"

namespace promap {
namespace {

/// Exhaustive minimum-cut partitioner for tiny graphs: the best assignment
/// whose blocks all fit (1 + eps) * c(V') / k.
PartitionerHandle exhaustive_partitioner() {
  return {"exhaustive", [](const Graph& g, int k, double eps) {
            const double limit = (1.0 + eps) * static_cast<double>(g.total_vertex_weight()) / k;
            std::uint64_t total = 1;
            for (VertexId v = 0; v < g.n(); ++v) total *= static_cast<std::uint64_t>(k);
            std::vector<BlockId> a(static_cast<std::size_t>(g.n())), best;
            Weight best_cut = -1;
            for (std::uint64_t code = 0; code < total; ++code) {
              std::uint64_t x = code;
              std::vector<Weight> w(static_cast<std::size_t>(k), 0);
              for (VertexId v = 0; v < g.n(); ++v, x /= k) {
                a[v] = static_cast<BlockId>(x % k);
                w[a[v]] += g.vertex_weight(v);
              }
              if (std::any_of(w.begin(), w.end(), [&](Weight b) { return static_cast<double>(b) > limit; })) continue;
              const Weight cut = edge_cut(g, a);
              if (best_cut < 0 || cut < best_cut) {
                best_cut = cut;
                best = a;
              }
            }
            return best;
          }};
}

/// Minimum balanced bisection cut of a unit-weight graph by Gray-code enumeration.
Weight min_bisection_cut(const Graph& g) {
  const VertexId n = g.n();
  std::vector<BlockId> side(static_cast<std::size_t>(n), 0);
  Weight cut = 0;
  VertexId ones = 0;
  Weight best = -1;
  const double limit = 1.03 * n / 2.0;
  for (std::uint64_t i = 1; i < (std::uint64_t{1} << n); ++i) {
    const auto v = static_cast<VertexId>(std::countr_zero(i));
    for (EdgeId e = g.first_edge(v); e < g.end_edge(v); ++e) {
      cut += side[g.target(e)] == side[v] ? g.edge_weight(e) : -g.edge_weight(e);
    }
    ones += side[v] == 0 ? 1 : -1;
    side[v] ^= 1;
    if (ones <= limit && n - ones <= limit && (best < 0 || cut < best)) best = cut;
  }
  return best;
}

TEST(Multisection, DegenerateHierarchy) {
  const Graph g = gen_grid(3, 3);
  const Topology t({1, 1}, {1, 10});
  const auto r = hierarchical_multisection(g, t, 0.03, internal_partitioner());
  EXPECT_EQ(total_cost(g, t, r.mapping), 0);
  for (VertexId v = 0; v < g.n(); ++v) EXPECT_EQ(r.mapping[v], 0);
}

TEST(Multisection, GridWithExhaustivePartitioner) {
  const Graph g = gen_grid(4, 4);
  const Topology t({2, 2}, {1, 10});
  const auto r = hierarchical_multisection(g, t, 0.03, exhaustive_partitioner());
  ASSERT_TRUE(r.all_within_budget());
  const BalanceSpec balance = BalanceSpec::make(0.03, 16, 4);
  for (BlockId b = 0; b < 4; ++b) EXPECT_TRUE(balance.fits(r.mapping.block_weight(b)));
  // The top split decides the level-2 digit: the two halves use {0,1} and {2,3}.
  ASSERT_EQ(r.calls.size(), 3u);
  const Graph& top_graph = g;
  std::vector<BlockId> top_part(16);
  for (VertexId v = 0; v < 16; ++v) top_part[v] = r.mapping[v] / 2;
  EXPECT_EQ(edge_cut(top_graph, top_part), 4);
  // Optimal 4-way split of a 4x4 grid into quadrants cuts 8 edges; 4 of them cross the top split.
  EXPECT_EQ(total_cost(g, t, r.mapping), 2 * (4 * 10 + 4 * 1));
}

TEST(Multisection, DepthBookkeeping) {
  const Graph g = gen_grid(8, 8);
  const Topology t({2, 2, 2}, {1, 10, 100});
  const auto r = hierarchical_multisection(g, t, 0.03, internal_partitioner());
  ASSERT_EQ(r.calls.size(), 7u);
  EXPECT_EQ(r.calls[0].level, 3);
  EXPECT_TRUE(r.calls[0].identifier.empty());
  EXPECT_DOUBLE_EQ(r.calls[0].epsilon, adaptive_imbalance(0.03, 64, 64, 8, 8, 3));
  for (std::size_t i = 1; i < r.calls.size(); ++i) {
    EXPECT_EQ(static_cast<int>(r.calls[i].identifier.size()), 3 - r.calls[i].level);
    EXPECT_EQ(r.calls[i].epsilon, adaptive_imbalance(0.03, 64, r.calls[i].sub_weight, 8,
                                                     t.blocks_below(r.calls[i].level), r.calls[i].level));
  }
}

TEST(Multisection, PartitionerFailureCarriesIdentifier) {
  int calls = 0;
  const PartitionerHandle failing{"flaky", [&calls](const Graph& g, int k, double eps) {
                                    if (++calls == 2) throw std::runtime_error("boom");
                                    return internal_partition(g, k, eps);
                                  }};
  try {
    hierarchical_multisection(gen_grid(4, 4), Topology({2, 2}, {1, 10}), 0.03, failing);
    FAIL();
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("[0]"), std::string::npos) << what;
    EXPECT_NE(what.find("boom"), std::string::npos) << what;
  }
}

TEST(Multisection, SiblingsGetConsecutiveIds) {
  const Graph g = gen_grid(16, 16);
  const Topology t({4, 2, 2}, {1, 10, 100});
  const auto r = hierarchical_multisection(g, t, 0.03, internal_partitioner());
  // Vertices that share a level-1 parent (same identifier prefix) land within a window of a_1 ids.
  for (const auto& call : r.calls) {
    if (call.level != 1) continue;
    std::vector<int> id = call.identifier;
    id.push_back(0);
    const BlockId first = t.calc_id(id);
    id.back() = 3;
    EXPECT_EQ(t.calc_id(id) - first, 3);
  }
}

TEST(InternalPartitioner, TrivialAndBridgedCliques) {
  const Graph g = gen_grid(3, 3);
  EXPECT_EQ(internal_partition(g, 1, 0.03), std::vector<BlockId>(9, 0));
  testing::Edges edges;
  for (VertexId base : {0, 4}) {
    for (VertexId u = 0; u < 4; ++u) {
      for (VertexId v = u + 1; v < 4; ++v) edges.emplace_back(base + u, base + v, 1);
    }
  }
  edges.emplace_back(3, 4, 1);
  const Graph bridged = Graph::from_edges(8, edges);
  EXPECT_EQ(edge_cut(bridged, internal_partition(bridged, 2, 0.03)), 1);
}

TEST(InternalPartitioner, CloseToOptimalBisection) {
  std::mt19937_64 rng(41);
  int within = 0;
  constexpr int kTrials = 10;
  for (int trial = 0; trial < kTrials; ++trial) {
    const Graph g = testing::random_graph(rng, 24, 0.15, 1, 1);
    PartitionerConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto part = internal_partition(g, 2, 0.03, cfg);
    const Mapping m(g, 2, part);
    EXPECT_TRUE(BalanceSpec::make(0.03, 24, 2).fits(m.max_block_weight()));
    const Weight optimum = min_bisection_cut(g);
    if (static_cast<double>(edge_cut(g, part)) <= 1.5 * static_cast<double>(optimum)) ++within;
  }
  std::cout << "[ report ] bisection cut within 1.5x of optimum: " << within << "/" << kTrials << '\n';
  EXPECT_GE(within, kTrials / 2);
}

TEST(GreedyGrowing, CoversAllVerticesWithNonemptyBlocks) {
  const Graph g = gen_grid(10, 10);
  const auto part = greedy_graph_growing(g, 4);
  const Mapping m(g, 4, part);
  for (BlockId b = 0; b < 4; ++b) EXPECT_GT(m.block_weight(b), 15);
  // Disconnected input: leftovers still assigned.
  const Graph scattered = Graph::from_edges(10, {{0, 1, 1}});
  const auto p2 = greedy_graph_growing(scattered, 3);
  for (const BlockId b : p2) EXPECT_TRUE(b >= 0 && b < 3);
}

TEST(Integrated, SmallGraphIsSingleLevel) {
  const Graph g = gen_grid(8, 8);
  const auto r = integrated_map(g, Topology({2, 2}, {1, 10}), 0.03);
  EXPECT_EQ(r.levels, 1u);
  EXPECT_TRUE(r.balanced);
}

TEST(Integrated, GridBalancedAndNoWorseThanInitial) {
  const Graph g = gen_grid(64, 64);
  const Topology t = Topology::parse("2:2:2", "1:10:100");
  const auto refined = integrated_map(g, t, 0.03);
  IntegratedConfig off;
  off.refine = false;
  const auto unrefined = integrated_map(g, t, 0.03, off);
  EXPECT_TRUE(refined.balanced);
  EXPECT_GT(refined.levels, 1u);
  EXPECT_EQ(unrefined.cost, unrefined.initial_cost);
  EXPECT_EQ(refined.initial_cost, unrefined.initial_cost);
  EXPECT_LE(refined.cost, unrefined.cost);
  EXPECT_EQ(refined.cost, total_cost(g, t, refined.mapping));
}

TEST(Integrated, FlatTopologyComparableToMultisection) {
  const Graph g = gen_rgg(2000, 0.8, 5);
  const Topology t = Topology::flat(4);
  const auto im = integrated_map(g, t, 0.03);
  const auto hm = hierarchical_multisection(g, t, 0.03, internal_partitioner()).mapping;
  EXPECT_TRUE(im.balanced);
  const double im_cut = static_cast<double>(im.cost) / 2;
  const double hm_cut = static_cast<double>(edge_cut(g, hm.assignment()));
  EXPECT_EQ(static_cast<Cost>(im_cut), edge_cut(g, im.mapping.assignment()));
  EXPECT_LE(im_cut, 2.0 * hm_cut);
  EXPECT_LE(hm_cut, 2.0 * im_cut);
}

TEST(Pipelines, DeterministicSingleThreaded) {
  const Graph g = gen_rgg(1500, 0.7, 8);
  const Topology t = Topology::parse("2:3:2", "1:10:100");
  IntegratedConfig cfg;
  cfg.seed = 17;
  EXPECT_EQ(integrated_map(g, t, 0.03, cfg).mapping, integrated_map(g, t, 0.03, cfg).mapping);
  EXPECT_EQ(hierarchical_multisection(g, t, 0.03, internal_partitioner()).mapping,
            hierarchical_multisection(g, t, 0.03, internal_partitioner()).mapping);
}

TEST(BruteForce, PathOfTwo) {
  const Graph g = gen_grid(1, 2);
  const Topology t = Topology::flat(2);
  const auto r = brute_force_map(g, t, BalanceSpec::make(0.0, 2, 2));
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.cost, 2);
}

TEST(BruteForce, NoWorseThanPipelinesAndSymmetric) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = testing::random_graph(rng, 8, 0.35, 5, 1);
    const Topology t({2, 2}, {1, 10});
    const BalanceSpec balance = BalanceSpec::make(0.3, g.total_vertex_weight(), 4);
    const auto exact = brute_force_map(g, t, balance);
    ASSERT_TRUE(exact.feasible);
    EXPECT_EQ(exact.cost, testing::oracle_cost(g, t, exact.mapping.assignment()));
    const auto im = integrated_map(g, t, 0.3);
    if (im.balanced) EXPECT_LE(exact.cost, im.cost);
    // Swapping the two level-1 siblings is another optimum.
    std::vector<BlockId> swapped(exact.mapping.assignment().begin(), exact.mapping.assignment().end());
    for (auto& b : swapped) b ^= 1;
    EXPECT_EQ(total_cost(g, t, Mapping(g, 4, swapped)), exact.cost);
  }
}

TEST(BruteForce, RejectsLargeInstances) {
  const Graph g = gen_grid(5, 5);
  EXPECT_THROW(brute_force_map(g, Topology::flat(4), BalanceSpec::make(0.03, 25, 4)), std::invalid_argument);
}

}  // namespace
}  // namespace promap
