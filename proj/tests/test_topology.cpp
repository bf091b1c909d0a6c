// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "promap/topology.hpp"
#include "test_support.hpp"

namespace promap {
namespace {

TEST(Topology, PeDistanceExamples) {
  const Topology t = Topology::parse("4:8:6", "1:10:100");
  EXPECT_EQ(t.k(), 192);
  EXPECT_EQ(t.pe_distance(0, 1), 1);
  EXPECT_EQ(t.pe_distance(0, 0), 0);
  EXPECT_EQ(t.pe_distance(0, 4), 10);
  EXPECT_EQ(t.pe_distance(0, 32), 100);
  EXPECT_THROW((void)t.pe_distance(0, 192), std::out_of_range);
  EXPECT_THROW((void)t.pe_distance(-1, 0), std::out_of_range);
}

TEST(Topology, DistanceMatchesDigitOracleExhaustively) {
  for (const auto& [h, d] : std::vector<std::pair<std::string, std::string>>{
           {"4:8:6", "1:10:100"}, {"2:2:2", "1:10:100"}, {"3:1:5", "2:2:7"}, {"16", "4"}, {"2:3:2:2", "1:2:3:4"}}) {
    const Topology t = Topology::parse(h, d);
    const std::vector<int> hv(t.hierarchy().begin(), t.hierarchy().end());
    const std::vector<Weight> dv(t.distances().begin(), t.distances().end());
    for (BlockId x = 0; x < t.k(); ++x) {
      for (BlockId y = 0; y < t.k(); ++y) {
        ASSERT_EQ(t.distance(x, y), testing::oracle_distance(hv, dv, x, y)) << h << " " << x << " " << y;
        ASSERT_EQ(t.distance(x, y), t.distance(y, x));
      }
    }
  }
}

TEST(Topology, CalcIdExamples) {
  const Topology t22 = Topology::parse("2:2", "1:10");
  EXPECT_EQ(t22.calc_id(std::vector<int>{0, 0}), 0);
  EXPECT_EQ(t22.calc_id(std::vector<int>{1, 0}), 2);
  const Topology t = Topology::parse("4:8:6", "1:10:100");
  EXPECT_EQ(t.calc_id(std::vector<int>{5, 7, 3}), 191);
  EXPECT_THROW((void)t.calc_id(std::vector<int>{5, 7}), std::invalid_argument);
  EXPECT_THROW((void)t.calc_id(std::vector<int>{6, 0, 0}), std::out_of_range);
}

TEST(Topology, CalcIdIsBijectiveAndSiblingsContiguous) {
  const Topology t = Topology::parse("3:2:4", "1:5:9");
  std::vector<int> seen(static_cast<std::size_t>(t.k()), 0);
  for (int top = 0; top < 4; ++top) {
    for (int mid = 0; mid < 2; ++mid) {
      std::vector<BlockId> siblings;
      for (int low = 0; low < 3; ++low) {
        const std::vector<int> id{top, mid, low};
        const BlockId pe = t.calc_id(id);
        ++seen[pe];
        siblings.push_back(pe);
        EXPECT_EQ(t.identifier_of(pe), id);
      }
      EXPECT_EQ(siblings.back() - siblings.front(), 2);
    }
  }
  for (const int s : seen) EXPECT_EQ(s, 1);
}

TEST(Topology, RejectsInvalidInput) {
  EXPECT_THROW(Topology::parse("4:8", "1:10:100"), std::invalid_argument);
  EXPECT_THROW(Topology::parse("4:0", "1:10"), std::invalid_argument);
  EXPECT_THROW(Topology::parse("4:2", "10:1"), std::invalid_argument);
  EXPECT_THROW(Topology::parse("4:2", "1:-1"), std::invalid_argument);
  EXPECT_THROW(Topology::parse("4:x", "1:2"), std::invalid_argument);
  EXPECT_THROW(Topology::parse("", ""), std::invalid_argument);
  EXPECT_THROW(Topology::parse("4", "1.5"), std::invalid_argument);
  EXPECT_NO_THROW(Topology::parse("2:2", "5:5"));
}

TEST(Topology, FlatTopology) {
  const Topology t = Topology::flat(4);
  EXPECT_EQ(t.k(), 4);
  EXPECT_EQ(t.pe_distance(1, 3), 1);
  EXPECT_EQ(t.pe_distance(2, 2), 0);
  EXPECT_THROW(Topology::flat(0), std::invalid_argument);
}

TEST(Balance, LMax) {
  const BalanceSpec b = BalanceSpec::make(0.03, 4096, 8);
  EXPECT_DOUBLE_EQ(b.l_max, 1.03 * 512);
  EXPECT_TRUE(b.fits(527));
  EXPECT_FALSE(b.fits(528));
  EXPECT_THROW(BalanceSpec::make(-0.1, 10, 2), std::invalid_argument);
}

TEST(AdaptiveImbalance, Examples) {
  EXPECT_NEAR(adaptive_imbalance(0.03, 100, 100, 4, 4, 1), 0.03, 1e-15);
  EXPECT_NEAR(adaptive_imbalance(0.03, 100, 100, 8, 8, 3), std::cbrt(1.03) - 1.0, 1e-15);
  EXPECT_NEAR(adaptive_imbalance(0.03, 100, 100, 8, 8, 3), 0.009902, 5e-7);
  // Overweight subgraph: formula goes negative, clamped.
  EXPECT_EQ(adaptive_imbalance(0.0, 100, 80, 2, 1, 1), 0.0);
  EXPECT_THROW(adaptive_imbalance(0.03, 100, 0, 2, 1, 1), std::invalid_argument);
}

TEST(AdaptiveImbalance, MaximallyLoadedSubgraphStaysWithinBudget) {
  // H = a1:a2 with d = 2 at the top. The heaviest admissible child then gets
  // eps'' from the formula, and its heaviest grandchild must still fit.
  const double eps = 0.03;
  const Weight total = 1'000'000;
  for (const auto& [a1, a2] : std::vector<std::pair<int, int>>{{2, 2}, {4, 8}, {3, 5}}) {
    const int k = a1 * a2;
    const double top = adaptive_imbalance(eps, total, total, k, k, 2);
    const double child = (1.0 + top) * static_cast<double>(total) / a2;
    const double inner = adaptive_imbalance(eps, total, static_cast<Weight>(child), k, a1, 1);
    EXPECT_GE(inner, 0.0);
    const double leaf = (1.0 + inner) * std::floor(child) / a1;
    EXPECT_LE(leaf, (1.0 + eps) * total / k * (1.0 + 1e-12));
  }
}

TEST(AdaptiveImbalance, WorstCaseCompositionOnRandomHierarchies) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const Topology t = testing::random_topology(rng, 4, 5);
    const double eps = std::uniform_real_distribution<double>(0.0, 0.2)(rng);
    const Weight total = testing::uniform(rng, 1000, 1'000'000);
    double weight = static_cast<double>(total);
    for (int level = t.levels(); level >= 1; --level) {
      const double e = adaptive_imbalance(eps, total, static_cast<Weight>(std::ceil(weight)), t.k(),
                                          t.blocks_below(level), level);
      weight = (1.0 + e) * std::ceil(weight) / t.arity(level);
    }
    EXPECT_LE(weight, (1.0 + eps) * static_cast<double>(total) / t.k() + t.levels()) << t.to_string();
  }
}

}  // namespace
}  // namespace promap
