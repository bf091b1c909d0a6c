// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sstream>

#include "promap/bench.hpp"
#include "promap/csv.hpp"
#include "promap/pipelines.hpp"

namespace promap {
namespace {

RunRecord rec(const std::string& inst, const std::string& algo, double cost, std::uint64_t seed = 0) {
  return {inst, algo, seed, cost, 0.5, true, 10};
}

std::vector<double> fractions_at(const PerformanceProfile& p, double tau) {
  for (const auto& point : p.points) {
    if (point.tau == tau) return point.fractions;
  }
  ADD_FAILURE() << "tau " << tau << " missing";
  return {};
}

TEST(Csv, EscapeAndParseBack) {
  EXPECT_EQ(csv::escape("plain"), "plain");
  EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  std::stringstream s;
  csv::write_row(s, {"x", "a,b", "line\nbreak", "q\"q", ""});
  std::vector<std::string> fields;
  ASSERT_TRUE(csv::read_row(s, fields));
  EXPECT_EQ(fields, (std::vector<std::string>{"x", "a,b", "line\nbreak", "q\"q", ""}));
  EXPECT_FALSE(csv::read_row(s, fields));
  std::istringstream bad("\"open");
  EXPECT_THROW(csv::read_row(bad, fields), std::runtime_error);
}

TEST(Bench, CountsAndAverages) {
  const std::vector<BenchInstance> instances{{"grid", gen_grid(12, 12)}, {"rgg", gen_rgg(300, 0.8, 1)}};
  const std::vector<BenchAlgorithm> algos{
      {"hm", [](const Graph& g, const Topology& t, double eps, std::uint64_t seed) {
         PartitionerConfig cfg;
         cfg.seed = seed;
         return hierarchical_multisection(g, t, eps, internal_partitioner(cfg)).mapping;
       }},
      {"im", [](const Graph& g, const Topology& t, double eps, std::uint64_t seed) {
         IntegratedConfig cfg;
         cfg.seed = seed;
         return integrated_map(g, t, eps, cfg).mapping;
       }}};
  const Topology t({2, 2}, {1, 10});
  const auto raw = run_bench(instances, t, 0.03, algos, {0, 1});
  ASSERT_EQ(raw.size(), 8u);
  for (const auto& r : raw) {
    EXPECT_GE(r.cost, 0.0);
    EXPECT_GT(r.runtime_s, 0.0);
  }
  const auto avg = average_records(raw);
  ASSERT_EQ(avg.size(), 4u);
  EXPECT_EQ(avg[0].instance, "grid");
  EXPECT_EQ(avg[0].algorithm, "hm");
  EXPECT_EQ(avg[0].seed, 2u);
  EXPECT_DOUBLE_EQ(avg[0].cost, (raw[0].cost + raw[1].cost) / 2);
  EXPECT_DOUBLE_EQ(avg[3].runtime_s, (raw[6].runtime_s + raw[7].runtime_s) / 2);
}

TEST(Bench, RecordsRoundTripThroughCsv) {
  const std::vector<RunRecord> records{rec("a,b", "hm", 1.0 / 3.0, 4), rec("plain", "im", 12345678.5, 1)};
  std::stringstream s;
  write_records_csv(s, records);
  EXPECT_EQ(read_records_csv(s), records);
  std::istringstream bad_header("x,y\n");
  EXPECT_THROW(read_records_csv(bad_header), std::runtime_error);
  std::istringstream bad_row("instance,algorithm,seed,J,runtime_s,balanced,max_block_weight\na,b,1,x,1,1,1\n");
  EXPECT_THROW(read_records_csv(bad_row), std::runtime_error);
}

TEST(Profile, TwoAlgorithmsOneInstance) {
  const auto p = performance_profile({rec("i", "A", 10), rec("i", "B", 12)}, {1.0, 1.1, 1.2, 1.5});
  EXPECT_EQ(p.algorithms, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(fractions_at(p, 1.0), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(fractions_at(p, 1.1), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(fractions_at(p, 1.2), (std::vector<double>{1.0, 1.0}));
}

TEST(Profile, SingleAlgorithmAndTies) {
  const auto single = performance_profile({rec("i", "A", 3), rec("j", "A", 7)}, default_tau_grid());
  for (const auto& point : single.points) EXPECT_EQ(point.fractions, std::vector<double>{1.0});
  const auto tied = performance_profile({rec("i", "A", 5), rec("i", "B", 5), rec("j", "A", 0), rec("j", "B", 0)}, {1.0});
  EXPECT_EQ(tied.points[0].fractions, (std::vector<double>{1.0, 1.0}));
}

TEST(Profile, DefaultGridAndMonotonicity) {
  const auto grid = default_tau_grid();
  ASSERT_EQ(grid.size(), 21u);
  EXPECT_EQ(grid.front(), 1.0);
  EXPECT_EQ(grid.back(), 2.0);
  EXPECT_TRUE(std::is_sorted(grid.begin(), grid.end()));
  const auto p = performance_profile(
      {rec("i", "A", 10), rec("i", "B", 13), rec("j", "A", 30), rec("j", "B", 20), rec("k", "A", 1), rec("k", "B", 4)},
      grid);
  for (std::size_t i = 1; i < p.points.size(); ++i) {
    for (std::size_t a = 0; a < 2; ++a) EXPECT_GE(p.points[i].fractions[a], p.points[i - 1].fractions[a]);
  }
  EXPECT_THROW(performance_profile({rec("i", "A", 1)}, {0.5}), std::invalid_argument);
}

TEST(Profile, MissingResultCountsAgainst) {
  const auto p = performance_profile({rec("i", "A", 1), rec("i", "B", 1), rec("j", "A", 1)}, {1.0});
  EXPECT_EQ(p.points[0].fractions, (std::vector<double>{1.0, 0.5}));
}

TEST(Profile, CsvOutput) {
  std::ostringstream out;
  write_profile_csv(out, performance_profile({rec("i", "A", 10), rec("i", "B", 12)}, {1.0, 1.2}));
  EXPECT_EQ(out.str(), "tau,A,B\n1,1,0\n1.2,1,1\n");
}

}  // namespace
}  // namespace promap
