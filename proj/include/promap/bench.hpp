// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "promap/graph.hpp"
#include "promap/mapping.hpp"
#include "promap/topology.hpp"

namespace promap {

/// One benchmark row. Averaged rows carry the number of seeds in `seed`,
/// `balanced` is the conjunction and `max_block_weight` the maximum over seeds.
struct RunRecord {
  std::string instance;
  std::string algorithm;
  std::uint64_t seed = 0;
  double cost = 0.0;
  double runtime_s = 0.0;
  bool balanced = false;
  Weight max_block_weight = 0;

  bool operator==(const RunRecord&) const = default;
};

struct BenchInstance {
  std::string name;
  Graph graph;
};

struct BenchAlgorithm {
  std::string name;
  std::function<Mapping(const Graph&, const Topology&, double, std::uint64_t)> run;
};

/// Runs every (instance, algorithm, seed) in that nesting order. Runtime is
/// wall-clock of `run` alone.
std::vector<RunRecord> run_bench(const std::vector<BenchInstance>& instances, const Topology& t, double epsilon,
                                 const std::vector<BenchAlgorithm>& algorithms, const std::vector<std::uint64_t>& seeds);

/// Arithmetic means of cost and runtime per (instance, algorithm), in order of
/// first appearance.
std::vector<RunRecord> average_records(const std::vector<RunRecord>& raw);

/// Header: instance,algorithm,seed,J,runtime_s,balanced,max_block_weight
void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records);
/// Throws std::runtime_error on a malformed header or row.
std::vector<RunRecord> read_records_csv(std::istream& in);

struct ProfilePoint {
  double tau = 1.0;
  /// Indexed like PerformanceProfile::algorithms.
  std::vector<double> fractions;
};

struct PerformanceProfile {
  std::vector<std::string> algorithms;
  std::vector<ProfilePoint> points;
};

/// `steps` values 2^(i/(steps-1)), i.e. geometric from 1.0 to 2.0.
std::vector<double> default_tau_grid(int steps = 21);

/// Fraction of instances with cost <= tau * Best(I), Best(I) being the minimum
/// over algorithms of the given (averaged) records. Instances an algorithm has
/// no record for count against it.
PerformanceProfile performance_profile(const std::vector<RunRecord>& records, const std::vector<double>& taus);

/// Header: tau,<algorithm>...
void write_profile_csv(std::ostream& out, const PerformanceProfile& profile);

}  // namespace promap
