// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "promap/coarsening.hpp"
#include "promap/graph.hpp"
#include "promap/mapping.hpp"
#include "promap/refinement.hpp"
#include "promap/topology.hpp"

namespace promap {

/// A k-way partitioner: (graph, k, epsilon) -> block per vertex in [0, k).
/// Balance is best effort; callers check it afterwards.
struct PartitionerHandle {
  std::string name;
  std::function<std::vector<BlockId>(const Graph&, int, double)> partition;
};

/// One partitioner invocation inside the multisection recursion.
struct PartitionCall {
  std::vector<int> identifier;
  int level = 0;
  int blocks = 0;
  double epsilon = 0.0;
  Weight sub_weight = 0;
  Weight max_block_weight = 0;
  /// max_block_weight <= (1 + epsilon) * sub_weight / blocks.
  bool within_budget = true;
};

struct MultisectionResult {
  Mapping mapping;
  std::vector<PartitionCall> calls;

  [[nodiscard]] bool all_within_budget() const;
};

/// Recursive hierarchical multisection: split into a_l blocks, then each block
/// into a_{l-1} blocks, and so on, with the adaptive imbalance at every call.
/// A finished block receives the PE id calc_id(identifier).
MultisectionResult hierarchical_multisection(const Graph& g, const Topology& t, double epsilon,
                                             const PartitionerHandle& partitioner);

struct PartitionerConfig {
  /// Coarsen until fewer than coarsest_factor * k vertices remain.
  double coarsest_factor = 8.0;
  RefinementSchedule refinement{};
  std::uint64_t seed = 0;
};

/// Multilevel edge-cut partitioner: matching-based coarsening, greedy graph
/// growing on the coarsest graph, then the label propagation refinement under
/// a flat topology on every level.
std::vector<BlockId> internal_partition(const Graph& g, int k, double epsilon, const PartitionerConfig& cfg = {});
PartitionerHandle internal_partitioner(const PartitionerConfig& cfg = {});

/// Greedy graph growing: k seeds by farthest-first BFS, then regions grow
/// (lightest region first) by the frontier vertex most strongly tied to them.
std::vector<BlockId> greedy_graph_growing(const Graph& g, int k);

struct IntegratedConfig {
  /// Coarsen until fewer than coarsest_factor * k vertices remain.
  double coarsest_factor = 128.0;
  RefinementSchedule refinement{};
  PartitionerConfig initial_partitioner{};
  /// Disable to obtain the projected initial mapping (for comparisons).
  bool refine = true;
  std::uint64_t seed = 0;
};

struct IntegratedResult {
  Mapping mapping;
  Cost cost = 0;
  bool balanced = false;
  std::size_t levels = 0;
  /// Cost of the initial mapping on the coarsest graph (equal to its
  /// unrefined projection onto the input graph).
  Cost initial_cost = 0;
};

/// Multilevel mapping: coarsen, multisection on the coarsest graph, then
/// project and refine level by level against J.
IntegratedResult integrated_map(const Graph& g, const Topology& t, double epsilon, const IntegratedConfig& cfg = {});

struct BruteForceResult {
  Mapping mapping;
  Cost cost = 0;
  bool feasible = false;
};

/// Exact minimum-J balanced mapping by exhaustive search. Requires
/// k^n <= max_states.
BruteForceResult brute_force_map(const Graph& g, const Topology& t, const BalanceSpec& balance,
                                 double max_states = 1e7);

}  // namespace promap
