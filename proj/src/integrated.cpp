// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "promap/pipelines.hpp"

namespace promap {

IntegratedResult integrated_map(const Graph& g, const Topology& t, double epsilon, const IntegratedConfig& cfg) {
  if (g.n() == 0) throw std::invalid_argument("cannot map an empty graph");
  const BalanceSpec balance = BalanceSpec::make(epsilon, g.total_vertex_weight(), t.k());

  CoarseningConfig coarsening;
  coarsening.matching.seed = cfg.seed;
  const auto threshold = static_cast<VertexId>(std::max(1.0, std::ceil(cfg.coarsest_factor * t.k())));
  const LevelStack stack = build_level_stack(g, balance, threshold, coarsening);
  const int top = static_cast<int>(stack.size()) - 1;

  PartitionerConfig partitioner_cfg = cfg.initial_partitioner;
  partitioner_cfg.seed = cfg.seed;
  const Graph& coarsest = stack.coarsest();
  Mapping mapping = hierarchical_multisection(coarsest, t, epsilon, internal_partitioner(partitioner_cfg)).mapping;

  IntegratedResult result;
  result.levels = stack.size();
  result.initial_cost = total_cost(coarsest, t, mapping);

  RefinementSchedule schedule = cfg.refinement;
  schedule.seed = cfg.seed;
  for (int level = top; level >= 0; --level) {
    const Level& current = stack.levels[level];
    if (level < top) mapping = project(mapping, current);
    if (cfg.refine) {
      BlockConnectivity conn(current.graph, mapping);
      mapping = refine(current.graph, t, mapping, conn, schedule.at_level(level, top), balance).mapping;
    }
  }

  result.cost = total_cost(g, t, mapping);
  result.balanced = balance.fits(mapping.max_block_weight());
  result.mapping = std::move(mapping);
  return result;
}

}  // namespace promap
