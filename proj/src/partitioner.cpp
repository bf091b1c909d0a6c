// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>

#include "promap/pipelines.hpp"

namespace promap {
namespace {

constexpr VertexId kUnreached = std::numeric_limits<VertexId>::max();

/// Multi-source BFS hop distances; unreachable vertices keep kUnreached.
std::vector<VertexId> bfs_distances(const Graph& g, const std::vector<VertexId>& sources) {
  std::vector<VertexId> dist(static_cast<std::size_t>(g.n()), kUnreached);
  std::deque<VertexId> queue;
  for (const VertexId s : sources) {
    dist[s] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    for (const VertexId u : g.neighbors(v)) {
      if (dist[u] == kUnreached) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

VertexId farthest(const std::vector<VertexId>& dist) {
  VertexId best = 0;
  for (VertexId v = 1; v < static_cast<VertexId>(dist.size()); ++v) {
    if (dist[v] > dist[best]) best = v;
  }
  return best;
}

std::vector<BlockId> grow_from(const Graph& g, int k, VertexId start) {
  const VertexId n = g.n();
  std::vector<BlockId> part(static_cast<std::size_t>(n), kInvalidBlock);
  if (n == 0) return part;

  // Farthest-first seeds, beginning at a pseudo-peripheral vertex.
  std::vector<VertexId> seeds{farthest(bfs_distances(g, {start}))};
  while (static_cast<int>(seeds.size()) < std::min<int>(k, n)) {
    const auto dist = bfs_distances(g, seeds);
    seeds.push_back(farthest(dist));
  }

  using Entry = std::pair<Weight, VertexId>;  // (connection to region, -vertex)
  std::vector<std::priority_queue<Entry>> frontier(static_cast<std::size_t>(k));
  std::vector<Weight> weight(static_cast<std::size_t>(k), 0);
  VertexId assigned = 0;

  const auto connection = [&](VertexId v, BlockId b) {
    Weight total = 0;
    for (EdgeId e = g.first_edge(v); e < g.end_edge(v); ++e) {
      if (part[g.target(e)] == b) total += g.edge_weight(e);
    }
    return total;
  };
  const auto assign = [&](VertexId v, BlockId b) {
    part[v] = b;
    weight[b] += g.vertex_weight(v);
    ++assigned;
    for (const VertexId u : g.neighbors(v)) {
      if (part[u] == kInvalidBlock) frontier[b].emplace(connection(u, b), -u);
    }
  };
  for (int b = 0; b < static_cast<int>(seeds.size()); ++b) assign(seeds[b], b);

  VertexId next_unassigned = 0;
  while (assigned < n) {
    BlockId chosen = kInvalidBlock;
    for (BlockId b = 0; b < k; ++b) {
      while (!frontier[b].empty() && part[-frontier[b].top().second] != kInvalidBlock) frontier[b].pop();
      if (frontier[b].empty()) continue;
      if (chosen == kInvalidBlock || weight[b] < weight[chosen]) chosen = b;
    }
    if (chosen == kInvalidBlock) {
      // Remaining vertices are unreachable from every region.
      while (part[next_unassigned] != kInvalidBlock) ++next_unassigned;
      const auto lightest = static_cast<BlockId>(std::min_element(weight.begin(), weight.end()) - weight.begin());
      assign(next_unassigned, lightest);
      continue;
    }
    const VertexId v = -frontier[chosen].top().second;
    frontier[chosen].pop();
    assign(v, chosen);
  }
  return part;
}

}  // namespace

std::vector<BlockId> greedy_graph_growing(const Graph& g, int k) { return grow_from(g, k, 0); }

std::vector<BlockId> internal_partition(const Graph& g, int k, double epsilon, const PartitionerConfig& cfg) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (k == 1 || g.n() == 0) return std::vector<BlockId>(static_cast<std::size_t>(g.n()), 0);

  const BalanceSpec balance = BalanceSpec::make(epsilon, g.total_vertex_weight(), k);
  const Topology flat = Topology::flat(k);
  CoarseningConfig coarsening;
  coarsening.matching.seed = cfg.seed;
  const auto threshold = static_cast<VertexId>(std::max(2.0, std::ceil(cfg.coarsest_factor * k)));
  const LevelStack stack = build_level_stack(g, balance, threshold, coarsening);
  const int top = static_cast<int>(stack.size()) - 1;

  RefinementSchedule schedule = cfg.refinement;
  schedule.seed = cfg.seed;

  // A few growing runs from different start vertices; keep the best refined one.
  const Graph& coarsest = stack.coarsest();
  constexpr int kTries = 4;
  Mapping mapping;
  RefineResult best;
  bool have_best = false;
  for (int attempt = 0; attempt < kTries; ++attempt) {
    const auto start = static_cast<VertexId>(static_cast<std::int64_t>(attempt) * coarsest.n() / kTries);
    Mapping initial(coarsest, k, grow_from(coarsest, k, start));
    BlockConnectivity conn(coarsest, initial);
    RefineResult result = refine(coarsest, flat, initial, conn, schedule.at_level(top, top), balance);
    const bool better = !have_best || (result.balanced && !best.balanced) ||
                        (result.balanced == best.balanced &&
                         (result.balanced ? result.cost < best.cost
                                          : result.mapping.max_block_weight() < best.mapping.max_block_weight()));
    if (better) {
      best = std::move(result);
      have_best = true;
    }
  }
  mapping = std::move(best.mapping);

  for (int level = top - 1; level >= 0; --level) {
    const Level& fine = stack.levels[level];
    mapping = project(mapping, fine);
    BlockConnectivity conn(fine.graph, mapping);
    mapping = refine(fine.graph, flat, mapping, conn, schedule.at_level(level, top), balance).mapping;
  }
  return {mapping.assignment().begin(), mapping.assignment().end()};
}

PartitionerHandle internal_partitioner(const PartitionerConfig& cfg) {
  return {"multilevel-lp", [cfg](const Graph& g, int k, double epsilon) { return internal_partition(g, k, epsilon, cfg); }};
}

}  // namespace promap
