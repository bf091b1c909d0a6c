// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <stdexcept>

#include "promap/parallel.hpp"
#include "promap/pipelines.hpp"

namespace promap {
namespace {

std::string identifier_string(const std::vector<int>& identifier) {
  std::string s = "[";
  for (std::size_t i = 0; i < identifier.size(); ++i) {
    if (i > 0) s += ',';
    s += std::to_string(identifier[i]);
  }
  return s + "]";
}

class Multisection {
 public:
  Multisection(const Topology& t, double epsilon, Weight total_weight, const PartitionerHandle& partitioner,
               std::vector<BlockId>& assignment, std::vector<PartitionCall>& calls)
      : t_(t), epsilon_(epsilon), total_weight_(total_weight), partitioner_(partitioner), assignment_(assignment),
        calls_(calls) {}

  void run(const Graph& sub, int level, const std::vector<int>& identifier, const std::vector<VertexId>& to_global) {
    if (level == 0) {
      const BlockId id = t_.calc_id(identifier);
      par::parallel_for(VertexId{0}, sub.n(), [&](VertexId v) { assignment_[to_global[v]] = id; });
      return;
    }

    const int blocks = t_.arity(level);
    const double local_epsilon = adaptive_imbalance(epsilon_, total_weight_, sub.total_vertex_weight(), t_.k(),
                                                    t_.blocks_below(level), level);
    std::vector<BlockId> part;
    if (blocks == 1) {
      part.assign(static_cast<std::size_t>(sub.n()), 0);
    } else {
      try {
        part = partitioner_.partition(sub, blocks, local_epsilon);
      } catch (const std::exception& e) {
        throw std::runtime_error("partitioner '" + partitioner_.name + "' failed at node " +
                                 identifier_string(identifier) + ": " + e.what());
      }
    }
    if (static_cast<VertexId>(part.size()) != sub.n()) {
      throw std::runtime_error("partitioner '" + partitioner_.name + "' returned " + std::to_string(part.size()) +
                               " entries at node " + identifier_string(identifier));
    }

    PartitionCall call{identifier, level, blocks, local_epsilon, sub.total_vertex_weight(), 0, true};
    std::vector<Weight> weights(static_cast<std::size_t>(blocks), 0);
    for (VertexId v = 0; v < sub.n(); ++v) {
      if (part[v] < 0 || part[v] >= blocks) {
        throw std::runtime_error("partitioner '" + partitioner_.name + "' produced block " + std::to_string(part[v]) +
                                 " outside [0," + std::to_string(blocks) + ") at node " + identifier_string(identifier));
      }
      weights[part[v]] += sub.vertex_weight(v);
    }
    call.max_block_weight = *std::max_element(weights.begin(), weights.end());
    call.within_budget = static_cast<double>(call.max_block_weight) <=
                         (1.0 + local_epsilon) * static_cast<double>(call.sub_weight) / static_cast<double>(blocks);
    calls_.push_back(call);

    auto subgraphs = extract_subgraphs(sub, part, blocks);
    for (int j = 0; j < blocks; ++j) {
      auto& child = subgraphs[j];
      if (child.graph.n() == 0) continue;
      std::vector<VertexId> child_to_global(child.map.local_to_global.size());
      for (std::size_t v = 0; v < child_to_global.size(); ++v) {
        child_to_global[v] = to_global[child.map.local_to_global[v]];
      }
      std::vector<int> child_identifier = identifier;
      child_identifier.push_back(j);
      run(child.graph, level - 1, child_identifier, child_to_global);
    }
  }

 private:
  const Topology& t_;
  double epsilon_;
  Weight total_weight_;
  const PartitionerHandle& partitioner_;
  std::vector<BlockId>& assignment_;
  std::vector<PartitionCall>& calls_;
};

}  // namespace

bool MultisectionResult::all_within_budget() const {
  return std::all_of(calls.begin(), calls.end(), [](const PartitionCall& c) { return c.within_budget; });
}

MultisectionResult hierarchical_multisection(const Graph& g, const Topology& t, double epsilon,
                                             const PartitionerHandle& partitioner) {
  if (g.n() == 0) throw std::invalid_argument("cannot map an empty graph");
  std::vector<BlockId> assignment(static_cast<std::size_t>(g.n()), kInvalidBlock);
  std::vector<PartitionCall> calls;
  std::vector<VertexId> identity(static_cast<std::size_t>(g.n()));
  for (VertexId v = 0; v < g.n(); ++v) identity[v] = v;

  Multisection(t, epsilon, g.total_vertex_weight(), partitioner, assignment, calls).run(g, t.levels(), {}, identity);
  return {Mapping(g, t.k(), std::move(assignment)), std::move(calls)};
}

}  // namespace promap
