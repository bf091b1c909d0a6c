// SPDX-License-Identifier: Apache-2.0
#include "promap/graph.hpp"

#include <algorithm>
#include <sstream>

#include "promap/parallel.hpp"

namespace promap {

Graph::Graph(std::vector<EdgeId> offsets, std::vector<VertexId> targets, std::vector<Weight> edge_weights,
             std::vector<Weight> vertex_weights)
    : offsets_(std::move(offsets)),
      targets_(std::move(targets)),
      edge_weights_(std::move(edge_weights)),
      vertex_weights_(std::move(vertex_weights)) {
  if (offsets_.empty()) offsets_.push_back(0);
  if (offsets_.size() != vertex_weights_.size() + 1) {
    throw std::invalid_argument("offsets must have n+1 entries");
  }
  if (targets_.size() != edge_weights_.size()) {
    throw std::invalid_argument("edge target and weight arrays differ in length");
  }
  build_sources();
  total_vertex_weight_ = par::parallel_reduce_sum<Weight>(VertexId{0}, n(), [&](VertexId v) { return vertex_weights_[v]; });
  total_edge_weight_ = par::parallel_reduce_sum<Weight>(EdgeId{0}, num_slots(), [&](EdgeId e) { return edge_weights_[e]; }) / 2;
}

void Graph::build_sources() {
  if (offsets_.front() != 0 || offsets_.back() != static_cast<EdgeId>(targets_.size())) {
    throw std::invalid_argument("offsets must start at 0 and end at the number of edge slots");
  }
  for (std::size_t v = 0; v + 1 < offsets_.size(); ++v) {
    if (offsets_[v] > offsets_[v + 1]) throw std::invalid_argument("offsets must be nondecreasing");
  }
  sources_.resize(targets_.size());
  par::parallel_for(VertexId{0}, n(), [&](VertexId v) {
    for (EdgeId e = offsets_[v]; e < offsets_[v + 1]; ++e) sources_[e] = v;
  });
}

Weight Graph::max_vertex_weight() const {
  return par::parallel_reduce_max<Weight>(VertexId{0}, n(), Weight{0}, [&](VertexId v) { return vertex_weights_[v]; });
}

void Graph::validate() const {
  const VertexId nv = n();
  for (VertexId v = 0; v < nv; ++v) {
    if (vertex_weights_[v] <= 0) {
      throw std::invalid_argument("vertex " + std::to_string(v) + " has nonpositive weight");
    }
    auto nbrs = neighbors(v);
    std::vector<VertexId> sorted(nbrs.begin(), nbrs.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("vertex " + std::to_string(v) + " has duplicate neighbors");
    }
    for (EdgeId e = offsets_[v]; e < offsets_[v + 1]; ++e) {
      const VertexId u = targets_[e];
      if (u < 0 || u >= nv) throw std::invalid_argument("edge target out of range");
      if (u == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(v));
      if (edge_weights_[e] <= 0) throw std::invalid_argument("nonpositive edge weight");
      if (sources_[e] != v) throw std::invalid_argument("edge source array inconsistent");
      bool found = false;
      for (EdgeId f = offsets_[u]; f < offsets_[u + 1]; ++f) {
        if (targets_[f] == v) {
          if (edge_weights_[f] != edge_weights_[e]) {
            throw std::invalid_argument("asymmetric weight on edge {" + std::to_string(v) + "," + std::to_string(u) + "}");
          }
          found = true;
          break;
        }
      }
      if (!found) {
        throw std::invalid_argument("edge (" + std::to_string(v) + "," + std::to_string(u) + ") has no reverse");
      }
    }
  }
}

Graph Graph::from_edges(VertexId n, const std::vector<std::tuple<VertexId, VertexId, Weight>>& edges,
                        std::vector<Weight> vertex_weights) {
  if (vertex_weights.empty()) vertex_weights.assign(static_cast<std::size_t>(n), 1);
  if (static_cast<VertexId>(vertex_weights.size()) != n) {
    throw std::invalid_argument("vertex weight count does not match n");
  }
  std::vector<EdgeId> offsets(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [u, v, w] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
    if (u == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
    ++offsets[u + 1];
    ++offsets[v + 1];
  }
  for (VertexId v = 0; v < n; ++v) offsets[v + 1] += offsets[v];

  std::vector<std::pair<VertexId, Weight>> slots(static_cast<std::size_t>(offsets.back()));
  std::vector<EdgeId> fill(offsets.begin(), offsets.end() - 1);
  for (const auto& [u, v, w] : edges) {
    slots[fill[u]++] = {v, w};
    slots[fill[v]++] = {u, w};
  }
  std::vector<VertexId> targets(slots.size());
  std::vector<Weight> weights(slots.size());
  for (VertexId v = 0; v < n; ++v) {
    std::sort(slots.begin() + offsets[v], slots.begin() + offsets[v + 1]);
    for (EdgeId e = offsets[v]; e < offsets[v + 1]; ++e) {
      targets[e] = slots[e].first;
      weights[e] = slots[e].second;
    }
  }
  return Graph(std::move(offsets), std::move(targets), std::move(weights), std::move(vertex_weights));
}

GraphFormatError::GraphFormatError(std::size_t line, const std::string& what)
    : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

std::vector<Subgraph> extract_subgraphs(const Graph& g, std::span<const BlockId> part, BlockId k) {
  const VertexId n = g.n();
  if (static_cast<VertexId>(part.size()) != n) {
    throw std::invalid_argument("partition size does not match vertex count");
  }
  for (VertexId v = 0; v < n; ++v) {
    if (part[v] < 0 || part[v] >= k) {
      throw std::out_of_range("block " + std::to_string(part[v]) + " of vertex " + std::to_string(v) +
                              " outside [0," + std::to_string(k) + ")");
    }
  }

  std::vector<Subgraph> result(static_cast<std::size_t>(k));
  std::vector<VertexId> global_to_local(static_cast<std::size_t>(n), kInvalidVertex);
  std::vector<VertexId> local_id(static_cast<std::size_t>(n) + 1);

  for (BlockId block = 0; block < k; ++block) {
    // Phase 1: sizes of the induced subgraph.
    const auto in_block = [&](VertexId v) { return part[v] == block; };
    const VertexId sub_n = par::parallel_reduce_sum<VertexId>(VertexId{0}, n, [&](VertexId v) { return in_block(v) ? 1 : 0; });
    const EdgeId sub_slots = par::parallel_reduce_sum<EdgeId>(EdgeId{0}, g.num_slots(), [&](EdgeId e) {
      return (in_block(g.source(e)) && in_block(g.target(e))) ? 1 : 0;
    });

    // Phase 2: stable local numbering via prefix sum over membership flags.
    par::parallel_for(VertexId{0}, n, [&](VertexId v) { local_id[v] = in_block(v) ? 1 : 0; });
    local_id[n] = 0;
    par::exclusive_scan_inplace(std::span<VertexId>(local_id));

    std::vector<VertexId> local_to_global(static_cast<std::size_t>(sub_n));
    std::vector<Weight> vertex_weights(static_cast<std::size_t>(sub_n));
    par::parallel_for(VertexId{0}, n, [&](VertexId v) {
      if (in_block(v)) {
        local_to_global[local_id[v]] = v;
        vertex_weights[local_id[v]] = g.vertex_weight(v);
        global_to_local[v] = local_id[v];
      }
    });

    // Phase 3: CSR offsets by prefix sum over local degrees, then edges.
    std::vector<EdgeId> offsets(static_cast<std::size_t>(sub_n) + 1, 0);
    par::parallel_for(VertexId{0}, sub_n, [&](VertexId lv) {
      const VertexId v = local_to_global[lv];
      EdgeId deg = 0;
      for (const VertexId u : g.neighbors(v)) deg += in_block(u) ? 1 : 0;
      offsets[lv] = deg;
    });
    par::exclusive_scan_inplace(std::span<EdgeId>(offsets));

    std::vector<VertexId> targets(static_cast<std::size_t>(sub_slots));
    std::vector<Weight> weights(static_cast<std::size_t>(sub_slots));
    par::parallel_for(VertexId{0}, sub_n, [&](VertexId lv) {
      const VertexId v = local_to_global[lv];
      EdgeId pos = offsets[lv];
      for (EdgeId e = g.first_edge(v); e < g.end_edge(v); ++e) {
        const VertexId u = g.target(e);
        if (in_block(u)) {
          targets[pos] = global_to_local[u];
          weights[pos] = g.edge_weight(e);
          ++pos;
        }
      }
    });

    result[block].graph = Graph(std::move(offsets), std::move(targets), std::move(weights), std::move(vertex_weights));
    result[block].map = SubgraphMap{std::move(local_to_global), block};
  }
  return result;
}

}  // namespace promap
