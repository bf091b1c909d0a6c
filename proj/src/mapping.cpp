// SPDX-License-Identifier: Apache-2.0
#include "promap/mapping.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

#include "promap/parallel.hpp"

namespace promap {

Mapping::Mapping(const Graph& g, int k, std::vector<BlockId> assignment) : assignment_(std::move(assignment)), k_(k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (static_cast<VertexId>(assignment_.size()) != g.n()) {
    throw std::invalid_argument("mapping has " + std::to_string(assignment_.size()) + " entries but the graph has " +
                                std::to_string(g.n()) + " vertices");
  }
  block_weights_.assign(static_cast<std::size_t>(k), 0);
  for (VertexId v = 0; v < g.n(); ++v) {
    const BlockId b = assignment_[v];
    if (b < 0 || b >= k) {
      throw std::out_of_range("vertex " + std::to_string(v) + " mapped to block " + std::to_string(b) +
                              " outside [0," + std::to_string(k) + ")");
    }
    block_weights_[b] += g.vertex_weight(v);
  }
}

Mapping Mapping::trivial(const Graph& g, int k) {
  return Mapping(g, k, std::vector<BlockId>(static_cast<std::size_t>(g.n()), 0));
}

Weight Mapping::max_block_weight() const {
  Weight best = 0;
  for (const Weight w : block_weights_) best = std::max(best, w);
  return best;
}

void Mapping::set_block(const Graph& g, VertexId v, BlockId b) {
  block_weights_[assignment_[v]] -= g.vertex_weight(v);
  block_weights_[b] += g.vertex_weight(v);
  assignment_[v] = b;
}

Cost total_cost(const Graph& g, const Topology& t, const Mapping& m) {
  const auto sources = g.edge_sources();
  const auto targets = g.edge_targets();
  const auto weights = g.edge_weights();
  return par::parallel_reduce_sum<Cost>(EdgeId{0}, g.num_slots(), [&](EdgeId e) {
    return weights[e] * t.distance(m.block(sources[e]), m.block(targets[e]));
  });
}

Cost gain(const Graph& g, const Topology& t, const Mapping& m, VertexId v, BlockId b) {
  const BlockId from = m.block(v);
  Cost total = 0;
  for (EdgeId e = g.first_edge(v); e < g.end_edge(v); ++e) {
    const BlockId other = m.block(g.target(e));
    total += g.edge_weight(e) * (t.distance(from, other) - t.distance(b, other));
  }
  return total;
}

Weight max_imbalance(const Mapping& m) { return m.max_block_weight(); }

Weight edge_cut(const Graph& g, std::span<const BlockId> assignment) {
  const auto sources = g.edge_sources();
  const auto targets = g.edge_targets();
  const auto weights = g.edge_weights();
  return par::parallel_reduce_sum<Weight>(EdgeId{0}, g.num_slots(), [&](EdgeId e) {
           return assignment[sources[e]] != assignment[targets[e]] ? weights[e] : Weight{0};
         }) /
         2;
}

std::vector<BlockId> read_mapping_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mapping file " + path.string());
  std::vector<BlockId> assignment;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    try {
      std::size_t used = 0;
      const long long value = std::stoll(line, &used);
      if (line.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("trailing");
      assignment.push_back(static_cast<BlockId>(value));
    } catch (const std::logic_error&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": not a block id");
    }
  }
  return assignment;
}

void write_mapping_file(std::span<const BlockId> assignment, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mapping file " + path.string());
  for (const BlockId b : assignment) out << b << '\n';
  if (!out) throw std::runtime_error("I/O error while writing " + path.string());
}

}  // namespace promap
