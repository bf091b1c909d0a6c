// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "promap/types.hpp"

namespace promap {

/// Undirected weighted graph in CSR form. Every undirected edge {u, v} is
/// stored twice, once in the range of u and once in the range of v, with the
/// same weight. `edge_sources()` is the edge-list view: for each CSR slot it
/// holds the vertex whose range contains the slot.
///
/// Immutable after construction, so it can be shared freely between threads.
class Graph {
 public:
  Graph() : offsets_{0} {}

  /// Takes ownership of CSR arrays and checks their shape. Symmetry, weights and
  /// self-loops are only checked by `validate`.
  Graph(std::vector<EdgeId> offsets, std::vector<VertexId> targets, std::vector<Weight> edge_weights,
        std::vector<Weight> vertex_weights);

  /// Builds from an undirected edge list. Each pair must appear once; the
  /// reverse direction is added automatically. Missing vertex weights default
  /// to 1. Neighbors are sorted by id.
  static Graph from_edges(VertexId n, const std::vector<std::tuple<VertexId, VertexId, Weight>>& edges,
                          std::vector<Weight> vertex_weights = {});

  [[nodiscard]] VertexId n() const { return static_cast<VertexId>(vertex_weights_.size()); }
  /// Number of undirected edges.
  [[nodiscard]] EdgeId m() const { return static_cast<EdgeId>(targets_.size()) / 2; }
  /// Number of CSR slots, i.e. 2m.
  [[nodiscard]] EdgeId num_slots() const { return static_cast<EdgeId>(targets_.size()); }

  [[nodiscard]] std::span<const EdgeId> offsets() const { return offsets_; }
  [[nodiscard]] std::span<const VertexId> edge_targets() const { return targets_; }
  [[nodiscard]] std::span<const Weight> edge_weights() const { return edge_weights_; }
  [[nodiscard]] std::span<const VertexId> edge_sources() const { return sources_; }
  [[nodiscard]] std::span<const Weight> vertex_weights() const { return vertex_weights_; }

  [[nodiscard]] EdgeId first_edge(VertexId v) const { return offsets_[v]; }
  [[nodiscard]] EdgeId end_edge(VertexId v) const { return offsets_[v + 1]; }
  [[nodiscard]] VertexId degree(VertexId v) const { return static_cast<VertexId>(offsets_[v + 1] - offsets_[v]); }
  [[nodiscard]] VertexId target(EdgeId e) const { return targets_[e]; }
  [[nodiscard]] Weight edge_weight(EdgeId e) const { return edge_weights_[e]; }
  [[nodiscard]] VertexId source(EdgeId e) const { return sources_[e]; }
  [[nodiscard]] Weight vertex_weight(VertexId v) const { return vertex_weights_[v]; }

  [[nodiscard]] std::span<const VertexId> neighbors(VertexId v) const {
    return std::span<const VertexId>(targets_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
  }

  /// c(V).
  [[nodiscard]] Weight total_vertex_weight() const { return total_vertex_weight_; }
  /// ω(E), each undirected edge counted once.
  [[nodiscard]] Weight total_edge_weight() const { return total_edge_weight_; }
  [[nodiscard]] Weight max_vertex_weight() const;

  /// Throws std::invalid_argument describing the first broken invariant.
  void validate() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.targets_ == b.targets_ && a.edge_weights_ == b.edge_weights_ &&
           a.vertex_weights_ == b.vertex_weights_;
  }

 private:
  void build_sources();

  std::vector<EdgeId> offsets_;
  std::vector<VertexId> targets_;
  std::vector<Weight> edge_weights_;
  std::vector<VertexId> sources_;
  std::vector<Weight> vertex_weights_;
  Weight total_vertex_weight_ = 0;
  Weight total_edge_weight_ = 0;
};

/// Raised by `load_metis` for malformed input. `line()` is 1-based, 0 when the
/// problem is not tied to a single line.
class GraphFormatError : public std::runtime_error {
 public:
  GraphFormatError(std::size_t line, const std::string& what);
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// METIS/Chaco format: header `n m [fmt]` with fmt in {0, 1, 10, 11},
/// 1-indexed neighbor lists, `%` comment lines.
Graph load_metis(const std::filesystem::path& path);
Graph parse_metis(std::istream& in);
void write_metis(const Graph& g, const std::filesystem::path& path);
void write_metis(const Graph& g, std::ostream& out);

/// rows x cols 4-neighbor grid, unit weights. Vertex id = r * cols + c.
Graph gen_grid(std::int64_t rows, std::int64_t cols);

/// Random geometric graph on the unit square: vertices closer than
/// radius_factor * sqrt(ln n / n) are adjacent. Unit weights, deterministic
/// per seed on every platform.
Graph gen_rgg(std::int64_t n, double radius_factor, std::uint64_t seed);

/// Local-to-global vertex translation of an induced subgraph.
struct SubgraphMap {
  std::vector<VertexId> local_to_global;
  BlockId block_id = 0;
};

struct Subgraph {
  Graph graph;
  SubgraphMap map;
};

/// Splits `g` into the k subgraphs induced by `part`. Local ids preserve the
/// global vertex order; edges with endpoints in different blocks are dropped.
std::vector<Subgraph> extract_subgraphs(const Graph& g, std::span<const BlockId> part, BlockId k);

}  // namespace promap
