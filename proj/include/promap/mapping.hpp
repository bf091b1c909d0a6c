// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "promap/graph.hpp"
#include "promap/topology.hpp"
#include "promap/types.hpp"

namespace promap {

struct VertexMove {
  VertexId vertex;
  BlockId to;
};

class BlockConnectivity;

/// Assignment of vertices to blocks (PEs) with cached block weights.
class Mapping {
 public:
  Mapping() = default;
  Mapping(const Graph& g, int k, std::vector<BlockId> assignment);
  /// Everything in block 0.
  static Mapping trivial(const Graph& g, int k);

  [[nodiscard]] int k() const { return k_; }
  [[nodiscard]] VertexId n() const { return static_cast<VertexId>(assignment_.size()); }
  [[nodiscard]] BlockId block(VertexId v) const { return assignment_[v]; }
  [[nodiscard]] BlockId operator[](VertexId v) const { return assignment_[v]; }
  [[nodiscard]] std::span<const BlockId> assignment() const { return assignment_; }
  [[nodiscard]] Weight block_weight(BlockId b) const { return block_weights_[b]; }
  [[nodiscard]] std::span<const Weight> block_weights() const { return block_weights_; }
  [[nodiscard]] Weight max_block_weight() const;

  /// Moves one vertex and keeps block weights exact.
  void set_block(const Graph& g, VertexId v, BlockId b);

  friend bool operator==(const Mapping& a, const Mapping& b) {
    return a.k_ == b.k_ && a.assignment_ == b.assignment_;
  }

 private:
  friend class BlockConnectivity;
  friend void apply_moves(const Graph&, Mapping&, BlockConnectivity&, std::span<const VertexMove>);

  std::vector<BlockId> assignment_;
  std::vector<Weight> block_weights_;
  int k_ = 0;
};

/// J(C, D, Pi): sum over ordered vertex pairs of C_ij * D_{Pi(i) Pi(j)}. Each
/// undirected edge therefore contributes twice.
Cost total_cost(const Graph& g, const Topology& t, const Mapping& m);

/// Gain of moving v from its block to b, evaluated over N(v):
///   G_b(v) = sum_u C_vu (D_{Pi(v),Pi(u)} - D_{b,Pi(u)}).
/// Positive gain lowers the undirected cost J/2 by exactly that amount.
Cost gain(const Graph& g, const Topology& t, const Mapping& m, VertexId v, BlockId b);

/// Heaviest block weight (maxImb).
Weight max_imbalance(const Mapping& m);

/// Total weight of edges whose endpoints lie in different blocks.
Weight edge_cut(const Graph& g, std::span<const BlockId> assignment);

/// Per-vertex table of (block, conn(v, block)) pairs, where conn is the total
/// weight of v's edges into that block. Each vertex owns a contiguous slot
/// range; a block id is placed by hashing into the range with linear probing.
/// Slots whose weight drops to zero become free again.
///
/// A vertex whose table runs out of slots during `apply_moves` is flagged and
/// the whole structure is rebuilt afterwards; flagged vertices get a new
/// capacity of (#distinct neighbor blocks + 2), all others keep theirs.
class BlockConnectivity {
 public:
  BlockConnectivity() = default;
  BlockConnectivity(const Graph& g, const Mapping& m);

  [[nodiscard]] Weight conn(VertexId v, BlockId b) const;
  [[nodiscard]] EdgeId capacity(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }
  [[nodiscard]] bool overflowed(VertexId v) const { return overflow_[v] != 0; }
  [[nodiscard]] bool any_overflow() const;
  [[nodiscard]] std::size_t rebuild_count() const { return rebuilds_; }

  /// Calls f(block, weight) for every occupied slot of v.
  template <typename F>
  void for_each(VertexId v, F&& f) const {
    for (EdgeId s = offsets_[v]; s < offsets_[v + 1]; ++s) {
      if (blocks_[s] != kInvalidBlock) f(blocks_[s], weights_[s]);
    }
  }

  /// G_b(v) evaluated over the table instead of N(v).
  [[nodiscard]] Cost gain(const Topology& t, const Mapping& m, VertexId v, BlockId b) const;

  /// Recomputes every table. Overflowed vertices are resized; the rest keep
  /// their capacity.
  void rebuild(const Graph& g, const Mapping& m);

 private:
  friend void apply_moves(const Graph&, Mapping&, BlockConnectivity&, std::span<const VertexMove>);

  [[nodiscard]] EdgeId home_slot(VertexId v, BlockId b) const;
  void fill_vertex(const Graph& g, const Mapping& m, VertexId v);
  /// Re-places v's live entries so that probing from the hash position never
  /// crosses a free slot before reaching its block.
  void compact_vertex(VertexId v);
  bool insert_add(VertexId v, BlockId b, Weight w);
  void subtract(VertexId v, BlockId b, Weight w);

  std::vector<EdgeId> offsets_{0};
  std::vector<BlockId> blocks_;
  std::vector<Weight> weights_;
  std::vector<std::uint8_t> overflow_;
  std::size_t rebuilds_ = 0;
};

/// Applies a bulk move set (each vertex at most once). Assignment, block
/// weights and the connectivity tables are all consistent afterwards; a
/// rebuild is triggered internally if any table overflowed.
void apply_moves(const Graph& g, Mapping& m, BlockConnectivity& conn, std::span<const VertexMove> moves);

/// Mapping file: one block id per line, vertex order.
std::vector<BlockId> read_mapping_file(const std::filesystem::path& path);
void write_mapping_file(std::span<const BlockId> assignment, const std::filesystem::path& path);

}  // namespace promap
