// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "promap/mapping.hpp"
#include "promap/parallel.hpp"

namespace promap {
namespace {

EdgeId distinct_neighbor_blocks(const Graph& g, const Mapping& m, VertexId v, std::vector<BlockId>& scratch) {
  scratch.clear();
  for (const VertexId u : g.neighbors(v)) scratch.push_back(m.block(u));
  std::sort(scratch.begin(), scratch.end());
  return static_cast<EdgeId>(std::unique(scratch.begin(), scratch.end()) - scratch.begin());
}

}  // namespace

BlockConnectivity::BlockConnectivity(const Graph& g, const Mapping& m) {
  const VertexId n = g.n();
  offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
#pragma omp parallel
  {
    std::vector<BlockId> scratch;
#pragma omp for schedule(static)
    for (VertexId v = 0; v < n; ++v) offsets_[v] = distinct_neighbor_blocks(g, m, v, scratch) + 2;
  }
  par::exclusive_scan_inplace(std::span<EdgeId>(offsets_));
  blocks_.assign(static_cast<std::size_t>(offsets_.back()), kInvalidBlock);
  weights_.assign(static_cast<std::size_t>(offsets_.back()), 0);
  overflow_.assign(static_cast<std::size_t>(n), 0);
  par::parallel_for(VertexId{0}, n, [&](VertexId v) { fill_vertex(g, m, v); });
}

EdgeId BlockConnectivity::home_slot(VertexId v, BlockId b) const {
  const auto cap = static_cast<std::uint64_t>(capacity(v));
  const std::uint64_t h = static_cast<std::uint64_t>(static_cast<std::uint32_t>(b)) * 0x9E3779B97F4A7C15ULL;
  return offsets_[v] + static_cast<EdgeId>((h >> 32) % cap);
}

Weight BlockConnectivity::conn(VertexId v, BlockId b) const {
  const EdgeId cap = capacity(v);
  if (cap == 0) return 0;
  EdgeId s = home_slot(v, b);
  for (EdgeId i = 0; i < cap; ++i) {
    if (blocks_[s] == b) return weights_[s];
    if (blocks_[s] == kInvalidBlock) return 0;
    if (++s == offsets_[v + 1]) s = offsets_[v];
  }
  return 0;
}

bool BlockConnectivity::any_overflow() const {
  return std::any_of(overflow_.begin(), overflow_.end(), [](std::uint8_t f) { return f != 0; });
}

Cost BlockConnectivity::gain(const Topology& t, const Mapping& m, VertexId v, BlockId b) const {
  const BlockId from = m.block(v);
  Cost total = 0;
  for_each(v, [&](BlockId other, Weight w) { total += w * (t.distance(from, other) - t.distance(b, other)); });
  return total;
}

void BlockConnectivity::fill_vertex(const Graph& g, const Mapping& m, VertexId v) {
  std::fill(blocks_.begin() + offsets_[v], blocks_.begin() + offsets_[v + 1], kInvalidBlock);
  std::fill(weights_.begin() + offsets_[v], weights_.begin() + offsets_[v + 1], 0);
  for (EdgeId e = g.first_edge(v); e < g.end_edge(v); ++e) {
    if (!insert_add(v, m.block(g.target(e)), g.edge_weight(e))) overflow_[v] = 1;
  }
}

bool BlockConnectivity::insert_add(VertexId v, BlockId b, Weight w) {
  const EdgeId cap = capacity(v);
  EdgeId s = cap > 0 ? home_slot(v, b) : 0;
  for (EdgeId i = 0; i < cap; ++i) {
    const BlockId previous = par::compare_and_swap(blocks_[s], kInvalidBlock, b);
    if (previous == kInvalidBlock || previous == b) {
      par::atomic_add(weights_[s], w);
      return true;
    }
    if (++s == offsets_[v + 1]) s = offsets_[v];
  }
  return false;
}

void BlockConnectivity::subtract(VertexId v, BlockId b, Weight w) {
  const EdgeId cap = capacity(v);
  if (cap == 0) return;
  EdgeId s = home_slot(v, b);
  for (EdgeId i = 0; i < cap; ++i) {
    if (blocks_[s] == b) {
      par::atomic_add(weights_[s], -w);
      return;
    }
    if (blocks_[s] == kInvalidBlock) return;
    if (++s == offsets_[v + 1]) s = offsets_[v];
  }
}

void BlockConnectivity::compact_vertex(VertexId v) {
  const EdgeId begin = offsets_[v];
  const EdgeId end = offsets_[v + 1];
  std::vector<std::pair<BlockId, Weight>> live;
  for (EdgeId s = begin; s < end; ++s) {
    if (blocks_[s] != kInvalidBlock && weights_[s] != 0) live.emplace_back(blocks_[s], weights_[s]);
    blocks_[s] = kInvalidBlock;
    weights_[s] = 0;
  }
  for (const auto& [b, w] : live) insert_add(v, b, w);
}

void BlockConnectivity::rebuild(const Graph& g, const Mapping& m) {
  const VertexId n = g.n();
  std::vector<EdgeId> new_offsets(static_cast<std::size_t>(n) + 1, 0);
#pragma omp parallel
  {
    std::vector<BlockId> scratch;
#pragma omp for schedule(static)
    for (VertexId v = 0; v < n; ++v) {
      new_offsets[v] = overflow_[v] ? distinct_neighbor_blocks(g, m, v, scratch) + 2 : capacity(v);
    }
  }
  par::exclusive_scan_inplace(std::span<EdgeId>(new_offsets));
  offsets_ = std::move(new_offsets);
  blocks_.assign(static_cast<std::size_t>(offsets_.back()), kInvalidBlock);
  weights_.assign(static_cast<std::size_t>(offsets_.back()), 0);
  std::fill(overflow_.begin(), overflow_.end(), 0);
  par::parallel_for(VertexId{0}, n, [&](VertexId v) { fill_vertex(g, m, v); });
  ++rebuilds_;
  // A retained capacity can still be too small when the rebuild is called
  // after an external reassignment; grow those vertices as well.
  if (any_overflow()) rebuild(g, m);
}

void apply_moves(const Graph& g, Mapping& m, BlockConnectivity& conn, std::span<const VertexMove> moves) {
  if (moves.empty()) return;
  const VertexId n = g.n();
  std::vector<BlockId> destination(static_cast<std::size_t>(n), kInvalidBlock);
  for (const auto& mv : moves) {
    if (mv.to != m.block(mv.vertex)) destination[mv.vertex] = mv.to;
  }
  const auto sources = g.edge_sources();
  const auto targets = g.edge_targets();
  const auto weights = g.edge_weights();

  // 1. For every edge (u, v, w) with u moving, remove w from conn(v, Pi(u)).
  par::parallel_for(EdgeId{0}, g.num_slots(), [&](EdgeId e) {
    const VertexId u = sources[e];
    if (destination[u] != kInvalidBlock) conn.subtract(targets[e], m.block(u), weights[e]);
  });

  // 2. Free emptied slots of every touched vertex and close probe gaps.
  std::vector<std::uint8_t> touched(static_cast<std::size_t>(n), 0);
  for (const auto& mv : moves) {
    if (destination[mv.vertex] == kInvalidBlock) continue;
    for (const VertexId v : g.neighbors(mv.vertex)) touched[v] = 1;
  }
  par::parallel_for(VertexId{0}, n, [&](VertexId v) {
    if (touched[v]) conn.compact_vertex(v);
  });

  // 3. Add w to conn(v, Pi'(u)), claiming a slot when the block is new.
  par::parallel_for(EdgeId{0}, g.num_slots(), [&](EdgeId e) {
    const VertexId u = sources[e];
    if (destination[u] == kInvalidBlock) return;
    const VertexId v = targets[e];
    if (!conn.insert_add(v, destination[u], weights[e])) {
      std::atomic_ref<std::uint8_t>(conn.overflow_[v]).store(1, std::memory_order_relaxed);
    }
  });

  for (const auto& mv : moves) {
    if (destination[mv.vertex] != kInvalidBlock) m.set_block(g, mv.vertex, mv.to);
  }
  if (conn.any_overflow()) conn.rebuild(g, m);
}

}  // namespace promap
