// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "promap/graph.hpp"
#include "promap/mapping.hpp"
#include "promap/topology.hpp"

namespace promap {

/// exp*2 rating omega({u,v})^2 / (c(u) c(v)) kept as an exact fraction, plus a
/// deterministic per-pair hash that orders equal fractions. The hash never
/// changes the order of two distinct fractions.
struct EdgeRating {
  Weight edge_weight = 0;
  __int128 denominator = 1;
  std::uint64_t tie_break = 0;

  /// The fraction as a double, for display only.
  [[nodiscard]] double value() const;

  friend std::strong_ordering operator<=>(const EdgeRating& a, const EdgeRating& b);
  friend bool operator==(const EdgeRating& a, const EdgeRating& b) { return (a <=> b) == 0; }
};

/// Symmetric in (u, v): rate_edge(g, u, v, e, s) == rate_edge(g, v, u, e', s).
EdgeRating rate_edge(const Graph& g, VertexId u, VertexId v, Weight edge_weight, std::uint64_t seed);
/// Convenience overload that looks the edge up in g.
EdgeRating rate_edge(const Graph& g, VertexId u, VertexId v, std::uint64_t seed = 0);

struct MatchingState {
  std::vector<VertexId> preferred;
  std::vector<VertexId> partner;
  VertexId matched = 0;

  explicit MatchingState(VertexId n)
      : preferred(static_cast<std::size_t>(n), kInvalidVertex), partner(static_cast<std::size_t>(n), kInvalidVertex) {}

  [[nodiscard]] bool is_matched(VertexId v) const { return partner[v] != kInvalidVertex; }
  [[nodiscard]] double match_fraction() const {
    return partner.empty() ? 1.0 : static_cast<double>(matched) / static_cast<double>(partner.size());
  }
  void match(VertexId u, VertexId v) {
    partner[u] = v;
    partner[v] = u;
    matched += 2;
  }
};

struct MatchingConfig {
  int heavy_edge_rounds = 2;
  int two_hop_rounds = 3;
  double target_fraction = 0.40;
  /// Vertices up to this degree act as matchmakers for relative matching.
  VertexId matchmaker_max_degree = 8;
  std::uint64_t seed = 0;
};

/// One heavy-edge round: every unmatched vertex prefers its best-rated
/// unmatched neighbor with c(u) + c(v) <= L_max; mutual preferences match.
/// Returns the number of new pairs.
VertexId heavy_edge_matching_round(const Graph& g, MatchingState& state, const BalanceSpec& balance,
                                   std::uint64_t seed = 0);

/// Leaf, then twin, then relative matching; each phase runs only while the
/// matched fraction is below `cfg.target_fraction`. Returns new pairs.
VertexId two_hop_matching(const Graph& g, MatchingState& state, const BalanceSpec& balance,
                          const MatchingConfig& cfg = {});

/// Heavy-edge rounds followed by (repeated) two-hop matching.
MatchingState compute_matching(const Graph& g, const BalanceSpec& balance, const MatchingConfig& cfg);

/// Coarse ids numbered by match roots (unmatched vertex or smaller partner)
/// in vertex order. Returns the number of coarse vertices.
VertexId coarse_map_from_matching(const MatchingState& state, std::vector<VertexId>& coarse_map);

/// Edge contraction for a surjective map M onto [0, n_c). Parallel edges are
/// merged with summed weight, intra-group edges dropped. Coarse neighborhoods
/// come out sorted by id, so the result does not depend on the schedule.
Graph contract(const Graph& g, std::span<const VertexId> coarse_map, VertexId n_coarse);

struct Level {
  Graph graph;
  /// Fine vertex of `graph` -> vertex of the next coarser level. Empty on the
  /// coarsest level.
  std::vector<VertexId> coarse_map;
  VertexId n_coarse = 0;
};

/// levels[0] is the input graph, levels.back() the coarsest.
struct LevelStack {
  std::vector<Level> levels;

  [[nodiscard]] std::size_t size() const { return levels.size(); }
  [[nodiscard]] const Graph& coarsest() const { return levels.back().graph; }
};

struct CoarseningConfig {
  MatchingConfig matching;
  /// Stop when a match+contract step keeps more than n / min_shrink vertices.
  double min_shrink = 1.02;
  std::size_t max_levels = 64;
};

/// Coarsens until the graph has fewer than `stop_threshold` vertices or a
/// step stalls.
LevelStack build_level_stack(const Graph& g, const BalanceSpec& balance, VertexId stop_threshold,
                             const CoarseningConfig& cfg = {});

/// m_fine(v) = m_coarse(M(v)).
Mapping project(const Mapping& coarse, const Level& fine_level);

}  // namespace promap
