// SPDX-License-Identifier: Apache-2.0
#include "promap/coarsening.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "promap/parallel.hpp"

namespace promap {
namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t pair_hash(VertexId u, VertexId v, std::uint64_t seed) {
  const auto lo = static_cast<std::uint64_t>(static_cast<std::uint32_t>(std::min(u, v)));
  const auto hi = static_cast<std::uint64_t>(static_cast<std::uint32_t>(std::max(u, v)));
  return mix64((hi << 32 | lo) ^ mix64(seed));
}

bool pair_fits(const Graph& g, const BalanceSpec& balance, VertexId u, VertexId v) {
  return balance.fits(g.vertex_weight(u) + g.vertex_weight(v));
}

constexpr __int128 kExactLimit = static_cast<__int128>(1) << 62;

}  // namespace

double EdgeRating::value() const {
  const auto w = static_cast<long double>(edge_weight);
  return static_cast<double>(w * w / static_cast<long double>(denominator));
}

std::strong_ordering operator<=>(const EdgeRating& a, const EdgeRating& b) {
  const __int128 wa = a.edge_weight;
  const __int128 wb = b.edge_weight;
  std::strong_ordering order = std::strong_ordering::equal;
  if (wa * wa < kExactLimit && wb * wb < kExactLimit && a.denominator < kExactLimit && b.denominator < kExactLimit) {
    const __int128 lhs = wa * wa * b.denominator;
    const __int128 rhs = wb * wb * a.denominator;
    order = lhs <=> rhs;
  } else {
    // Out of the exact range; fall back to extended precision.
    const long double va = static_cast<long double>(wa) * static_cast<long double>(wa) / static_cast<long double>(a.denominator);
    const long double vb = static_cast<long double>(wb) * static_cast<long double>(wb) / static_cast<long double>(b.denominator);
    order = va < vb ? std::strong_ordering::less : (vb < va ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  if (order != 0) return order;
  return a.tie_break <=> b.tie_break;
}

EdgeRating rate_edge(const Graph& g, VertexId u, VertexId v, Weight edge_weight, std::uint64_t seed) {
  return EdgeRating{edge_weight, static_cast<__int128>(g.vertex_weight(u)) * g.vertex_weight(v), pair_hash(u, v, seed)};
}

EdgeRating rate_edge(const Graph& g, VertexId u, VertexId v, std::uint64_t seed) {
  for (EdgeId e = g.first_edge(u); e < g.end_edge(u); ++e) {
    if (g.target(e) == v) return rate_edge(g, u, v, g.edge_weight(e), seed);
  }
  throw std::invalid_argument("rate_edge: vertices are not adjacent");
}

VertexId heavy_edge_matching_round(const Graph& g, MatchingState& state, const BalanceSpec& balance,
                                   std::uint64_t seed) {
  const VertexId n = g.n();
  par::parallel_for(VertexId{0}, n, [&](VertexId v) {
    state.preferred[v] = kInvalidVertex;
    if (state.is_matched(v)) return;
    VertexId best = kInvalidVertex;
    EdgeRating best_rating{};
    for (EdgeId e = g.first_edge(v); e < g.end_edge(v); ++e) {
      const VertexId u = g.target(e);
      if (state.is_matched(u) || !pair_fits(g, balance, u, v)) continue;
      const EdgeRating rating = rate_edge(g, v, u, g.edge_weight(e), seed);
      if (best == kInvalidVertex || rating > best_rating) {
        best = u;
        best_rating = rating;
      }
    }
    state.preferred[v] = best;
  });

  VertexId pairs = 0;
#pragma omp parallel for schedule(static) reduction(+ : pairs)
  for (VertexId v = 0; v < n; ++v) {
    const VertexId p = state.preferred[v];
    if (p != kInvalidVertex && v < p && state.preferred[p] == v) {
      state.partner[v] = p;
      state.partner[p] = v;
      ++pairs;
    }
  }
  state.matched += 2 * pairs;
  return pairs;
}

namespace {

VertexId match_leaves(const Graph& g, MatchingState& state, const BalanceSpec& balance) {
  std::vector<std::pair<VertexId, VertexId>> leaves;  // (neighbor, leaf)
  for (VertexId v = 0; v < g.n(); ++v) {
    if (!state.is_matched(v) && g.degree(v) == 1) leaves.emplace_back(g.neighbors(v)[0], v);
  }
  std::sort(leaves.begin(), leaves.end());
  VertexId pairs = 0;
  std::size_t i = 0;
  while (i < leaves.size()) {
    std::size_t j = i;
    while (j < leaves.size() && leaves[j].first == leaves[i].first) ++j;
    VertexId pending = kInvalidVertex;
    for (std::size_t r = i; r < j; ++r) {
      const VertexId leaf = leaves[r].second;
      if (pending != kInvalidVertex && pair_fits(g, balance, pending, leaf)) {
        state.match(pending, leaf);
        ++pairs;
        pending = kInvalidVertex;
      } else {
        pending = leaf;
      }
    }
    i = j;
  }
  return pairs;
}

VertexId match_twins(const Graph& g, MatchingState& state, const BalanceSpec& balance) {
  struct Candidate {
    std::uint64_t hash;
    VertexId degree;
    VertexId vertex;
    auto operator<=>(const Candidate&) const = default;
  };
  std::vector<std::vector<VertexId>> sorted_neighborhoods(static_cast<std::size_t>(g.n()));
  std::vector<Candidate> candidates;
  for (VertexId v = 0; v < g.n(); ++v) {
    if (state.is_matched(v) || g.degree(v) < 2) continue;
    auto& nbrs = sorted_neighborhoods[v];
    nbrs.assign(g.neighbors(v).begin(), g.neighbors(v).end());
    std::sort(nbrs.begin(), nbrs.end());
    std::uint64_t h = 0;
    for (const VertexId u : nbrs) h = mix64(h ^ static_cast<std::uint64_t>(u));
    candidates.push_back({h, g.degree(v), v});
  }
  std::sort(candidates.begin(), candidates.end());
  VertexId pairs = 0;
  std::size_t i = 0;
  while (i < candidates.size()) {
    std::size_t j = i;
    while (j < candidates.size() && candidates[j].hash == candidates[i].hash &&
           candidates[j].degree == candidates[i].degree) {
      ++j;
    }
    // Within one hash run, pair vertices whose neighborhoods really match.
    for (std::size_t a = i; a < j; ++a) {
      const VertexId va = candidates[a].vertex;
      if (state.is_matched(va)) continue;
      for (std::size_t b = a + 1; b < j; ++b) {
        const VertexId vb = candidates[b].vertex;
        if (state.is_matched(vb)) continue;
        if (sorted_neighborhoods[va] == sorted_neighborhoods[vb] && pair_fits(g, balance, va, vb)) {
          state.match(va, vb);
          ++pairs;
          break;
        }
      }
    }
    i = j;
  }
  return pairs;
}

VertexId match_relatives(const Graph& g, MatchingState& state, const BalanceSpec& balance, VertexId max_degree) {
  VertexId pairs = 0;
  for (VertexId x = 0; x < g.n(); ++x) {
    if (g.degree(x) > max_degree) continue;
    VertexId pending = kInvalidVertex;
    for (const VertexId u : g.neighbors(x)) {
      if (state.is_matched(u)) continue;
      if (pending != kInvalidVertex && pair_fits(g, balance, pending, u)) {
        state.match(pending, u);
        ++pairs;
        pending = kInvalidVertex;
      } else {
        pending = u;
      }
    }
  }
  return pairs;
}

}  // namespace

VertexId two_hop_matching(const Graph& g, MatchingState& state, const BalanceSpec& balance, const MatchingConfig& cfg) {
  VertexId pairs = 0;
  if (state.match_fraction() >= cfg.target_fraction) return pairs;
  pairs += match_leaves(g, state, balance);
  if (state.match_fraction() >= cfg.target_fraction) return pairs;
  pairs += match_twins(g, state, balance);
  if (state.match_fraction() >= cfg.target_fraction) return pairs;
  pairs += match_relatives(g, state, balance, cfg.matchmaker_max_degree);
  return pairs;
}

MatchingState compute_matching(const Graph& g, const BalanceSpec& balance, const MatchingConfig& cfg) {
  MatchingState state(g.n());
  for (int round = 0; round < cfg.heavy_edge_rounds; ++round) {
    if (heavy_edge_matching_round(g, state, balance, cfg.seed + static_cast<std::uint64_t>(round)) == 0) break;
  }
  for (int round = 0; round < cfg.two_hop_rounds && state.match_fraction() < cfg.target_fraction; ++round) {
    if (two_hop_matching(g, state, balance, cfg) == 0) break;
  }
  return state;
}

VertexId coarse_map_from_matching(const MatchingState& state, std::vector<VertexId>& coarse_map) {
  const auto n = static_cast<VertexId>(state.partner.size());
  std::vector<VertexId> root_ids(static_cast<std::size_t>(n) + 1, 0);
  const auto is_root = [&](VertexId v) { return state.partner[v] == kInvalidVertex || v < state.partner[v]; };
  par::parallel_for(VertexId{0}, n, [&](VertexId v) { root_ids[v] = is_root(v) ? 1 : 0; });
  const VertexId n_coarse = par::exclusive_scan_inplace(std::span<VertexId>(root_ids).first(static_cast<std::size_t>(n)));
  coarse_map.resize(static_cast<std::size_t>(n));
  par::parallel_for(VertexId{0}, n, [&](VertexId v) { coarse_map[v] = root_ids[is_root(v) ? v : state.partner[v]]; });
  return n_coarse;
}

Graph contract(const Graph& g, std::span<const VertexId> coarse_map, VertexId n_coarse) {
  const VertexId n = g.n();
  if (static_cast<VertexId>(coarse_map.size()) != n) throw std::invalid_argument("coarse map size mismatch");
  for (VertexId v = 0; v < n; ++v) {
    if (coarse_map[v] < 0 || coarse_map[v] >= n_coarse) throw std::out_of_range("coarse map entry out of range");
  }

  // Upper bounds on coarse degrees and coarse vertex weights.
  std::vector<EdgeId> bounds(static_cast<std::size_t>(n_coarse) + 1, 0);
  std::vector<Weight> coarse_weights(static_cast<std::size_t>(n_coarse), 0);
  par::parallel_for(VertexId{0}, n, [&](VertexId v) {
    par::atomic_add(bounds[coarse_map[v]], static_cast<EdgeId>(g.degree(v)));
    par::atomic_add(coarse_weights[coarse_map[v]], g.vertex_weight(v));
  });
  std::vector<EdgeId> offsets = bounds;
  par::exclusive_scan_inplace(std::span<EdgeId>(offsets));

  std::vector<VertexId> hash_targets(static_cast<std::size_t>(offsets.back()), kInvalidVertex);
  std::vector<Weight> hash_weights(static_cast<std::size_t>(offsets.back()), 0);
  const auto sources = g.edge_sources();
  const auto targets = g.edge_targets();
  const auto weights = g.edge_weights();
  par::parallel_for(EdgeId{0}, g.num_slots(), [&](EdgeId e) {
    const VertexId cu = coarse_map[sources[e]];
    const VertexId cv = coarse_map[targets[e]];
    if (cu == cv) return;  // self-loop
    const EdgeId begin = offsets[cu];
    const EdgeId size = offsets[cu + 1] - begin;
    EdgeId slot = begin + static_cast<EdgeId>(mix64(static_cast<std::uint64_t>(cv)) % static_cast<std::uint64_t>(size));
    while (true) {
      const VertexId previous = par::compare_and_swap(hash_targets[slot], kInvalidVertex, cv);
      if (previous == kInvalidVertex || previous == cv) {
        par::atomic_add(hash_weights[slot], weights[e]);
        return;
      }
      if (++slot == begin + size) slot = begin;
    }
  });

  // Extract CSR, skipping empty slots.
  std::vector<EdgeId> coarse_offsets(static_cast<std::size_t>(n_coarse) + 1, 0);
  par::parallel_for(VertexId{0}, n_coarse, [&](VertexId c) {
    EdgeId count = 0;
    for (EdgeId s = offsets[c]; s < offsets[c + 1]; ++s) count += hash_targets[s] != kInvalidVertex ? 1 : 0;
    coarse_offsets[c] = count;
  });
  par::exclusive_scan_inplace(std::span<EdgeId>(coarse_offsets));
  std::vector<VertexId> coarse_targets(static_cast<std::size_t>(coarse_offsets.back()));
  std::vector<Weight> coarse_edge_weights(static_cast<std::size_t>(coarse_offsets.back()));
  par::parallel_for(VertexId{0}, n_coarse, [&](VertexId c) {
    std::vector<std::pair<VertexId, Weight>> row;
    for (EdgeId s = offsets[c]; s < offsets[c + 1]; ++s) {
      if (hash_targets[s] != kInvalidVertex) row.emplace_back(hash_targets[s], hash_weights[s]);
    }
    std::sort(row.begin(), row.end());
    EdgeId pos = coarse_offsets[c];
    for (const auto& [t, w] : row) {
      coarse_targets[pos] = t;
      coarse_edge_weights[pos] = w;
      ++pos;
    }
  });
  return Graph(std::move(coarse_offsets), std::move(coarse_targets), std::move(coarse_edge_weights),
               std::move(coarse_weights));
}

LevelStack build_level_stack(const Graph& g, const BalanceSpec& balance, VertexId stop_threshold,
                             const CoarseningConfig& cfg) {
  if (stop_threshold < 1) throw std::invalid_argument("stop threshold must be >= 1");
  LevelStack stack;
  stack.levels.push_back(Level{g, {}, 0});
  while (stack.levels.size() < cfg.max_levels) {
    Level& current = stack.levels.back();
    const VertexId n = current.graph.n();
    if (n < stop_threshold) break;

    MatchingConfig matching = cfg.matching;
    matching.seed = mix64(cfg.matching.seed + stack.levels.size());
    const MatchingState state = compute_matching(current.graph, balance, matching);
    std::vector<VertexId> coarse_map;
    const VertexId n_coarse = coarse_map_from_matching(state, coarse_map);
    if (n_coarse >= n) break;

    Graph coarse = contract(current.graph, coarse_map, n_coarse);
    current.coarse_map = std::move(coarse_map);
    current.n_coarse = n_coarse;
    stack.levels.push_back(Level{std::move(coarse), {}, 0});
    if (static_cast<double>(n_coarse) * cfg.min_shrink > static_cast<double>(n)) break;
  }
  return stack;
}

Mapping project(const Mapping& coarse, const Level& fine_level) {
  const Graph& fine = fine_level.graph;
  if (static_cast<VertexId>(fine_level.coarse_map.size()) != fine.n()) {
    throw std::invalid_argument("level has no coarse map for projection");
  }
  std::vector<BlockId> assignment(static_cast<std::size_t>(fine.n()));
  par::parallel_for(VertexId{0}, fine.n(), [&](VertexId v) { assignment[v] = coarse.block(fine_level.coarse_map[v]); });
  return Mapping(fine, coarse.k(), std::move(assignment));
}

}  // namespace promap
