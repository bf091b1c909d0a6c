// SPDX-License-Identifier: Apache-2.0
#include "promap/refinement.hpp"

#include <algorithm>
#include <cmath>
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

bool passes_first_filter(const RefinementConfig& cfg, Cost gain, Weight own_conn) {
  if (gain >= 0) return true;
  if (cfg.filter == FilterMode::kNonNegative) return false;
  const auto bound = static_cast<Cost>(std::floor(cfg.jet_c * static_cast<double>(own_conn)));
  return -gain < bound;
}

/// Destination choice shared by weak and strong rebalancing.
struct RebalanceCandidate {
  BlockId to = kInvalidBlock;
  Cost gain = 0;
};

std::vector<RebalanceCandidate> rebalance_candidates(const Graph& g, const Topology& t, const Mapping& m,
                                                     const BlockConnectivity& conn, double sigma,
                                                     const BalanceSpec& balance, const RefinementConfig& cfg,
                                                     std::uint64_t round, bool& incomplete) {
  const VertexId n = g.n();
  std::vector<BlockId> eligible;
  for (BlockId b = 0; b < m.k(); ++b) {
    if (static_cast<double>(m.block_weight(b)) < sigma) eligible.push_back(b);
  }
  std::vector<RebalanceCandidate> result(static_cast<std::size_t>(n));
  std::uint8_t missing = 0;
#pragma omp parallel for schedule(static) reduction(| : missing)
  for (VertexId v = 0; v < n; ++v) {
    const BlockId from = m.block(v);
    if (balance.fits(m.block_weight(from))) continue;
    // Destinations that still fit after receiving v are preferred; the plain
    // sigma rule is the fallback when none does.
    RebalanceCandidate best;
    const Weight cv = g.vertex_weight(v);
    for (int strict = 1; strict >= 0 && best.to == kInvalidBlock; --strict) {
      const auto allowed = [&](BlockId b) {
        return b != from && static_cast<double>(m.block_weight(b)) < sigma &&
               (strict == 0 || balance.fits(m.block_weight(b) + cv));
      };
      conn.for_each(v, [&](BlockId b, Weight) {
        if (!allowed(b)) return;
        const Cost gv = conn.gain(t, m, v, b);
        if (best.to == kInvalidBlock || gv > best.gain || (gv == best.gain && b < best.to)) best = {b, gv};
      });
      if (best.to != kInvalidBlock) break;
      const auto count = static_cast<std::uint64_t>(std::count_if(eligible.begin(), eligible.end(), allowed));
      if (count == 0) continue;
      std::uint64_t pick = mix64(cfg.seed ^ mix64(static_cast<std::uint64_t>(v) << 20 ^ round)) % count;
      for (const BlockId b : eligible) {
        if (allowed(b) && pick-- == 0) {
          best = {b, conn.gain(t, m, v, b)};
          break;
        }
      }
    }
    if (best.to == kInvalidBlock) {
      missing = 1;
      continue;
    }
    result[v] = best;
  }
  incomplete = missing != 0;
  return result;
}

}  // namespace

void RefinementConfig::validate() const {
  if (!(phi > 0.0 && phi <= 1.0)) throw std::invalid_argument("phi must be in (0, 1]");
  if (rho < 1) throw std::invalid_argument("rho must be >= 1");
  if (!(sigma_fraction >= 0.0 && sigma_fraction < 1.0)) throw std::invalid_argument("sigma fraction must be in [0, 1)");
  if (i_max < 1 || iw_max < 0) throw std::invalid_argument("iteration limits must be positive");
  if (!(jet_c >= 0.0 && jet_c <= 1.0)) throw std::invalid_argument("jet filter constant must be in [0, 1]");
}

RefinementConfig RefinementSchedule::at_level(int level, int coarsest_level) const {
  RefinementConfig cfg;
  cfg.phi = phi;
  cfg.i_max = i_max_base + level;
  cfg.iw_max = level == 0 ? iw_max_finest : iw_max;
  const double position = coarsest_level > 0 ? static_cast<double>(level) / static_cast<double>(coarsest_level) : 0.0;
  cfg.sigma_fraction = sigma_fine + (sigma_coarse - sigma_fine) * position;
  cfg.rho = rho;
  cfg.filter = filter;
  cfg.jet_c = jet_c;
  cfg.seed = mix64(seed + static_cast<std::uint64_t>(level));
  return cfg;
}

// Slot labels: +, 0, -1..-10, -20..-100, -200..-1000, X.
Cost BucketList::slot_label(int slot) {
  if (slot <= 1) return 0;
  if (slot <= 11) return -(slot - 1);
  if (slot <= 20) return -10 * (slot - 10);
  if (slot <= 29) return -100 * (slot - 19);
  return 0;
}

int BucketList::slot_of(Cost gain) {
  if (gain > 0) return kPositiveSlot;
  if (gain == 0) return 1;
  if (gain <= -1000) return kOverflowSlot;
  const Cost loss = -gain;
  if (loss < 10) return static_cast<int>(1 + loss);
  if (loss < 100) return static_cast<int>(10 + loss / 10);
  return static_cast<int>(19 + loss / 100);
}

BucketList::BucketList(int num_lists, int rho) : num_lists_(num_lists), rho_(rho) {
  if (rho < 1) throw std::invalid_argument("rho must be >= 1");
  offsets_.assign(static_cast<std::size_t>(num_lists) * kSlots * static_cast<std::size_t>(rho) + 1, 0);
}

void BucketList::build(std::span<const Entry> entries) {
  std::fill(offsets_.begin(), offsets_.end(), 0);
  const auto count = static_cast<std::int64_t>(entries.size());
  std::vector<std::size_t> keys(entries.size());
  par::parallel_for(std::int64_t{0}, count, [&](std::int64_t i) {
    const Entry& e = entries[i];
    keys[i] = index(e.list, slot_of(e.gain), static_cast<int>(e.vertex % rho_));
    par::atomic_add(offsets_[keys[i]], EdgeId{1});
  });
  par::exclusive_scan_inplace(std::span<EdgeId>(offsets_));
  vertices_.assign(entries.size(), kInvalidVertex);
  std::vector<EdgeId> cursor(offsets_.begin(), offsets_.end() - 1);
  par::parallel_for(std::int64_t{0}, count, [&](std::int64_t i) {
    const EdgeId pos = std::atomic_ref<EdgeId>(cursor[keys[i]]).fetch_add(1, std::memory_order_relaxed);
    vertices_[pos] = entries[i].vertex;
  });
  const auto buckets = static_cast<std::int64_t>(offsets_.size() - 1);
  par::parallel_for(std::int64_t{0}, buckets, [&](std::int64_t b) {
    std::sort(vertices_.begin() + offsets_[b], vertices_.begin() + offsets_[b + 1]);
  });
}

std::span<const VertexId> BucketList::list(int l) const {
  const EdgeId begin = offsets_[index(l, 0, 0)];
  const EdgeId end = offsets_[index(l + 1, 0, 0)];
  return std::span<const VertexId>(vertices_).subspan(begin, end - begin);
}

std::span<const VertexId> BucketList::bucket(int l, int slot, int mini) const {
  const std::size_t i = index(l, slot, mini);
  return std::span<const VertexId>(vertices_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

MoveProposal label_propagation_pass(const Graph& g, const Topology& t, const Mapping& m,
                                    const BlockConnectivity& conn, std::span<const std::uint8_t> locked,
                                    const RefinementConfig& cfg) {
  const VertexId n = g.n();
  MoveProposal proposal;
  proposal.candidates.assign(static_cast<std::size_t>(n), 0);
  proposal.destination.assign(m.assignment().begin(), m.assignment().end());
  proposal.gains.assign(static_cast<std::size_t>(n), 0);
  proposal.locked.assign(static_cast<std::size_t>(n), 0);

  // First pass: best neighboring block per vertex, filtered.
  par::parallel_for(VertexId{0}, n, [&](VertexId v) {
    if (!locked.empty() && locked[v]) return;
    const BlockId from = m.block(v);
    BlockId best = kInvalidBlock;
    Cost best_gain = 0;
    conn.for_each(v, [&](BlockId b, Weight) {
      if (b == from) return;
      const Cost gv = conn.gain(t, m, v, b);
      if (best == kInvalidBlock || gv > best_gain || (gv == best_gain && b < best)) {
        best = b;
        best_gain = gv;
      }
    });
    if (best == kInvalidBlock) return;
    if (passes_first_filter(cfg, best_gain, conn.conn(v, from))) {
      proposal.candidates[v] = 1;
      proposal.destination[v] = best;
      proposal.gains[v] = best_gain;
    }
  });

  // Second pass: re-evaluate under the assumption that every candidate ranked
  // earlier (higher gain, then lower id) has already moved.
  const auto earlier = [&](VertexId u, VertexId v) {
    return proposal.candidates[u] &&
           (proposal.gains[u] > proposal.gains[v] || (proposal.gains[u] == proposal.gains[v] && u < v));
  };
  par::parallel_for(VertexId{0}, n, [&](VertexId v) {
    if (!proposal.candidates[v]) return;
    const BlockId from = m.block(v);
    const BlockId to = proposal.destination[v];
    Cost future_gain = 0;
    for (EdgeId e = g.first_edge(v); e < g.end_edge(v); ++e) {
      const VertexId u = g.target(e);
      const BlockId other = earlier(u, v) ? proposal.destination[u] : m.block(u);
      future_gain += g.edge_weight(e) * (t.distance(from, other) - t.distance(to, other));
    }
    if (future_gain >= 0) proposal.locked[v] = 1;
  });

  for (VertexId v = 0; v < n; ++v) {
    if (proposal.locked[v]) proposal.moves.push_back({v, proposal.destination[v]});
  }
  return proposal;
}

MoveProposal weak_rebalance(const Graph& g, const Topology& t, const Mapping& m, const BlockConnectivity& conn,
                            double sigma, const BalanceSpec& balance, const RefinementConfig& cfg,
                            std::uint64_t round) {
  MoveProposal proposal;
  const auto candidates = rebalance_candidates(g, t, m, conn, sigma, balance, cfg, round, proposal.incomplete);

  std::vector<BucketList::Entry> entries;
  for (VertexId v = 0; v < g.n(); ++v) {
    if (candidates[v].to != kInvalidBlock) entries.push_back({m.block(v), candidates[v].gain, v});
  }
  if (entries.empty()) return proposal;
  BucketList buckets(m.k(), cfg.rho);
  buckets.build(entries);

  for (BlockId b = 0; b < m.k(); ++b) {
    if (balance.fits(m.block_weight(b))) continue;
    const double excess = static_cast<double>(m.block_weight(b)) - balance.l_max;
    Weight moved = 0;
    for (const VertexId v : buckets.list(b)) {
      if (static_cast<double>(moved) >= excess) break;
      proposal.moves.push_back({v, candidates[v].to});
      moved += g.vertex_weight(v);
    }
    if (static_cast<double>(moved) < excess) proposal.incomplete = true;
  }
  return proposal;
}

MoveProposal strong_rebalance(const Graph& g, const Topology& t, const Mapping& m, const BlockConnectivity& conn,
                              double sigma, const BalanceSpec& balance, const RefinementConfig& cfg,
                              std::uint64_t round) {
  MoveProposal proposal;
  const auto candidates = rebalance_candidates(g, t, m, conn, sigma, balance, cfg, round, proposal.incomplete);

  std::vector<BucketList::Entry> entries;
  for (VertexId v = 0; v < g.n(); ++v) {
    if (candidates[v].to != kInvalidBlock) entries.push_back({candidates[v].to, candidates[v].gain, v});
  }
  if (entries.empty()) return proposal;
  BucketList buckets(m.k(), cfg.rho);
  buckets.build(entries);

  for (BlockId target = 0; target < m.k(); ++target) {
    Weight weight = m.block_weight(target);
    for (const VertexId v : buckets.list(target)) {
      if (!balance.fits(weight + g.vertex_weight(v))) break;
      proposal.moves.push_back({v, target});
      weight += g.vertex_weight(v);
    }
  }
  return proposal;
}

RefineResult refine(const Graph& g, const Topology& t, const Mapping& m, BlockConnectivity& conn,
                    const RefinementConfig& cfg, const BalanceSpec& balance) {
  cfg.validate();
  const double sigma = balance.l_max - cfg.sigma_fraction * balance.l_max;

  Mapping current = m;
  RefineResult best{m, total_cost(g, t, m), balance.fits(m.max_block_weight()), 0};
  Weight best_imbalance = m.max_block_weight();
  bool current_is_best = true;

  std::vector<std::uint8_t> locked(static_cast<std::size_t>(g.n()), 0);
  int i = 0;
  int iw = 0;
  std::uint64_t round = 0;
  while (i < cfg.i_max) {
    MoveProposal proposal;
    const bool balanced_now = balance.fits(current.max_block_weight());
    if (balanced_now) {
      const bool had_locks = std::any_of(locked.begin(), locked.end(), [](std::uint8_t f) { return f != 0; });
      proposal = label_propagation_pass(g, t, current, conn, locked, cfg);
      locked = std::move(proposal.locked);
      iw = 0;
      // Nothing moved and nothing was locked: every further pass is identical.
      if (proposal.moves.empty() && !had_locks) break;
    } else {
      std::fill(locked.begin(), locked.end(), 0);
      if (iw < cfg.iw_max) {
        proposal = weak_rebalance(g, t, current, conn, sigma, balance, cfg, round);
        ++iw;
      } else {
        proposal = strong_rebalance(g, t, current, conn, sigma, balance, cfg, round);
        iw = 0;
      }
    }
    ++round;
    ++best.iterations;
    apply_moves(g, current, conn, proposal.moves);
    ++i;
    current_is_best = false;

    const Weight imbalance = current.max_block_weight();
    if (balance.fits(imbalance)) {
      const Cost cost = total_cost(g, t, current);
      if (!best.balanced || cost < best.cost) {
        const bool significant = !best.balanced || static_cast<double>(cost) < cfg.phi * static_cast<double>(best.cost);
        best.mapping = current;
        best.cost = cost;
        best.balanced = true;
        best_imbalance = imbalance;
        current_is_best = true;
        if (significant) i = 0;
      }
    } else if (!best.balanced && imbalance < best_imbalance) {
      best.mapping = current;
      best.cost = total_cost(g, t, current);
      best_imbalance = imbalance;
      current_is_best = true;
      i = 0;
    }
  }
  if (!current_is_best) conn = BlockConnectivity(g, best.mapping);
  return best;
}

}  // namespace promap
