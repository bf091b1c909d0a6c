// SPDX-License-Identifier: Apache-2.0
//
// Mapping-aware refinement: unconstrained label propagation alternating with
// weak/strong rebalancing, keeping the best mapping seen.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "promap/graph.hpp"
#include "promap/mapping.hpp"
#include "promap/topology.hpp"

namespace promap {

enum class FilterMode {
  /// Only moves with gain >= 0 become candidates.
  kNonNegative,
  /// Edge-cut style filter: gain >= 0 or -gain < floor(c * conn(v, Pi(v))).
  /// The constant c (`jet_c`) is a tuning knob of this library, 0.25 by default.
  kJet,
};

struct RefinementConfig {
  /// Minimum relative improvement that resets the iteration counter.
  double phi = 0.999;
  int i_max = 12;
  /// Consecutive weak rebalancing rounds before one strong round.
  int iw_max = 2;
  /// sigma = L_max - sigma_fraction * L_max.
  double sigma_fraction = 0.005;
  /// Mini-buckets per bucket slot.
  int rho = 2;
  FilterMode filter = FilterMode::kNonNegative;
  double jet_c = 0.25;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-level parameters for the uncoarsening phase. Level 0 is the input
/// graph; `coarsest_level` the top of the level stack.
struct RefinementSchedule {
  double phi = 0.999;
  int i_max_base = 12;
  int iw_max = 2;
  int iw_max_finest = 10;
  double sigma_coarse = 0.065;
  double sigma_fine = 0.005;
  int rho = 2;
  FilterMode filter = FilterMode::kNonNegative;
  double jet_c = 0.25;
  std::uint64_t seed = 0;

  /// i_max = i_max_base + level; iw_max raised on level 0; sigma fraction
  /// interpolated linearly from sigma_coarse (coarsest) to sigma_fine (level 0).
  [[nodiscard]] RefinementConfig at_level(int level, int coarsest_level) const;
};

/// Approximately sorted gain lists. Gains fall into 31 slots
///   [+, 0, -1, ..., -10, -20, ..., -100, -200, ..., -1000, X]
/// where slot i holds L[i] >= gain > L[i+1], '+' every positive gain and X
/// every gain <= -1000 (so the -1000 slot itself stays empty). Each slot is
/// split into rho mini-buckets chosen by vertex id mod rho.
class BucketList {
 public:
  static constexpr int kSlots = 31;
  static constexpr int kPositiveSlot = 0;
  static constexpr int kOverflowSlot = kSlots - 1;

  /// Label of a slot: its upper gain bound (0 for '+' and X as markers).
  static Cost slot_label(int slot);
  static int slot_of(Cost gain);

  struct Entry {
    int list;
    Cost gain;
    VertexId vertex;
  };

  BucketList(int num_lists, int rho);

  /// Count, allocate, prefix-sum, insert. Mini-buckets are ordered by vertex.
  void build(std::span<const Entry> entries);

  /// Vertices of one list in slot order (+ first, X last).
  [[nodiscard]] std::span<const VertexId> list(int l) const;
  [[nodiscard]] std::span<const VertexId> bucket(int l, int slot, int mini) const;

 private:
  [[nodiscard]] std::size_t index(int l, int slot, int mini) const {
    return (static_cast<std::size_t>(l) * kSlots + static_cast<std::size_t>(slot)) * static_cast<std::size_t>(rho_) +
           static_cast<std::size_t>(mini);
  }

  int num_lists_;
  int rho_;
  std::vector<EdgeId> offsets_;
  std::vector<VertexId> vertices_;
};

struct MoveProposal {
  /// Vertices to move with their destination (the set M with Pi').
  std::vector<VertexMove> moves;
  /// Label propagation only: candidate set X, destinations Pi', first-pass gains.
  std::vector<std::uint8_t> candidates;
  std::vector<BlockId> destination;
  std::vector<Cost> gains;
  /// Label propagation only: locks for the next pass (= moved vertices).
  std::vector<std::uint8_t> locked;
  /// Rebalancing only: some overloaded vertex had no eligible destination.
  bool incomplete = false;
};

/// One unconstrained label propagation pass. Locked vertices are skipped.
MoveProposal label_propagation_pass(const Graph& g, const Topology& t, const Mapping& m,
                                    const BlockConnectivity& conn, std::span<const std::uint8_t> locked,
                                    const RefinementConfig& cfg);

/// Pushes vertices out of blocks heavier than L_max. Each overloaded block
/// moves a prefix of its own bucket list that sheds at least c(b) - L_max.
MoveProposal weak_rebalance(const Graph& g, const Topology& t, const Mapping& m, const BlockConnectivity& conn,
                            double sigma, const BalanceSpec& balance, const RefinementConfig& cfg,
                            std::uint64_t round = 0);

/// Lets blocks lighter than sigma pull vertices: each target accepts the
/// longest prefix of its bucket list that keeps it within L_max.
MoveProposal strong_rebalance(const Graph& g, const Topology& t, const Mapping& m, const BlockConnectivity& conn,
                              double sigma, const BalanceSpec& balance, const RefinementConfig& cfg,
                              std::uint64_t round = 0);

struct RefineResult {
  Mapping mapping;
  Cost cost = 0;
  bool balanced = false;
  int iterations = 0;
};

/// The refinement loop. Returns the best mapping encountered: the cheapest
/// balanced one, or the least imbalanced one if no balanced mapping was seen.
/// Never returns a balanced mapping costlier than a balanced input. `conn`
/// must match `m` on entry and matches the result on exit.
RefineResult refine(const Graph& g, const Topology& t, const Mapping& m, BlockConnectivity& conn,
                    const RefinementConfig& cfg, const BalanceSpec& balance);

}  // namespace promap
