// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>
#include <stdexcept>

#include "promap/pipelines.hpp"

namespace promap {
namespace {

/// Depth-first enumeration in vertex order. The partial cost only counts
/// edges to already placed vertices, so it is a lower bound and can prune.
class Enumerator {
 public:
  Enumerator(const Graph& g, const Topology& t, const BalanceSpec& balance)
      : g_(g), t_(t), balance_(balance), assignment_(static_cast<std::size_t>(g.n()), 0),
        weights_(static_cast<std::size_t>(t.k()), 0) {}

  void run() { place(0, 0); }

  bool found = false;
  Cost best_undirected = std::numeric_limits<Cost>::max();
  std::vector<BlockId> best_assignment;

 private:
  void place(VertexId v, Cost partial) {
    if (found && partial >= best_undirected) return;
    if (v == g_.n()) {
      found = true;
      best_undirected = partial;
      best_assignment = assignment_;
      return;
    }
    for (BlockId b = 0; b < t_.k(); ++b) {
      if (!balance_.fits(weights_[b] + g_.vertex_weight(v))) continue;
      Cost added = 0;
      for (EdgeId e = g_.first_edge(v); e < g_.end_edge(v); ++e) {
        const VertexId u = g_.target(e);
        if (u < v) added += g_.edge_weight(e) * t_.distance(b, assignment_[u]);
      }
      assignment_[v] = b;
      weights_[b] += g_.vertex_weight(v);
      place(v + 1, partial + added);
      weights_[b] -= g_.vertex_weight(v);
    }
  }

  const Graph& g_;
  const Topology& t_;
  const BalanceSpec& balance_;
  std::vector<BlockId> assignment_;
  std::vector<Weight> weights_;
};

}  // namespace

BruteForceResult brute_force_map(const Graph& g, const Topology& t, const BalanceSpec& balance, double max_states) {
  const double states = std::pow(static_cast<double>(t.k()), static_cast<double>(g.n()));
  if (states > max_states) {
    throw std::invalid_argument("instance too large for exhaustive search: k^n = " + std::to_string(states));
  }
  Enumerator search(g, t, balance);
  search.run();
  BruteForceResult result;
  result.feasible = search.found;
  if (search.found) {
    result.mapping = Mapping(g, t.k(), std::move(search.best_assignment));
    result.cost = 2 * search.best_undirected;
  }
  return result;
}

}  // namespace promap
