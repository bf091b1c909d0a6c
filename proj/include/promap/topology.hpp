// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "promap/types.hpp"

namespace promap {

/// Homogeneous machine hierarchy H = a_1:...:a_l with per-level distances
/// D = d_1:...:d_l. Level 1 is the innermost (PEs sharing a processor).
///
/// PE ids are mixed-radix numbers whose least significant digit is the level-1
/// index (radix a_1). Two PEs whose digits differ first (from the top) at
/// level j communicate at cost d_j; a PE talks to itself at cost 0.
class Topology {
 public:
  Topology(std::vector<int> hierarchy, std::vector<Weight> distances);

  /// Single level with a_1 = k and d_1 = 1, which turns J into twice the edge-cut.
  static Topology flat(int k);

  /// Parses colon-separated lists such as "4:8:6" and "1:10:100".
  static Topology parse(std::string_view hierarchy, std::string_view distances);

  [[nodiscard]] int k() const { return k_; }
  [[nodiscard]] int levels() const { return static_cast<int>(hierarchy_.size()); }
  [[nodiscard]] std::span<const int> hierarchy() const { return hierarchy_; }
  [[nodiscard]] std::span<const Weight> distances() const { return distances_; }
  /// a_i for 1-based level i.
  [[nodiscard]] int arity(int level) const { return hierarchy_[level - 1]; }
  /// Product a_1 * ... * a_i; blocks_below(0) == 1 and blocks_below(l) == k.
  [[nodiscard]] int blocks_below(int level) const { return prefix_[level]; }

  /// D_xy. O(l) time, no k x k table.
  [[nodiscard]] Weight distance(BlockId x, BlockId y) const {
    if (x == y) return 0;
    for (int i = 1; i < levels(); ++i) {
      if (x / prefix_[i] == y / prefix_[i]) return distances_[i - 1];
    }
    return distances_.back();
  }

  /// Range-checked variant of `distance`.
  [[nodiscard]] Weight pe_distance(BlockId x, BlockId y) const;

  /// Maps an identifier (branch index per level, topmost level first) to the
  /// PE id. Siblings under one parent receive consecutive ids.
  [[nodiscard]] BlockId calc_id(std::span<const int> identifier) const;

  /// Inverse of `calc_id`.
  [[nodiscard]] std::vector<int> identifier_of(BlockId id) const;

  [[nodiscard]] std::string to_string() const;

 private:
  std::vector<int> hierarchy_;
  std::vector<Weight> distances_;
  std::vector<int> prefix_;
  int k_ = 1;
};

/// Balance constraint: every block may weigh at most
/// L_max = (1 + epsilon) * c(V) / k.
struct BalanceSpec {
  double epsilon = 0.0;
  Weight total_weight = 0;
  int k = 1;
  double l_max = 0.0;

  static BalanceSpec make(double epsilon, Weight total_weight, int k);
  /// For tests and sub-problems with an explicit bound.
  static BalanceSpec with_limit(double l_max, Weight total_weight, int k);

  [[nodiscard]] bool fits(Weight block_weight) const { return static_cast<double>(block_weight) <= l_max; }
};

/// Per-recursion imbalance that keeps the final k-way mapping epsilon-balanced:
///   eps' = ((1 + eps) * k' * c(V) / (k * c(V')))^(1/d) - 1, clamped at 0.
/// `sub_blocks` is k', the number of final blocks the subgraph will be split
/// into, and `depth` is d, the number of remaining levels including this one.
double adaptive_imbalance(double epsilon, Weight total_weight, Weight sub_weight, int k, int sub_blocks, int depth);

}  // namespace promap
