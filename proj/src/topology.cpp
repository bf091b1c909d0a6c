// SPDX-License-Identifier: Apache-2.0
#include "promap/topology.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace promap {
namespace {

template <typename T>
std::vector<T> parse_colon_list(std::string_view text, const char* what) {
  std::vector<T> values;
  if (text.empty()) throw std::invalid_argument(std::string(what) + " is empty");
  std::size_t start = 0;
  while (true) {
    const auto end = text.find(':', start);
    const auto token = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    T value{};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
      throw std::invalid_argument(std::string(what) + ": cannot parse '" + std::string(token) + "' as an integer");
    }
    values.push_back(value);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return values;
}

}  // namespace

Topology::Topology(std::vector<int> hierarchy, std::vector<Weight> distances)
    : hierarchy_(std::move(hierarchy)), distances_(std::move(distances)) {
  if (hierarchy_.empty()) throw std::invalid_argument("hierarchy needs at least one level");
  if (hierarchy_.size() != distances_.size()) {
    throw std::invalid_argument("hierarchy and distance vectors differ in length");
  }
  prefix_.assign(hierarchy_.size() + 1, 1);
  for (std::size_t i = 0; i < hierarchy_.size(); ++i) {
    if (hierarchy_[i] < 1) throw std::invalid_argument("hierarchy entries must be >= 1");
    if (distances_[i] < 0) throw std::invalid_argument("distances must be nonnegative");
    if (i > 0 && distances_[i] < distances_[i - 1]) throw std::invalid_argument("distances must be nondecreasing");
    if (prefix_[i] > std::numeric_limits<int>::max() / hierarchy_[i]) {
      throw std::invalid_argument("PE count overflows");
    }
    prefix_[i + 1] = prefix_[i] * hierarchy_[i];
  }
  k_ = prefix_.back();
}

Topology Topology::flat(int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  return Topology({k}, {1});
}

Topology Topology::parse(std::string_view hierarchy, std::string_view distances) {
  return Topology(parse_colon_list<int>(hierarchy, "hierarchy"), parse_colon_list<Weight>(distances, "distance"));
}

Weight Topology::pe_distance(BlockId x, BlockId y) const {
  if (x < 0 || y < 0 || x >= k_ || y >= k_) {
    throw std::out_of_range("PE id out of range [0," + std::to_string(k_) + ")");
  }
  return distance(x, y);
}

BlockId Topology::calc_id(std::span<const int> identifier) const {
  if (static_cast<int>(identifier.size()) != levels()) {
    throw std::invalid_argument("identifier length must equal the number of levels");
  }
  BlockId id = 0;
  // identifier[0] is the topmost level l, identifier[l-1] is level 1.
  for (int pos = 0; pos < levels(); ++pos) {
    const int level = levels() - pos;
    const int branch = identifier[pos];
    if (branch < 0 || branch >= arity(level)) throw std::out_of_range("identifier entry out of range");
    id += branch * prefix_[level - 1];
  }
  return id;
}

std::vector<int> Topology::identifier_of(BlockId id) const {
  if (id < 0 || id >= k_) throw std::out_of_range("PE id out of range");
  std::vector<int> identifier(hierarchy_.size());
  for (int level = 1; level <= levels(); ++level) {
    identifier[levels() - level] = (id / prefix_[level - 1]) % arity(level);
  }
  return identifier;
}

std::string Topology::to_string() const {
  std::string h;
  std::string d;
  for (std::size_t i = 0; i < hierarchy_.size(); ++i) {
    if (i > 0) {
      h += ':';
      d += ':';
    }
    h += std::to_string(hierarchy_[i]);
    d += std::to_string(distances_[i]);
  }
  return "H=" + h + " D=" + d;
}

BalanceSpec BalanceSpec::make(double epsilon, Weight total_weight, int k) {
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be nonnegative");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  return {epsilon, total_weight, k, (1.0 + epsilon) * static_cast<double>(total_weight) / static_cast<double>(k)};
}

BalanceSpec BalanceSpec::with_limit(double l_max, Weight total_weight, int k) {
  return {l_max * static_cast<double>(k) / static_cast<double>(total_weight) - 1.0, total_weight, k, l_max};
}

double adaptive_imbalance(double epsilon, Weight total_weight, Weight sub_weight, int k, int sub_blocks, int depth) {
  if (sub_weight <= 0) throw std::invalid_argument("subgraph weight must be positive");
  if (total_weight <= 0 || k < 1 || sub_blocks < 1 || depth < 1) {
    throw std::invalid_argument("adaptive imbalance needs positive weights, block counts and depth");
  }
  const double ratio = (1.0 + epsilon) * static_cast<double>(sub_blocks) * static_cast<double>(total_weight) /
                       (static_cast<double>(k) * static_cast<double>(sub_weight));
  const double value = std::pow(ratio, 1.0 / static_cast<double>(depth)) - 1.0;
  return std::max(0.0, value);
}

}  // namespace promap
