// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>
#include <random>

#include "promap/graph.hpp"

namespace promap {
namespace {

// Portable uniform double in [0, 1); std::uniform_real_distribution is not
// specified bit-exactly across standard libraries.
double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Graph gen_grid(std::int64_t rows, std::int64_t cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid dimensions must be positive");
  if (rows > std::numeric_limits<VertexId>::max() / cols) throw std::overflow_error("grid vertex count overflows");
  const std::int64_t edges = rows * (cols - 1) + cols * (rows - 1);
  if (edges > std::numeric_limits<EdgeId>::max() / 2) throw std::overflow_error("grid edge count overflows");

  const auto n = static_cast<VertexId>(rows * cols);
  std::vector<std::tuple<VertexId, VertexId, Weight>> list;
  list.reserve(static_cast<std::size_t>(edges));
  for (std::int64_t r = 0; r < rows; ++r) {
    for (std::int64_t c = 0; c < cols; ++c) {
      const auto v = static_cast<VertexId>(r * cols + c);
      if (c + 1 < cols) list.emplace_back(v, v + 1, 1);
      if (r + 1 < rows) list.emplace_back(v, static_cast<VertexId>(v + cols), 1);
    }
  }
  return Graph::from_edges(n, list);
}

Graph gen_rgg(std::int64_t n, double radius_factor, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("rgg needs at least 2 vertices");
  if (n > std::numeric_limits<VertexId>::max()) throw std::overflow_error("rgg vertex count overflows");
  if (!(radius_factor > 0.0)) throw std::invalid_argument("radius factor must be positive");

  const double radius = radius_factor * std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(n));
  std::mt19937_64 rng(seed);
  std::vector<double> xs(static_cast<std::size_t>(n));
  std::vector<double> ys(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    xs[i] = unit_double(rng);
    ys[i] = unit_double(rng);
  }

  // Bucket points into cells of side >= radius; only neighboring cells can hold partners.
  const auto cells_per_side = std::max<std::int64_t>(1, static_cast<std::int64_t>(1.0 / radius));
  const auto cell_of = [&](double coord) {
    return std::min<std::int64_t>(cells_per_side - 1, static_cast<std::int64_t>(coord * static_cast<double>(cells_per_side)));
  };
  std::vector<std::vector<VertexId>> cells(static_cast<std::size_t>(cells_per_side * cells_per_side));
  for (std::int64_t i = 0; i < n; ++i) {
    cells[cell_of(ys[i]) * cells_per_side + cell_of(xs[i])].push_back(static_cast<VertexId>(i));
  }

  const double r2 = radius * radius;
  std::vector<std::tuple<VertexId, VertexId, Weight>> list;
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t cx = cell_of(xs[i]);
    const std::int64_t cy = cell_of(ys[i]);
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        const std::int64_t nx = cx + dx;
        const std::int64_t ny = cy + dy;
        if (nx < 0 || ny < 0 || nx >= cells_per_side || ny >= cells_per_side) continue;
        for (const VertexId j : cells[ny * cells_per_side + nx]) {
          if (j <= i) continue;
          const double ddx = xs[i] - xs[j];
          const double ddy = ys[i] - ys[j];
          if (ddx * ddx + ddy * ddy < r2) list.emplace_back(static_cast<VertexId>(i), j, 1);
        }
      }
    }
  }
  return Graph::from_edges(static_cast<VertexId>(n), list);
}

}  // namespace promap
