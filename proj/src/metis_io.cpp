// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "promap/graph.hpp"

namespace promap {
namespace {

bool is_comment(std::string_view line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos != std::string_view::npos && line[pos] == '%';
}

bool is_blank(std::string_view line) { return line.find_first_not_of(" \t\r") == std::string_view::npos; }

/// Parses all whitespace-separated integers on a line.
std::vector<std::int64_t> parse_ints(std::string_view line, std::size_t line_no) {
  std::vector<std::int64_t> values;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, value);
    if (ec != std::errc{} || ptr != line.data() + j) {
      throw GraphFormatError(line_no, "expected an integer, got '" + std::string(line.substr(i, j - i)) + "'");
    }
    values.push_back(value);
    i = j;
  }
  return values;
}

}  // namespace

Graph parse_metis(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::int64_t> header;
  std::size_t header_line = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment(line)) continue;
    header = parse_ints(line, line_no);
    header_line = line_no;
    break;
  }
  if (header_line == 0) throw GraphFormatError(0, "missing header");
  if (header.size() < 2 || header.size() > 3) {
    throw GraphFormatError(header_line, "header must be 'n m [fmt]'");
  }
  const std::int64_t n = header[0];
  const std::int64_t m = header[1];
  const std::int64_t fmt = header.size() == 3 ? header[2] : 0;
  if (n < 0 || m < 0) throw GraphFormatError(header_line, "negative vertex or edge count");
  if (n > std::numeric_limits<VertexId>::max()) throw GraphFormatError(header_line, "too many vertices");
  if (fmt != 0 && fmt != 1 && fmt != 10 && fmt != 11) {
    throw GraphFormatError(header_line, "unsupported fmt " + std::to_string(fmt) + " (expected 0, 1, 10 or 11)");
  }
  const bool has_vertex_weights = fmt / 10 == 1;
  const bool has_edge_weights = fmt % 10 == 1;

  std::vector<EdgeId> offsets{0};
  std::vector<VertexId> targets;
  std::vector<Weight> edge_weights;
  std::vector<Weight> vertex_weights;
  std::vector<std::size_t> vertex_line;
  offsets.reserve(static_cast<std::size_t>(n) + 1);
  targets.reserve(static_cast<std::size_t>(2 * m));
  edge_weights.reserve(static_cast<std::size_t>(2 * m));

  while (static_cast<std::int64_t>(vertex_weights.size()) < n && std::getline(in, line)) {
    ++line_no;
    if (is_comment(line)) continue;
    const auto values = parse_ints(line, line_no);
    const auto v = static_cast<VertexId>(vertex_weights.size());
    std::size_t pos = 0;
    Weight vw = 1;
    if (has_vertex_weights) {
      if (values.empty()) throw GraphFormatError(line_no, "missing vertex weight");
      vw = values[pos++];
      if (vw <= 0) throw GraphFormatError(line_no, "nonpositive vertex weight");
    }
    const std::size_t stride = has_edge_weights ? 2 : 1;
    if ((values.size() - pos) % stride != 0) throw GraphFormatError(line_no, "neighbor without edge weight");
    for (; pos < values.size(); pos += stride) {
      const std::int64_t u = values[pos];
      if (u < 1 || u > n) throw GraphFormatError(line_no, "neighbor " + std::to_string(u) + " out of range");
      if (u - 1 == v) throw GraphFormatError(line_no, "self-loop");
      const Weight w = has_edge_weights ? values[pos + 1] : 1;
      if (w <= 0) throw GraphFormatError(line_no, "nonpositive edge weight");
      targets.push_back(static_cast<VertexId>(u - 1));
      edge_weights.push_back(w);
    }
    offsets.push_back(static_cast<EdgeId>(targets.size()));
    vertex_weights.push_back(vw);
    vertex_line.push_back(line_no);
  }
  if (static_cast<std::int64_t>(vertex_weights.size()) != n) {
    throw GraphFormatError(line_no, "wrong line count: expected " + std::to_string(n) + " vertex lines, found " +
                                        std::to_string(vertex_weights.size()));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!is_comment(line) && !is_blank(line)) throw GraphFormatError(line_no, "trailing data after last vertex");
  }
  // Symmetry and duplicate check on sorted copies; the stored order is the file order.
  std::vector<std::pair<VertexId, Weight>> sorted(targets.size());
  for (std::size_t e = 0; e < targets.size(); ++e) sorted[e] = {targets[e], edge_weights[e]};
  for (std::int64_t v = 0; v < n; ++v) {
    auto first = sorted.begin() + offsets[v];
    auto last = sorted.begin() + offsets[v + 1];
    std::sort(first, last);
    if (std::adjacent_find(first, last, [](const auto& a, const auto& b) { return a.first == b.first; }) != last) {
      throw GraphFormatError(vertex_line[v], "duplicate neighbor");
    }
  }
  for (std::int64_t v = 0; v < n; ++v) {
    for (EdgeId e = offsets[v]; e < offsets[v + 1]; ++e) {
      const VertexId u = targets[e];
      auto first = sorted.begin() + offsets[u];
      auto last = sorted.begin() + offsets[u + 1];
      auto it = std::lower_bound(first, last, std::pair<VertexId, Weight>{static_cast<VertexId>(v), 0},
                                 [](const auto& a, const auto& b) { return a.first < b.first; });
      if (it == last || it->first != v) {
        throw GraphFormatError(vertex_line[u], "asymmetric adjacency: " + std::to_string(u + 1) +
                                                   " is not adjacent to " + std::to_string(v + 1));
      }
      if (it->second != edge_weights[e]) {
        throw GraphFormatError(vertex_line[u], "asymmetric edge weight on {" + std::to_string(v + 1) + "," +
                                                   std::to_string(u + 1) + "}");
      }
    }
  }
  if (static_cast<std::int64_t>(targets.size()) != 2 * m) {
    throw GraphFormatError(header_line, "header declares " + std::to_string(m) + " edges but adjacency lists hold " +
                                            std::to_string(targets.size()) + " entries (expected 2m)");
  }

  return Graph(std::move(offsets), std::move(targets), std::move(edge_weights), std::move(vertex_weights));
}

Graph load_metis(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file " + path.string());
  return parse_metis(in);
}

void write_metis(const Graph& g, std::ostream& out) {
  if (g.n() == 0) {
    out << "0 0\n";
    return;
  }
  out << g.n() << ' ' << g.m() << " 11\n";
  for (VertexId v = 0; v < g.n(); ++v) {
    out << g.vertex_weight(v);
    for (EdgeId e = g.first_edge(v); e < g.end_edge(v); ++e) {
      out << ' ' << (g.target(e) + 1) << ' ' << g.edge_weight(e);
    }
    out << '\n';
  }
}

void write_metis(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file " + path.string());
  write_metis(g, out);
  if (!out) throw std::runtime_error("I/O error while writing " + path.string());
}

}  // namespace promap
