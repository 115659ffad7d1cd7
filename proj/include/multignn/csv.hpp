// CSV ingestion/export for edge lists, port tables, and label matrices.
// Edge list format: header `edge_id,src,dst,timestamp,feat_0..feat_{k-1}`
// (edge_id optional). Node tokens may be integers or symbolic names; names
// are mapped to dense ids by first appearance and preserved for output.
// All writers are deterministic: identical inputs produce identical bytes.
#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "multignn/graph.hpp"
#include "multignn/ports.hpp"

namespace multignn {

// Shortest representation that round-trips exactly through from_chars.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
    out.back().pop_back();
  }
  return out;
}

inline bool parse_u64(std::string_view s, std::uint64_t& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e && !s.empty();
}

inline bool parse_i64(std::string_view s, std::int64_t& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e && !s.empty();
}

inline double parse_double_or_throw(const std::string& s, std::size_t lineno,
                                    const std::string& path) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) +
                             ": not a number: '" + s + "'");
  }
  return v;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

}  // namespace detail

inline std::string node_token(const DirectedMultigraph& g, NodeId v) {
  return g.node_names.empty() ? std::to_string(v) : g.node_names[v];
}

inline void write_edge_csv(const std::string& path,
                           const DirectedMultigraph& g) {
  auto out = detail::open_out(path);
  const std::size_t k = g.num_edges() ? g.edges[0].features.size() : 0;
  out << "edge_id,src,dst,timestamp";
  for (std::size_t j = 0; j < k; ++j) out << ",feat_" << j;
  out << "\n";
  for (const EdgeRecord& e : g.edges) {
    if (e.features.size() != k) {
      throw std::runtime_error(
          "write_edge_csv: non-uniform edge feature width");
    }
    out << e.id << ',' << node_token(g, e.src) << ',' << node_token(g, e.dst)
        << ',' << e.timestamp;
    for (double f : e.features) out << ',' << format_double(f);
    out << "\n";
  }
}

// Reads an edge-list CSV. `min_nodes` lets callers widen the node range
// beyond max(endpoint)+1 (isolated trailing nodes cannot appear in an edge
// list). Symbolic node tokens are assigned dense ids by first appearance.
inline DirectedMultigraph read_edge_csv(const std::string& path,
                                        std::size_t min_nodes = 0) {
  auto in = detail::open_in(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ": empty file (missing header)");
  }
  const auto header = detail::split_csv_line(line);
  std::size_t col = 0;
  const bool has_id = !header.empty() && header[0] == "edge_id";
  if (has_id) ++col;
  if (header.size() < col + 3 || header[col] != "src" ||
      header[col + 1] != "dst" || header[col + 2] != "timestamp") {
    throw std::runtime_error(
        path + ": header must be [edge_id,]src,dst,timestamp[,feat_*]");
  }
  const std::size_t nfeat = header.size() - col - 3;

  std::vector<EdgeRecord> edges;
  std::vector<std::string> names;
  std::unordered_map<std::string, NodeId> name_to_id;
  bool symbolic = false;
  std::uint64_t max_node = 0;
  auto intern = [&](const std::string& tok, std::size_t lineno) -> NodeId {
    if (!symbolic) {
      std::uint64_t v = 0;
      if (detail::parse_u64(tok, v)) {
        max_node = std::max(max_node, v);
        return static_cast<NodeId>(v);
      }
      if (!edges.empty()) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": mixed numeric and symbolic node tokens");
      }
      symbolic = true;  // first row decides
    }
    auto [it, inserted] =
        name_to_id.emplace(tok, static_cast<NodeId>(names.size()));
    if (inserted) names.push_back(tok);
    return it->second;
  };

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(header.size()) +
                               " cells, got " + std::to_string(cells.size()));
    }
    EdgeRecord e;
    std::size_t c = 0;
    if (has_id) {
      std::uint64_t id = 0;
      if (!detail::parse_u64(cells[c], id)) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": bad edge_id '" + cells[c] + "'");
      }
      e.id = static_cast<EdgeId>(id);
      ++c;
    }
    // Symbolic tokens get ids in first-appearance order; numeric tokens are
    // taken literally.
    const NodeId src = intern(cells[c], lineno);
    const NodeId dst = intern(cells[c + 1], lineno);
    e.src = src;
    e.dst = dst;
    if (!detail::parse_i64(cells[c + 2], e.timestamp)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": bad timestamp '" + cells[c + 2] + "'");
    }
    e.features.reserve(nfeat);
    for (std::size_t j = 0; j < nfeat; ++j) {
      e.features.push_back(
          detail::parse_double_or_throw(cells[c + 3 + j], lineno, path));
    }
    edges.push_back(std::move(e));
  }

  std::size_t n = symbolic ? names.size()
                           : (edges.empty() ? 0 : static_cast<std::size_t>(max_node) + 1);
  n = std::max(n, min_nodes);
  DirectedMultigraph g = build_graph(n, std::move(edges));
  if (symbolic) g.node_names = std::move(names);
  return g;
}

inline void write_ports_csv(const std::string& path,
                            const DirectedMultigraph& g,
                            const PortAssignment& p) {
  auto out = detail::open_out(path);
  out << "edge_id,in_port,out_port\n";
  for (const EdgeRecord& e : g.edges) {
    out << e.id << ',' << p.in_port[e.id] << ',' << p.out_port[e.id] << "\n";
  }
}

}  // namespace multignn
