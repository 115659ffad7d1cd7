// Directed multigraph core: timestamped, feature-carrying parallel edges with
// dual adjacency indices, plus degree and fan (distinct-neighbor) statistics.
// Graphs are immutable after construction and safe for concurrent reads.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace multignn {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

// Sentinel: build_graph assigns ids by insertion order when every edge
// carries it.
inline constexpr EdgeId kAutoEdgeId = std::numeric_limits<EdgeId>::max();

enum class Direction { In, Out };

struct EdgeRecord {
  EdgeId id = kAutoEdgeId;
  NodeId src = 0;
  NodeId dst = 0;
  std::int64_t timestamp = 0;
  std::vector<double> features;  // possibly empty; uniform width per graph
};

// Convenience constructor for fixtures and generators.
inline EdgeRecord edge(NodeId src, NodeId dst, std::int64_t timestamp = 0,
                       std::vector<double> features = {}) {
  return EdgeRecord{kAutoEdgeId, src, dst, timestamp, std::move(features)};
}

struct DirectedMultigraph {
  std::size_t n = 0;
  // Indexed by edge id (dense in [0, m)).
  std::vector<EdgeRecord> edges;
  // out_adj[v] lists (head, edge id) over edges v->head; in_adj[v] lists
  // (tail, edge id) over edges tail->v. Exact inverses of each other.
  std::vector<std::vector<std::pair<NodeId, EdgeId>>> out_adj;
  std::vector<std::vector<std::pair<NodeId, EdgeId>>> in_adj;
  // Optional: size n when present.
  std::vector<std::vector<double>> node_features;
  // Optional symbolic names from CSV ingestion; size n when present.
  std::vector<std::string> node_names;

  std::size_t num_edges() const { return edges.size(); }
};

// Validates endpoints and edge ids and builds both adjacency indices.
// Ids must either all be kAutoEdgeId (assigned 0..m-1 in insertion order) or
// form a dense permutation of [0, m); `edges` is stored indexed by id, which
// preserves insertion order for in-order inputs. Self-loops and parallel
// edges are permitted here (generators may impose stricter rules).
inline DirectedMultigraph build_graph(std::size_t n,
                                      std::vector<EdgeRecord> edges) {
  const std::size_t m = edges.size();
  std::size_t auto_ids = 0;
  for (const EdgeRecord& e : edges) {
    if (e.src >= n || e.dst >= n) {
      throw std::invalid_argument(
          "build_graph: edge endpoint out of range: " +
          std::to_string(e.src) + "->" + std::to_string(e.dst) + " with n=" +
          std::to_string(n));
    }
    if (e.id == kAutoEdgeId) ++auto_ids;
  }
  if (auto_ids != 0 && auto_ids != m) {
    throw std::invalid_argument(
        "build_graph: either all or none of the edge ids may be omitted");
  }

  DirectedMultigraph g;
  g.n = n;
  g.edges.resize(m);
  if (auto_ids == m) {
    for (std::size_t i = 0; i < m; ++i) {
      edges[i].id = static_cast<EdgeId>(i);
      g.edges[i] = std::move(edges[i]);
    }
  } else {
    std::vector<bool> seen(m, false);
    for (EdgeRecord& e : edges) {
      if (e.id >= m) {
        throw std::invalid_argument("build_graph: edge ids must be dense in [0, m); got id " +
                                    std::to_string(e.id) + " with m=" + std::to_string(m));
      }
      if (seen[e.id]) {
        throw std::invalid_argument("build_graph: duplicate edge id " +
                                    std::to_string(e.id));
      }
      seen[e.id] = true;
      g.edges[e.id] = std::move(e);
    }
  }

  g.out_adj.resize(n);
  g.in_adj.resize(n);
  for (const EdgeRecord& e : g.edges) {
    g.out_adj[e.src].emplace_back(e.dst, e.id);
    g.in_adj[e.dst].emplace_back(e.src, e.id);
  }
  return g;
}

inline void check_node(const DirectedMultigraph& g, NodeId v,
                       const char* who) {
  if (v >= g.n) {
    throw std::out_of_range(std::string(who) + ": node " + std::to_string(v) +
                            " out of range (n=" + std::to_string(g.n) + ")");
  }
}

// Edge-multiplicity counts: parallel edges counted separately.
inline std::size_t degree_in(const DirectedMultigraph& g, NodeId v) {
  check_node(g, v, "degree_in");
  return g.in_adj[v].size();
}

inline std::size_t degree_out(const DirectedMultigraph& g, NodeId v) {
  check_node(g, v, "degree_out");
  return g.out_adj[v].size();
}

inline std::vector<NodeId> distinct_neighbors(
    const std::vector<std::pair<NodeId, EdgeId>>& adj) {
  std::vector<NodeId> nbrs;
  nbrs.reserve(adj.size());
  for (const auto& [u, e] : adj) nbrs.push_back(u);
  std::sort(nbrs.begin(), nbrs.end());
  nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  return nbrs;
}

inline std::vector<NodeId> distinct_in_neighbors(const DirectedMultigraph& g,
                                                 NodeId v) {
  check_node(g, v, "distinct_in_neighbors");
  return distinct_neighbors(g.in_adj[v]);
}

inline std::vector<NodeId> distinct_out_neighbors(const DirectedMultigraph& g,
                                                  NodeId v) {
  check_node(g, v, "distinct_out_neighbors");
  return distinct_neighbors(g.out_adj[v]);
}

// Distinct-neighbor counts: parallel edges counted once. A node that is both
// an in- and out-neighbor contributes to both fans.
inline std::size_t fan_in(const DirectedMultigraph& g, NodeId v) {
  check_node(g, v, "fan_in");
  return distinct_neighbors(g.in_adj[v]).size();
}

inline std::size_t fan_out(const DirectedMultigraph& g, NodeId v) {
  check_node(g, v, "fan_out");
  return distinct_neighbors(g.out_adj[v]).size();
}

}  // namespace multignn
