// Multigraph port numbering. Each node numbers its incoming neighbor groups
// 1,2,... (edges from the same tail share a group, i.e. parallel edges share
// a port) ordered by the group's earliest timestamp; likewise its outgoing
// neighbor groups. Ties between groups with equal earliest timestamps break
// by ascending neighbor node id, a deterministic rule that sacrifices strict
// permutation invariance only on exact timestamp ties.
#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "multignn/graph.hpp"

namespace multignn {

struct PortAssignment {
  // Indexed by edge id. in_port[e] is the numbering that dst(e) gives to the
  // tail group of e; out_port[e] is the numbering that src(e) gives to the
  // head group of e. Both are 1-based.
  std::vector<std::uint32_t> in_port;
  std::vector<std::uint32_t> out_port;
};

namespace detail {

// Numbers the neighbor groups of one node's adjacency list and writes the
// port of every member edge into `ports`.
inline void assign_side(const DirectedMultigraph& g,
                        const std::vector<std::pair<NodeId, EdgeId>>& adj,
                        std::vector<std::uint32_t>& ports) {
  if (adj.empty()) return;
  std::vector<std::pair<NodeId, EdgeId>> sorted = adj;
  std::sort(sorted.begin(), sorted.end());
  struct Group {
    std::int64_t earliest;
    NodeId neighbor;
    std::size_t begin, end;  // range in `sorted`
  };
  std::vector<Group> groups;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    std::int64_t earliest = g.edges[sorted[i].second].timestamp;
    while (j < sorted.size() && sorted[j].first == sorted[i].first) {
      earliest = std::min(earliest, g.edges[sorted[j].second].timestamp);
      ++j;
    }
    groups.push_back({earliest, sorted[i].first, i, j});
    i = j;
  }
  std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    if (a.earliest != b.earliest) return a.earliest < b.earliest;
    return a.neighbor < b.neighbor;
  });
  for (std::size_t p = 0; p < groups.size(); ++p) {
    for (std::size_t i = groups[p].begin; i < groups[p].end; ++i) {
      ports[sorted[i].second] = static_cast<std::uint32_t>(p + 1);
    }
  }
}

}  // namespace detail

// Pure function of (graph, timestamps). For every node v the distinct
// in-port values on its incoming edges are exactly {1..fan_in(v)}, and two
// incoming edges share an in-port iff they share a tail; symmetrically for
// out-ports. Self-loops get ports in both the in- and out-groups of their
// node.
inline PortAssignment assign_ports(const DirectedMultigraph& g) {
  PortAssignment p;
  p.in_port.assign(g.num_edges(), 0);
  p.out_port.assign(g.num_edges(), 0);
  for (NodeId v = 0; v < g.n; ++v) {
    detail::assign_side(g, g.in_adj[v], p.in_port);
    detail::assign_side(g, g.out_adj[v], p.out_port);
  }
  return p;
}

// Per-edge feature vectors extended by the raw (in_port, out_port) pair.
inline std::vector<std::vector<double>> ports_as_edge_features(
    const DirectedMultigraph& g, const PortAssignment& p) {
  std::vector<std::vector<double>> feats(g.num_edges());
  for (const EdgeRecord& e : g.edges) {
    std::vector<double> f = e.features;
    f.push_back(static_cast<double>(p.in_port[e.id]));
    f.push_back(static_cast<double>(p.out_port[e.id]));
    feats[e.id] = std::move(f);
  }
  return feats;
}

}  // namespace multignn
