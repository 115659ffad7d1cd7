// Synchronous BFS assignment of unique node IDs in a connected directed
// multigraph with port numbering (edges traversable in both directions for
// connectivity). The root is labeled (1). In each round every node labeled in
// the previous round proposes an extension of its own label to each unlabeled
// neighbor: along an out-edge e=(v,u) the proposal is label(v) || out_port(e),
// along an in-edge e=(u,v) it is label(v) || (n + in_port(e)). Each proposal
// digit lies in [1, 2n], so labels are base-2n digit strings; receivers adopt
// the minimum proposal and the rest are recorded as declined. All labels are
// pairwise distinct and have exactly dist(root, v) + 1 digits.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "multignn/graph.hpp"
#include "multignn/ports.hpp"

namespace multignn {

struct NodeIdLabel {
  // Base-2n digits, most significant first, each in [1, 2n]. All proposals
  // in a round share a length, so lexicographic comparison of equal-length
  // digit strings equals numeric base-2n comparison.
  std::vector<std::uint32_t> digits;

  friend auto operator<=>(const NodeIdLabel&, const NodeIdLabel&) = default;

  // Digits are concatenated when unambiguous (all digits <= 9), otherwise
  // dot-separated.
  std::string to_string() const {
    bool compact = true;
    for (auto d : digits) {
      if (d > 9) {
        compact = false;
        break;
      }
    }
    std::string s;
    for (std::size_t i = 0; i < digits.size(); ++i) {
      if (i && !compact) s += '.';
      s += std::to_string(digits[i]);
    }
    return s;
  }
};

struct DeclinedProposal {
  std::uint32_t round = 0;  // 1-based round in which the proposal lost
  NodeId node = 0;          // receiver
  NodeIdLabel proposal;
};

struct NodeIdResult {
  std::vector<NodeIdLabel> labels;  // empty digits <=> unreached
  std::vector<std::uint8_t> reached;
  std::vector<DeclinedProposal> declined;
  std::vector<NodeId> unreachable;  // ascending
  std::uint32_t rounds = 0;
};

inline NodeIdResult assign_unique_ids(const DirectedMultigraph& g,
                                      const PortAssignment& ports,
                                      NodeId root) {
  check_node(g, root, "assign_unique_ids");
  NodeIdResult res;
  res.labels.resize(g.n);
  res.reached.assign(g.n, 0);
  res.labels[root].digits = {1};
  res.reached[root] = 1;

  const auto n = static_cast<std::uint32_t>(g.n);
  std::vector<NodeId> frontier{root};
  std::uint32_t round = 0;
  while (!frontier.empty()) {
    ++round;
    // receiver -> proposals made this round (map keeps receivers ordered so
    // the declined-trace order is deterministic).
    std::map<NodeId, std::vector<NodeIdLabel>> proposals;
    for (NodeId v : frontier) {
      for (const auto& [u, e] : g.out_adj[v]) {
        if (res.reached[u]) continue;
        NodeIdLabel prop = res.labels[v];
        prop.digits.push_back(ports.out_port[e]);
        proposals[u].push_back(std::move(prop));
      }
      for (const auto& [u, e] : g.in_adj[v]) {
        if (res.reached[u]) continue;
        NodeIdLabel prop = res.labels[v];
        prop.digits.push_back(n + ports.in_port[e]);
        proposals[u].push_back(std::move(prop));
      }
    }
    std::vector<NodeId> next;
    next.reserve(proposals.size());
    for (auto& [u, props] : proposals) {
      std::sort(props.begin(), props.end());
      res.labels[u] = props.front();
      res.reached[u] = 1;
      next.push_back(u);
      for (std::size_t i = 1; i < props.size(); ++i) {
        res.declined.push_back({round, u, std::move(props[i])});
      }
    }
    frontier = std::move(next);
  }
  res.rounds = round - 1;
  for (NodeId v = 0; v < g.n; ++v) {
    if (!res.reached[v]) res.unreachable.push_back(v);
  }
  return res;
}

}  // namespace multignn
