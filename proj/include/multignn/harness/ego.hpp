// Ego-subgraph sampling for node-level tasks: breadth-first expansion over
// edges in both directions up to a hop budget, then the subgraph induced on
// the reached node set. The center is marked downstream with a binary ego
// flag feature. Port features are inherited from the full graph, not
// recomputed, so a node's ports keep their global meaning inside the sample.
// An optional per-direction neighbor cap subsamples each node's distinct
// in-/out-neighbor lists with the run's PRNG stream.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "multignn/graph.hpp"
#include "multignn/rng.hpp"

namespace multignn {

struct EgoSubgraph {
  NodeId center = 0;             // global node id
  std::vector<NodeId> nodes;     // global ids of kept nodes, ascending
  std::vector<EdgeId> edge_ids;  // global ids of induced edges, ascending
  std::uint32_t local_center = 0;  // row of `center` within `nodes`
};

// When `neighbor_cap` is set, `rng` must be non-null; each visited node's
// distinct neighbor list (per direction) is subsampled to the cap before
// expansion. Without a cap the walk is exhaustive and needs no PRNG.
inline EgoSubgraph sample_ego(const DirectedMultigraph& g, NodeId center,
                              int hops,
                              std::optional<int> neighbor_cap = std::nullopt,
                              Rng* rng = nullptr) {
  check_node(g, center, "sample_ego");
  if (hops < 1) throw std::invalid_argument("sample_ego: hops must be >= 1");
  if (neighbor_cap && (!rng || *neighbor_cap < 1)) {
    throw std::invalid_argument(
        "sample_ego: neighbor cap requires a positive cap and an rng");
  }

  std::vector<char> seen(g.n, 0);
  seen[center] = 1;
  std::vector<NodeId> frontier{center};
  auto capped = [&](std::vector<NodeId> distinct) {
    if (neighbor_cap &&
        distinct.size() > static_cast<std::size_t>(*neighbor_cap)) {
      // Partial Fisher-Yates: the first `cap` slots become a uniform sample.
      for (std::size_t i = 0; i < static_cast<std::size_t>(*neighbor_cap);
           ++i) {
        const auto j =
            static_cast<std::size_t>(rng->below(distinct.size() - i));
        std::swap(distinct[i], distinct[i + j]);
      }
      distinct.resize(static_cast<std::size_t>(*neighbor_cap));
    }
    return distinct;
  };

  for (int hop = 0; hop < hops && !frontier.empty(); ++hop) {
    std::vector<NodeId> next;
    for (const NodeId x : frontier) {
      for (const auto* adj : {&g.out_adj[x], &g.in_adj[x]}) {
        for (const NodeId y : capped(distinct_neighbors(*adj))) {
          if (!seen[y]) {
            seen[y] = 1;
            next.push_back(y);
          }
        }
      }
    }
    frontier = std::move(next);
  }

  EgoSubgraph ego;
  ego.center = center;
  for (NodeId v = 0; v < static_cast<NodeId>(g.n); ++v) {
    if (seen[v]) ego.nodes.push_back(v);
  }
  ego.local_center = static_cast<std::uint32_t>(
      std::lower_bound(ego.nodes.begin(), ego.nodes.end(), center) -
      ego.nodes.begin());
  for (const NodeId u : ego.nodes) {
    for (const auto& [v, e] : g.out_adj[u]) {
      if (seen[v]) ego.edge_ids.push_back(e);
    }
  }
  std::sort(ego.edge_ids.begin(), ego.edge_ids.end());
  return ego;
}

}  // namespace multignn
