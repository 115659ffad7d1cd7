// Shared hand-built graphs used across the test suite.
#pragma once

#include <vector>

#include "multignn/graph.hpp"
#include "multignn/rng.hpp"

namespace multignn::fixtures {

// Four nodes a=0, b=1, c=2, d=3 with edges a->c, a->d, b->d:
// out-degrees 2, 1, 0, 0.
inline DirectedMultigraph out_degree_example() {
  return build_graph(4, {edge(0, 2, 0), edge(0, 3, 1), edge(1, 3, 2)});
}

// Center node 0 exchanging edges with six rim nodes 1..6 (u->x and x->u for
// each), plus rim edges chosen per variant. Timestamps follow the listed
// order, so ports are identical across variants on the shared 12 edges.
inline std::vector<EdgeRecord> wheel_spokes() {
  std::vector<EdgeRecord> es;
  std::int64_t t = 0;
  for (NodeId x = 1; x <= 6; ++x) {
    es.push_back(edge(0, x, t++));
    es.push_back(edge(x, 0, t++));
  }
  return es;
}

// Rim = two directed triangles 1->2->3->1 and 4->5->6->4. No simple cycle
// through the center has five or six distinct nodes.
inline DirectedMultigraph wheel_two_triangles() {
  auto es = wheel_spokes();
  std::int64_t t = 12;
  es.push_back(edge(1, 2, t++));
  es.push_back(edge(2, 3, t++));
  es.push_back(edge(3, 1, t++));
  es.push_back(edge(4, 5, t++));
  es.push_back(edge(5, 6, t++));
  es.push_back(edge(6, 4, t++));
  return build_graph(7, std::move(es));
}

// Rim = one directed hexagon 1->2->3->4->5->6->1. The center lies on 5- and
// 6-cycles (e.g. 0,1,2,3,4 and 0,1,2,3,4,5).
inline DirectedMultigraph wheel_hexagon() {
  auto es = wheel_spokes();
  std::int64_t t = 12;
  es.push_back(edge(1, 2, t++));
  es.push_back(edge(2, 3, t++));
  es.push_back(edge(3, 4, t++));
  es.push_back(edge(4, 5, t++));
  es.push_back(edge(5, 6, t++));
  es.push_back(edge(6, 1, t++));
  return build_graph(7, std::move(es));
}

// Random multigraph (possibly with parallel edges, never self-loops) that is
// connected when edge directions are ignored. Timestamps = insertion index.
inline DirectedMultigraph random_connected_multigraph(std::size_t n,
                                                      std::size_t extra_edges,
                                                      Rng& rng) {
  std::vector<EdgeRecord> es;
  std::int64_t t = 0;
  // Random spanning tree first (random parent, random direction).
  for (NodeId v = 1; v < n; ++v) {
    const auto parent = static_cast<NodeId>(rng.below(v));
    if (rng.below(2) == 0) {
      es.push_back(edge(parent, v, t++));
    } else {
      es.push_back(edge(v, parent, t++));
    }
  }
  for (std::size_t i = 0; i < extra_edges; ++i) {
    const auto a = static_cast<NodeId>(rng.below(n));
    auto b = a;
    while (b == a) b = static_cast<NodeId>(rng.below(n));
    es.push_back(edge(a, b, t++));
  }
  return build_graph(n, std::move(es));
}

}  // namespace multignn::fixtures
