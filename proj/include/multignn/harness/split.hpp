// Dataset split strategies. Independent-graphs mode (fresh graphs from
// derived seeds) lives in the generator; this header implements the two
// temporal modes for ingested transaction graphs:
//  - temporal_edges: edges sorted by timestamp, cut at cumulative fractions
//    into cumulative snapshots (train < t1, validation < t2, test = all);
//    each split evaluates only on its own edge indices.
//  - temporal_nodes: nodes ordered by the first transaction they are involved
//    in and partitioned by fractions; the graph itself is shared.
// Ties on equal timestamps are broken by edge id (stable, documented).
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "multignn/graph.hpp"

namespace multignn {

enum class SplitMode { IndependentGraphs, TemporalEdges, TemporalNodes };

struct SplitSpec {
  SplitMode mode = SplitMode::IndependentGraphs;
  std::array<double, 3> fractions{0.6, 0.2, 0.2};
  std::int64_t t1 = 0;  // last timestamp inside the train portion
  std::int64_t t2 = 0;  // last timestamp inside the validation portion
};

namespace detail {

inline void check_fractions(const std::array<double, 3>& f) {
  for (const double x : f) {
    if (!(x > 0.0)) {
      throw std::invalid_argument("split: fractions must be positive");
    }
  }
  if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) {
    throw std::invalid_argument("split: fractions must sum to 1");
  }
}

// Cut positions for cumulative fractions over `count` items:
// [0,k1) / [k1,k2) / [k2,count), with floor rounding.
inline std::pair<std::size_t, std::size_t> cut_points(
    std::size_t count, const std::array<double, 3>& f) {
  const auto k1 =
      static_cast<std::size_t>(std::floor(static_cast<double>(count) * f[0]));
  const auto k2 = static_cast<std::size_t>(
      std::floor(static_cast<double>(count) * (f[0] + f[1])));
  if (k1 < 1 || k2 <= k1 || count <= k2) {
    throw std::invalid_argument(
        "split: too few items for the requested fractions (" +
        std::to_string(count) + " items)");
  }
  return {k1, k2};
}

}  // namespace detail

struct TemporalEdgeSplit {
  SplitSpec spec;
  // Cumulative snapshots; edge ids within each snapshot are local, assigned
  // in sorted (timestamp, original id) order, so a snapshot prefix of another
  // snapshot shares its local ids.
  DirectedMultigraph train_graph;
  DirectedMultigraph val_graph;
  DirectedMultigraph test_graph;
  // Local edge ids each split evaluates on: [0,k1) / [k1,k2) / [k2,m).
  std::vector<EdgeId> train_mask;
  std::vector<EdgeId> val_mask;
  std::vector<EdgeId> test_mask;
  // sorted position (= local id in the widest snapshot) -> original edge id.
  std::vector<EdgeId> original_edge_id;
};

inline TemporalEdgeSplit temporal_split(
    const DirectedMultigraph& g,
    std::array<double, 3> fractions = {0.6, 0.2, 0.2}) {
  detail::check_fractions(fractions);
  const std::size_t m = g.num_edges();
  const auto [k1, k2] = detail::cut_points(m, fractions);

  std::vector<EdgeId> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    const auto& ea = g.edges[a];
    const auto& eb = g.edges[b];
    return ea.timestamp != eb.timestamp ? ea.timestamp < eb.timestamp : a < b;
  });

  auto snapshot = [&](std::size_t count) {
    std::vector<EdgeRecord> edges;
    edges.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      EdgeRecord e = g.edges[order[i]];
      e.id = kAutoEdgeId;  // local ids follow sorted order
      edges.push_back(std::move(e));
    }
    DirectedMultigraph s = build_graph(g.n, std::move(edges));
    s.node_features = g.node_features;
    s.node_names = g.node_names;
    return s;
  };

  TemporalEdgeSplit out;
  out.spec.mode = SplitMode::TemporalEdges;
  out.spec.fractions = fractions;
  out.spec.t1 = g.edges[order[k1 - 1]].timestamp;
  out.spec.t2 = g.edges[order[k2 - 1]].timestamp;
  out.train_graph = snapshot(k1);
  out.val_graph = snapshot(k2);
  out.test_graph = snapshot(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto e = static_cast<EdgeId>(i);
    if (i < k1) {
      out.train_mask.push_back(e);
    } else if (i < k2) {
      out.val_mask.push_back(e);
    } else {
      out.test_mask.push_back(e);
    }
    out.original_edge_id.push_back(order[i]);
  }
  return out;
}

struct TemporalNodeSplit {
  SplitSpec spec;
  std::vector<NodeId> train_nodes;
  std::vector<NodeId> val_nodes;
  std::vector<NodeId> test_nodes;
};

// Orders nodes by the first timestamp of any incident edge (either
// direction), ties by node id; nodes with no incident edge sort last.
inline TemporalNodeSplit temporal_node_split(
    const DirectedMultigraph& g,
    std::array<double, 3> fractions = {0.65, 0.15, 0.20}) {
  detail::check_fractions(fractions);
  const auto [k1, k2] = detail::cut_points(g.n, fractions);

  constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> first_touch(g.n, kNever);
  for (const EdgeRecord& e : g.edges) {
    first_touch[e.src] = std::min(first_touch[e.src], e.timestamp);
    first_touch[e.dst] = std::min(first_touch[e.dst], e.timestamp);
  }
  std::vector<NodeId> order(g.n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    return first_touch[a] != first_touch[b] ? first_touch[a] < first_touch[b]
                                            : a < b;
  });

  TemporalNodeSplit out;
  out.spec.mode = SplitMode::TemporalNodes;
  out.spec.fractions = fractions;
  out.spec.t1 = first_touch[order[k1 - 1]];
  out.spec.t2 = first_touch[order[k2 - 1]];
  out.train_nodes.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k1));
  out.val_nodes.assign(order.begin() + static_cast<std::ptrdiff_t>(k1),
                       order.begin() + static_cast<std::ptrdiff_t>(k2));
  out.test_nodes.assign(order.begin() + static_cast<std::ptrdiff_t>(k2), order.end());
  return out;
}

}  // namespace multignn
