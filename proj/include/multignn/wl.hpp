// Hash-based 1-dimensional color refinement on directed multigraphs.
// A node's next color hashes (its current color, the sorted multiset of
// in-neighbor tuples, and, when `reverse` is set, the sorted multiset of
// out-neighbor tuples); tuples optionally carry the edge's (in_port,
// out_port) pair. `ego_root` seeds one node with a distinct initial color.
// Including the current color makes each round a refinement of the previous
// partition. Colors are 128-bit keyed hashes; rerun with a second key to
// rule out collisions.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "multignn/graph.hpp"
#include "multignn/hash128.hpp"
#include "multignn/ports.hpp"

namespace multignn {

struct WlOptions {
  std::optional<NodeId> ego_root;
  bool ports = false;
  bool reverse = false;
  std::uint64_t hash_key = 0x9E3779B97F4A7C15ULL;
};

struct RefinementColoring {
  // colors[t][v] = color of node v after t rounds; colors[0] is the initial
  // coloring, so the outer size is rounds + 1.
  std::vector<std::vector<Hash128>> colors;

  const std::vector<Hash128>& final_colors() const { return colors.back(); }

  std::vector<Hash128> sorted_multiset(std::size_t round) const {
    std::vector<Hash128> ms = colors[round];
    std::sort(ms.begin(), ms.end());
    return ms;
  }

  std::size_t num_classes(std::size_t round) const {
    auto ms = sorted_multiset(round);
    return static_cast<std::size_t>(
        std::unique(ms.begin(), ms.end()) - ms.begin());
  }
};

namespace detail {

// One neighbor tuple, flattened to words for hashing.
struct WlTuple {
  Hash128 color;
  std::uint32_t in_port = 0, out_port = 0;
  friend auto operator<=>(const WlTuple&, const WlTuple&) = default;
};

}  // namespace detail

inline RefinementColoring wl_refine(const DirectedMultigraph& g,
                                    const PortAssignment* ports,
                                    std::uint32_t rounds,
                                    const WlOptions& opt = {}) {
  if (opt.ports && ports == nullptr) {
    throw std::invalid_argument("wl_refine: ports enabled but not provided");
  }
  if (opt.ego_root) check_node(g, *opt.ego_root, "wl_refine");

  RefinementColoring rc;
  rc.colors.reserve(rounds + 1);

  // Initial colors: constants independent of n so that colorings of
  // different graphs are directly comparable.
  const Hash128 plain = murmur3_x64_128("node", 4, opt.hash_key);
  const Hash128 rooted = murmur3_x64_128("root", 4, opt.hash_key);
  std::vector<Hash128> cur(g.n, plain);
  if (opt.ego_root) cur[*opt.ego_root] = rooted;
  rc.colors.push_back(cur);

  std::vector<Hash128> next(g.n);
  std::vector<detail::WlTuple> tuples;
  std::vector<std::uint64_t> words;
  for (std::uint32_t t = 0; t < rounds; ++t) {
    for (NodeId v = 0; v < g.n; ++v) {
      words.clear();
      words.push_back(cur[v].hi);
      words.push_back(cur[v].lo);
      auto absorb_side = [&](const std::vector<std::pair<NodeId, EdgeId>>& adj,
                             std::uint64_t separator) {
        words.push_back(separator);
        tuples.clear();
        tuples.reserve(adj.size());
        for (const auto& [u, e] : adj) {
          detail::WlTuple tup{cur[u], 0, 0};
          if (opt.ports) {
            tup.in_port = ports->in_port[e];
            tup.out_port = ports->out_port[e];
          }
          tuples.push_back(tup);
        }
        std::sort(tuples.begin(), tuples.end());
        for (const detail::WlTuple& tup : tuples) {
          words.push_back(tup.color.hi);
          words.push_back(tup.color.lo);
          if (opt.ports) {
            words.push_back((std::uint64_t(tup.in_port) << 32) |
                            tup.out_port);
          }
        }
      };
      absorb_side(g.in_adj[v], 0x1111111111111111ULL);
      if (opt.reverse) absorb_side(g.out_adj[v], 0x2222222222222222ULL);
      next[v] = hash_words(words, opt.hash_key);
    }
    rc.colors.push_back(next);
    cur.swap(next);
  }
  return rc;
}

}  // namespace multignn
