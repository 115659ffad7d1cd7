// Random circulant multigraph generator: n nodes on a ring, exactly
// floor(n*d/2) edges. Each edge's tail u is uniform on {0..n-1}; its head is
// floor(N(u, r) + 1/2) reduced modulo n (ring wrap), resampled while it
// collides with u (no self-loops). Timestamps are the generation index, which
// gives ports a reproducible total order. Fully deterministic per seed.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "multignn/graph.hpp"
#include "multignn/rng.hpp"

#include <json.hpp>

namespace multignn {

struct GeneratorParams {
  std::size_t n = 0;
  double d = 0.0;  // average degree
  double r = 0.0;  // locality radius (normal stddev)
  std::uint64_t seed = 0;
};

inline void to_json(nlohmann::json& j, const GeneratorParams& p) {
  j = nlohmann::json{{"n", p.n}, {"d", p.d}, {"r", p.r}, {"seed", p.seed}};
}

inline void from_json(const nlohmann::json& j, GeneratorParams& p) {
  j.at("n").get_to(p.n);
  j.at("d").get_to(p.d);
  j.at("r").get_to(p.r);
  j.at("seed").get_to(p.seed);
}

inline void validate(const GeneratorParams& p) {
  if (p.n < 2) throw std::invalid_argument("generator: n must be >= 2");
  if (!(p.d > 0)) throw std::invalid_argument("generator: d must be > 0");
  if (!(p.r > 0)) throw std::invalid_argument("generator: r must be > 0");
}

inline DirectedMultigraph random_circulant(const GeneratorParams& p) {
  validate(p);
  const auto m = static_cast<std::size_t>(
      std::floor(static_cast<double>(p.n) * p.d / 2.0));
  Rng rng(p.seed);
  const auto n_i64 = static_cast<std::int64_t>(p.n);
  std::vector<EdgeRecord> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto u = static_cast<NodeId>(rng.below(p.n));
    NodeId v = u;
    while (v == u) {
      const auto rounded =
          static_cast<std::int64_t>(std::floor(rng.normal(u, p.r) + 0.5));
      v = static_cast<NodeId>(((rounded % n_i64) + n_i64) % n_i64);
    }
    edges.push_back(edge(u, v, static_cast<std::int64_t>(i)));
  }
  return build_graph(p.n, std::move(edges));
}

// k graphs with identical parameters from derived seeds (seed + index):
// pairwise independent streams, e.g. train/validation/test triplets.
inline std::vector<DirectedMultigraph> generate_split_graphs(
    const GeneratorParams& p, std::size_t k) {
  if (k < 1) throw std::invalid_argument("generate_split_graphs: k must be >= 1");
  std::vector<DirectedMultigraph> graphs;
  graphs.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    GeneratorParams pi = p;
    pi.seed = p.seed + i;
    graphs.push_back(random_circulant(pi));
  }
  return graphs;
}

inline nlohmann::json generator_metadata(const GeneratorParams& p,
                                         std::size_t num_edges) {
  return nlohmann::json{{"n", p.n},       {"d", p.d},
                        {"r", p.r},       {"seed", p.seed},
                        {"prng", kPrngName}, {"edges", num_edges}};
}

}  // namespace multignn
