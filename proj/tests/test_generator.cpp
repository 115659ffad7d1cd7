// Random circulant generator: exact edge-count law, no self-loops, ring
// locality, timestamp order, and seed determinism.
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "multignn/generator.hpp"

using namespace multignn;

namespace {

// Shortest distance around the n-ring.
std::int64_t ring_distance(NodeId a, NodeId b, std::size_t n) {
  const auto d = std::abs(static_cast<std::int64_t>(a) -
                          static_cast<std::int64_t>(b));
  return std::min<std::int64_t>(d, static_cast<std::int64_t>(n) - d);
}

}  // namespace

TEST_CASE("edge count is floor(n*d/2)", "[generator]") {
  CHECK(random_circulant({100, 6.0, 5.0, 1}).num_edges() == 300);
  CHECK(random_circulant({101, 6.0, 5.0, 1}).num_edges() == 303);
  CHECK(random_circulant({8192, 6.0, 11.1, 1}).num_edges() == 24576);
  CHECK(random_circulant({7, 3.0, 2.0, 1}).num_edges() == 10);
}

TEST_CASE("no self-loops; parallel edges allowed", "[generator]") {
  const auto g = random_circulant({256, 6.0, 3.0, 9});
  for (const EdgeRecord& e : g.edges) REQUIRE(e.src != e.dst);
}

TEST_CASE("timestamps are the generation index", "[generator]") {
  const auto g = random_circulant({64, 4.0, 6.0, 3});
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    REQUIRE(g.edges[i].timestamp == static_cast<std::int64_t>(i));
  }
}

TEST_CASE("same seed reproduces, different seed differs", "[generator]") {
  GeneratorParams p{512, 6.0, 11.1, 77};
  const auto a = random_circulant(p);
  const auto b = random_circulant(p);
  REQUIRE(a.num_edges() == b.num_edges());
  bool same = true;
  for (std::size_t i = 0; i < a.num_edges(); ++i) {
    if (a.edges[i].src != b.edges[i].src || a.edges[i].dst != b.edges[i].dst) {
      same = false;
    }
  }
  CHECK(same);
  p.seed = 78;
  const auto c = random_circulant(p);
  bool differs = false;
  for (std::size_t i = 0; i < a.num_edges(); ++i) {
    if (a.edges[i].src != c.edges[i].src || a.edges[i].dst != c.edges[i].dst) {
      differs = true;
      break;
    }
  }
  CHECK(differs);
}

TEST_CASE("heads concentrate around the tail at ring scale r", "[generator]") {
  // |N(0, r)| has mean r*sqrt(2/pi) ~ 0.7979 r. Self-loop resampling and
  // ring folding shift this slightly, hence the loose band.
  const GeneratorParams p{4096, 6.0, 11.1, 123};
  const auto g = random_circulant(p);
  double total = 0;
  for (const EdgeRecord& e : g.edges) {
    total += static_cast<double>(ring_distance(e.src, e.dst, p.n));
  }
  const double mean = total / static_cast<double>(g.num_edges());
  CHECK(mean > 0.7 * p.r);
  CHECK(mean < 0.9 * p.r);
  // Locality: essentially no edge should span more than 6 sigma.
  std::size_t far = 0;
  for (const EdgeRecord& e : g.edges) {
    if (ring_distance(e.src, e.dst, p.n) > 6 * p.r) ++far;
  }
  CHECK(far == 0);
}

TEST_CASE("tails are uniform across the ring", "[generator]") {
  const GeneratorParams p{16, 200.0, 4.0, 21};  // 1600 edges over 16 tails
  const auto g = random_circulant(p);
  std::vector<int> counts(p.n, 0);
  for (const EdgeRecord& e : g.edges) ++counts[e.src];
  for (const int c : counts) {
    CHECK(c > 50);  // expectation 100, generous 5-sigma band
    CHECK(c < 150);
  }
}

TEST_CASE("split graphs use consecutive derived seeds", "[generator]") {
  const GeneratorParams p{128, 6.0, 11.1, 1000};
  const auto graphs = generate_split_graphs(p, 3);
  REQUIRE(graphs.size() == 3);
  const auto direct = random_circulant({128, 6.0, 11.1, 1001});
  REQUIRE(graphs[1].num_edges() == direct.num_edges());
  for (std::size_t i = 0; i < direct.num_edges(); ++i) {
    REQUIRE(graphs[1].edges[i].src == direct.edges[i].src);
    REQUIRE(graphs[1].edges[i].dst == direct.edges[i].dst);
  }
  // Different splits are different graphs.
  bool differs = false;
  for (std::size_t i = 0; i < graphs[0].num_edges(); ++i) {
    if (graphs[0].edges[i].src != graphs[1].edges[i].src ||
        graphs[0].edges[i].dst != graphs[1].edges[i].dst) {
      differs = true;
      break;
    }
  }
  CHECK(differs);
}

TEST_CASE("parameter validation", "[generator]") {
  CHECK_THROWS_AS(random_circulant({1, 6.0, 5.0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(random_circulant({10, 0.0, 5.0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(random_circulant({10, 6.0, -1.0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(generate_split_graphs({10, 6.0, 5.0, 1}, 0),
                  std::invalid_argument);
}

TEST_CASE("metadata sidecar records the generator identity", "[generator]") {
  const GeneratorParams p{64, 6.0, 11.1, 5};
  const auto g = random_circulant(p);
  const auto meta = generator_metadata(p, g.num_edges());
  CHECK(meta.at("n").get<std::size_t>() == 64);
  CHECK(meta.at("d").get<double>() == 6.0);
  CHECK(meta.at("r").get<double>() == 11.1);
  CHECK(meta.at("seed").get<std::uint64_t>() == 5);
  CHECK(meta.at("edges").get<std::size_t>() == g.num_edges());
  CHECK(meta.at("prng").get<std::string>() == kPrngName);
}
