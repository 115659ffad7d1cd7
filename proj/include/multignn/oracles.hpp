// Exact ground-truth labelers for the eleven synthetic subgraph-detection
// tasks. All labelers are pure, deterministic, and permutation-equivariant;
// they double as the independent oracle for every learned result.
//
// Task definitions (node v is labeled 1 iff):
//  - deg_in/deg_out: edge-multiplicity degree  > threshold (default 3)
//  - fan_in/fan_out: distinct-neighbor count   > threshold (default 3)
//  - c2..c6: v lies on a simple directed cycle with exactly k distinct nodes
//  - sg (scatter-gather): some source u != v reaches v through >= 2 distinct
//    intermediates w not in {u, v} via edges (u,w) and (w,v)
//  - bc (directed biclique): v is a sink of some directed K_{2,2} whose two
//    sources are distinct from both sinks (parallel edges count once)
#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "multignn/graph.hpp"

#include <json.hpp>

namespace multignn {

enum class TaskId {
  DegIn = 0,
  DegOut,
  FanIn,
  FanOut,
  C2,
  C3,
  C4,
  C5,
  C6,
  ScatterGather,
  Biclique,
};

inline constexpr int kNumTasks = 11;

inline constexpr std::array<const char*, kNumTasks> kTaskNames{
    "deg_in", "deg_out", "fan_in", "fan_out", "c2", "c3",
    "c4",     "c5",      "c6",     "sg",      "bc"};

struct LabelMatrix {
  std::size_t rows = 0;
  std::vector<std::uint8_t> data;  // rows x kNumTasks, row-major

  std::uint8_t at(std::size_t v, int task) const {
    return data[v * kNumTasks + static_cast<std::size_t>(task)];
  }
  std::uint8_t& at(std::size_t v, int task) {
    return data[v * kNumTasks + static_cast<std::size_t>(task)];
  }
  double positive_ratio(int task) const {
    if (rows == 0) return 0.0;
    std::size_t count = 0;
    for (std::size_t v = 0; v < rows; ++v) count += at(v, task);
    return static_cast<double>(count) / static_cast<double>(rows);
  }
};

inline std::vector<std::uint8_t> label_degree(const DirectedMultigraph& g,
                                              Direction dir,
                                              std::size_t threshold = 3) {
  std::vector<std::uint8_t> out(g.n, 0);
  for (NodeId v = 0; v < g.n; ++v) {
    const std::size_t deg =
        dir == Direction::In ? degree_in(g, v) : degree_out(g, v);
    out[v] = deg > threshold ? 1 : 0;
  }
  return out;
}

inline std::vector<std::uint8_t> label_fan(const DirectedMultigraph& g,
                                           Direction dir,
                                           std::size_t threshold = 3) {
  std::vector<std::uint8_t> out(g.n, 0);
  for (NodeId v = 0; v < g.n; ++v) {
    const std::size_t fan = dir == Direction::In ? fan_in(g, v) : fan_out(g, v);
    out[v] = fan > threshold ? 1 : 0;
  }
  return out;
}

namespace detail {

// Deduplicated successor lists (parallel edges collapse; self-loops dropped
// since a simple cycle never uses them).
inline std::vector<std::vector<NodeId>> simple_successors(
    const DirectedMultigraph& g) {
  std::vector<std::vector<NodeId>> succ(g.n);
  for (NodeId v = 0; v < g.n; ++v) {
    succ[v] = distinct_out_neighbors(g, v);
    std::erase(succ[v], v);
  }
  return succ;
}

// Marks, for every k in [2, kmax], the nodes lying on a simple directed cycle
// of exactly k distinct nodes. Each cycle is enumerated exactly once: the DFS
// starts at the cycle's minimum node and only extends through larger nodes.
// Worst case O(n * max_out_degree^(kmax-1)).
inline std::vector<std::vector<std::uint8_t>> cycle_labels_up_to(
    const DirectedMultigraph& g, int kmax) {
  const auto succ = simple_successors(g);
  std::vector<std::vector<std::uint8_t>> marks(
      static_cast<std::size_t>(kmax) + 1, std::vector<std::uint8_t>(g.n, 0));
  std::vector<NodeId> path;
  std::vector<std::uint8_t> on_path(g.n, 0);

  // Iterative DFS would obscure the invariant; depth is bounded by kmax (<=6).
  auto dfs = [&](auto&& self, NodeId start) -> void {
    const NodeId u = path.back();
    for (NodeId w : succ[u]) {
      if (w == start && path.size() >= 2) {
        for (NodeId x : path) marks[path.size()][x] = 1;
      }
      if (w > start && !on_path[w] &&
          path.size() < static_cast<std::size_t>(kmax)) {
        on_path[w] = 1;
        path.push_back(w);
        self(self, start);
        path.pop_back();
        on_path[w] = 0;
      }
    }
  };
  for (NodeId s = 0; s < g.n; ++s) {
    path.assign(1, s);
    on_path[s] = 1;
    dfs(dfs, s);
    on_path[s] = 0;
  }
  return marks;
}

}  // namespace detail

inline std::vector<std::uint8_t> label_cycles(const DirectedMultigraph& g,
                                              int k) {
  if (k < 2 || k > 6) {
    throw std::invalid_argument("label_cycles: k must be in [2, 6]");
  }
  return detail::cycle_labels_up_to(g, k)[static_cast<std::size_t>(k)];
}

inline std::vector<std::uint8_t> label_scatter_gather(
    const DirectedMultigraph& g) {
  std::vector<std::uint8_t> out(g.n, 0);
  // cnt[u] = number of distinct intermediates between source u and sink v.
  std::unordered_map<NodeId, std::size_t> cnt;
  for (NodeId v = 0; v < g.n; ++v) {
    cnt.clear();
    for (NodeId w : distinct_in_neighbors(g, v)) {
      if (w == v) continue;
      for (NodeId u : distinct_in_neighbors(g, w)) {
        if (u == v || u == w) continue;
        if (++cnt[u] >= 2) {
          out[v] = 1;
        }
      }
    }
  }
  return out;
}

inline std::vector<std::uint8_t> label_biclique(const DirectedMultigraph& g) {
  // pair_count[(s1,s2)] = number of sinks fed by both s1 and s2; a sink is
  // positive iff one of its source pairs feeds a second, distinct sink.
  // Sinks never count themselves as a source (self-loops excluded), so every
  // counted sink is automatically disjoint from the pair.
  std::unordered_map<std::uint64_t, std::uint32_t> pair_count;
  std::vector<std::vector<NodeId>> sources(g.n);
  for (NodeId v = 0; v < g.n; ++v) {
    sources[v] = distinct_in_neighbors(g, v);
    std::erase(sources[v], v);
    for (std::size_t i = 0; i < sources[v].size(); ++i) {
      for (std::size_t j = i + 1; j < sources[v].size(); ++j) {
        const std::uint64_t key =
            (static_cast<std::uint64_t>(sources[v][i]) << 32) | sources[v][j];
        ++pair_count[key];
      }
    }
  }
  std::vector<std::uint8_t> out(g.n, 0);
  for (NodeId v = 0; v < g.n; ++v) {
    for (std::size_t i = 0; i < sources[v].size() && !out[v]; ++i) {
      for (std::size_t j = i + 1; j < sources[v].size(); ++j) {
        const std::uint64_t key =
            (static_cast<std::uint64_t>(sources[v][i]) << 32) | sources[v][j];
        if (pair_count.at(key) >= 2) {
          out[v] = 1;
          break;
        }
      }
    }
  }
  return out;
}

struct LabelThresholds {
  std::size_t degree = 3;
  std::size_t fan = 3;
};

inline LabelMatrix label_all(const DirectedMultigraph& g,
                             LabelThresholds thresholds = {}) {
  LabelMatrix lm;
  lm.rows = g.n;
  lm.data.assign(g.n * kNumTasks, 0);
  auto put = [&](TaskId t, const std::vector<std::uint8_t>& col) {
    for (std::size_t v = 0; v < g.n; ++v) {
      lm.at(v, static_cast<int>(t)) = col[v];
    }
  };
  put(TaskId::DegIn, label_degree(g, Direction::In, thresholds.degree));
  put(TaskId::DegOut, label_degree(g, Direction::Out, thresholds.degree));
  put(TaskId::FanIn, label_fan(g, Direction::In, thresholds.fan));
  put(TaskId::FanOut, label_fan(g, Direction::Out, thresholds.fan));
  const auto cycles = detail::cycle_labels_up_to(g, 6);
  put(TaskId::C2, cycles[2]);
  put(TaskId::C3, cycles[3]);
  put(TaskId::C4, cycles[4]);
  put(TaskId::C5, cycles[5]);
  put(TaskId::C6, cycles[6]);
  put(TaskId::ScatterGather, label_scatter_gather(g));
  put(TaskId::Biclique, label_biclique(g));
  return lm;
}

inline nlohmann::json label_stats(const LabelMatrix& lm) {
  nlohmann::json ratios = nlohmann::json::object();
  for (int t = 0; t < kNumTasks; ++t) {
    ratios[kTaskNames[static_cast<std::size_t>(t)]] = lm.positive_ratio(t);
  }
  return nlohmann::json{{"nodes", lm.rows}, {"positive_ratio", ratios}};
}

inline void write_labels_csv(const std::string& path, const LabelMatrix& lm) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "node_id";
  for (const char* name : kTaskNames) out << ',' << name;
  out << "\n";
  for (std::size_t v = 0; v < lm.rows; ++v) {
    out << v;
    for (int t = 0; t < kNumTasks; ++t) out << ',' << int(lm.at(v, t));
    out << "\n";
  }
}

inline LabelMatrix read_labels_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ": empty file (missing header)");
  }
  LabelMatrix lm;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::size_t start = line.find(',');
    if (start == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(kNumTasks + 1) +
                               " cells");
    }
    int t = 0;
    for (std::size_t i = start; i != std::string::npos && t < kNumTasks; ++t) {
      const std::size_t next = line.find(',', i + 1);
      const char c = line[i + 1];
      if (c != '0' && c != '1') {
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": labels must be 0 or 1");
      }
      lm.data.push_back(c == '1' ? 1 : 0);
      i = next;
    }
    if (t != kNumTasks) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(kNumTasks) +
                               " label cells");
    }
    ++lm.rows;
  }
  return lm;
}

}  // namespace multignn
