// Training and evaluation driver. A run trains one model per seed on three
// independently generated graphs (train/validation/test from derived seeds),
// keeps the parameters with the best validation mean-F1, and reports per-task
// minority-class F1 on the test graph aggregated over seeds.
//
// Two batching regimes:
//  - whole-graph: one forward/backward over the full train graph per epoch
//    (models without ego IDs — their readout is position-independent);
//  - ego minibatches: models with ego IDs train on batches of ego subgraphs,
//    one readout row per center, a full shuffled pass over centers per epoch.
// Seeds differ only in their PRNG streams (model init, batch order, val
// subsampling); datasets are shared across seeds.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "multignn/generator.hpp"
#include "multignn/harness/ego.hpp"
#include "multignn/harness/experiment.hpp"
#include "multignn/harness/metrics.hpp"
#include "multignn/nn/adam.hpp"
#include "multignn/nn/checkpoint.hpp"
#include "multignn/nn/model.hpp"
#include "multignn/oracles.hpp"
#include "multignn/ports.hpp"
#include "multignn/rng.hpp"

#include <json.hpp>

namespace multignn {

struct SplitData {
  DirectedMultigraph graph;
  PortAssignment ports;
  LabelMatrix labels;
  std::vector<EgoSubgraph> egos;  // one per node; empty unless ego batching
};

struct DatasetBundle {
  ExperimentConfig cfg;          // with tasks resolved
  std::vector<TaskId> tasks;
  SplitData train, val, test;
  std::vector<int> minority;     // per task, from the train split's ratio
};

// Model config with run-time dimensions resolved: one constant node feature,
// generator edges carry no payload features, output width = task count.
inline nn::ModelConfig resolved_model_config(const ExperimentConfig& cfg) {
  nn::ModelConfig m = cfg.model;
  m.node_feature_dim = 1;
  m.edge_feature_dim = 0;
  m.num_tasks = static_cast<int>(cfg.resolved_tasks().size());
  return m;
}

inline DatasetBundle prepare_datasets(const ExperimentConfig& cfg) {
  cfg.validate();
  DatasetBundle b;
  b.cfg = cfg;
  b.tasks = cfg.resolved_tasks();
  b.cfg.tasks = b.tasks;

  auto graphs = generate_split_graphs(cfg.generator, 3);
  SplitData* slots[3] = {&b.train, &b.val, &b.test};
  for (int i = 0; i < 3; ++i) {
    SplitData& s = *slots[i];
    s.graph = std::move(graphs[static_cast<std::size_t>(i)]);
    s.ports = assign_ports(s.graph);
    s.labels = label_all(s.graph, cfg.thresholds);
    if (cfg.model.ego_ids) {
      Rng cap_rng(derive_seed(cfg.generator.seed,
                              "ego-cap-" + std::to_string(i)));
      s.egos.reserve(s.graph.n);
      for (NodeId v = 0; v < static_cast<NodeId>(s.graph.n); ++v) {
        s.egos.push_back(sample_ego(s.graph, v, cfg.hops, cfg.neighbor_cap,
                                    cfg.neighbor_cap ? &cap_rng : nullptr));
      }
    }
  }
  for (const TaskId t : b.tasks) {
    b.minority.push_back(
        minority_class(b.train.labels.positive_ratio(static_cast<int>(t))));
  }
  return b;
}

// A forward-ready batch: the graph in tensor form, which rows of the final
// states to read out, and the target matrix for exactly those rows.
struct PreparedBatch {
  nn::GraphBatch batch;
  std::vector<std::uint32_t> readout_rows;
  nn::Mat targets;
};

namespace detail {

inline nn::Mat targets_for(const LabelMatrix& lm,
                           const std::vector<TaskId>& tasks,
                           const std::vector<NodeId>& rows) {
  nn::Mat y(static_cast<Eigen::Index>(rows.size()),
            static_cast<Eigen::Index>(tasks.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) =
          static_cast<double>(lm.at(rows[i], static_cast<int>(tasks[t])));
    }
  }
  return y;
}

}  // namespace detail

// Whole-graph batch: every node is a readout row.
inline PreparedBatch full_graph_batch(const SplitData& s,
                                      const std::vector<TaskId>& tasks,
                                      const nn::ModelConfig& mcfg) {
  PreparedBatch p;
  const auto n = static_cast<Eigen::Index>(s.graph.n);
  const auto m = static_cast<Eigen::Index>(s.graph.num_edges());
  p.batch.num_nodes = static_cast<int>(s.graph.n);
  p.batch.node_feats = nn::Mat::Ones(n, 1);
  if (mcfg.ego_ids) {
    throw std::invalid_argument(
        "full_graph_batch: ego-ID models require ego batching");
  }
  p.batch.src.reserve(s.graph.num_edges());
  p.batch.dst.reserve(s.graph.num_edges());
  for (const EdgeRecord& e : s.graph.edges) {
    p.batch.src.push_back(e.src);
    p.batch.dst.push_back(e.dst);
  }
  if (mcfg.ports) {
    p.batch.edge_feats.resize(m, 2);
    for (Eigen::Index e = 0; e < m; ++e) {
      p.batch.edge_feats(e, 0) =
          static_cast<double>(s.ports.in_port[static_cast<std::size_t>(e)]);
      p.batch.edge_feats(e, 1) =
          static_cast<double>(s.ports.out_port[static_cast<std::size_t>(e)]);
    }
  } else {
    p.batch.edge_feats.resize(m, 0);
  }
  std::vector<NodeId> all(s.graph.n);
  for (NodeId v = 0; v < static_cast<NodeId>(s.graph.n); ++v) all[v] = v;
  p.readout_rows.assign(all.begin(), all.end());
  p.targets = detail::targets_for(s.labels, tasks, all);
  return p;
}

// Disjoint union of the centers' ego subgraphs; readout rows are the local
// center rows, targets come from the centers' global labels. The ego flag is
// appended as a second node-feature column, ports are inherited.
inline PreparedBatch ego_batch(const SplitData& s,
                               const std::vector<TaskId>& tasks,
                               const nn::ModelConfig& mcfg,
                               const std::vector<NodeId>& centers) {
  if (!mcfg.ego_ids) {
    throw std::invalid_argument("ego_batch: model does not use ego IDs");
  }
  std::size_t total_nodes = 0;
  std::size_t total_edges = 0;
  for (const NodeId c : centers) {
    total_nodes += s.egos[c].nodes.size();
    total_edges += s.egos[c].edge_ids.size();
  }
  PreparedBatch p;
  p.batch.num_nodes = static_cast<int>(total_nodes);
  p.batch.node_feats.resize(static_cast<Eigen::Index>(total_nodes), 2);
  p.batch.node_feats.col(0).setOnes();
  p.batch.node_feats.col(1).setZero();
  p.batch.edge_feats.resize(static_cast<Eigen::Index>(total_edges),
                            mcfg.ports ? 2 : 0);
  p.batch.src.reserve(total_edges);
  p.batch.dst.reserve(total_edges);

  std::vector<std::uint32_t> local(s.graph.n, 0);
  std::size_t node_off = 0;
  Eigen::Index edge_row = 0;
  for (const NodeId c : centers) {
    const EgoSubgraph& ego = s.egos[c];
    for (std::size_t i = 0; i < ego.nodes.size(); ++i) {
      local[ego.nodes[i]] = static_cast<std::uint32_t>(node_off + i);
    }
    p.batch.node_feats(static_cast<Eigen::Index>(node_off + ego.local_center),
                       1) = 1.0;
    p.readout_rows.push_back(
        static_cast<std::uint32_t>(node_off + ego.local_center));
    for (const EdgeId e : ego.edge_ids) {
      const EdgeRecord& rec = s.graph.edges[e];
      p.batch.src.push_back(local[rec.src]);
      p.batch.dst.push_back(local[rec.dst]);
      if (mcfg.ports) {
        p.batch.edge_feats(edge_row, 0) =
            static_cast<double>(s.ports.in_port[e]);
        p.batch.edge_feats(edge_row, 1) =
            static_cast<double>(s.ports.out_port[e]);
      }
      ++edge_row;
    }
    node_off += ego.nodes.size();
  }
  p.targets = detail::targets_for(s.labels, tasks, centers);
  return p;
}

// Per-task minority F1 of thresholded logits against 0/1 targets.
inline std::vector<double> f1_scores(const nn::Mat& logits,
                                     const nn::Mat& targets,
                                     const std::vector<int>& minority) {
  if (logits.rows() != targets.rows() || logits.cols() != targets.cols() ||
      logits.cols() != static_cast<Eigen::Index>(minority.size())) {
    throw std::invalid_argument("f1_scores: shape mismatch");
  }
  std::vector<double> out;
  for (Eigen::Index t = 0; t < logits.cols(); ++t) {
    std::vector<std::uint8_t> pred, truth;
    pred.reserve(static_cast<std::size_t>(logits.rows()));
    truth.reserve(static_cast<std::size_t>(logits.rows()));
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      pred.push_back(logits(i, t) > 0.0 ? 1 : 0);
      truth.push_back(targets(i, t) > 0.5 ? 1 : 0);
    }
    out.push_back(f1_from_confusion(
        confusion(pred, truth, minority[static_cast<std::size_t>(t)])));
  }
  return out;
}

namespace detail {

inline nn::Mat forward_logits(nn::GnnModel& model, const PreparedBatch& p) {
  nn::Tape tape;
  tape.set_kink_tracking(false);  // diagnostics for grad checks only
  const int states = model.node_states(tape, p.batch);
  const int logits = model.node_logits(tape, states, p.readout_rows);
  return tape.value(logits);
}

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (const double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

}  // namespace detail

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<double> test_f1;     // per task
  std::vector<double> loss_curve;  // mean train loss per epoch
  double best_val_f1 = -1.0;
  int epochs_run = 0;
  bool diverged = false;
  std::string note;
  nlohmann::json best_checkpoint;
};

inline SeedResult train_one_seed(const DatasetBundle& b, std::uint64_t seed) {
  const ExperimentConfig& cfg = b.cfg;
  const nn::ModelConfig mcfg = resolved_model_config(cfg);
  SeedResult r;
  r.seed = seed;

  Rng init_rng(derive_seed(seed, "model-init"));
  nn::GnnModel model(mcfg, &init_rng);
  nn::Adam opt(model.parameters(), cfg.learning_rate);

  const double improve_eps = 1e-4;
  int stale_evals = 0;
  auto consider = [&](double val_f1) {
    if (val_f1 > r.best_val_f1 + improve_eps) {
      r.best_val_f1 = val_f1;
      r.best_checkpoint = nn::checkpoint_to_json(model);
      stale_evals = 0;
    } else {
      ++stale_evals;
    }
    return stale_evals > cfg.patience;  // true = stop
  };

  auto chunked_eval_f1 = [&](const SplitData& split,
                             const std::vector<NodeId>& centers) {
    std::vector<double> per_task(b.tasks.size(), 0.0);
    std::vector<ConfusionCounts> counts(b.tasks.size());
    constexpr std::size_t kChunk = 512;
    for (std::size_t lo = 0; lo < centers.size(); lo += kChunk) {
      const std::vector<NodeId> part(
          centers.begin() + static_cast<std::ptrdiff_t>(lo),
          centers.begin() +
              static_cast<std::ptrdiff_t>(std::min(lo + kChunk, centers.size())));
      const PreparedBatch p = ego_batch(split, b.tasks, mcfg, part);
      const nn::Mat logits = detail::forward_logits(model, p);
      for (std::size_t t = 0; t < b.tasks.size(); ++t) {
        std::vector<std::uint8_t> pred, truth;
        for (Eigen::Index i = 0; i < logits.rows(); ++i) {
          pred.push_back(logits(i, static_cast<Eigen::Index>(t)) > 0.0 ? 1 : 0);
          truth.push_back(
              p.targets(i, static_cast<Eigen::Index>(t)) > 0.5 ? 1 : 0);
        }
        const ConfusionCounts c = confusion(pred, truth, b.minority[t]);
        counts[t].tp += c.tp;
        counts[t].fp += c.fp;
        counts[t].fn += c.fn;
        counts[t].tn += c.tn;
      }
    }
    for (std::size_t t = 0; t < b.tasks.size(); ++t) {
      per_task[t] = f1_from_confusion(counts[t]);
    }
    return per_task;
  };

  if (!mcfg.ego_ids) {
    const PreparedBatch train_p = full_graph_batch(b.train, b.tasks, mcfg);
    const PreparedBatch val_p = full_graph_batch(b.val, b.tasks, mcfg);
    for (int ep = 0; ep < cfg.epochs; ++ep) {
      nn::Tape tape;
      tape.set_kink_tracking(false);
      const int states = model.node_states(tape, train_p.batch);
      const int logits = model.node_logits(tape, states, train_p.readout_rows);
      const int loss = tape.weighted_bce(logits, train_p.targets,
                                         mcfg.minority_class_weight);
      const double loss_val = tape.value(loss)(0, 0);
      r.loss_curve.push_back(loss_val);
      r.epochs_run = ep + 1;
      if (!std::isfinite(loss_val)) {
        r.diverged = true;
        r.note = "diverged at epoch " + std::to_string(ep) +
                 " (non-finite loss)";
        break;
      }
      opt.zero_grad();
      tape.backward(loss);
      opt.step();
      if ((ep + 1) % cfg.eval_every == 0) {
        const nn::Mat vl = detail::forward_logits(model, val_p);
        const double val_f1 =
            detail::mean_of(f1_scores(vl, val_p.targets, b.minority));
        if (consider(val_f1)) break;
      }
    }
    if (r.best_checkpoint.is_null()) {
      r.best_checkpoint = nn::checkpoint_to_json(model);
    }
    nn::load_parameters_from_json(r.best_checkpoint, model);
    const PreparedBatch test_p = full_graph_batch(b.test, b.tasks, mcfg);
    const nn::Mat tl = detail::forward_logits(model, test_p);
    r.test_f1 = f1_scores(tl, test_p.targets, b.minority);
    return r;
  }

  // Ego-minibatch regime.
  const auto n_train = static_cast<std::size_t>(b.train.graph.n);
  Rng batch_rng(derive_seed(seed, "batch-order"));
  std::vector<NodeId> order(n_train);
  for (std::size_t v = 0; v < n_train; ++v) order[v] = static_cast<NodeId>(v);
  shuffle(order, batch_rng);
  std::size_t pos = 0;

  std::vector<NodeId> val_centers(b.val.graph.n);
  for (std::size_t v = 0; v < val_centers.size(); ++v) {
    val_centers[v] = static_cast<NodeId>(v);
  }
  if (cfg.val_subsample > 0 &&
      val_centers.size() > static_cast<std::size_t>(cfg.val_subsample)) {
    Rng val_rng(derive_seed(seed, "val-subsample"));
    shuffle(val_centers, val_rng);
    val_centers.resize(static_cast<std::size_t>(cfg.val_subsample));
    std::sort(val_centers.begin(), val_centers.end());
  }

  const auto batch_sz = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t steps =
      cfg.steps_per_epoch > 0
          ? static_cast<std::size_t>(cfg.steps_per_epoch)
          : std::max<std::size_t>(1, n_train / batch_sz);
  for (int ep = 0; ep < cfg.epochs; ++ep) {
    double loss_sum = 0.0;
    bool dead = false;
    for (std::size_t st = 0; st < steps; ++st) {
      if (pos + batch_sz > n_train) {
        shuffle(order, batch_rng);
        pos = 0;
      }
      const std::vector<NodeId> centers(
          order.begin() + static_cast<std::ptrdiff_t>(pos),
          order.begin() + static_cast<std::ptrdiff_t>(pos + batch_sz));
      pos += batch_sz;
      const PreparedBatch p = ego_batch(b.train, b.tasks, mcfg, centers);
      nn::Tape tape;
      tape.set_kink_tracking(false);
      const int states = model.node_states(tape, p.batch);
      const int logits = model.node_logits(tape, states, p.readout_rows);
      const int loss =
          tape.weighted_bce(logits, p.targets, mcfg.minority_class_weight);
      const double loss_val = tape.value(loss)(0, 0);
      if (!std::isfinite(loss_val)) {
        r.diverged = true;
        r.note = "diverged at epoch " + std::to_string(ep) + " step " +
                 std::to_string(st) + " (non-finite loss)";
        dead = true;
        break;
      }
      loss_sum += loss_val;
      opt.zero_grad();
      tape.backward(loss);
      opt.step();
    }
    r.loss_curve.push_back(loss_sum / static_cast<double>(steps));
    r.epochs_run = ep + 1;
    if (dead) break;
    if ((ep + 1) % cfg.eval_every == 0) {
      const double val_f1 =
          detail::mean_of(chunked_eval_f1(b.val, val_centers));
      if (consider(val_f1)) break;
    }
  }
  if (r.best_checkpoint.is_null()) {
    r.best_checkpoint = nn::checkpoint_to_json(model);
  }
  nn::load_parameters_from_json(r.best_checkpoint, model);
  std::vector<NodeId> test_centers(b.test.graph.n);
  for (std::size_t v = 0; v < test_centers.size(); ++v) {
    test_centers[v] = static_cast<NodeId>(v);
  }
  r.test_f1 = chunked_eval_f1(b.test, test_centers);
  return r;
}

inline std::string variant_name(const nn::ModelConfig& m) {
  std::string v = "gin";
  if (m.reverse_mp) v += "+reverse";
  if (m.ports) v += "+ports";
  if (m.ego_ids) v += "+ego";
  if (m.aggregation == nn::Aggregation::Max) v += "(max)";
  return v;
}

// Worker count for seed fan-out: the environment variable overrides, the
// determinism flag forces 1 (results are seed-deterministic either way; the
// flag also serializes any shared-stream use and log interleaving).
inline int thread_budget(const ExperimentConfig& cfg) {
  if (cfg.determinism) return 1;
  if (const char* env = std::getenv("MULTIGNN_THREADS")) {
    const int t = std::atoi(env);
    if (t >= 1) return t;
  }
  return 1;
}

struct TrainOutput {
  MetricsReport report;
  std::vector<SeedResult> seed_results;
};

inline TrainOutput train(const ExperimentConfig& cfg,
                         std::ostream* progress = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  const DatasetBundle bundle = prepare_datasets(cfg);
  for (const std::string& w : cfg.validate()) {
    if (progress) *progress << "warning: " << w << "\n";
  }

  TrainOutput out;
  out.seed_results.resize(cfg.seeds.size());
  const int workers =
      std::min<int>(thread_budget(cfg), static_cast<int>(cfg.seeds.size()));
  std::atomic<std::size_t> next{0};
  auto run_worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg.seeds.size()) break;
      out.seed_results[i] = train_one_seed(bundle, cfg.seeds[i]);
      if (progress) {
        *progress << "seed " << cfg.seeds[i] << ": val F1 "
                  << out.seed_results[i].best_val_f1 << ", "
                  << out.seed_results[i].epochs_run << " epochs\n";
      }
    }
  };
  if (workers <= 1) {
    run_worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_worker);
    for (std::thread& th : pool) th.join();
  }

  MetricsReport& rep = out.report;
  rep.variant = variant_name(cfg.model);
  rep.seeds = cfg.seeds;
  rep.config_hash = config_hash(bundle.cfg);
  for (std::size_t t = 0; t < bundle.tasks.size(); ++t) {
    TaskMetrics tm;
    tm.task = bundle.tasks[t];
    for (const SeedResult& sr : out.seed_results) {
      if (!sr.diverged) tm.per_seed_f1.push_back(sr.test_f1[t]);
    }
    tm.finalize();
    rep.per_task.push_back(tm);
  }
  for (const SeedResult& sr : out.seed_results) {
    rep.loss_curves.push_back(sr.loss_curve);
    if (!sr.note.empty()) {
      rep.notes.push_back("seed " + std::to_string(sr.seed) + ": " + sr.note);
    }
  }
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

// Scores an already-trained model on one graph restricted to a node mask.
inline MetricsReport evaluate(nn::GnnModel& model, const SplitData& split,
                              const std::vector<TaskId>& tasks,
                              const std::vector<int>& minority,
                              const std::vector<NodeId>& mask) {
  if (mask.empty()) throw std::invalid_argument("evaluate: empty mask");
  if (tasks.size() != minority.size() ||
      static_cast<int>(tasks.size()) != model.config().num_tasks) {
    throw std::invalid_argument("evaluate: task/minority/model arity mismatch");
  }
  for (const NodeId v : mask) check_node(split.graph, v, "evaluate");

  std::vector<double> f1;
  if (model.config().ego_ids) {
    if (split.egos.size() != split.graph.n) {
      throw std::invalid_argument("evaluate: ego tables missing");
    }
    std::vector<ConfusionCounts> counts(tasks.size());
    constexpr std::size_t kChunk = 512;
    for (std::size_t lo = 0; lo < mask.size(); lo += kChunk) {
      const std::vector<NodeId> part(
          mask.begin() + static_cast<std::ptrdiff_t>(lo),
          mask.begin() +
              static_cast<std::ptrdiff_t>(std::min(lo + kChunk, mask.size())));
      const PreparedBatch p = ego_batch(split, tasks, model.config(), part);
      const nn::Mat logits = detail::forward_logits(model, p);
      for (std::size_t t = 0; t < tasks.size(); ++t) {
        std::vector<std::uint8_t> pred, truth;
        for (Eigen::Index i = 0; i < logits.rows(); ++i) {
          pred.push_back(logits(i, static_cast<Eigen::Index>(t)) > 0.0 ? 1 : 0);
          truth.push_back(
              p.targets(i, static_cast<Eigen::Index>(t)) > 0.5 ? 1 : 0);
        }
        const ConfusionCounts c = confusion(pred, truth, minority[t]);
        counts[t].tp += c.tp;
        counts[t].fp += c.fp;
        counts[t].fn += c.fn;
        counts[t].tn += c.tn;
      }
    }
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      f1.push_back(f1_from_confusion(counts[t]));
    }
  } else {
    PreparedBatch p = full_graph_batch(split, tasks, model.config());
    p.readout_rows.assign(mask.begin(), mask.end());
    p.targets = detail::targets_for(split.labels, tasks, mask);
    const nn::Mat logits = detail::forward_logits(model, p);
    f1 = f1_scores(logits, p.targets, minority);
  }

  MetricsReport rep;
  rep.variant = variant_name(model.config());
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    TaskMetrics tm;
    tm.task = tasks[t];
    tm.per_seed_f1 = {f1[t]};
    tm.finalize();
    rep.per_task.push_back(tm);
  }
  return rep;
}

}  // namespace multignn
