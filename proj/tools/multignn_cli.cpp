// Command-line front end for the toolkit. Subcommands: gen (random
// multigraph benchmark), label (oracle task labels), ports (port
// assignment), nodeid (breadth-first unique IDs), wl (color refinement),
// train / eval / ablate (experiment harness), gradcheck (finite-difference
// gradient audit). Exit codes: 0 success, 1 usage error, 2 data error,
// 3 failed check. Progress and diagnostics go to stderr; machine-readable
// output goes to --out files or stdout.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "multignn/csv.hpp"
#include "multignn/generator.hpp"
#include "multignn/graph.hpp"
#include "multignn/harness/ablation.hpp"
#include "multignn/harness/train.hpp"
#include "multignn/nn/checkpoint.hpp"
#include "multignn/nn/gradcheck.hpp"
#include "multignn/nodeid.hpp"
#include "multignn/oracles.hpp"
#include "multignn/ports.hpp"
#include "multignn/rng.hpp"
#include "multignn/wl.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitFailedCheck = 3;

// A thrown DataError exits with code 2; message must name the offending
// flag or file.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FailedCheck : std::runtime_error {
  using std::runtime_error::runtime_error;
};

multignn::DirectedMultigraph load_graph(const std::string& path) {
  try {
    return multignn::read_edge_csv(path);
  } catch (const std::exception& e) {
    throw DataError("--graph " + path + ": " + e.what());
  }
}

nlohmann::json load_json(const std::string& path, const char* flag) {
  std::ifstream in(path);
  if (!in) {
    throw DataError(std::string(flag) + " " + path + ": cannot open file");
  }
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const std::exception& e) {
    throw DataError(std::string(flag) + " " + path + ": " + e.what());
  }
}

multignn::ExperimentConfig load_config(const std::string& path) {
  try {
    return load_json(path, "--config").get<multignn::ExperimentConfig>();
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError("--config " + path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text,
                const char* flag) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError(std::string(flag) + " " + path + ": cannot open for write");
  }
  out << text;
}

// Accepts a symbolic node name from the CSV or a numeric node id.
multignn::NodeId resolve_node(const multignn::DirectedMultigraph& g,
                              const std::string& token, const char* flag) {
  for (multignn::NodeId v = 0; v < g.n; ++v) {
    if (v < g.node_names.size() && g.node_names[v] == token) return v;
  }
  try {
    std::size_t pos = 0;
    const unsigned long id = std::stoul(token, &pos);
    if (pos == token.size() && id < g.n) {
      return static_cast<multignn::NodeId>(id);
    }
  } catch (const std::exception&) {
  }
  throw DataError(std::string(flag) + " " + token +
                  ": no node with this name or id");
}

// ------------------------------------------------------------------ gen ----

int run_gen(std::uint32_t n, double d, double r, std::uint64_t seed,
            const std::string& out) {
  multignn::GeneratorParams p{n, d, r, seed};
  try {
    multignn::validate(p);
  } catch (const std::exception& e) {
    throw DataError(std::string("gen parameters: ") + e.what());
  }
  const auto g = multignn::random_circulant(p);
  multignn::write_edge_csv(out, g);
  const auto meta = multignn::generator_metadata(p, g.num_edges());
  write_text(out + ".json", meta.dump(2) + "\n", "--out");
  std::cerr << "gen: wrote " << g.num_edges() << " edges to " << out
            << " (+ sidecar " << out << ".json)\n";
  return kExitOk;
}

// ---------------------------------------------------------------- label ----

int run_label(const std::string& graph_path, const std::string& out,
              const std::string& stats, std::size_t degree_threshold,
              std::size_t fan_threshold) {
  const auto g = load_graph(graph_path);
  multignn::LabelThresholds th;
  th.degree = degree_threshold;
  th.fan = fan_threshold;
  const auto lm = multignn::label_all(g, th);
  multignn::write_labels_csv(out, lm);
  std::cerr << "label: wrote " << g.n << " rows to " << out << "\n";
  if (!stats.empty()) {
    write_text(stats, multignn::label_stats(lm).dump(2) + "\n", "--stats");
    std::cerr << "label: wrote ratio stats to " << stats << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- ports ----

int run_ports(const std::string& graph_path, const std::string& out) {
  const auto g = load_graph(graph_path);
  multignn::write_ports_csv(out, g, multignn::assign_ports(g));
  std::cerr << "ports: wrote " << g.num_edges() << " rows to " << out << "\n";
  return kExitOk;
}

// --------------------------------------------------------------- nodeid ----

int run_nodeid(const std::string& graph_path, const std::string& root_token,
               const std::string& out, bool show_declined) {
  const auto g = load_graph(graph_path);
  const auto root = resolve_node(g, root_token, "--root");
  const auto ports = multignn::assign_ports(g);
  const auto res = multignn::assign_unique_ids(g, ports, root);

  std::ostringstream body;
  body << "node,label\n";
  for (multignn::NodeId v = 0; v < g.n; ++v) {
    body << multignn::node_token(g, v) << ","
         << (res.reached[v] ? res.labels[v].to_string() : "") << "\n";
  }
  write_text(out, body.str(), "--out");

  std::cerr << "nodeid: root " << multignn::node_token(g, root) << ", "
            << res.rounds << " rounds, " << res.declined.size()
            << " declined proposals, " << res.unreachable.size()
            << " unreachable nodes\n";
  if (show_declined) {
    for (const auto& d : res.declined) {
      std::cerr << "  declined round " << d.round << " at "
                << multignn::node_token(g, d.node) << ": "
                << d.proposal.to_string() << "\n";
    }
  }
  return kExitOk;
}

// ------------------------------------------------------------------- wl ----

int run_wl(const std::string& graph_path, std::uint32_t rounds, bool ports,
           bool reverse, const std::string& ego_root, const std::string& out) {
  const auto g = load_graph(graph_path);
  multignn::WlOptions opt;
  opt.ports = ports;
  opt.reverse = reverse;
  if (!ego_root.empty()) {
    opt.ego_root = resolve_node(g, ego_root, "--ego-root");
  }
  const auto pa = multignn::assign_ports(g);
  const auto rc = multignn::wl_refine(g, &pa, rounds, opt);

  std::ostringstream body;
  body << "round,num_classes\n";
  for (std::uint32_t t = 0; t <= rounds; ++t) {
    body << t << "," << rc.num_classes(t) << "\n";
  }
  write_text(out, body.str(), "--out");
  std::cerr << "wl: " << rounds << " rounds, final partition has "
            << rc.num_classes(rounds) << " classes over " << g.n
            << " nodes\n";
  return kExitOk;
}

// -------------------------------------------------------- train/eval/... ----

void export_report_files(const std::vector<multignn::MetricsReport>& reports,
                         const std::string& out, const std::string& format) {
  try {
    if (out == "-") {
      if (format == "csv") {
        std::cout << multignn::metrics_to_csv(reports);
      } else if (format == "json") {
        std::cout << nlohmann::json(reports).dump(2) << "\n";
      } else {
        throw std::invalid_argument("unknown format " + format);
      }
      return;
    }
    multignn::export_metrics(reports, out, format);
    if (format == "csv") {
      // Per-seed detail rides along for every CSV export.
      multignn::export_metrics(reports, out + ".json", "json");
    }
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("--format ") + format + ": " + e.what());
  }
}

int run_train(const std::string& config_path, const std::string& out,
              const std::string& format, bool determinism,
              const std::vector<std::uint64_t>& seed_override,
              const std::string& checkpoint_dir) {
  auto cfg = load_config(config_path);
  if (determinism) cfg.determinism = true;
  if (!seed_override.empty()) cfg.seeds = seed_override;

  const auto outp = multignn::train(cfg, &std::cerr);
  export_report_files({outp.report}, out, format);
  std::cerr << "train: wrote metrics for variant '" << outp.report.variant
            << "' to " << out << "\n";

  if (!checkpoint_dir.empty()) {
    for (const auto& sr : outp.seed_results) {
      if (sr.best_checkpoint.is_null()) continue;
      const std::string path = checkpoint_dir + "/checkpoint_seed" +
                               std::to_string(sr.seed) + ".json";
      write_text(path, sr.best_checkpoint.dump() + "\n", "--checkpoint-dir");
      std::cerr << "train: saved " << path << "\n";
    }
  }

  bool all_diverged = true;
  for (const auto& sr : outp.seed_results) all_diverged &= sr.diverged;
  if (all_diverged) {
    throw FailedCheck("train: every seed diverged; see notes in " + out);
  }
  return kExitOk;
}

int run_eval(const std::string& config_path, const std::string& checkpoint,
             const std::string& split_name, const std::string& out,
             const std::string& format) {
  const auto cfg = load_config(config_path);
  const auto bundle = multignn::prepare_datasets(cfg);

  const multignn::SplitData* split = nullptr;
  if (split_name == "train") split = &bundle.train;
  else if (split_name == "val") split = &bundle.val;
  else if (split_name == "test") split = &bundle.test;
  else throw DataError("--split " + split_name + ": must be train|val|test");

  multignn::nn::GnnModel model(multignn::resolved_model_config(cfg), nullptr);
  try {
    multignn::nn::load_parameters_from_json(load_json(checkpoint, "--checkpoint"),
                                            model);
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError("--checkpoint " + checkpoint + ": " + e.what());
  }

  std::vector<multignn::NodeId> mask;
  for (multignn::NodeId v = 0; v < split->graph.n; ++v) mask.push_back(v);
  auto report =
      multignn::evaluate(model, *split, bundle.tasks, bundle.minority, mask);
  report.variant = multignn::variant_name(model.config()) + "@" + split_name;
  export_report_files({report}, out, format);
  std::cerr << "eval: wrote metrics to " << out << "\n";
  return kExitOk;
}

int run_ablate(const std::string& config_path,
               const std::string& adaptations, const std::string& out,
               const std::string& format, bool determinism) {
  auto cfg = load_config(config_path);
  if (determinism) cfg.determinism = true;

  std::vector<std::string> sequence;
  std::stringstream ss(adaptations);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) sequence.push_back(item);
  }
  std::vector<multignn::MetricsReport> rows;
  try {
    rows = multignn::run_ablation(cfg, sequence, &std::cerr);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("--adaptations ") + adaptations + ": " +
                    e.what());
  }
  export_report_files(rows, out, format);
  std::cerr << "ablate: wrote " << rows.size() << " variant rows to " << out
            << "\n";
  return kExitOk;
}

// ------------------------------------------------------------ gradcheck ----

int run_gradcheck(const std::string& config_path, double eps, double tol,
                  std::uint32_t n, std::uint64_t seed,
                  std::size_t max_entries) {
  multignn::nn::ModelConfig mcfg;
  mcfg.num_layers = 2;
  mcfg.hidden_dim = 6;
  mcfg.reverse_mp = true;
  mcfg.ports = true;
  mcfg.num_tasks = 3;
  if (!config_path.empty()) {
    const auto j = load_json(config_path, "--config");
    try {
      // Accept a full experiment config or a bare model config.
      if (j.contains("model")) {
        j.at("model").get_to(mcfg);
      } else {
        j.get_to(mcfg);
      }
    } catch (const std::exception& e) {
      throw DataError("--config " + config_path + ": " + e.what());
    }
  }
  mcfg.node_feature_dim = 1;
  mcfg.edge_feature_dim = 0;

  // A small random multigraph exercises parallel edges and both directions.
  const auto g = multignn::random_circulant({n, 3.0, 2.5, seed});
  const auto ports = multignn::assign_ports(g);
  multignn::nn::GraphBatch batch;
  batch.num_nodes = static_cast<int>(g.n);
  batch.node_feats = multignn::nn::Mat::Ones(g.n, mcfg.effective_node_dim());
  if (mcfg.ego_ids) {
    batch.node_feats.col(1).setZero();
    batch.node_feats(0, 1) = 1.0;
  }
  batch.edge_feats = multignn::nn::Mat::Zero(
      static_cast<Eigen::Index>(g.num_edges()), mcfg.effective_edge_dim());
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    batch.src.push_back(g.edges[e].src);
    batch.dst.push_back(g.edges[e].dst);
    if (mcfg.ports) {
      batch.edge_feats(static_cast<Eigen::Index>(e), 0) = ports.in_port[e];
      batch.edge_feats(static_cast<Eigen::Index>(e), 1) = ports.out_port[e];
    }
  }

  multignn::Rng rng(multignn::derive_seed(seed, "gradcheck"));
  multignn::nn::GnnModel model(mcfg, &rng);
  std::vector<std::uint32_t> rows;
  for (multignn::NodeId v = 0; v < g.n; ++v) rows.push_back(v);
  multignn::nn::Mat targets(static_cast<Eigen::Index>(g.n), mcfg.num_tasks);
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    targets.data()[i] = rng.below(2) ? 1.0 : 0.0;
  }

  const auto report = multignn::nn::grad_check_model(model, batch, rows,
                                                     targets, eps,
                                                     max_entries, &rng);
  std::cout << "max-rel-err " << report.max_rel_err << " at "
            << report.worst_path << " (checked " << report.checked
            << ", skipped " << report.skipped << " of " << report.total
            << " entries)\n";
  if (!report.ok(tol)) {
    throw FailedCheck("gradcheck: tolerance " + std::to_string(tol) +
                      " exceeded or too many entries skipped");
  }
  std::cerr << "gradcheck: ok\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directed-multigraph learning toolkit"};
  app.require_subcommand(1);
  int rc = kExitOk;

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random multigraph");
  std::uint32_t gen_n = 4096;
  double gen_d = 6.0, gen_r = 11.1;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--n", gen_n, "number of nodes")->required();
  gen->add_option("--d", gen_d, "average total degree")->required();
  gen->add_option("--r", gen_r, "ring-distance spread")->required();
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "edge CSV path (JSON sidecar appended)")
      ->required();
  gen->callback([&] { rc = run_gen(gen_n, gen_d, gen_r, gen_seed, gen_out); });

  // label
  auto* label = app.add_subcommand("label", "Oracle task labels for a graph");
  std::string label_graph, label_out, label_stats;
  std::size_t label_deg = 3, label_fan = 3;
  label->add_option("--graph", label_graph, "edge CSV")->required();
  label->add_option("--out", label_out, "label CSV path")->required();
  label->add_option("--stats", label_stats, "positive-ratio JSON path");
  label->add_option("--degree-threshold", label_deg, "degree cutoff");
  label->add_option("--fan-threshold", label_fan, "fan cutoff");
  label->callback([&] {
    rc = run_label(label_graph, label_out, label_stats, label_deg, label_fan);
  });

  // ports
  auto* ports = app.add_subcommand("ports", "Port numbers per edge");
  std::string ports_graph, ports_out;
  ports->add_option("--graph", ports_graph, "edge CSV")->required();
  ports->add_option("--out", ports_out, "port CSV path")->required();
  ports->callback([&] { rc = run_ports(ports_graph, ports_out); });

  // nodeid
  auto* nodeid = app.add_subcommand("nodeid", "Breadth-first unique node IDs");
  std::string nid_graph, nid_root, nid_out = "-";
  bool nid_declined = false;
  nodeid->add_option("--graph", nid_graph, "edge CSV")->required();
  nodeid->add_option("--root", nid_root, "root node name or id")->required();
  nodeid->add_option("--out", nid_out, "label table path ('-' = stdout)");
  nodeid->add_flag("--declined", nid_declined,
                   "also list declined proposals on stderr");
  nodeid->callback(
      [&] { rc = run_nodeid(nid_graph, nid_root, nid_out, nid_declined); });

  // wl
  auto* wl = app.add_subcommand("wl", "Color refinement class counts");
  std::string wl_graph, wl_root, wl_out = "-";
  std::uint32_t wl_rounds = 3;
  bool wl_ports = false, wl_reverse = false;
  wl->add_option("--graph", wl_graph, "edge CSV")->required();
  wl->add_option("--rounds", wl_rounds, "refinement rounds");
  wl->add_flag("--ports", wl_ports, "include port pairs in tuples");
  wl->add_flag("--reverse", wl_reverse, "also hash out-neighbor tuples");
  wl->add_option("--ego-root", wl_root, "node with a marked initial color");
  wl->add_option("--out", wl_out, "class-count CSV path ('-' = stdout)");
  wl->callback([&] {
    rc = run_wl(wl_graph, wl_rounds, wl_ports, wl_reverse, wl_root, wl_out);
  });

  // train
  auto* train = app.add_subcommand("train", "Train per the experiment config");
  std::string tr_config, tr_out = "metrics.csv", tr_format = "csv";
  std::string tr_ckpt_dir;
  bool tr_det = false;
  std::vector<std::uint64_t> tr_seeds;
  train->add_option("--config", tr_config, "experiment config JSON")
      ->required();
  train->add_option("--out", tr_out, "metrics path ('-' = stdout)");
  train->add_option("--format", tr_format, "csv|json");
  train->add_option("--seed", tr_seeds, "override the config's seed list");
  train->add_flag("--determinism", tr_det,
                  "single-threaded bit-reproducible mode");
  train->add_option("--checkpoint-dir", tr_ckpt_dir,
                    "directory for per-seed best checkpoints");
  train->callback([&] {
    rc = run_train(tr_config, tr_out, tr_format, tr_det, tr_seeds, tr_ckpt_dir);
  });

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a split");
  std::string ev_config, ev_ckpt, ev_split = "test", ev_out = "-";
  std::string ev_format = "csv";
  eval->add_option("--config", ev_config, "experiment config JSON")
      ->required();
  eval->add_option("--checkpoint", ev_ckpt, "checkpoint JSON from train")
      ->required();
  eval->add_option("--split", ev_split, "train|val|test");
  eval->add_option("--out", ev_out, "metrics path ('-' = stdout)");
  eval->add_option("--format", ev_format, "csv|json");
  eval->callback(
      [&] { rc = run_eval(ev_config, ev_ckpt, ev_split, ev_out, ev_format); });

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Cumulative adaptation study");
  std::string ab_config, ab_out = "ablation.csv", ab_format = "csv";
  std::string ab_seq = "reverse_mp,ports,ego_ids";
  bool ab_det = false;
  ablate->add_option("--config", ab_config, "experiment config JSON")
      ->required();
  ablate->add_option("--adaptations", ab_seq,
                     "comma-separated order of adaptations to add");
  ablate->add_option("--out", ab_out, "metrics path ('-' = stdout)");
  ablate->add_option("--format", ab_format, "csv|json");
  ablate->add_flag("--determinism", ab_det,
                   "single-threaded bit-reproducible mode");
  ablate->callback([&] {
    rc = run_ablate(ab_config, ab_seq, ab_out, ab_format, ab_det);
  });

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck",
                                "Finite-difference gradient audit");
  std::string gc_config;
  double gc_eps = 1e-3, gc_tol = 1e-4;
  std::uint32_t gc_n = 10;
  std::uint64_t gc_seed = 1;
  std::size_t gc_entries = 2000;
  gc->add_option("--config", gc_config, "model or experiment config JSON");
  gc->add_option("--eps", gc_eps, "central-difference step");
  gc->add_option("--tol", gc_tol, "max relative error allowed");
  gc->add_option("--n", gc_n, "nodes in the probe graph");
  gc->add_option("--seed", gc_seed, "probe seed");
  gc->add_option("--max-entries", gc_entries, "parameter entries to sample");
  gc->callback([&] {
    rc = run_gradcheck(gc_config, gc_eps, gc_tol, gc_n, gc_seed, gc_entries);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const FailedCheck& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailedCheck;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return rc;
}
