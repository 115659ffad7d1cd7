// Message-passing model for directed multigraphs, GIN-style with edge
// features. Per layer, the message on edge (u,v) is
//   MLP_msg(concat(h(u), edge_features(u,v)))
// aggregated over v's incoming edges (sum or max). With reverse message
// passing enabled, a separately parameterized MLP_msg_out aggregates over
// outgoing edges. The state update is
//   h'(v) = MLP_upd(concat(h(v), a_in(v) [, a_out(v)]))
// Port features, when enabled, arrive appended to the edge features; the ego
// flag, when enabled, arrives appended to the node features. Aggregating an
// empty neighborhood yields a zero vector for both sum and max.
#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "multignn/nn/mlp.hpp"
#include "multignn/nn/tensor.hpp"
#include "multignn/rng.hpp"

#include <json.hpp>

namespace multignn::nn {

enum class Aggregation { Sum, Max };
enum class ReadoutKind { Node, Edge };

struct ModelConfig {
  int num_layers = 6;
  int hidden_dim = 32;
  bool reverse_mp = false;
  bool ports = false;
  bool ego_ids = false;
  Aggregation aggregation = Aggregation::Sum;
  ReadoutKind readout = ReadoutKind::Node;
  double minority_class_weight = 1.0;
  int node_feature_dim = 1;  // width before the ego flag is appended
  int edge_feature_dim = 0;  // width before the port pair is appended
  int num_tasks = 11;
  // Update/message/readout MLPs: `mlp_depth` linear layers with ReLU between
  // them; hidden width defaults to hidden_dim when mlp_hidden_dim is 0.
  int mlp_depth = 2;
  int mlp_hidden_dim = 0;

  int effective_node_dim() const { return node_feature_dim + (ego_ids ? 1 : 0); }
  int effective_edge_dim() const { return edge_feature_dim + (ports ? 2 : 0); }
  int mlp_hidden() const { return mlp_hidden_dim > 0 ? mlp_hidden_dim : hidden_dim; }
};

inline void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{
      {"num_layers", c.num_layers},
      {"hidden_dim", c.hidden_dim},
      {"reverse_mp", c.reverse_mp},
      {"ports", c.ports},
      {"ego_ids", c.ego_ids},
      {"aggregation", c.aggregation == Aggregation::Sum ? "sum" : "max"},
      {"readout", c.readout == ReadoutKind::Node ? "node" : "edge"},
      {"minority_class_weight", c.minority_class_weight},
      {"node_feature_dim", c.node_feature_dim},
      {"edge_feature_dim", c.edge_feature_dim},
      {"num_tasks", c.num_tasks},
      {"mlp_depth", c.mlp_depth},
      {"mlp_hidden_dim", c.mlp_hidden_dim}};
}

inline void from_json(const nlohmann::json& j, ModelConfig& c) {
  c.num_layers = j.value("num_layers", c.num_layers);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.reverse_mp = j.value("reverse_mp", c.reverse_mp);
  c.ports = j.value("ports", c.ports);
  c.ego_ids = j.value("ego_ids", c.ego_ids);
  const std::string agg = j.value("aggregation", std::string("sum"));
  if (agg != "sum" && agg != "max") {
    throw std::invalid_argument("ModelConfig: aggregation must be sum|max");
  }
  c.aggregation = agg == "sum" ? Aggregation::Sum : Aggregation::Max;
  const std::string ro = j.value("readout", std::string("node"));
  if (ro != "node" && ro != "edge") {
    throw std::invalid_argument("ModelConfig: readout must be node|edge");
  }
  c.readout = ro == "node" ? ReadoutKind::Node : ReadoutKind::Edge;
  c.minority_class_weight =
      j.value("minority_class_weight", c.minority_class_weight);
  c.node_feature_dim = j.value("node_feature_dim", c.node_feature_dim);
  c.edge_feature_dim = j.value("edge_feature_dim", c.edge_feature_dim);
  c.num_tasks = j.value("num_tasks", c.num_tasks);
  c.mlp_depth = j.value("mlp_depth", c.mlp_depth);
  c.mlp_hidden_dim = j.value("mlp_hidden_dim", c.mlp_hidden_dim);
}

// One (possibly batched) graph in tensor form. Feature matrices carry the
// *effective* widths: callers append the port pair / ego flag columns before
// building the batch (the harness does this).
struct GraphBatch {
  int num_nodes = 0;
  std::vector<std::uint32_t> src;  // per edge, tail node row
  std::vector<std::uint32_t> dst;  // per edge, head node row
  Mat node_feats;                  // num_nodes x effective_node_dim
  Mat edge_feats;                  // num_edges x effective_edge_dim

  std::size_t num_edges() const { return src.size(); }
};

class GnnModel {
 public:
  GnnModel(const ModelConfig& cfg, Rng* init_rng) : cfg_(cfg) {
    if (cfg.num_layers < 1 || cfg.hidden_dim < 1 || cfg.num_tasks < 1 ||
        cfg.mlp_depth < 1) {
      throw std::invalid_argument("GnnModel: invalid configuration");
    }
    const int h = cfg.hidden_dim;
    const int edim = cfg.effective_edge_dim();
    for (int l = 0; l < cfg.num_layers; ++l) {
      const int in_dim = l == 0 ? cfg.effective_node_dim() : h;
      const std::string p = "layer" + std::to_string(l);
      msg_in_.push_back(std::make_unique<Mlp>(
          p + "/msg_in", mlp_dims(in_dim + edim, h), init_rng));
      if (cfg.reverse_mp) {
        msg_out_.push_back(std::make_unique<Mlp>(
            p + "/msg_out", mlp_dims(in_dim + edim, h), init_rng));
      }
      const int upd_in = in_dim + h + (cfg.reverse_mp ? h : 0);
      update_.push_back(std::make_unique<Mlp>(
          p + "/update", mlp_dims(upd_in, h), init_rng));
    }
    readout_node_ = std::make_unique<Mlp>(
        "readout_node", mlp_dims(h, cfg.num_tasks), init_rng);
    readout_edge_ = std::make_unique<Mlp>(
        "readout_edge", mlp_dims(2 * h + edim, cfg.num_tasks), init_rng);
  }

  const ModelConfig& config() const { return cfg_; }

  // Runs all message-passing layers; returns the tape id of the final node
  // states (num_nodes x hidden_dim).
  int node_states(Tape& tape, const GraphBatch& b) {
    validate(b);
    int h = tape.input(b.node_feats);
    const int ef = cfg_.effective_edge_dim() > 0 ? tape.input(b.edge_feats) : -1;
    for (int l = 0; l < cfg_.num_layers; ++l) {
      h = layer_forward(tape, l, b, h, ef);
    }
    return h;
  }

  // Per-node task logits at the given node rows.
  int node_logits(Tape& tape, int states, const std::vector<std::uint32_t>& rows) {
    return readout_node_->forward(tape, tape.gather_rows(states, rows));
  }

  int node_logits_all(Tape& tape, int states) {
    return readout_node_->forward(tape, states);
  }

  // Per-edge task logits: concat(h(src), h(dst), edge features) per edge row.
  int edge_logits(Tape& tape, int states, const GraphBatch& b,
                  const std::vector<std::uint32_t>& edge_rows) {
    std::vector<std::uint32_t> s, d;
    s.reserve(edge_rows.size());
    d.reserve(edge_rows.size());
    for (auto e : edge_rows) {
      if (e >= b.num_edges()) {
        throw std::invalid_argument("edge_logits: edge row out of range");
      }
      s.push_back(b.src[e]);
      d.push_back(b.dst[e]);
    }
    std::vector<int> parts{tape.gather_rows(states, s),
                           tape.gather_rows(states, d)};
    if (cfg_.effective_edge_dim() > 0) {
      Mat ef(static_cast<Eigen::Index>(edge_rows.size()), b.edge_feats.cols());
      for (std::size_t i = 0; i < edge_rows.size(); ++i) {
        ef.row(static_cast<Eigen::Index>(i)) = b.edge_feats.row(edge_rows[i]);
      }
      parts.push_back(tape.input(std::move(ef)));
    }
    return readout_edge_->forward(tape, tape.concat_cols(parts));
  }

  std::vector<Parameter*> parameters() {
    std::vector<Parameter*> out;
    for (int l = 0; l < cfg_.num_layers; ++l) {
      msg_in_[static_cast<std::size_t>(l)]->collect(out);
      if (cfg_.reverse_mp) msg_out_[static_cast<std::size_t>(l)]->collect(out);
      update_[static_cast<std::size_t>(l)]->collect(out);
    }
    readout_node_->collect(out);
    readout_edge_->collect(out);
    return out;
  }

  Mlp& msg_in_mlp(int l) { return *msg_in_.at(static_cast<std::size_t>(l)); }
  Mlp& msg_out_mlp(int l) { return *msg_out_.at(static_cast<std::size_t>(l)); }
  Mlp& update_mlp(int l) { return *update_.at(static_cast<std::size_t>(l)); }
  Mlp& node_readout_mlp() { return *readout_node_; }
  Mlp& edge_readout_mlp() { return *readout_edge_; }

  // Single message-passing layer on explicit states (the building block of
  // node_states), exposed for layer-level tests. `h` must be a tape node of
  // width equal to the layer's input dimension; `ef` is a tape node of the
  // edge feature matrix or -1 when the model takes no edge features.
  int forward_layer(Tape& tape, int layer, const GraphBatch& b, int h,
                    int ef) {
    return layer_forward(tape, layer, b, h, ef);
  }

 private:
  std::vector<int> mlp_dims(int in, int out) const {
    std::vector<int> dims{in};
    for (int l = 1; l < cfg_.mlp_depth; ++l) dims.push_back(cfg_.mlp_hidden());
    dims.push_back(out);
    return dims;
  }

  void validate(const GraphBatch& b) const {
    if (b.node_feats.rows() != b.num_nodes ||
        b.node_feats.cols() != cfg_.effective_node_dim()) {
      throw std::invalid_argument(
          "GraphBatch: node feature matrix must be num_nodes x " +
          std::to_string(cfg_.effective_node_dim()));
    }
    if (cfg_.effective_edge_dim() > 0 &&
        (b.edge_feats.rows() != static_cast<Eigen::Index>(b.num_edges()) ||
         b.edge_feats.cols() != cfg_.effective_edge_dim())) {
      throw std::invalid_argument(
          "GraphBatch: edge feature matrix must be num_edges x " +
          std::to_string(cfg_.effective_edge_dim()));
    }
    for (std::size_t i = 0; i < b.num_edges(); ++i) {
      if (b.src[i] >= static_cast<std::uint32_t>(b.num_nodes) ||
          b.dst[i] >= static_cast<std::uint32_t>(b.num_nodes)) {
        throw std::invalid_argument("GraphBatch: edge endpoint out of range");
      }
    }
  }

  int aggregate(Tape& tape, int messages,
                const std::vector<std::uint32_t>& seg, int num_nodes) const {
    return cfg_.aggregation == Aggregation::Sum
               ? tape.segment_sum(messages, seg, num_nodes)
               : tape.segment_max(messages, seg, num_nodes);
  }

  int layer_forward(Tape& tape, int l, const GraphBatch& b, int h, int ef) {
    auto msg_input = [&](const std::vector<std::uint32_t>& endpoints) {
      const int gathered = tape.gather_rows(h, endpoints);
      return ef >= 0 ? tape.concat_cols({gathered, ef}) : gathered;
    };
    const int m_in =
        msg_in_[static_cast<std::size_t>(l)]->forward(tape, msg_input(b.src));
    const int a_in = aggregate(tape, m_in, b.dst, b.num_nodes);
    std::vector<int> parts{h, a_in};
    if (cfg_.reverse_mp) {
      const int m_out = msg_out_[static_cast<std::size_t>(l)]->forward(
          tape, msg_input(b.dst));
      parts.push_back(aggregate(tape, m_out, b.src, b.num_nodes));
    }
    return update_[static_cast<std::size_t>(l)]->forward(
        tape, tape.concat_cols(parts));
  }

  ModelConfig cfg_;
  std::vector<std::unique_ptr<Mlp>> msg_in_;
  std::vector<std::unique_ptr<Mlp>> msg_out_;
  std::vector<std::unique_ptr<Mlp>> update_;
  std::unique_ptr<Mlp> readout_node_;
  std::unique_ptr<Mlp> readout_edge_;
};

}  // namespace multignn::nn
