// Versioned JSON checkpoints: a config block plus flat parameter arrays
// keyed by stable parameter paths. Doubles serialize in shortest round-trip
// form, so save -> load reproduces every parameter bit for bit.
#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "multignn/nn/model.hpp"
#include "multignn/rng.hpp"

#include <json.hpp>

namespace multignn::nn {

inline constexpr int kCheckpointVersion = 1;

inline nlohmann::json checkpoint_to_json(GnnModel& model) {
  nlohmann::json params = nlohmann::json::object();
  for (Parameter* p : model.parameters()) {
    std::vector<double> flat(p->value.data(), p->value.data() + p->value.size());
    params[p->path] = nlohmann::json{
        {"rows", p->value.rows()}, {"cols", p->value.cols()}, {"data", flat}};
  }
  return nlohmann::json{{"format_version", kCheckpointVersion},
                        {"prng", kPrngName},
                        {"config", model.config()},
                        {"parameters", params}};
}

inline void save_checkpoint(const std::string& path, GnnModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << checkpoint_to_json(model).dump(2) << "\n";
}

inline void load_parameters_from_json(const nlohmann::json& j,
                                      GnnModel& model) {
  const auto& params = j.at("parameters");
  for (Parameter* p : model.parameters()) {
    if (!params.contains(p->path)) {
      throw std::invalid_argument("checkpoint: missing parameter " + p->path);
    }
    const auto& entry = params.at(p->path);
    const auto rows = entry.at("rows").get<Eigen::Index>();
    const auto cols = entry.at("cols").get<Eigen::Index>();
    if (rows != p->value.rows() || cols != p->value.cols()) {
      throw std::invalid_argument("checkpoint: shape mismatch for " + p->path);
    }
    const auto flat = entry.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != p->value.size()) {
      throw std::invalid_argument("checkpoint: size mismatch for " + p->path);
    }
    std::copy(flat.begin(), flat.end(), p->value.data());
  }
}

// Rebuilds the model described by a checkpoint file and restores its
// parameters exactly.
inline GnnModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format_version", -1) != kCheckpointVersion) {
    throw std::invalid_argument("checkpoint: unsupported format_version");
  }
  ModelConfig cfg = j.at("config").get<ModelConfig>();
  GnnModel model(cfg, nullptr);
  load_parameters_from_json(j, model);
  return model;
}

}  // namespace multignn::nn
