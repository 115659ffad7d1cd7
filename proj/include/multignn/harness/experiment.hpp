// Experiment configuration: a single schema-versioned JSON document that
// fixes everything a run depends on — generator parameters, task subset,
// model architecture, optimization hyperparameters, seed list, and ego
// sampling — so that a config plus this code base reproduces a result
// bit for bit. Desk-scale defaults: n=4096 d=6 r=11.1, six layers, hidden
// width 32, Adam at 3e-3, ego batches of 64 centers, five seeds.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "multignn/generator.hpp"
#include "multignn/hash128.hpp"
#include "multignn/nn/model.hpp"
#include "multignn/oracles.hpp"

#include <json.hpp>

namespace multignn {

inline constexpr int kExperimentSchemaVersion = 1;

struct ExperimentConfig {
  int schema_version = kExperimentSchemaVersion;
  GeneratorParams generator{4096, 6.0, 11.1, 1};
  std::vector<TaskId> tasks;  // empty = all eleven tasks
  nn::ModelConfig model;      // num_tasks/node dims are resolved at run time
  LabelThresholds thresholds;

  int epochs = 150;
  int batch_size = 64;        // ego-minibatch size (center count)
  double learning_rate = 3e-3;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int hops = 3;
  std::optional<int> neighbor_cap;
  int steps_per_epoch = 0;    // 0 = one full pass over train centers
  int eval_every = 1;         // epochs between validation evaluations
  int patience = 20;          // evaluations without improvement before stop
  int val_subsample = 512;    // ego mode: validation centers per evaluation
  bool determinism = false;   // force sequential seeds for bit reproducibility

  std::vector<TaskId> resolved_tasks() const {
    if (!tasks.empty()) return tasks;
    std::vector<TaskId> all;
    for (int t = 0; t < kNumTasks; ++t) all.push_back(static_cast<TaskId>(t));
    return all;
  }

  // Hard errors throw; soft issues (receptive-field shortfall) come back as
  // warnings for the caller to surface.
  std::vector<std::string> validate() const {
    multignn::validate(generator);
    if (epochs < 1 || batch_size < 1 || !(learning_rate > 0) || hops < 1 ||
        seeds.empty() || eval_every < 1 || patience < 0 ||
        steps_per_epoch < 0 || val_subsample < 0) {
      throw std::invalid_argument("ExperimentConfig: invalid hyperparameters");
    }
    if (neighbor_cap && *neighbor_cap < 1) {
      throw std::invalid_argument("ExperimentConfig: neighbor_cap must be >= 1");
    }
    std::vector<std::string> warnings;
    if (model.ego_ids && hops < model.num_layers) {
      warnings.push_back("hops (" + std::to_string(hops) +
                         ") < num_layers (" + std::to_string(model.num_layers) +
                         "): receptive field exceeds the sampled neighborhood");
    }
    return warnings;
  }
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  std::vector<std::string> task_names;
  for (const TaskId t : c.tasks) {
    task_names.push_back(kTaskNames[static_cast<std::size_t>(t)]);
  }
  j = nlohmann::json{{"schema_version", c.schema_version},
                     {"generator", c.generator},
                     {"tasks", task_names},
                     {"model", c.model},
                     {"degree_threshold", c.thresholds.degree},
                     {"fan_threshold", c.thresholds.fan},
                     {"epochs", c.epochs},
                     {"batch_size", c.batch_size},
                     {"learning_rate", c.learning_rate},
                     {"seeds", c.seeds},
                     {"hops", c.hops},
                     {"steps_per_epoch", c.steps_per_epoch},
                     {"eval_every", c.eval_every},
                     {"patience", c.patience},
                     {"val_subsample", c.val_subsample},
                     {"determinism", c.determinism}};
  if (c.neighbor_cap) j["neighbor_cap"] = *c.neighbor_cap;
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  c.schema_version = j.value("schema_version", kExperimentSchemaVersion);
  if (c.schema_version != kExperimentSchemaVersion) {
    throw std::invalid_argument("ExperimentConfig: unsupported schema_version " +
                                std::to_string(c.schema_version));
  }
  if (j.contains("generator")) j.at("generator").get_to(c.generator);
  c.tasks.clear();
  for (const auto& name : j.value("tasks", std::vector<std::string>{})) {
    bool found = false;
    for (int t = 0; t < kNumTasks; ++t) {
      if (name == kTaskNames[static_cast<std::size_t>(t)]) {
        c.tasks.push_back(static_cast<TaskId>(t));
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::invalid_argument("ExperimentConfig: unknown task " + name);
    }
  }
  if (j.contains("model")) j.at("model").get_to(c.model);
  c.thresholds.degree = j.value("degree_threshold", c.thresholds.degree);
  c.thresholds.fan = j.value("fan_threshold", c.thresholds.fan);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  if (j.contains("seeds")) j.at("seeds").get_to(c.seeds);
  c.hops = j.value("hops", c.hops);
  if (j.contains("neighbor_cap")) {
    c.neighbor_cap = j.at("neighbor_cap").get<int>();
  } else {
    c.neighbor_cap.reset();
  }
  c.steps_per_epoch = j.value("steps_per_epoch", c.steps_per_epoch);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.patience = j.value("patience", c.patience);
  c.val_subsample = j.value("val_subsample", c.val_subsample);
  c.determinism = j.value("determinism", c.determinism);
}

// Stable hash of the resolved config (for the seed-isolation audit trail).
inline std::uint64_t config_hash(const ExperimentConfig& c) {
  const std::string dump = nlohmann::json(c).dump();
  std::vector<std::uint64_t> words;
  std::uint64_t w = 0;
  int k = 0;
  for (const char ch : dump) {
    w = (w << 8) | static_cast<unsigned char>(ch);
    if (++k == 8) {
      words.push_back(w);
      w = 0;
      k = 0;
    }
  }
  if (k) words.push_back(w);
  return hash_words(words, 0x4D475454ULL).hi;
}

}  // namespace multignn
