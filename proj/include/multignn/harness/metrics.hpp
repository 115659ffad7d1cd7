// Evaluation metrics and report aggregation. All scoring uses the F1 of the
// minority class: per task, the minority label is whichever class is rarer in
// the *training* split (the positive class is not always the minority), and
// predictions threshold the sigmoid at 0.5 — equivalently, logit > 0.
// Reports aggregate mean and standard deviation over seeds and serialize to
// CSV (rows = model variants, columns = tasks, 4 decimals) or lossless JSON.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "multignn/oracles.hpp"

#include <json.hpp>

namespace multignn {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

// F1 of the class designated positive in the counts. An empty denominator
// means the class is absent and never predicted: scored 1.0 (nothing to
// miss), which also keeps the perfect-prediction invariant exact.
inline double f1_from_confusion(const ConfusionCounts& c) {
  const std::uint64_t denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 1.0
                    : 2.0 * static_cast<double>(c.tp) /
                          static_cast<double>(denom);
}

// Minority label for a task given the training-split positive ratio.
inline int minority_class(double positive_ratio) {
  return positive_ratio < 0.5 ? 1 : 0;
}

// `predictions` and `labels` hold 0/1 per instance; `minority` picks which
// label counts as the positive class for the confusion matrix.
inline ConfusionCounts confusion(const std::vector<std::uint8_t>& predictions,
                                 const std::vector<std::uint8_t>& labels,
                                 int minority) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("confusion: size mismatch");
  }
  ConfusionCounts c;
  const auto m = static_cast<std::uint8_t>(minority);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool pred_pos = predictions[i] == m;
    const bool true_pos = labels[i] == m;
    if (pred_pos && true_pos) {
      ++c.tp;
    } else if (pred_pos) {
      ++c.fp;
    } else if (true_pos) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

struct TaskMetrics {
  TaskId task = TaskId::DegIn;
  std::vector<double> per_seed_f1;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;  // population standard deviation over seeds

  void finalize() {
    if (per_seed_f1.empty()) {
      mean_f1 = std_f1 = 0.0;
      return;
    }
    double sum = 0.0;
    for (const double x : per_seed_f1) sum += x;
    mean_f1 = sum / static_cast<double>(per_seed_f1.size());
    double var = 0.0;
    for (const double x : per_seed_f1) var += (x - mean_f1) * (x - mean_f1);
    std_f1 = std::sqrt(var / static_cast<double>(per_seed_f1.size()));
  }
};

struct MetricsReport {
  std::string variant;  // row label, e.g. "baseline" or "+reverse_mp"
  std::vector<TaskMetrics> per_task;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<double>> loss_curves;  // per seed, per epoch
  double runtime_seconds = 0.0;
  std::uint64_t config_hash = 0;  // hash of the resolved experiment config
  std::vector<std::string> notes;  // divergence reports and similar events
};

inline void to_json(nlohmann::json& j, const TaskMetrics& t) {
  j = nlohmann::json{{"task", kTaskNames[static_cast<std::size_t>(t.task)]},
                     {"per_seed_f1", t.per_seed_f1},
                     {"mean_f1", t.mean_f1},
                     {"std_f1", t.std_f1}};
}

inline void from_json(const nlohmann::json& j, TaskMetrics& t) {
  const auto name = j.at("task").get<std::string>();
  bool found = false;
  for (int i = 0; i < kNumTasks; ++i) {
    if (name == kTaskNames[static_cast<std::size_t>(i)]) {
      t.task = static_cast<TaskId>(i);
      found = true;
      break;
    }
  }
  if (!found) throw std::invalid_argument("TaskMetrics: unknown task " + name);
  j.at("per_seed_f1").get_to(t.per_seed_f1);
  j.at("mean_f1").get_to(t.mean_f1);
  j.at("std_f1").get_to(t.std_f1);
}

inline void to_json(nlohmann::json& j, const MetricsReport& r) {
  j = nlohmann::json{{"variant", r.variant},
                     {"per_task", r.per_task},
                     {"seeds", r.seeds},
                     {"loss_curves", r.loss_curves},
                     {"runtime_seconds", r.runtime_seconds},
                     {"config_hash", r.config_hash},
                     {"notes", r.notes}};
}

inline void from_json(const nlohmann::json& j, MetricsReport& r) {
  j.at("variant").get_to(r.variant);
  j.at("per_task").get_to(r.per_task);
  j.at("seeds").get_to(r.seeds);
  j.at("loss_curves").get_to(r.loss_curves);
  j.at("runtime_seconds").get_to(r.runtime_seconds);
  j.at("config_hash").get_to(r.config_hash);
  j.at("notes").get_to(r.notes);
}

// CSV: one row per report, columns in TaskId order, mean F1 with 4 decimals;
// tasks a report did not run are left empty. JSON: lossless per-seed detail.
inline std::string metrics_to_csv(const std::vector<MetricsReport>& reports) {
  std::string out = "variant";
  for (const char* name : kTaskNames) {
    out += ',';
    out += name;
  }
  out += '\n';
  char buf[32];
  for (const MetricsReport& r : reports) {
    out += r.variant;
    for (int t = 0; t < kNumTasks; ++t) {
      out += ',';
      for (const TaskMetrics& tm : r.per_task) {
        if (tm.task == static_cast<TaskId>(t)) {
          std::snprintf(buf, sizeof buf, "%.4f", tm.mean_f1);
          out += buf;
          break;
        }
      }
    }
    out += '\n';
  }
  return out;
}

inline void export_metrics(const std::vector<MetricsReport>& reports,
                           const std::string& path,
                           const std::string& format) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("export_metrics: cannot write " + path);
  if (format == "csv") {
    f << metrics_to_csv(reports);
  } else if (format == "json") {
    f << nlohmann::json(reports).dump(2) << '\n';
  } else {
    throw std::invalid_argument("export_metrics: format must be csv|json");
  }
}

}  // namespace multignn
