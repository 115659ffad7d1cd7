// Ablation runner: trains one model per cumulative prefix of an adaptation
// sequence (baseline, +first, +first+second, ...) with everything else held
// fixed, and returns one report row per variant. The canonical sequence is
// {reverse_mp, ports, ego_ids}.
#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "multignn/harness/experiment.hpp"
#include "multignn/harness/metrics.hpp"
#include "multignn/harness/train.hpp"

namespace multignn {

inline constexpr const char* kAdaptationNames[] = {"reverse_mp", "ports",
                                                   "ego_ids"};

inline std::vector<MetricsReport> run_ablation(
    const ExperimentConfig& base, const std::vector<std::string>& sequence,
    std::ostream* progress = nullptr,
    std::vector<TrainOutput>* outputs = nullptr) {
  for (const std::string& a : sequence) {
    if (a != "reverse_mp" && a != "ports" && a != "ego_ids") {
      throw std::invalid_argument("run_ablation: unknown adaptation " + a);
    }
  }

  ExperimentConfig cfg = base;
  cfg.model.reverse_mp = false;
  cfg.model.ports = false;
  cfg.model.ego_ids = false;

  std::vector<MetricsReport> rows;
  std::string label = "baseline";
  for (std::size_t step = 0; step <= sequence.size(); ++step) {
    if (step > 0) {
      const std::string& a = sequence[step - 1];
      if (a == "reverse_mp") cfg.model.reverse_mp = true;
      if (a == "ports") cfg.model.ports = true;
      if (a == "ego_ids") cfg.model.ego_ids = true;
      label += "+" + a;
    }
    if (progress) *progress << "ablation variant: " << label << "\n";
    TrainOutput out = train(cfg, progress);
    out.report.variant = label;
    rows.push_back(out.report);
    if (outputs) outputs->push_back(std::move(out));
  }
  return rows;
}

}  // namespace multignn
