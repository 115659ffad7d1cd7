// Finite-difference validation of the reverse-mode gradients. Every checked
// parameter entry is perturbed by +/- eps and the central difference is
// compared against the analytic gradient with relative error
//   |analytic - numeric| / max(|analytic|, |numeric|, 1).
//
// ReLU and max aggregation are piecewise linear: a central difference whose
// two evaluation points straddle a kink measures a chord, not a derivative,
// and disagrees with any one-sided analytic subgradient. Each forward pass
// therefore reports a kink signature (hash of all ReLU sign patterns and
// argmax choices); entries whose +eps / -eps / unperturbed passes do not
// agree on the signature are skipped and counted instead of failed. The
// report rejects instances where the skipped share grows too large.
#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "multignn/nn/model.hpp"
#include "multignn/nn/tensor.hpp"
#include "multignn/rng.hpp"

namespace multignn::nn {

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::string worst_path;        // parameter path of the worst entry
  std::size_t checked = 0;       // entries compared against the analytic grad
  std::size_t skipped = 0;       // entries straddling a kink at step eps
  std::size_t total = 0;         // parameter entries overall

  bool ok(double tol, double max_skip_fraction = 0.2) const {
    const std::size_t sampled = checked + skipped;
    return sampled > 0 && max_rel_err < tol &&
           static_cast<double>(skipped) <
               max_skip_fraction * static_cast<double>(sampled);
  }
};

// `eval` runs a fresh forward pass with the parameters' *current* values and
// returns {loss, kink signature}. Analytic gradients must already be stored
// in each Parameter::grad (zero_grad + backward on the same loss). At most
// `max_entries` entries are checked; above that a strided subsample is used,
// randomized per stride block when `rng` is given.
template <typename EvalFn>
GradCheckReport grad_check(const std::vector<Parameter*>& params,
                           EvalFn&& eval, double eps = 1e-3,
                           std::size_t max_entries = 10000,
                           Rng* rng = nullptr) {
  if (!(eps > 0)) throw std::invalid_argument("grad_check: eps must be > 0");
  GradCheckReport rep;
  for (const Parameter* p : params) {
    rep.total += static_cast<std::size_t>(p->value.size());
  }
  const std::size_t stride =
      rep.total > max_entries ? (rep.total + max_entries - 1) / max_entries : 1;

  const std::uint64_t base_sig = eval().second;
  std::size_t global = 0;
  std::uint64_t pick = rng && stride > 1 ? rng->below(stride) : 0;
  for (Parameter* p : params) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i, ++global) {
      if (stride > 1) {
        if (global % stride != pick) continue;
        pick = rng ? rng->below(stride) : 0;  // next block's offset
      }
      double* slot = p->value.data() + i;
      const double saved = *slot;
      *slot = saved + eps;
      const auto [lp, sp] = eval();
      *slot = saved - eps;
      const auto [lm, sm] = eval();
      *slot = saved;
      if (sp != base_sig || sm != base_sig) {
        ++rep.skipped;
        continue;
      }
      const double numeric = (lp - lm) / (2.0 * eps);
      const double analytic = p->grad.data()[i];
      const double rel = std::abs(analytic - numeric) /
                         std::max({std::abs(analytic), std::abs(numeric), 1.0});
      ++rep.checked;
      if (rel > rep.max_rel_err) {
        rep.max_rel_err = rel;
        rep.worst_path = p->path + "[" + std::to_string(i) + "]";
      }
    }
  }
  return rep;
}

// Convenience: checks a model end to end through the node readout and the
// weighted binary cross-entropy loss on the given target matrix.
inline GradCheckReport grad_check_model(GnnModel& model, const GraphBatch& b,
                                        const std::vector<std::uint32_t>& rows,
                                        const Mat& targets, double eps = 1e-3,
                                        std::size_t max_entries = 10000,
                                        Rng* rng = nullptr) {
  auto params = model.parameters();
  auto eval = [&]() -> std::pair<double, std::uint64_t> {
    Tape tape;
    const int states = model.node_states(tape, b);
    const int logits = model.node_logits(tape, states, rows);
    const int loss = tape.weighted_bce(logits, targets,
                                       model.config().minority_class_weight);
    return {tape.value(loss)(0, 0), tape.kink_signature()};
  };
  for (Parameter* p : params) p->zero_grad();
  {
    Tape tape;
    const int states = model.node_states(tape, b);
    const int logits = model.node_logits(tape, states, rows);
    const int loss = tape.weighted_bce(logits, targets,
                                       model.config().minority_class_weight);
    tape.backward(loss);
  }
  return grad_check(params, eval, eps, max_entries, rng);
}

}  // namespace multignn::nn
