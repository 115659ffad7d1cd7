// Adam optimizer over externally owned Parameters, with the standard
// bias-corrected first/second moment estimates. Update order follows the
// parameter registration order, so steps are deterministic.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "multignn/nn/tensor.hpp"

namespace multignn::nn {

// Throws naming the offending parameter; call after backward when a step may
// have produced non-finite gradients.
inline void check_finite_gradients(const std::vector<Parameter*>& params) {
  for (const Parameter* p : params) {
    if (!p->grad.allFinite()) {
      throw std::runtime_error("non-finite gradient in parameter " + p->path);
    }
  }
}

class Adam {
 public:
  explicit Adam(std::vector<Parameter*> params, double lr = 1e-3,
                double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2),
        eps_(eps) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (Parameter* p : params_) {
      m_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
    }
  }

  void zero_grad() {
    for (Parameter* p : params_) p->zero_grad();
  }

  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      Parameter& p = *params_[i];
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
      v_[i] = beta2_ * v_[i].array().matrix() +
              (1.0 - beta2_) * p.grad.array().square().matrix();
      const auto m_hat = m_[i].array() / bc1;
      const auto v_hat = v_[i].array() / bc2;
      p.value.array() -= lr_ * m_hat / (v_hat.sqrt() + eps_);
    }
  }

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }

 private:
  std::vector<Parameter*> params_;
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Mat> m_, v_;
};

}  // namespace multignn::nn
