// Multi-layer perceptron: dense layers with ReLU between them and no final
// activation. Weights use Glorot-uniform initialization from the caller's
// RNG; a null RNG leaves everything zero (useful for hand-set constructions).
#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "multignn/nn/tensor.hpp"
#include "multignn/rng.hpp"

namespace multignn::nn {

class Mlp {
 public:
  // dims = {input, hidden..., output}; at least {input, output}.
  Mlp(const std::string& prefix, const std::vector<int>& dims, Rng* init_rng) {
    if (dims.size() < 2) {
      throw std::invalid_argument("Mlp: need at least input and output dims");
    }
    const std::size_t layers = dims.size() - 1;
    weights_.reserve(layers);
    biases_.reserve(layers);
    for (std::size_t l = 0; l < layers; ++l) {
      const int in = dims[l];
      const int out = dims[l + 1];
      if (in < 1 || out < 1) {
        throw std::invalid_argument("Mlp: dimensions must be positive");
      }
      weights_.emplace_back(prefix + "/w" + std::to_string(l), in, out);
      biases_.emplace_back(prefix + "/b" + std::to_string(l), 1, out);
      if (init_rng != nullptr) {
        const double limit = std::sqrt(6.0 / (in + out));
        Mat& w = weights_.back().value;
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
          for (Eigen::Index j = 0; j < w.cols(); ++j) {
            w(i, j) = init_rng->uniform(-limit, limit);
          }
        }
      }
    }
  }

  Mlp(const Mlp&) = delete;
  Mlp& operator=(const Mlp&) = delete;

  int input_dim() const { return static_cast<int>(weights_.front().value.rows()); }
  int output_dim() const { return static_cast<int>(weights_.back().value.cols()); }
  std::size_t num_layers() const { return weights_.size(); }

  Parameter& weight(std::size_t l) { return weights_.at(l); }
  Parameter& bias(std::size_t l) { return biases_.at(l); }

  int forward(Tape& tape, int x) {
    int h = x;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      h = tape.matmul(h, tape.param(weights_[l]));
      h = tape.add_rowvec(h, tape.param(biases_[l]));
      if (l + 1 < weights_.size()) h = tape.relu(h);
    }
    return h;
  }

  void collect(std::vector<Parameter*>& out) {
    for (auto& w : weights_) out.push_back(&w);
    for (auto& b : biases_) out.push_back(&b);
  }

 private:
  std::vector<Parameter> weights_;
  std::vector<Parameter> biases_;
};

}  // namespace multignn::nn
