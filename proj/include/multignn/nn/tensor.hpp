// Minimal reverse-mode differentiation engine on dense row-major double
// matrices. A Tape owns the forward values and gradients of every
// intermediate node; trainable Parameters live outside the tape and receive
// accumulated gradients through leaf nodes. Every op records a closure that
// propagates gradients to its arguments; backward() replays them in reverse
// creation order.
//
// Determinism: all reductions run in fixed (row-index) order. The max
// aggregation routes its subgradient to the lowest contributing row on ties.
// The tape also tracks how close the forward pass came to the two
// non-smooth kinks (ReLU at zero, max with a near-tie): finite-difference
// checks are only valid on instances with a sufficient margin.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace multignn::nn {

using Mat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Parameter {
  std::string path;  // stable identifier used by checkpoints and reports
  Mat value;
  Mat grad;

  Parameter(std::string p, Eigen::Index rows, Eigen::Index cols)
      : path(std::move(p)), value(Mat::Zero(rows, cols)),
        grad(Mat::Zero(rows, cols)) {}

  Parameter(const Parameter&) = delete;
  Parameter& operator=(const Parameter&) = delete;
  Parameter(Parameter&&) = default;
  Parameter& operator=(Parameter&&) = default;

  void zero_grad() { grad.setZero(); }
};

class Tape {
 public:
  // ---- leaves ----
  int input(Mat v) {
    nodes_.push_back(Node{std::move(v), {}, nullptr});
    return last();
  }

  int param(Parameter& p) {
    const int id = input(p.value);
    Parameter* pp = &p;
    nodes_[static_cast<std::size_t>(id)].back = [pp](Tape& t, int self) {
      pp->grad += t.grad(self);
    };
    return id;
  }

  // ---- accessors ----
  const Mat& value(int id) const { return node(id).value; }
  const Mat& grad(int id) const { return node(id).grad; }

  // ---- ops ----
  int matmul(int a, int b) {
    if (value(a).cols() != value(b).rows()) {
      throw std::invalid_argument("matmul: inner dimensions disagree");
    }
    const int id = input(value(a) * value(b));
    nodes_.back().back = [a, b](Tape& t, int self) {
      const Mat& g = t.grad(self);
      t.mutable_grad(a) += g * t.value(b).transpose();
      t.mutable_grad(b) += t.value(a).transpose() * g;
    };
    return id;
  }

  int add(int a, int b) {
    if (value(a).rows() != value(b).rows() ||
        value(a).cols() != value(b).cols()) {
      throw std::invalid_argument("add: shapes disagree");
    }
    const int id = input(value(a) + value(b));
    nodes_.back().back = [a, b](Tape& t, int self) {
      t.mutable_grad(a) += t.grad(self);
      t.mutable_grad(b) += t.grad(self);
    };
    return id;
  }

  // a: (r x c), bias: (1 x c), broadcast over rows.
  int add_rowvec(int a, int bias) {
    if (value(bias).rows() != 1 || value(bias).cols() != value(a).cols()) {
      throw std::invalid_argument("add_rowvec: bias must be (1 x cols(a))");
    }
    Mat out = value(a);
    out.rowwise() += value(bias).row(0);
    const int id = input(std::move(out));
    nodes_.back().back = [a, bias](Tape& t, int self) {
      t.mutable_grad(a) += t.grad(self);
      t.mutable_grad(bias) += t.grad(self).colwise().sum();
    };
    return id;
  }

  int relu(int a) {
    const Mat& x = value(a);
    if (track_kinks_) {
      if (x.size() > 0) {
        relu_margin_ = std::min(relu_margin_, x.array().abs().minCoeff());
      }
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        absorb_kink_bit(x.data()[i] > 0.0);
      }
    }
    const int id = input(x.cwiseMax(0.0));
    nodes_.back().back = [a](Tape& t, int self) {
      t.mutable_grad(a).array() +=
          t.grad(self).array() * (t.value(a).array() > 0.0).cast<double>();
    };
    return id;
  }

  int concat_cols(const std::vector<int>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: empty");
    const Eigen::Index rows = value(parts[0]).rows();
    Eigen::Index cols = 0;
    for (int p : parts) {
      if (value(p).rows() != rows) {
        throw std::invalid_argument("concat_cols: row counts disagree");
      }
      cols += value(p).cols();
    }
    Mat out(rows, cols);
    Eigen::Index off = 0;
    for (int p : parts) {
      out.middleCols(off, value(p).cols()) = value(p);
      off += value(p).cols();
    }
    const int id = input(std::move(out));
    std::vector<int> ps = parts;
    nodes_.back().back = [ps](Tape& t, int self) {
      Eigen::Index off2 = 0;
      for (int p : ps) {
        const Eigen::Index w = t.value(p).cols();
        t.mutable_grad(p) += t.grad(self).middleCols(off2, w);
        off2 += w;
      }
    };
    return id;
  }

  int gather_rows(int a, std::vector<std::uint32_t> rows) {
    const Mat& x = value(a);
    Mat out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<Eigen::Index>(rows[i]) >= x.rows()) {
        throw std::invalid_argument("gather_rows: row index out of range");
      }
      out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    }
    const int id = input(std::move(out));
    nodes_.back().back = [a, rows = std::move(rows)](Tape& t, int self) {
      Mat& g = t.mutable_grad(a);
      const Mat& go = t.grad(self);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        g.row(rows[i]) += go.row(static_cast<Eigen::Index>(i));
      }
    };
    return id;
  }

  // Sums row i of `a` into output row seg[i]; empty segments stay zero.
  int segment_sum(int a, std::vector<std::uint32_t> seg, int num_segments) {
    const Mat& x = value(a);
    check_segments(x, seg, num_segments, "segment_sum");
    Mat out = Mat::Zero(num_segments, x.cols());
    for (std::size_t i = 0; i < seg.size(); ++i) {
      out.row(seg[i]) += x.row(static_cast<Eigen::Index>(i));
    }
    const int id = input(std::move(out));
    nodes_.back().back = [a, seg = std::move(seg)](Tape& t, int self) {
      Mat& g = t.mutable_grad(a);
      const Mat& go = t.grad(self);
      for (std::size_t i = 0; i < seg.size(); ++i) {
        g.row(static_cast<Eigen::Index>(i)) += go.row(seg[i]);
      }
    };
    return id;
  }

  // Per-column maximum over each segment's rows; empty segments yield zero
  // (keeps gradients finite). Gradient flows only to the argmax row; on exact
  // ties the lowest row index wins (strict `>` comparison in row order).
  int segment_max(int a, std::vector<std::uint32_t> seg, int num_segments) {
    const Mat& x = value(a);
    check_segments(x, seg, num_segments, "segment_max");
    const Eigen::Index cols = x.cols();
    Mat best = Mat::Constant(num_segments, cols,
                             -std::numeric_limits<double>::infinity());
    Mat second = best;
    std::vector<std::int64_t> arg(
        static_cast<std::size_t>(num_segments * cols), -1);
    for (std::size_t i = 0; i < seg.size(); ++i) {
      const auto s = seg[i];
      for (Eigen::Index j = 0; j < cols; ++j) {
        const double v = x(static_cast<Eigen::Index>(i), j);
        if (v > best(s, j)) {
          second(s, j) = best(s, j);
          best(s, j) = v;
          arg[static_cast<std::size_t>(s) * cols + static_cast<std::size_t>(j)] =
              static_cast<std::int64_t>(i);
        } else if (v > second(s, j)) {
          second(s, j) = v;
        }
      }
    }
    Mat out = Mat::Zero(num_segments, cols);
    for (int s = 0; s < num_segments; ++s) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        const std::int64_t am =
            arg[static_cast<std::size_t>(s) * cols + static_cast<std::size_t>(j)];
        if (track_kinks_) {
          absorb_kink_word(static_cast<std::uint64_t>(am + 1));
        }
        if (am >= 0) {
          out(s, j) = best(s, j);
          if (track_kinks_ && std::isfinite(second(s, j))) {
            max_gap_ = std::min(max_gap_, best(s, j) - second(s, j));
          }
        }
      }
    }
    const int id = input(std::move(out));
    nodes_.back().back = [a, arg = std::move(arg), cols](Tape& t, int self) {
      Mat& g = t.mutable_grad(a);
      const Mat& go = t.grad(self);
      for (Eigen::Index s = 0; s < go.rows(); ++s) {
        for (Eigen::Index j = 0; j < cols; ++j) {
          const std::int64_t i =
              arg[static_cast<std::size_t>(s) * cols + static_cast<std::size_t>(j)];
          if (i >= 0) g(static_cast<Eigen::Index>(i), j) += go(s, j);
        }
      }
    };
    return id;
  }

  // Mean over all elements of
  //   w * y * softplus(-z) + (1 - y) * softplus(z)
  // with stable softplus; reduces to standard binary cross-entropy at w = 1.
  // Returns a 1x1 node. Non-finite logits or targets are rejected.
  int weighted_bce(int logits, const Mat& targets, double weight) {
    const Mat& z = value(logits);
    if (z.rows() != targets.rows() || z.cols() != targets.cols()) {
      throw std::invalid_argument("weighted_bce: shapes disagree");
    }
    if (!z.allFinite() || !targets.allFinite()) {
      throw std::invalid_argument("weighted_bce: non-finite input");
    }
    if (!(weight > 0)) {
      throw std::invalid_argument("weighted_bce: weight must be positive");
    }
    const double count = static_cast<double>(z.size());
    auto softplus = [](double x) {
      return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
    };
    double total = 0.0;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      for (Eigen::Index j = 0; j < z.cols(); ++j) {
        const double y = targets(i, j);
        total += weight * y * softplus(-z(i, j)) +
                 (1.0 - y) * softplus(z(i, j));
      }
    }
    Mat out(1, 1);
    out(0, 0) = total / count;
    const int id = input(std::move(out));
    Mat y = targets;
    nodes_.back().back = [logits, y = std::move(y), weight,
                          count](Tape& t, int self) {
      const double gscale = t.grad(self)(0, 0) / count;
      const Mat& z2 = t.value(logits);
      Mat& g = t.mutable_grad(logits);
      auto sigmoid = [](double x) {
        return x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                      : std::exp(x) / (1.0 + std::exp(x));
      };
      for (Eigen::Index i = 0; i < z2.rows(); ++i) {
        for (Eigen::Index j = 0; j < z2.cols(); ++j) {
          const double s = sigmoid(z2(i, j));
          g(i, j) += gscale * (weight * y(i, j) * (s - 1.0) +
                               (1.0 - y(i, j)) * s);
        }
      }
    };
    return id;
  }

  // Seeds d(loss)/d(loss) = 1 and replays all recorded closures in reverse.
  // Parameter gradients accumulate until Parameter::zero_grad().
  void backward(int loss) {
    if (value(loss).rows() != 1 || value(loss).cols() != 1) {
      throw std::invalid_argument("backward: loss must be scalar (1x1)");
    }
    for (Node& nd : nodes_) {
      nd.grad = Mat::Zero(nd.value.rows(), nd.value.cols());
    }
    node_mut(loss).grad(0, 0) = 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
      if (it->back) {
        const int self = static_cast<int>(std::distance(it, nodes_.rend())) - 1;
        it->back(*this, self);
      }
    }
  }

  // Smallest |pre-activation| any ReLU saw and smallest top-two gap any max
  // aggregation saw during the forward pass. Finite-difference gradient
  // checks with step eps are only trustworthy when these exceed eps by a
  // comfortable factor.
  double min_relu_margin() const { return relu_margin_; }
  double min_max_gap() const { return max_gap_; }

  // Hash of every discrete decision the forward pass made (ReLU sign
  // patterns, max-aggregation argmax rows). Two forward passes with equal
  // signatures evaluated the same piecewise-linear region, so a central
  // difference between them measures a true derivative.
  std::uint64_t kink_signature() const { return kink_sig_; }

  // Kink bookkeeping costs a per-element pass in relu/segment_max and is only
  // consumed by finite-difference checks; training loops switch it off.
  void set_kink_tracking(bool on) { track_kinks_ = on; }

 private:
  struct Node {
    Mat value;
    Mat grad;
    std::function<void(Tape&, int)> back;
  };

  const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  Node& node_mut(int id) { return nodes_.at(static_cast<std::size_t>(id)); }
  Mat& mutable_grad(int id) { return node_mut(id).grad; }
  int last() const { return static_cast<int>(nodes_.size()) - 1; }

  void absorb_kink_bit(bool b) {
    absorb_kink_word(b ? 0x9E3779B97F4A7C15ULL : 0xD1B54A32D192ED03ULL);
  }

  void absorb_kink_word(std::uint64_t w) {
    std::uint64_t z = kink_sig_ + 0x9E3779B97F4A7C15ULL + w;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    kink_sig_ = z ^ (z >> 31);
  }

  static void check_segments(const Mat& x,
                             const std::vector<std::uint32_t>& seg,
                             int num_segments, const char* who) {
    if (num_segments < 0) {
      throw std::invalid_argument(std::string(who) + ": negative segments");
    }
    if (static_cast<Eigen::Index>(seg.size()) != x.rows()) {
      throw std::invalid_argument(std::string(who) +
                                  ": one segment id per row required");
    }
    for (auto s : seg) {
      if (s >= static_cast<std::uint32_t>(num_segments)) {
        throw std::invalid_argument(std::string(who) +
                                    ": segment id out of range");
      }
    }
  }

  std::vector<Node> nodes_;
  double relu_margin_ = std::numeric_limits<double>::infinity();
  double max_gap_ = std::numeric_limits<double>::infinity();
  std::uint64_t kink_sig_ = 0;
  bool track_kinks_ = true;
};

}  // namespace multignn::nn
