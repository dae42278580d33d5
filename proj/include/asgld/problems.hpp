// Copyright 2026 The asgld Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ASGLD_PROBLEMS_HPP
#define ASGLD_PROBLEMS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "asgld/core.hpp"
#include "asgld/dataset.hpp"

namespace asgld {

/**
 * Identifies one minibatch. Dataset-backed problems read `indices`; the
 * stochastic landscape wrapper keys its gradient noise on `ticket`.
 */
struct BatchRef {
  std::vector<std::size_t> indices;
  std::uint64_t ticket = 0;

  static BatchRef of_ticket(std::uint64_t t) { return {{}, t}; }
  static BatchRef of_indices(std::vector<std::size_t> idx) { return {std::move(idx), 0}; }
};

enum class Partition { train, test };

/**
 * Loss/gradient oracle. Implementations are immutable after construction,
 * so one instance may be evaluated from several threads.
 */
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::size_t dim() const = 0;
  virtual double loss(const ParamVector& theta, const BatchRef& batch) const = 0;
  virtual ParamVector grad(const ParamVector& theta, const BatchRef& batch) const = 0;
  // Deterministic objective: exact value for landscapes, mean training loss
  // for dataset problems.
  virtual double full_eval(const ParamVector& theta) const = 0;
  virtual ParamVector initial_point(std::uint64_t seed) const = 0;

  virtual const Dataset* dataset() const { return nullptr; }
  // Predicted class for a dataset row. Argmax ties go to the lowest index.
  virtual std::size_t predict(const ParamVector&, std::size_t) const {
    throw std::invalid_argument("no dataset");
  }

 protected:
  void check_dim(const ParamVector& theta) const {
    if (theta.dim() != dim())
      throw DimensionError("problem expects dim " + std::to_string(dim()) + ", got " + std::to_string(theta.dim()));
  }
};

using ProblemPtr = std::shared_ptr<const Problem>;

// ---------------------------------------------------------------------------
// Analytic landscapes

/// f(x) = 1/2 x^T D x with D diagonal, log-spaced from 1 to `condition`.
class QuadraticProblem final : public Problem {
 public:
  QuadraticProblem(std::size_t d, double condition) {
    if (d < 1) throw std::invalid_argument("quadratic_problem: d must be >= 1");
    if (!(condition >= 1.0) || !std::isfinite(condition))
      throw std::invalid_argument("quadratic_problem: condition must be >= 1");
    diag_.resize(d);
    for (std::size_t i = 0; i < d; ++i)
      diag_[i] = d == 1 ? 1.0 : std::pow(condition, static_cast<double>(i) / static_cast<double>(d - 1));
  }

  const std::vector<double>& curvatures() const { return diag_; }

  std::size_t dim() const override { return diag_.size(); }

  double loss(const ParamVector& theta, const BatchRef&) const override { return full_eval(theta); }

  ParamVector grad(const ParamVector& theta, const BatchRef&) const override {
    check_dim(theta);
    std::vector<double> g(dim());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = diag_[i] * theta[i];
    return ParamVector(std::move(g));
  }

  double full_eval(const ParamVector& theta) const override {
    check_dim(theta);
    double f = 0.0;
    for (std::size_t i = 0; i < diag_.size(); ++i) f += 0.5 * diag_[i] * theta[i] * theta[i];
    return f;
  }

  ParamVector initial_point(std::uint64_t) const override { return ParamVector(dim(), 1.0); }

 private:
  std::vector<double> diag_;
};

/// (1 - x)^2 + 100 (y - x^2)^2, minimum 0 at (1, 1).
class RosenbrockProblem final : public Problem {
 public:
  std::size_t dim() const override { return 2; }

  double loss(const ParamVector& theta, const BatchRef&) const override { return full_eval(theta); }

  ParamVector grad(const ParamVector& theta, const BatchRef&) const override {
    check_dim(theta);
    const double x = theta[0], y = theta[1];
    return ParamVector{-2.0 * (1.0 - x) - 400.0 * x * (y - x * x), 200.0 * (y - x * x)};
  }

  double full_eval(const ParamVector& theta) const override {
    check_dim(theta);
    const double x = theta[0], y = theta[1];
    return (1.0 - x) * (1.0 - x) + 100.0 * (y - x * x) * (y - x * x);
  }

  ParamVector initial_point(std::uint64_t) const override { return ParamVector{-1.2, 1.0}; }
};

/// 1/2 (x^2 - y^2) + 1/4 y^4: strict saddle at the origin, minima -1/4 at (0, +-1).
class SaddleProblem final : public Problem {
 public:
  std::size_t dim() const override { return 2; }

  double loss(const ParamVector& theta, const BatchRef&) const override { return full_eval(theta); }

  ParamVector grad(const ParamVector& theta, const BatchRef&) const override {
    check_dim(theta);
    const double x = theta[0], y = theta[1];
    return ParamVector{x, -y + y * y * y};
  }

  double full_eval(const ParamVector& theta) const override {
    check_dim(theta);
    const double x = theta[0], y = theta[1];
    return 0.5 * (x * x - y * y) + 0.25 * y * y * y * y;
  }

  ParamVector initial_point(std::uint64_t) const override { return ParamVector{0.1, 0.0}; }
};

/**
 * Adds seeded gradient noise to a base problem. For ticket k the minibatch
 * loss is f(theta) + zeta_k . theta with zeta_k ~ N(0, sigma_g^2 I) derived
 * from (seed, k), so the gradient is grad f + zeta_k, repeated tickets give
 * identical results, and finite differences of loss still match grad.
 * full_eval is the noise-free objective.
 */
class StochasticGradientProblem final : public Problem {
 public:
  StochasticGradientProblem(ProblemPtr base, double sigma_g, const GaussianStream& stream)
      : base_(std::move(base)), sigma_g_(sigma_g), seed_(stream.seed()) {
    if (!base_) throw std::invalid_argument("stochastic_wrapper: null base problem");
    if (!(sigma_g >= 0.0) || !std::isfinite(sigma_g))
      throw std::invalid_argument("stochastic_wrapper: sigma_g must be >= 0");
  }

  double sigma_g() const { return sigma_g_; }

  std::size_t dim() const override { return base_->dim(); }

  double loss(const ParamVector& theta, const BatchRef& batch) const override {
    double f = base_->loss(theta, batch);
    if (sigma_g_ == 0.0) return f;
    const ParamVector z = noise(batch.ticket);
    for (std::size_t i = 0; i < z.dim(); ++i) f += z[i] * theta[i];
    return f;
  }

  ParamVector grad(const ParamVector& theta, const BatchRef& batch) const override {
    ParamVector g = base_->grad(theta, batch);
    if (sigma_g_ == 0.0) return g;
    return g + noise(batch.ticket);
  }

  double full_eval(const ParamVector& theta) const override { return base_->full_eval(theta); }
  ParamVector initial_point(std::uint64_t seed) const override { return base_->initial_point(seed); }
  const Dataset* dataset() const override { return base_->dataset(); }
  std::size_t predict(const ParamVector& theta, std::size_t row) const override { return base_->predict(theta, row); }

 private:
  ParamVector noise(std::uint64_t ticket) const {
    GaussianStream s(mix_seed(seed_, ticket));
    std::vector<double> z(dim());
    for (double& v : z) v = sigma_g_ * s.standard_normal();
    return ParamVector(std::move(z));
  }

  ProblemPtr base_;
  double sigma_g_;
  std::uint64_t seed_;
};

/// Scales one gradient coordinate. Only meant as a negative control for gradient checks.
class ScaledGradientProblem final : public Problem {
 public:
  ScaledGradientProblem(ProblemPtr base, std::size_t coord, double factor)
      : base_(std::move(base)), coord_(coord), factor_(factor) {}

  std::size_t dim() const override { return base_->dim(); }
  double loss(const ParamVector& theta, const BatchRef& b) const override { return base_->loss(theta, b); }
  ParamVector grad(const ParamVector& theta, const BatchRef& b) const override {
    ParamVector g = base_->grad(theta, b);
    g.set(coord_, g[coord_] * factor_);
    return g;
  }
  double full_eval(const ParamVector& theta) const override { return base_->full_eval(theta); }
  ParamVector initial_point(std::uint64_t seed) const override { return base_->initial_point(seed); }
  const Dataset* dataset() const override { return base_->dataset(); }
  std::size_t predict(const ParamVector& theta, std::size_t row) const override { return base_->predict(theta, row); }

 private:
  ProblemPtr base_;
  std::size_t coord_;
  double factor_;
};

inline ProblemPtr quadratic_problem(std::size_t d, double condition) {
  return std::make_shared<QuadraticProblem>(d, condition);
}
inline ProblemPtr rosenbrock_problem() { return std::make_shared<RosenbrockProblem>(); }
inline ProblemPtr saddle_problem() { return std::make_shared<SaddleProblem>(); }
inline ProblemPtr stochastic_wrapper(ProblemPtr p, double sigma_g, const GaussianStream& stream) {
  return std::make_shared<StochasticGradientProblem>(std::move(p), sigma_g, stream);
}

// ---------------------------------------------------------------------------
// Dataset-backed models

/// Shared plumbing for classifiers trained on a Dataset.
class DatasetProblem : public Problem {
 public:
  explicit DatasetProblem(std::shared_ptr<const Dataset> ds) : ds_(std::move(ds)) {
    if (!ds_) throw std::invalid_argument("null dataset");
    ds_->validate();
  }

  const Dataset* dataset() const override { return ds_.get(); }

  double full_eval(const ParamVector& theta) const override { return loss(theta, BatchRef::of_indices(ds_->train)); }

 protected:
  void check_batch(const BatchRef& batch) const {
    if (batch.indices.empty()) throw std::invalid_argument("empty batch");
    for (std::size_t i : batch.indices)
      if (i >= ds_->n) throw std::out_of_range("batch index out of range");
  }

  std::shared_ptr<const Dataset> ds_;
};

/**
 * Binary logistic regression. Layout: p weights followed by one bias.
 * Loss is the mean binary cross-entropy over the batch plus l2/2 * |w|^2
 * (bias not penalised).
 */
class LogisticProblem final : public DatasetProblem {
 public:
  LogisticProblem(std::shared_ptr<const Dataset> ds, double l2) : DatasetProblem(std::move(ds)), l2_(l2) {
    if (ds_->num_classes != 2) throw std::invalid_argument("logistic_problem: requires exactly 2 classes");
    if (!(l2 >= 0.0)) throw std::invalid_argument("logistic_problem: l2 must be >= 0");
  }

  std::size_t dim() const override { return ds_->p + 1; }

  double loss(const ParamVector& theta, const BatchRef& batch) const override {
    check_dim(theta);
    check_batch(batch);
    double total = 0.0;
    for (std::size_t i : batch.indices) {
      const double z = logit(theta, i);
      // log(1 + e^z) - y z, computed without overflow
      total += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - ds_->labels[i] * z;
    }
    return total / static_cast<double>(batch.indices.size()) + 0.5 * l2_ * weight_norm2(theta);
  }

  ParamVector grad(const ParamVector& theta, const BatchRef& batch) const override {
    check_dim(theta);
    check_batch(batch);
    const std::size_t p = ds_->p;
    std::vector<double> g(p + 1, 0.0);
    for (std::size_t i : batch.indices) {
      const double r = sigmoid(logit(theta, i)) - ds_->labels[i];
      const auto x = ds_->row(i);
      for (std::size_t j = 0; j < p; ++j) g[j] += r * x[j];
      g[p] += r;
    }
    const double inv = 1.0 / static_cast<double>(batch.indices.size());
    for (std::size_t j = 0; j <= p; ++j) g[j] = g[j] * inv + (j < p ? l2_ * theta[j] : 0.0);
    return ParamVector(std::move(g));
  }

  ParamVector initial_point(std::uint64_t) const override { return ParamVector::zeros(dim()); }

  std::size_t predict(const ParamVector& theta, std::size_t row) const override {
    return logit(theta, row) > 0.0 ? 1 : 0;
  }

 private:
  static double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
  }

  double logit(const ParamVector& theta, std::size_t i) const {
    const auto x = ds_->row(i);
    double z = theta[ds_->p];
    for (std::size_t j = 0; j < ds_->p; ++j) z += theta[j] * x[j];
    return z;
  }

  double weight_norm2(const ParamVector& theta) const {
    double s = 0.0;
    for (std::size_t j = 0; j < ds_->p; ++j) s += theta[j] * theta[j];
    return s;
  }

  double l2_;
};

/**
 * Fully connected classifier: tanh hidden layers, softmax cross-entropy on
 * the output. Layer widths are p, hidden..., K.
 *
 * Flattening order: for each layer in input-to-output order, the weight
 * matrix row-major as (out x in), then that layer's out biases.
 */
class MlpProblem final : public DatasetProblem {
 public:
  MlpProblem(std::shared_ptr<const Dataset> ds, std::vector<std::size_t> hidden) : DatasetProblem(std::move(ds)) {
    if (ds_->num_classes < 2) throw std::invalid_argument("mlp_problem: requires at least 2 classes");
    widths_.push_back(ds_->p);
    for (std::size_t h : hidden) {
      if (h < 1) throw std::invalid_argument("mlp_problem: hidden widths must be >= 1");
      widths_.push_back(h);
    }
    widths_.push_back(ds_->num_classes);
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
      offsets_.push_back(off);
      off += widths_[l + 1] * widths_[l] + widths_[l + 1];
    }
    dim_ = off;
  }

  const std::vector<std::size_t>& widths() const { return widths_; }

  std::size_t dim() const override { return dim_; }

  double loss(const ParamVector& theta, const BatchRef& batch) const override {
    check_dim(theta);
    check_batch(batch);
    Activations act;
    double total = 0.0;
    for (std::size_t i : batch.indices) {
      forward(theta, i, act);
      const auto& z = act.back();
      total += log_sum_exp(z) - z[static_cast<std::size_t>(ds_->labels[i])];
    }
    return total / static_cast<double>(batch.indices.size());
  }

  ParamVector grad(const ParamVector& theta, const BatchRef& batch) const override {
    check_dim(theta);
    check_batch(batch);
    std::vector<double> g(dim_, 0.0);
    Activations act;
    std::vector<double> delta, prev_delta;
    const std::size_t layers = widths_.size() - 1;
    for (std::size_t i : batch.indices) {
      forward(theta, i, act);
      // Output error: softmax - onehot.
      const auto& z = act.back();
      const double lse = log_sum_exp(z);
      delta.assign(z.size(), 0.0);
      for (std::size_t k = 0; k < z.size(); ++k) delta[k] = std::exp(z[k] - lse);
      delta[static_cast<std::size_t>(ds_->labels[i])] -= 1.0;

      for (std::size_t l = layers; l-- > 0;) {
        const std::size_t in = widths_[l], out = widths_[l + 1];
        const auto& a = act[l];
        const std::size_t w0 = offsets_[l], b0 = w0 + out * in;
        for (std::size_t o = 0; o < out; ++o) {
          for (std::size_t j = 0; j < in; ++j) g[w0 + o * in + j] += delta[o] * a[j];
          g[b0 + o] += delta[o];
        }
        if (l == 0) break;
        // Back through W^T and the tanh of layer l's input activations.
        prev_delta.assign(in, 0.0);
        for (std::size_t o = 0; o < out; ++o)
          for (std::size_t j = 0; j < in; ++j) prev_delta[j] += theta[w0 + o * in + j] * delta[o];
        for (std::size_t j = 0; j < in; ++j) prev_delta[j] *= 1.0 - a[j] * a[j];
        std::swap(delta, prev_delta);
      }
    }
    const double inv = 1.0 / static_cast<double>(batch.indices.size());
    for (double& v : g) v *= inv;
    return ParamVector(std::move(g));
  }

  /// Glorot-uniform weights, zero biases.
  ParamVector initial_point(std::uint64_t seed) const override {
    std::mt19937_64 eng(mix_seed(seed, 0x6d6c70));
    std::vector<double> theta(dim_, 0.0);
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
      const std::size_t in = widths_[l], out = widths_[l + 1];
      const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
      for (std::size_t k = 0; k < out * in; ++k)
        theta[offsets_[l] + k] = limit * (2.0 * detail::unit_uniform(eng) - 1.0);
    }
    return ParamVector(std::move(theta));
  }

  std::size_t predict(const ParamVector& theta, std::size_t row) const override {
    check_dim(theta);
    Activations act;
    forward(theta, row, act);
    const auto& z = act.back();
    return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
  }

 private:
  // act[0] is the input, act[l] the tanh output of layer l, act.back() the logits.
  using Activations = std::vector<std::vector<double>>;

  void forward(const ParamVector& theta, std::size_t row, Activations& act) const {
    const std::size_t layers = widths_.size() - 1;
    act.resize(widths_.size());
    const auto x = ds_->row(row);
    act[0].assign(x.begin(), x.end());
    for (std::size_t l = 0; l < layers; ++l) {
      const std::size_t in = widths_[l], out = widths_[l + 1];
      const std::size_t w0 = offsets_[l], b0 = w0 + out * in;
      auto& next = act[l + 1];
      next.assign(out, 0.0);
      for (std::size_t o = 0; o < out; ++o) {
        double s = theta[b0 + o];
        for (std::size_t j = 0; j < in; ++j) s += theta[w0 + o * in + j] * act[l][j];
        next[o] = l + 1 < layers ? std::tanh(s) : s;
      }
    }
  }

  static double log_sum_exp(const std::vector<double>& z) {
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - m);
    return m + std::log(s);
  }

  std::vector<std::size_t> widths_;
  std::vector<std::size_t> offsets_;
  std::size_t dim_ = 0;
};

inline ProblemPtr logistic_problem(std::shared_ptr<const Dataset> ds, double l2) {
  return std::make_shared<LogisticProblem>(std::move(ds), l2);
}

inline ProblemPtr mlp_problem(std::shared_ptr<const Dataset> ds, std::vector<std::size_t> hidden) {
  return std::make_shared<MlpProblem>(std::move(ds), std::move(hidden));
}

// ---------------------------------------------------------------------------
// Oracles and metrics

/// Central differences of p.loss, the same batch on both sides.
inline ParamVector finite_difference_grad(const Problem& p, const ParamVector& theta, const BatchRef& batch,
                                          double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_difference_grad: h must be > 0");
  std::vector<double> g(theta.dim());
  std::vector<double> probe(theta.begin(), theta.end());
  for (std::size_t i = 0; i < g.size(); ++i) {
    probe[i] = theta[i] + h;
    const double up = p.loss(ParamVector(probe), batch);
    probe[i] = theta[i] - h;
    const double down = p.loss(ParamVector(probe), batch);
    probe[i] = theta[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return ParamVector(std::move(g));
}

/// |a - b| / max(1, |a|)
inline double relative_error(const ParamVector& a, const ParamVector& b) {
  return (a - b).norm() / std::max(1.0, a.norm());
}

/**
 * Compares grad against central differences at `points` seeded random
 * parameter vectors (initial point plus N(0, 0.25) jitter). Dataset problems
 * are checked on a 16-row batch; landscapes on ticket k. Returns the largest
 * relative error seen.
 */
inline double gradient_check(const Problem& p, std::size_t points, std::uint64_t seed, double h = 1e-5) {
  double worst = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    GaussianStream s(mix_seed(seed, k));
    const ParamVector base = p.initial_point(mix_seed(seed, 1000 + k));
    std::vector<double> th(base.dim());
    for (std::size_t i = 0; i < th.size(); ++i) th[i] = base[i] + 0.5 * s.standard_normal();
    const ParamVector theta(std::move(th));

    BatchRef batch = BatchRef::of_ticket(k);
    if (const Dataset* ds = p.dataset()) {
      std::mt19937_64 eng(mix_seed(seed, 2000 + k));
      for (int b = 0; b < 16; ++b) batch.indices.push_back(ds->train[eng() % ds->train.size()]);
    }
    worst = std::max(worst, relative_error(p.grad(theta, batch), finite_difference_grad(p, theta, batch, h)));
  }
  return worst;
}

/// Fraction of argmax-correct predictions on one partition.
inline double accuracy(const Problem& p, const ParamVector& theta, Partition part) {
  const Dataset* ds = p.dataset();
  if (!ds) throw std::invalid_argument("no dataset");
  const auto& rows = part == Partition::train ? ds->train : ds->test;
  if (rows.empty()) throw std::invalid_argument("accuracy: empty partition");
  std::size_t correct = 0;
  for (std::size_t i : rows)
    if (p.predict(theta, i) == static_cast<std::size_t>(ds->labels[i])) ++correct;
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

/// Mean loss over a whole partition.
inline double partition_loss(const Problem& p, const ParamVector& theta, Partition part) {
  const Dataset* ds = p.dataset();
  if (!ds) throw std::invalid_argument("no dataset");
  return p.loss(theta, BatchRef::of_indices(part == Partition::train ? ds->train : ds->test));
}

}  // namespace asgld

#endif  // ASGLD_PROBLEMS_HPP
