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

#ifndef ASGLD_OPTIMIZERS_HPP
#define ASGLD_OPTIMIZERS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "asgld/core.hpp"

namespace asgld {

enum class Method { sgd, momentum, sgld, sghmc, psgld, adagrad, adam, amsgrad, asgld };

inline constexpr std::array<std::pair<Method, std::string_view>, 9> kMethodNames{{
    {Method::sgd, "sgd"},
    {Method::momentum, "momentum"},
    {Method::sgld, "sgld"},
    {Method::sghmc, "sghmc"},
    {Method::psgld, "psgld"},
    {Method::adagrad, "adagrad"},
    {Method::adam, "adam"},
    {Method::amsgrad, "amsgrad"},
    {Method::asgld, "asgld"},
}};

inline std::string_view method_name(Method m) {
  for (const auto& [method, name] : kMethodNames)
    if (method == m) return name;
  return "unknown";
}

inline Method parse_method(std::string_view name) {
  for (const auto& [method, n] : kMethodNames)
    if (n == name) return method;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

/**
 * Hyperparameters shared by all update rules. Each rule reads only the
 * fields it needs.
 *
 *   eta            step size, > 0
 *   rho            momentum / accumulator decay, in [0, 1)
 *   psi            ASGLD noise multiplier, >= 0
 *   epsilon_noise  isotropic noise variance for SGLD, SGHMC and pSGLD, >= 0
 *   beta1, beta2   Adam-family decays, in [0, 1); beta2 is also pSGLD's decay
 *   stab           denominator stabilizer for adaptive rules, > 0
 *
 * zero_mean_noise switches ASGLD's noise from N(mu_t, C_t) to N(0, C_t). It
 * exists for side-by-side comparison only and is off by default.
 */
struct HyperParams {
  double eta = 0.01;
  double rho = 0.9;
  double psi = 1.0;
  double epsilon_noise = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double stab = 1e-8;
  bool zero_mean_noise = false;

  void validate() const {
    auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v < 1.0; };
    if (!(std::isfinite(eta) && eta > 0.0)) throw std::invalid_argument("eta must be > 0");
    if (!in_unit(rho)) throw std::invalid_argument("rho must lie in [0, 1)");
    if (!(std::isfinite(psi) && psi >= 0.0)) throw std::invalid_argument("psi must be >= 0");
    if (!(std::isfinite(epsilon_noise) && epsilon_noise >= 0.0))
      throw std::invalid_argument("epsilon_noise must be >= 0");
    if (!in_unit(beta1)) throw std::invalid_argument("beta1 must lie in [0, 1)");
    if (!in_unit(beta2)) throw std::invalid_argument("beta2 must lie in [0, 1)");
    if (!(std::isfinite(stab) && stab > 0.0)) throw std::invalid_argument("stab must be > 0");
  }

  HyperParams with_eta(double new_eta) const {
    HyperParams out = *this;
    out.eta = new_eta;
    out.validate();
    return out;
  }
};

/// Parameters plus every accumulator any rule uses. All buffers start at zero.
struct OptimizerState {
  OptimizerState(ParamVector theta0, std::uint64_t seed)
      : theta(std::move(theta0)),
        mu(ParamVector::zeros(theta.dim())),
        cov(ParamVector::zeros(theta.dim())),
        second_moment(ParamVector::zeros(theta.dim())),
        max_second_moment(ParamVector::zeros(theta.dim())),
        stream(seed) {
    if (theta.empty()) throw DimensionError("OptimizerState: theta must have dim >= 1");
  }

  std::size_t dim() const { return theta.dim(); }

  ParamVector theta;
  ParamVector mu;
  // Raw diagonal covariance accumulator; never clamped in place.
  ParamVector cov;
  ParamVector second_moment;
  ParamVector max_second_moment;
  std::uint64_t t = 0;
  GaussianStream stream;
};

struct StepReport {
  ParamVector noise_draw;      // noise term actually added to the update direction
  ParamVector noise_variance;  // per-coordinate variance it was drawn with
  double grad_norm = 0.0;
  ParamVector effective_step;  // theta_{t+1} - theta_t
};

namespace detail {

inline void check_step_inputs(const OptimizerState& s, const ParamVector& grad, const HyperParams& hp) {
  hp.validate();
  require_same_dim(s.theta, grad, "optimizer step");
}

inline ParamVector ema(double decay, const ParamVector& prev, const ParamVector& x) {
  return zip(prev, x, "ema", [decay](double p, double v) { return decay * p + (1.0 - decay) * v; });
}

// Moves theta to next_theta, bumps t and builds the report. Anything that can
// throw must run before this.
inline StepReport commit(OptimizerState& s, ParamVector next_theta, const ParamVector& grad, ParamVector noise,
                         ParamVector noise_var) {
  StepReport r{std::move(noise), std::move(noise_var), grad.norm(), next_theta - s.theta};
  s.theta = std::move(next_theta);
  ++s.t;
  return r;
}

}  // namespace detail

/// theta <- theta - eta * g
inline StepReport sgd_step(OptimizerState& s, const ParamVector& grad, const HyperParams& hp) {
  detail::check_step_inputs(s, grad, hp);
  ParamVector next = axpy(-hp.eta, grad, s.theta);
  const auto zero = ParamVector::zeros(s.dim());
  return detail::commit(s, std::move(next), grad, zero, zero);
}

/// mu <- rho*mu + (1-rho)*g, then theta <- theta - eta * mu
inline StepReport momentum_step(OptimizerState& s, const ParamVector& grad, const HyperParams& hp) {
  detail::check_step_inputs(s, grad, hp);
  ParamVector mu = detail::ema(hp.rho, s.mu, grad);
  ParamVector next = axpy(-hp.eta, mu, s.theta);
  s.mu = std::move(mu);
  const auto zero = ParamVector::zeros(s.dim());
  return detail::commit(s, std::move(next), grad, zero, zero);
}

/// theta <- theta - eta * (g + xi), xi ~ N(0, epsilon * I)
inline StepReport sgld_step(OptimizerState& s, const ParamVector& grad, const HyperParams& hp) {
  detail::check_step_inputs(s, grad, hp);
  GaussianStream stream = s.stream;
  const ParamVector var(s.dim(), hp.epsilon_noise);
  ParamVector xi = sample_gaussian(stream, ParamVector::zeros(s.dim()), var);
  ParamVector next = axpy(-hp.eta, grad + xi, s.theta);
  s.stream = std::move(stream);
  return detail::commit(s, std::move(next), grad, std::move(xi), var);
}

/// Momentum plus isotropic noise: theta <- theta - eta * (mu + xi)
inline StepReport sghmc_step(OptimizerState& s, const ParamVector& grad, const HyperParams& hp) {
  detail::check_step_inputs(s, grad, hp);
  GaussianStream stream = s.stream;
  ParamVector mu = detail::ema(hp.rho, s.mu, grad);
  const ParamVector var(s.dim(), hp.epsilon_noise);
  ParamVector xi = sample_gaussian(stream, ParamVector::zeros(s.dim()), var);
  ParamVector next = axpy(-hp.eta, mu + xi, s.theta);
  s.mu = std::move(mu);
  s.stream = std::move(stream);
  return detail::commit(s, std::move(next), grad, std::move(xi), var);
}

/// New first moment and raw diagonal covariance of the ASGLD accumulator.
struct AsgldMoments {
  ParamVector mu;
  ParamVector cov;
};

/**
 * Pure form of the ASGLD accumulator update:
 *
 *   mu_t = rho * mu_{t-1} + (1 - rho) * g
 *   C_t  = rho * C_{t-1} + (1 - rho) * (g - mu_t) * (g - mu_{t-1})
 *
 * mu_t is formed first and C_t uses both mu_t and mu_{t-1}. Products are
 * elementwise (diagonal covariance).
 */
inline AsgldMoments asgld_moments(const ParamVector& mu_prev, const ParamVector& cov_prev, const ParamVector& grad,
                                  double rho) {
  detail::require_same_dim(mu_prev, grad, "asgld_moments");
  detail::require_same_dim(cov_prev, grad, "asgld_moments");
  ParamVector mu = detail::ema(rho, mu_prev, grad);
  std::vector<double> cov(grad.dim());
  for (std::size_t i = 0; i < cov.size(); ++i)
    cov[i] = rho * cov_prev[i] + (1.0 - rho) * (grad[i] - mu[i]) * (grad[i] - mu_prev[i]);
  return {std::move(mu), ParamVector(std::move(cov))};
}

/// Updates state.mu and state.cov in place and returns the new buffers.
inline std::pair<ParamVector, ParamVector> asgld_accumulate(OptimizerState& s, const ParamVector& grad,
                                                            const HyperParams& hp) {
  detail::check_step_inputs(s, grad, hp);
  auto [mu, cov] = asgld_moments(s.mu, s.cov, grad, hp.rho);
  s.mu = mu;
  s.cov = cov;
  return {std::move(mu), std::move(cov)};
}

/**
 * Adaptively preconditioned SGLD:
 *
 *   xi_t ~ N(mu_t, max(C_t, 0))
 *   theta <- theta - eta * (g + psi * xi_t)
 *
 * The raw accumulator is kept in state.cov; only the sampling variance is
 * clamped at zero.
 */
inline StepReport asgld_step(OptimizerState& s, const ParamVector& grad, const HyperParams& hp) {
  detail::check_step_inputs(s, grad, hp);
  auto [mu, cov] = asgld_moments(s.mu, s.cov, grad, hp.rho);
  ParamVector var = detail::map(cov, [](double c) { return std::max(c, 0.0); });
  GaussianStream stream = s.stream;
  ParamVector xi = sample_gaussian(stream, hp.zero_mean_noise ? ParamVector::zeros(s.dim()) : mu, var);
  ParamVector next = axpy(-hp.eta, axpy(hp.psi, xi, grad), s.theta);
  s.mu = std::move(mu);
  s.cov = std::move(cov);
  s.stream = std::move(stream);
  return detail::commit(s, std::move(next), grad, std::move(xi), std::move(var));
}

/**
 * RMSProp-preconditioned SGLD. With P = 1 / (sqrt(v) + stab):
 *
 *   v     <- beta2 * v + (1 - beta2) * g^2
 *   theta <- theta - eta * (P * g + sqrt(P) * zeta),  zeta ~ N(0, epsilon * I)
 *
 * noise_draw reports sqrt(P) * zeta, i.e. the noise after preconditioning.
 */
inline StepReport psgld_step(OptimizerState& s, const ParamVector& grad, const HyperParams& hp) {
  detail::check_step_inputs(s, grad, hp);
  ParamVector v = detail::ema(hp.beta2, s.second_moment, elementwise_mul(grad, grad));
  ParamVector precond = detail::map(v, [&](double vi) { return 1.0 / (std::sqrt(vi) + hp.stab); });
  GaussianStream stream = s.stream;
  ParamVector zeta =
      sample_gaussian(stream, ParamVector::zeros(s.dim()), ParamVector(s.dim(), hp.epsilon_noise));
  ParamVector noise = elementwise_mul(detail::map(precond, [](double p) { return std::sqrt(p); }), zeta);
  ParamVector next = axpy(-hp.eta, elementwise_mul(precond, grad) + noise, s.theta);
  ParamVector noise_var = hp.epsilon_noise * precond;
  s.second_moment = std::move(v);
  s.stream = std::move(stream);
  return detail::commit(s, std::move(next), grad, std::move(noise), std::move(noise_var));
}

/// G <- G + g^2; theta <- theta - eta * g / (sqrt(G) + stab)
inline StepReport adagrad_step(OptimizerState& s, const ParamVector& grad, const HyperParams& hp) {
  detail::check_step_inputs(s, grad, hp);
  ParamVector acc = s.second_moment + elementwise_mul(grad, grad);
  ParamVector dir = detail::zip(grad, acc, "adagrad",
                                [&](double g, double a) { return g / (std::sqrt(a) + hp.stab); });
  ParamVector next = axpy(-hp.eta, dir, s.theta);
  s.second_moment = std::move(acc);
  const auto zero = ParamVector::zeros(s.dim());
  return detail::commit(s, std::move(next), grad, zero, zero);
}

namespace detail {

// Shared Adam/AMSGrad body. The AMSGrad variant keeps a running max of the
// raw second moment and bias-corrects that max.
inline StepReport adam_like(OptimizerState& s, const ParamVector& grad, const HyperParams& hp, bool amsgrad) {
  check_step_inputs(s, grad, hp);
  const double t = static_cast<double>(s.t + 1);
  ParamVector m = ema(hp.beta1, s.mu, grad);
  ParamVector v = ema(hp.beta2, s.second_moment, elementwise_mul(grad, grad));
  ParamVector vmax = amsgrad ? zip(s.max_second_moment, v, "amsgrad", [](double a, double b) { return std::max(a, b); })
                             : s.max_second_moment;
  const double c1 = 1.0 - std::pow(hp.beta1, t);
  const double c2 = 1.0 - std::pow(hp.beta2, t);
  const ParamVector& denom_src = amsgrad ? vmax : v;
  ParamVector dir = zip(m, denom_src, "adam",
                        [&](double mi, double vi) { return (mi / c1) / (std::sqrt(vi / c2) + hp.stab); });
  ParamVector next = axpy(-hp.eta, dir, s.theta);
  s.mu = std::move(m);
  s.second_moment = std::move(v);
  s.max_second_moment = std::move(vmax);
  const auto zero = ParamVector::zeros(s.dim());
  return commit(s, std::move(next), grad, zero, zero);
}

}  // namespace detail

inline StepReport adam_step(OptimizerState& s, const ParamVector& grad, const HyperParams& hp) {
  return detail::adam_like(s, grad, hp, false);
}

inline StepReport amsgrad_step(OptimizerState& s, const ParamVector& grad, const HyperParams& hp) {
  return detail::adam_like(s, grad, hp, true);
}

/// Dispatches to the update rule named by `m`. Mutates `s` in place.
inline StepReport step(Method m, OptimizerState& s, const ParamVector& grad, const HyperParams& hp) {
  switch (m) {
    case Method::sgd: return sgd_step(s, grad, hp);
    case Method::momentum: return momentum_step(s, grad, hp);
    case Method::sgld: return sgld_step(s, grad, hp);
    case Method::sghmc: return sghmc_step(s, grad, hp);
    case Method::psgld: return psgld_step(s, grad, hp);
    case Method::adagrad: return adagrad_step(s, grad, hp);
    case Method::adam: return adam_step(s, grad, hp);
    case Method::amsgrad: return amsgrad_step(s, grad, hp);
    case Method::asgld: return asgld_step(s, grad, hp);
  }
  throw std::logic_error("step: unhandled method");
}

}  // namespace asgld

#endif  // ASGLD_OPTIMIZERS_HPP
