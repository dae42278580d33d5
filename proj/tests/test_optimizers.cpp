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

#include <cmath>
#include <vector>

#include "asgld/optimizers.hpp"
#include "asgld/problems.hpp"
#include "gtest/gtest.h"

using namespace asgld;

namespace {

constexpr Method kAllMethods[] = {Method::sgd,     Method::momentum, Method::sgld, Method::sghmc,  Method::psgld,
                                  Method::adagrad, Method::adam,     Method::amsgrad, Method::asgld};

HyperParams make_hp(double eta, double rho = 0.9, double psi = 1.0, double eps = 0.0) {
  HyperParams hp;
  hp.eta = eta;
  hp.rho = rho;
  hp.psi = psi;
  hp.epsilon_noise = eps;
  return hp;
}

// Parameter trajectory on a noisy 10-d quadratic; gradient noise is keyed by step index.
std::vector<ParamVector> trajectory(Method m, const HyperParams& hp, std::uint64_t seed, int steps) {
  const ProblemPtr p = stochastic_wrapper(quadratic_problem(10, 10.0), 0.1, GaussianStream(seed + 100));
  OptimizerState s(p->initial_point(0), seed);
  std::vector<ParamVector> out{s.theta};
  for (int t = 0; t < steps; ++t) {
    step(m, s, p->grad(s.theta, BatchRef::of_ticket(static_cast<std::uint64_t>(t))), hp);
    out.push_back(s.theta);
  }
  return out;
}

double max_trajectory_gap(const std::vector<ParamVector>& a, const std::vector<ParamVector>& b) {
  double worst = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t)
    for (std::size_t i = 0; i < a[t].dim(); ++i) worst = std::max(worst, std::abs(a[t][i] - b[t][i]));
  return worst;
}

}  // namespace

TEST(HyperParamsTest, RejectsOutOfRange) {
  EXPECT_NO_THROW(HyperParams{}.validate());
  EXPECT_THROW(make_hp(0.0).validate(), std::invalid_argument);
  EXPECT_THROW(make_hp(0.1, 1.0).validate(), std::invalid_argument);
  EXPECT_THROW(make_hp(0.1, -0.1).validate(), std::invalid_argument);
  EXPECT_THROW(make_hp(0.1, 0.9, -1.0).validate(), std::invalid_argument);
  EXPECT_THROW(make_hp(0.1, 0.9, 1.0, -0.5).validate(), std::invalid_argument);
  HyperParams hp;
  hp.stab = 0.0;
  EXPECT_THROW(hp.validate(), std::invalid_argument);
  hp = HyperParams{};
  hp.beta2 = 1.0;
  EXPECT_THROW(hp.validate(), std::invalid_argument);
}

TEST(OptimizerStateTest, StartsZeroed) {
  OptimizerState s(ParamVector{1, 2, 3}, 5);
  EXPECT_EQ(s.mu, ParamVector::zeros(3));
  EXPECT_EQ(s.cov, ParamVector::zeros(3));
  EXPECT_EQ(s.second_moment, ParamVector::zeros(3));
  EXPECT_EQ(s.max_second_moment, ParamVector::zeros(3));
  EXPECT_EQ(s.t, 0u);
}

TEST(MethodNamesTest, RoundTrip) {
  for (Method m : kAllMethods) EXPECT_EQ(parse_method(method_name(m)), m);
  EXPECT_THROW(parse_method("rmsprop"), std::invalid_argument);
}

TEST(SgdTest, Examples) {
  OptimizerState s(ParamVector{1, 2}, 0);
  sgd_step(s, ParamVector{0, 0}, make_hp(0.1));
  EXPECT_EQ(s.theta, (ParamVector{1, 2}));

  OptimizerState s1(ParamVector{1}, 0);
  const StepReport r = sgd_step(s1, ParamVector{2}, make_hp(0.1));
  EXPECT_NEAR(s1.theta[0], 0.8, 1e-15);
  EXPECT_EQ(r.noise_draw, ParamVector{0.0});
  EXPECT_NEAR(r.effective_step[0], -0.2, 1e-15);
  EXPECT_DOUBLE_EQ(r.grad_norm, 2.0);
}

TEST(SgdTest, GeometricDecayOnUnitQuadratic) {
  const ProblemPtr p = quadratic_problem(1, 1.0);
  OptimizerState s(ParamVector{1.0}, 0);
  for (int t = 0; t < 10; ++t) sgd_step(s, p->grad(s.theta, {}), make_hp(0.1));
  EXPECT_NEAR(s.theta[0], std::pow(0.9, 10), 1e-14);
  EXPECT_NEAR(s.theta[0], 0.3486784401, 1e-10);
}

TEST(SgdTest, DimensionMismatchLeavesStateUnchanged) {
  OptimizerState s(ParamVector{1, 2}, 0);
  for (Method m : kAllMethods) {
    EXPECT_THROW(step(m, s, ParamVector{1}, make_hp(0.1)), DimensionError);
    EXPECT_EQ(s.t, 0u);
    EXPECT_EQ(s.theta, (ParamVector{1, 2}));
  }
}

TEST(SgdTest, OverflowingStepLeavesStateUnchanged) {
  for (Method m : kAllMethods) {
    OptimizerState s(ParamVector{-1e308}, 3);
    const GaussianStream before = s.stream;
    HyperParams hp = make_hp(1e10, 0.0);
    EXPECT_THROW(step(m, s, ParamVector{1e308}, hp), NonFiniteError) << method_name(m);
    EXPECT_EQ(s.theta, ParamVector{-1e308});
    EXPECT_EQ(s.mu, ParamVector{0.0});
    EXPECT_EQ(s.t, 0u);
    EXPECT_EQ(s.stream, before);
  }
}

TEST(MomentumTest, HandEvaluation) {
  OptimizerState s(ParamVector{0.0}, 0);
  const double eta = 0.5;
  momentum_step(s, ParamVector{1.0}, make_hp(eta, 0.9));
  EXPECT_NEAR(s.mu[0], 0.1, 1e-15);
  EXPECT_NEAR(s.theta[0], -0.1 * eta, 1e-15);
}

TEST(MomentumTest, RhoZeroIsSgd) {
  OptimizerState a(ParamVector{1.5, -2}, 0), b(ParamVector{1.5, -2}, 0);
  momentum_step(a, ParamVector{0.3, 4}, make_hp(0.1, 0.0));
  sgd_step(b, ParamVector{0.3, 4}, make_hp(0.1));
  EXPECT_EQ(a.mu, (ParamVector{0.3, 4}));
  EXPECT_EQ(a.theta, b.theta);
}

TEST(MomentumTest, ConstantGradientGeometricSeries) {
  OptimizerState s(ParamVector{0.0}, 0);
  const double c = 1.7, rho = 0.8;
  for (int t = 1; t <= 50; ++t) {
    momentum_step(s, ParamVector{c}, make_hp(0.01, rho));
    ASSERT_NEAR(s.mu[0], c * (1.0 - std::pow(rho, t)), 1e-12);
  }
}

TEST(SgldTest, ZeroVarianceIsSgd) {
  for (std::uint64_t seed : {1ULL, 2ULL, 77ULL}) {
    EXPECT_EQ(trajectory(Method::sgld, make_hp(0.05, 0.9, 1.0, 0.0), seed, 200),
              trajectory(Method::sgd, make_hp(0.05), seed, 200));
  }
}

TEST(SgldTest, SingleStepDisplacementVariance) {
  OptimizerState s(ParamVector{0.0}, 11);
  const int n = 100000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const StepReport r = sgld_step(s, ParamVector{0.0}, make_hp(1.0, 0.9, 1.0, 1.0));
    EXPECT_NEAR(r.effective_step[0], -r.noise_draw[0], 1e-9);
    sum += r.effective_step[0];
    sum2 += r.effective_step[0] * r.effective_step[0];
  }
  const double var = (sum2 - sum * sum / n) / (n - 1);
  EXPECT_LT(std::abs(var - 1.0), 0.02);
}

TEST(SgldTest, SameSeedBitwiseIdentical) {
  const auto a = trajectory(Method::sgld, make_hp(0.05, 0.9, 1.0, 0.5), 9, 300);
  const auto b = trajectory(Method::sgld, make_hp(0.05, 0.9, 1.0, 0.5), 9, 300);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, trajectory(Method::sgld, make_hp(0.05, 0.9, 1.0, 0.5), 10, 300));
}

TEST(SghmcTest, Reductions) {
  EXPECT_EQ(trajectory(Method::sghmc, make_hp(0.05, 0.9, 1.0, 0.0), 4, 200),
            trajectory(Method::momentum, make_hp(0.05, 0.9), 4, 200));
  EXPECT_EQ(trajectory(Method::sghmc, make_hp(0.05, 0.0, 1.0, 0.0), 4, 200),
            trajectory(Method::sgd, make_hp(0.05), 4, 200));
}

TEST(SghmcTest, HandEvaluation) {
  OptimizerState s(ParamVector{0.0}, 0);
  s.mu = ParamVector{0.5};
  sghmc_step(s, ParamVector{1.0}, make_hp(0.1, 0.8, 1.0, 0.0));
  EXPECT_NEAR(s.mu[0], 0.6, 1e-15);
  EXPECT_NEAR(s.theta[0], -0.06, 1e-15);
}

TEST(AsgldAccumulateTest, HandEvaluation) {
  OptimizerState s(ParamVector{0.0}, 0);
  const auto [mu, cov] = asgld_accumulate(s, ParamVector{1.0}, make_hp(0.1, 0.9));
  EXPECT_NEAR(mu[0], 0.1, 1e-15);
  EXPECT_NEAR(cov[0], 0.09, 1e-15);
  EXPECT_EQ(s.mu, mu);
  EXPECT_EQ(s.cov, cov);
  EXPECT_EQ(s.t, 0u);  // accumulate alone is not a step
}

TEST(AsgldAccumulateTest, ZeroInnovationDecaysGeometrically) {
  OptimizerState s(ParamVector{0.0, 0.0}, 0);
  s.mu = ParamVector{2.0, -1.0};
  s.cov = ParamVector{0.5, 3.0};
  for (int t = 1; t <= 30; ++t) {
    asgld_accumulate(s, ParamVector{2.0, -1.0}, make_hp(0.1, 0.7));
    ASSERT_NEAR(s.cov[0], 0.5 * std::pow(0.7, t), 1e-15);
    ASSERT_NEAR(s.cov[1], 3.0 * std::pow(0.7, t), 1e-14);
    ASSERT_EQ(s.mu, (ParamVector{2.0, -1.0}));
  }
}

TEST(AsgldAccumulateTest, RhoZeroForcesZeroCovariance) {
  OptimizerState s(ParamVector{0.0, 0.0}, 0);
  s.cov = ParamVector{4.0, 4.0};
  for (double g : {3.0, -7.5, 0.25}) {
    asgld_accumulate(s, ParamVector{g, -g}, make_hp(0.1, 0.0));
    EXPECT_EQ(s.mu, (ParamVector{g, -g}));
    EXPECT_EQ(s.cov, (ParamVector{0.0, 0.0}));
  }
}

// Two independent routes for the covariance recursion: a scalar transcription
// using both mu_t and mu_{t-1}, and the collapsed form
// C_t = rho C_{t-1} + rho (1 - rho) (g - mu_{t-1})^2 that follows from
// g - mu_t = rho (g - mu_{t-1}).
TEST(AsgldAccumulateTest, MatchesScalarOracleOnRandomStreams) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GaussianStream gen(seed);
    const double rho = 0.05 * static_cast<double>(seed % 19);
    OptimizerState s(ParamVector::zeros(3), seed);
    std::vector<double> mu(3, 0.0), cov(3, 0.0), cov_collapsed(3, 0.0);
    for (int t = 0; t < 500; ++t) {
      std::vector<double> g(3);
      for (std::size_t i = 0; i < 3; ++i) g[i] = (i + 1.0) * gen.standard_normal() + 0.3;
      asgld_accumulate(s, ParamVector(g), make_hp(0.1, rho));
      for (std::size_t i = 0; i < 3; ++i) {
        const double mu_prev = mu[i];
        mu[i] = rho * mu_prev + (1 - rho) * g[i];
        cov[i] = rho * cov[i] + (1 - rho) * (g[i] - mu[i]) * (g[i] - mu_prev);
        cov_collapsed[i] = rho * cov_collapsed[i] + rho * (1 - rho) * (g[i] - mu_prev) * (g[i] - mu_prev);
        ASSERT_NEAR(s.mu[i], mu[i], 1e-12);
        ASSERT_NEAR(s.cov[i], cov[i], 1e-12);
        ASSERT_NEAR(s.cov[i], cov_collapsed[i], 1e-9 * std::max(1.0, cov[i]));
        ASSERT_GE(s.cov[i], -1e-15);
      }
    }
  }
}

TEST(AsgldStepTest, PsiZeroIsSgd) {
  for (std::uint64_t seed : {0ULL, 5ULL, 123ULL})
    EXPECT_EQ(trajectory(Method::asgld, make_hp(0.05, 0.9, 0.0), seed, 500),
              trajectory(Method::sgd, make_hp(0.05), seed, 500));
}

TEST(AsgldStepTest, RhoZeroDeterministicStep) {
  OptimizerState s(ParamVector{1.0}, 0);
  const StepReport r = asgld_step(s, ParamVector{2.0}, make_hp(0.1, 0.0, 0.5));
  EXPECT_NEAR(s.theta[0], 0.7, 1e-15);
  EXPECT_EQ(r.noise_draw, ParamVector{2.0});
  EXPECT_EQ(s.t, 1u);
}

TEST(AsgldStepTest, RhoZeroNoiseEqualsGradientEveryStep) {
  const ProblemPtr p = stochastic_wrapper(quadratic_problem(4, 5.0), 0.3, GaussianStream(1));
  OptimizerState s(p->initial_point(0), 1);
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const ParamVector g = p->grad(s.theta, BatchRef::of_ticket(t));
    const StepReport r = asgld_step(s, g, make_hp(0.05, 0.0, 0.7));
    ASSERT_EQ(r.noise_draw, g);
  }
}

TEST(AsgldStepTest, ConstantGradientDriftFixedPoint) {
  const double c = 2.5, eta = 0.01, psi = 0.5, rho = 0.9;
  OptimizerState s(ParamVector{0.0, 0.0}, 17);
  StepReport r;
  for (int t = 1; t <= 10000; ++t) {
    r = asgld_step(s, ParamVector{c, c}, make_hp(eta, rho, psi));
    if (t <= 200) {
      ASSERT_LE(std::abs(s.mu[0] - c), std::pow(rho, t) * c + 1e-12);
    }
  }
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_LT(std::abs(s.mu[i] - c), 1e-6);
    EXPECT_LT(std::abs(s.cov[i]), 1e-6);
    EXPECT_LT(std::abs(r.effective_step[i] + eta * (1 + psi) * c), 1e-6);
  }
}

TEST(AsgldStepTest, ClampOnlyAtSampling) {
  OptimizerState s(ParamVector{0.0}, 0);
  s.cov = ParamVector{-0.5};  // a raw accumulator value below zero
  s.mu = ParamVector{1.0};
  const StepReport r = asgld_step(s, ParamVector{1.0}, make_hp(0.1, 0.9, 1.0));
  EXPECT_NEAR(s.cov[0], -0.45, 1e-15);  // raw recursion kept
  EXPECT_EQ(r.noise_variance, ParamVector{0.0});
  EXPECT_EQ(r.noise_draw, s.mu);
}

TEST(AsgldStepTest, ZeroMeanVariantDropsDrift) {
  OptimizerState s(ParamVector{0.0}, 0);
  HyperParams hp = make_hp(0.1, 0.0, 1.0);
  hp.zero_mean_noise = true;
  const StepReport r = asgld_step(s, ParamVector{2.0}, hp);
  EXPECT_EQ(r.noise_draw, ParamVector{0.0});
  EXPECT_NEAR(s.theta[0], -0.2, 1e-15);
}

TEST(PsgldTest, InverseScalingOfNoise) {
  OptimizerState s(ParamVector{0.0, 0.0}, 0);
  HyperParams hp = make_hp(0.01, 0.9, 1.0, 1.0);
  hp.beta2 = 0.0;
  const StepReport r = psgld_step(s, ParamVector{1.0, 10.0}, hp);
  EXPECT_NEAR(r.noise_variance[0], 1.0 / (1.0 + hp.stab), 1e-15);
  EXPECT_NEAR(r.noise_variance[1], 1.0 / (10.0 + hp.stab), 1e-15);
  EXPECT_GT(r.noise_variance[0], r.noise_variance[1]);
}

TEST(PsgldTest, NoiselessUniformSecondMomentIsParallelToRmsprop) {
  OptimizerState s(ParamVector{0.0, 0.0}, 0);
  HyperParams hp = make_hp(0.01, 0.9, 1.0, 0.0);
  hp.beta2 = 0.9;
  const StepReport r = psgld_step(s, ParamVector{3.0, -3.0}, hp);
  const double v = 0.1 * 9.0;
  const double expected = -0.01 * 3.0 / (std::sqrt(v) + hp.stab);
  EXPECT_NEAR(r.effective_step[0], expected, 1e-15);
  EXPECT_NEAR(r.effective_step[1], -expected, 1e-15);
  EXPECT_EQ(r.noise_draw, (ParamVector{0.0, 0.0}));
}

TEST(PsgldTest, Deterministic) {
  const HyperParams hp = make_hp(0.01, 0.9, 1.0, 0.1);
  EXPECT_EQ(trajectory(Method::psgld, hp, 3, 200), trajectory(Method::psgld, hp, 3, 200));
}

TEST(AdamTest, FirstStep) {
  OptimizerState s(ParamVector{0.0}, 0);
  adam_step(s, ParamVector{1.0}, make_hp(0.001));
  EXPECT_NEAR(s.theta[0], -0.001 / (1.0 + 1e-8), 1e-15);
}

TEST(AdamTest, MatchesReferenceRecursion) {
  const HyperParams hp = make_hp(0.003);
  OptimizerState s(ParamVector{0.5}, 0);
  double theta = 0.5, m = 0, v = 0;
  GaussianStream gen(8);
  for (int t = 1; t <= 200; ++t) {
    const double g = gen.standard_normal() + 0.2;
    adam_step(s, ParamVector{g}, hp);
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    theta -= 0.003 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
    ASSERT_NEAR(s.theta[0], theta, 1e-12);
  }
}

TEST(AdagradTest, ZeroGradientNoChange) {
  OptimizerState s(ParamVector{1.0, -2.0}, 0);
  adagrad_step(s, ParamVector{0.0, 0.0}, make_hp(0.5));
  EXPECT_EQ(s.theta, (ParamVector{1.0, -2.0}));
}

TEST(AdagradTest, AccumulatesSquares) {
  OptimizerState s(ParamVector{0.0}, 0);
  adagrad_step(s, ParamVector{3.0}, make_hp(0.1));
  adagrad_step(s, ParamVector{4.0}, make_hp(0.1));
  EXPECT_DOUBLE_EQ(s.second_moment[0], 25.0);
  EXPECT_NEAR(s.theta[0], -0.1 * (3.0 / 3.0 + 4.0 / 5.0), 1e-8);
}

TEST(AmsgradTest, MaxSecondMomentNondecreasing) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GaussianStream gen(seed);
    OptimizerState s(ParamVector::zeros(3), seed);
    ParamVector prev = s.max_second_moment;
    for (int t = 0; t < 500; ++t) {
      // Bursty gradients so the raw second moment rises and falls.
      const double scale = (t / 50) % 2 == 0 ? 10.0 : 0.1;
      ParamVector g{scale * gen.standard_normal(), gen.standard_normal(), 0.0};
      amsgrad_step(s, g, make_hp(0.001));
      for (std::size_t i = 0; i < 3; ++i) {
        ASSERT_GE(s.max_second_moment[i], prev[i]);
        ASSERT_GE(s.max_second_moment[i], s.second_moment[i]);
      }
      prev = s.max_second_moment;
    }
  }
}

TEST(ReductionLatticeTest, ThousandStepsWithinTolerance) {
  for (std::uint64_t seed : {0ULL, 31ULL}) {
    const int n = 1000;
    const auto sgd = trajectory(Method::sgd, make_hp(0.05), seed, n);
    const auto mom = trajectory(Method::momentum, make_hp(0.05, 0.9), seed, n);
    EXPECT_LE(max_trajectory_gap(trajectory(Method::asgld, make_hp(0.05, 0.9, 0.0), seed, n), sgd), 1e-12);
    EXPECT_LE(max_trajectory_gap(trajectory(Method::sgld, make_hp(0.05, 0.9, 1, 0.0), seed, n), sgd), 1e-12);
    EXPECT_LE(max_trajectory_gap(trajectory(Method::sghmc, make_hp(0.05, 0.9, 1, 0.0), seed, n), mom), 1e-12);
    EXPECT_LE(max_trajectory_gap(trajectory(Method::sghmc, make_hp(0.05, 0.0, 1, 0.0), seed, n), sgd), 1e-12);
    EXPECT_LE(max_trajectory_gap(trajectory(Method::momentum, make_hp(0.05, 0.0), seed, n), sgd), 1e-12);
  }
}

TEST(PropertyTest, DimensionFinitenessAndCounterPreserved) {
  for (Method m : kAllMethods) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      GaussianStream gen(seed + 1000);
      OptimizerState s(ParamVector::zeros(5), seed);
      for (std::uint64_t t = 1; t <= 200; ++t) {
        std::vector<double> g(5);
        for (auto& v : g) v = gen.standard_normal();
        const StepReport r = step(m, s, ParamVector(g), make_hp(0.01, 0.9, 1.0, 0.01));
        ASSERT_EQ(s.t, t);
        ASSERT_EQ(r.effective_step.dim(), 5u);
        ASSERT_EQ(r.noise_draw.dim(), 5u);
        for (const ParamVector* buf : {&s.theta, &s.mu, &s.cov, &s.second_moment, &s.max_second_moment})
          ASSERT_EQ(buf->dim(), 5u);
      }
    }
  }
}

TEST(PropertyTest, StepIsPureFunctionOfStateSnapshot) {
  for (Method m : kAllMethods) {
    OptimizerState s(ParamVector{0.3, -0.4}, 21);
    for (int t = 0; t < 20; ++t) step(m, s, ParamVector{0.1 * t, 1.0 - 0.05 * t}, make_hp(0.01, 0.9, 1.0, 0.2));
    OptimizerState copy = s;
    const StepReport a = step(m, s, ParamVector{0.7, -0.2}, make_hp(0.01, 0.9, 1.0, 0.2));
    const StepReport b = step(m, copy, ParamVector{0.7, -0.2}, make_hp(0.01, 0.9, 1.0, 0.2));
    EXPECT_EQ(s.theta, copy.theta) << method_name(m);
    EXPECT_EQ(a.noise_draw, b.noise_draw) << method_name(m);
    EXPECT_EQ(s.stream, copy.stream) << method_name(m);
  }
}

// Coordinate 0 of the gradient stream has 10x the standard deviation of
// coordinate 1. ASGLD must inject more noise where gradients vary more;
// pSGLD must inject less.
TEST(PropertyTest, ProportionalVersusInverseNoiseScaling) {
  const int n = 100000;
  GaussianStream gen(77);
  OptimizerState asgld(ParamVector::zeros(2), 1), psgld(ParamVector::zeros(2), 2);
  HyperParams hp = make_hp(1e-3, 0.9, 1.0, 1.0);
  double sum[2][2] = {}, sum2[2][2] = {};
  for (int t = 0; t < n; ++t) {
    const ParamVector g{10.0 * gen.standard_normal(), gen.standard_normal()};
    const StepReport ra = asgld_step(asgld, g, hp);
    const StepReport rp = psgld_step(psgld, g, hp);
    for (int i = 0; i < 2; ++i) {
      sum[0][i] += ra.noise_draw[static_cast<std::size_t>(i)];
      sum2[0][i] += ra.noise_draw[static_cast<std::size_t>(i)] * ra.noise_draw[static_cast<std::size_t>(i)];
      sum[1][i] += rp.noise_draw[static_cast<std::size_t>(i)];
      sum2[1][i] += rp.noise_draw[static_cast<std::size_t>(i)] * rp.noise_draw[static_cast<std::size_t>(i)];
    }
  }
  auto var = [&](int which, int i) { return (sum2[which][i] - sum[which][i] * sum[which][i] / n) / (n - 1); };
  EXPECT_GT(var(0, 0) / var(0, 1), 1.0);
  EXPECT_LT(var(1, 0) / var(1, 1), 1.0);
}
