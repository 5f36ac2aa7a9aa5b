// Copyright 2026 The dpzono Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpzono/noise_optimizer.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dpzono/noise.h"
#include "dpzono/random.h"

namespace dpzono {
namespace {

// Smallest delta reachable on a unit-step grid with shift 1: masses
// proportional to r^i, r = e^-eps, on each half.
double GeometricDelta(double eps, int half_bins) {
  const double r = std::exp(-eps);
  double total = 0.0;
  for (int i = 0; i < half_bins; ++i) total += std::pow(r, i);
  return std::pow(r, half_bins - 1) / (2.0 * total);
}

OptimizationResult Optimize(double eps, double range, int n, int gamma = 1,
                            uint64_t seed = 0) {
  OptimizerConfig cfg;
  cfg.epsilon = eps;
  cfg.sensitivity = 1.0;
  cfg.gamma = gamma;
  cfg.seed = seed;
  return OptimizeDistribution(cfg, range, n, DefaultSigmoidCount(n), 500.0);
}

TEST(OptimizerConfigTest, DefaultsAreValid) {
  EXPECT_NO_THROW(ValidateConfig(OptimizerConfig{}));
}

TEST(OptimizerConfigTest, RejectsInvalidFields) {
  const auto rejects = [](auto mutate) {
    OptimizerConfig cfg;
    mutate(cfg);
    EXPECT_THROW(ValidateConfig(cfg), std::invalid_argument);
  };
  rejects([](OptimizerConfig& c) { c.gamma = 3; });
  rejects([](OptimizerConfig& c) { c.epochs = 0; });
  rejects([](OptimizerConfig& c) { c.learning_rate = 0.0; });
  rejects([](OptimizerConfig& c) { c.omega_min = 0.0; });
  rejects([](OptimizerConfig& c) { c.omega_min = 1.0; });
  rejects([](OptimizerConfig& c) { c.omega_half_life = -1.0; });
  rejects([](OptimizerConfig& c) { c.epsilon = -0.1; });
  rejects([](OptimizerConfig& c) { c.sensitivity = NAN; });
}

TEST(OmegaAtTest, HalfLifeFloorAndConstant) {
  OptimizerConfig cfg;
  cfg.omega_start = 1.0;
  cfg.omega_min = 0.01;
  cfg.omega_half_life = 500.0;
  EXPECT_DOUBLE_EQ(OmegaAt(500, cfg), 0.5);
  EXPECT_DOUBLE_EQ(OmegaAt(1000, cfg), 0.25);
  EXPECT_DOUBLE_EQ(OmegaAt(100000, cfg), 0.01);
  cfg.omega_min = cfg.omega_start;
  EXPECT_DOUBLE_EQ(OmegaAt(1, cfg), 1.0);
  EXPECT_DOUBLE_EQ(OmegaAt(4321, cfg), 1.0);
  EXPECT_THROW(OmegaAt(0, cfg), std::invalid_argument);
}

TEST(OmegaAtTest, NonIncreasing) {
  const OptimizerConfig cfg;
  for (int t = 1; t < 6000; ++t) EXPECT_LE(OmegaAt(t + 1, cfg), OmegaAt(t, cfg));
}

TEST(InitialParamsTest, RangesAndStratifiedKnots) {
  RandomStream rng(3);
  const double range = 7.0;
  const NoiseModelParams p = InitialParams(range, 13, 500.0, rng);
  EXPECT_GE(p.a, 0.5);
  EXPECT_LT(p.a, 1.5);
  ASSERT_EQ(p.b.size(), 14u);
  ASSERT_EQ(p.knots.size(), 14u);
  EXPECT_EQ(p.steepness, 500.0);
  for (size_t j = 0; j < p.b.size(); ++j) {
    EXPECT_GE(p.b[j], 0.0);
    EXPECT_LT(p.b[j], 1.0);
    EXPECT_GE(p.knots[j], -range + j * range / 14);
    EXPECT_LT(p.knots[j], -range + (j + 1) * range / 14);
  }
}

TEST(InitialParamsTest, Deterministic) {
  RandomStream a(9), b(9);
  const NoiseModelParams pa = InitialParams(5.0, 10, 500.0, a);
  const NoiseModelParams pb = InitialParams(5.0, 10, 500.0, b);
  EXPECT_EQ(pa.a, pb.a);
  EXPECT_EQ(pa.b, pb.b);
  EXPECT_EQ(pa.knots, pb.knots);
}

TEST(DefaultSigmoidCountTest, Values) {
  EXPECT_EQ(DefaultSigmoidCount(3), 10);
  EXPECT_EQ(DefaultSigmoidCount(7), 13);
  EXPECT_EQ(DefaultSigmoidCount(15), 29);
}

TEST(ModelLossGradientTest, StableUnderStepHalving) {
  RandomStream rng(21);
  const NoiseGrid grid = BuildGrid(7.0, 7);
  OptimizerConfig cfg;
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    // Smooth sigmoids keep the loss differentiable in every parameter.
    const NoiseModelParams p = InitialParams(7.0, 4, 1.5, rng);
    const TruncatedNoiseDistribution dist = EvaluateNoiseModel(p, grid);
    // Skip points within reach of a max(0, .) kink of delta.
    bool near_kink = false;
    for (int l = 0; l + 1 < grid.size(); ++l) {
      const double term = dist.mass[l] - std::exp(cfg.epsilon) * dist.mass[l + 1];
      near_kink = near_kink || std::abs(term) < 1e-4;
    }
    if (near_kink) continue;
    ++checked;
    const std::vector<double> g1 = ModelLossGradient(p, grid, cfg, 0.5, 1e-5);
    const std::vector<double> g2 = ModelLossGradient(p, grid, cfg, 0.5, 5e-6);
    ASSERT_EQ(g1.size(), 1u + 2u * p.b.size());
    double diff = 0.0, norm = 0.0;
    for (size_t i = 0; i < g1.size(); ++i) {
      diff += (g1[i] - g2[i]) * (g1[i] - g2[i]);
      norm += g1[i] * g1[i];
    }
    EXPECT_LT(std::sqrt(diff / norm), 1e-3);
  }
  EXPECT_GT(checked, 5);
}

TEST(ModelLossGradientTest, MatchesDirectionalDifference) {
  RandomStream rng(23);
  const NoiseGrid grid = BuildGrid(5.0, 5);
  OptimizerConfig cfg;
  cfg.gamma = 2;
  const NoiseModelParams p = InitialParams(5.0, 3, 2.0, rng);
  const std::vector<double> g = ModelLossGradient(p, grid, cfg, 0.2);
  // Perturb only `a`, which must agree with the first component.
  const double h = 1e-6;
  NoiseModelParams up = p, down = p;
  up.a += h;
  down.a -= h;
  const double fd = (ModelLoss(up, grid, cfg, 0.2) - ModelLoss(down, grid, cfg, 0.2)) /
                    (2 * h);
  EXPECT_NEAR(g[0], fd, 1e-6 * std::max(1.0, std::abs(fd)));
}

TEST(OptimizeDistributionTest, ModerateEpsilonBeatsUniformAndMeetsBand) {
  const OptimizationResult r = Optimize(0.3, 7.0, 7);
  const TruncatedNoiseDistribution& dist = r.distribution;
  EXPECT_TRUE(InvariantViolations(dist).empty());
  EXPECT_LE(dist.delta, 1.0 / 14);
  EXPECT_LE(dist.delta, 2 * 0.0244);
  EXPECT_GE(dist.delta, 0.0244 / 2);
  EXPECT_EQ(dist.delta, DeltaOf(dist, 0.3, 1.0));
  EXPECT_EQ(dist.epsilon, 0.3);
  EXPECT_EQ(dist.sensitivity, 1.0);
  EXPECT_LE(r.best_loss, r.initial_loss);
}

TEST(OptimizeDistributionTest, HighEpsilonCell) {
  const OptimizationResult r = Optimize(0.7, 7.0, 7);
  EXPECT_LE(r.distribution.delta, 2 * 0.0038);
  EXPECT_GE(r.distribution.delta, 0.0038 / 2);
}

TEST(OptimizeDistributionTest, DominatesUniformAndDiscretizedLaplace) {
  for (double eps : {0.1, 0.5}) {
    for (int d : {3, 9}) {
      const OptimizationResult r = Optimize(eps, d, d);
      const NoiseGrid grid = BuildGrid(d, d);
      TruncatedNoiseDistribution uniform;
      uniform.grid = grid;
      uniform.mass.assign(2 * d, 1.0 / (2 * d));
      const TruncatedNoiseDistribution laplace =
          DiscretizedLaplace(grid, 1.0 / eps);
      EXPECT_LE(r.distribution.delta, DeltaOf(uniform, eps, 1.0));
      // The discretized Laplace shape is the delta-optimal geometric
      // distribution here; allow the optimizer 0.5% slack.
      EXPECT_NEAR(DeltaOf(laplace, eps, 1.0), GeometricDelta(eps, d), 1e-12);
      EXPECT_LE(r.distribution.delta, 1.005 * DeltaOf(laplace, eps, 1.0))
          << "eps=" << eps << " d=" << d;
    }
  }
}

TEST(OptimizeDistributionTest, SecondMomentUtility) {
  const OptimizationResult r = Optimize(0.3, 5.0, 5, 2);
  EXPECT_TRUE(InvariantViolations(r.distribution).empty());
  EXPECT_LE(r.distribution.delta, 0.1);
  EXPECT_LE(r.best_loss, r.initial_loss);
}

TEST(OptimizeDistributionTest, SameSeedSameResult) {
  const OptimizationResult a = Optimize(0.5, 5.0, 5, 1, 77);
  const OptimizationResult b = Optimize(0.5, 5.0, 5, 1, 77);
  EXPECT_EQ(a.params.a, b.params.a);
  EXPECT_EQ(a.params.b, b.params.b);
  EXPECT_EQ(a.params.knots, b.params.knots);
  EXPECT_EQ(a.distribution.mass, b.distribution.mass);
}

TEST(OptimizeDistributionTest, FinerGridWithFractionalSensitivity) {
  OptimizerConfig cfg;
  cfg.epsilon = 0.3;
  cfg.sensitivity = 0.5;
  cfg.epochs = 1500;
  const OptimizationResult r =
      OptimizeDistribution(cfg, 3.0, 6, DefaultSigmoidCount(6), 500.0);
  EXPECT_TRUE(InvariantViolations(r.distribution).empty());
  EXPECT_LE(r.distribution.delta, 2.0 / 12);
}

TEST(OptimizeDistributionTest, RejectsMisalignedSensitivity) {
  OptimizerConfig cfg;
  cfg.sensitivity = 0.3;
  EXPECT_THROW(OptimizeDistribution(cfg, 7.0, 7, 13, 500.0),
               MisalignedSensitivityError);
}

TEST(OptimizeDistributionTest, NonFiniteStepIsReportedAsDivergence) {
  OptimizerConfig cfg;
  cfg.learning_rate = 1e308;
  cfg.epochs = 50;
  EXPECT_THROW(OptimizeDistribution(cfg, 7.0, 7, 13, 500.0),
               OptimizerDivergedError);
}

}  // namespace
}  // namespace dpzono
