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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dpzono {
namespace {

std::vector<double> Pack(const NoiseModelParams& p) {
  std::vector<double> theta;
  theta.reserve(1 + 2 * p.b.size());
  theta.push_back(p.a);
  theta.insert(theta.end(), p.b.begin(), p.b.end());
  theta.insert(theta.end(), p.knots.begin(), p.knots.end());
  return theta;
}

void Unpack(const std::vector<double>& theta, NoiseModelParams& p) {
  const size_t count = p.b.size();
  p.a = theta[0];
  std::copy_n(theta.begin() + 1, count, p.b.begin());
  std::copy_n(theta.begin() + 1 + count, count, p.knots.begin());
}

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-12;
constexpr int kPatience = 100;

}  // namespace

void ValidateConfig(const OptimizerConfig& cfg) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("optimizer config: ") + what);
  };
  require(std::isfinite(cfg.epsilon) && cfg.epsilon >= 0.0, "epsilon must be >= 0");
  require(std::isfinite(cfg.sensitivity) && cfg.sensitivity >= 0.0,
          "sensitivity must be >= 0");
  require(cfg.gamma == 1 || cfg.gamma == 2, "gamma must be 1 or 2");
  require(cfg.omega_min > 0.0, "omega_min must be > 0");
  require(cfg.omega_start >= cfg.omega_min, "omega_start must be >= omega_min");
  require(cfg.omega_half_life > 0.0, "omega half-life must be > 0");
  require(cfg.epochs >= 1, "epochs must be >= 1");
  require(cfg.learning_rate > 0.0, "learning rate must be > 0");
}

double OmegaAt(int epoch, const OptimizerConfig& cfg) {
  if (epoch < 1) throw std::invalid_argument("epoch must be >= 1");
  return std::max(cfg.omega_start / std::exp2(epoch / cfg.omega_half_life),
                  cfg.omega_min);
}

int DefaultSigmoidCount(int half_bins) {
  return std::max(10, 2 * half_bins - 1);
}

NoiseModelParams InitialParams(double range, int sigmoid_count,
                               double steepness, RandomStream& rng) {
  if (sigmoid_count < 1) throw std::invalid_argument("need at least one sigmoid");
  if (!(steepness > 0.0)) throw std::invalid_argument("steepness must be > 0");
  NoiseModelParams p;
  const int count = sigmoid_count + 1;
  p.steepness = steepness;
  p.a = rng.Uniform(0.5, 1.5);
  p.b.resize(count);
  for (double& b : p.b) b = rng.Uniform(0.0, 1.0);
  p.knots.resize(count);
  const double slice = range / count;
  for (int j = 0; j < count; ++j) {
    p.knots[j] = -range + (j + rng.Uniform01()) * slice;
  }
  return p;
}

double ModelLoss(const NoiseModelParams& params, const NoiseGrid& grid,
                 const OptimizerConfig& cfg, double omega) {
  return NoiseLoss(EvaluateNoiseModel(params, grid), cfg.epsilon,
                   cfg.sensitivity, cfg.gamma, omega);
}

std::vector<double> ModelLossGradient(const NoiseModelParams& params,
                                      const NoiseGrid& grid,
                                      const OptimizerConfig& cfg, double omega,
                                      double relative_step) {
  std::vector<double> theta = Pack(params);
  std::vector<double> grad(theta.size());
  NoiseModelParams probe = params;
  for (size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    const double h = relative_step * std::max(1.0, std::abs(saved));
    theta[i] = saved + h;
    Unpack(theta, probe);
    const double up = ModelLoss(probe, grid, cfg, omega);
    theta[i] = saved - h;
    Unpack(theta, probe);
    const double down = ModelLoss(probe, grid, cfg, omega);
    theta[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

OptimizationResult OptimizeDistribution(const OptimizerConfig& cfg,
                                        double range, int half_bins,
                                        int sigmoid_count, double steepness) {
  ValidateConfig(cfg);
  const NoiseGrid grid = BuildGrid(range, half_bins);
  SensitivityShift(grid, cfg.sensitivity);

  RandomStream rng(cfg.seed);
  NoiseModelParams params = InitialParams(range, sigmoid_count, steepness, rng);

  auto floor_loss = [&](const NoiseModelParams& p) {
    const double loss = ModelLoss(p, grid, cfg, cfg.omega_min);
    if (!std::isfinite(loss)) {
      throw OptimizerDivergedError("noise optimizer produced a non-finite loss");
    }
    return loss;
  };

  OptimizationResult result;
  result.params = params;
  result.initial_loss = floor_loss(params);
  result.best_loss = result.initial_loss;

  std::vector<double> theta = Pack(params);
  std::vector<double> first(theta.size(), 0.0);
  std::vector<double> second(theta.size(), 0.0);
  double rate = cfg.learning_rate;
  int since_improvement = 0;
  double best_scheduled = std::numeric_limits<double>::infinity();
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double omega = OmegaAt(epoch, cfg);
    const std::vector<double> grad =
        ModelLossGradient(params, grid, cfg, omega);
    const double c1 = 1.0 - std::pow(kBeta1, epoch);
    const double c2 = 1.0 - std::pow(kBeta2, epoch);
    for (size_t i = 0; i < theta.size(); ++i) {
      first[i] = kBeta1 * first[i] + (1.0 - kBeta1) * grad[i];
      second[i] = kBeta2 * second[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      theta[i] -= rate * (first[i] / c1) / (std::sqrt(second[i] / c2) + kAdamEps);
    }
    Unpack(theta, params);

    double loss;
    try {
      loss = floor_loss(params);
    } catch (const std::invalid_argument& e) {
      throw OptimizerDivergedError(std::string("noise optimizer diverged: ") +
                                   e.what());
    }
    if (loss < result.best_loss) {
      result.best_loss = loss;
      result.best_epoch = epoch;
      result.params = params;
    }
    const double scheduled = ModelLoss(params, grid, cfg, omega);
    if (scheduled < best_scheduled) {
      best_scheduled = scheduled;
      since_improvement = 0;
    } else if (++since_improvement >= kPatience) {
      rate *= 0.5;
      since_improvement = 0;
    }
  }

  result.distribution = EvaluateNoiseModel(result.params, grid);
  result.distribution.epsilon = cfg.epsilon;
  result.distribution.sensitivity = cfg.sensitivity;
  result.distribution.delta =
      DeltaOf(result.distribution, cfg.epsilon, cfg.sensitivity);
  return result;
}

}  // namespace dpzono
