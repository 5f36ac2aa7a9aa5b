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

#ifndef DPZONO_NOISE_OPTIMIZER_H_
#define DPZONO_NOISE_OPTIMIZER_H_

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dpzono/noise.h"

namespace dpzono {

struct OptimizerConfig {
  double epsilon = 0.3;
  double sensitivity = 1.0;
  // Utility norm: 1 (mean |phi|) or 2 (RMS).
  int gamma = 1;
  double omega_start = 0.01;
  double omega_min = 0.001;
  // Epochs over which the utility weight halves.
  double omega_half_life = 500.0;
  int epochs = 5000;
  double learning_rate = 0.05;
  uint64_t seed = 0;
};

// Throws std::invalid_argument naming the first invalid field.
void ValidateConfig(const OptimizerConfig& cfg);

// max(omega_start / 2^(epoch / half_life), omega_min), epoch >= 1.
double OmegaAt(int epoch, const OptimizerConfig& cfg);

// max(10, 2N - 1): with 2N knots every gap between adjacent left-half grid
// points receives two sigmoid steps at initialization.
int DefaultSigmoidCount(int half_bins);

class OptimizerDivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Seeded initialization: a ~ U[0.5, 1.5], b_j ~ U[0, 1], and knots
// stratified over [-range, 0] (knot j uniform in the j-th of v + 1 equal
// slices).
NoiseModelParams InitialParams(double range, int sigmoid_count,
                               double steepness, RandomStream& rng);

// Loss of the distribution generated by `params` at utility weight `omega`.
double ModelLoss(const NoiseModelParams& params, const NoiseGrid& grid,
                 const OptimizerConfig& cfg, double omega);

// Central finite-difference gradient of ModelLoss in the order
// [a, b_0..b_v, knots_0..knots_v]. Each parameter theta is perturbed by
// relative_step * max(1, |theta|). The steepness is held fixed.
std::vector<double> ModelLossGradient(const NoiseModelParams& params,
                                      const NoiseGrid& grid,
                                      const OptimizerConfig& cfg, double omega,
                                      double relative_step = 1e-6);

struct OptimizationResult {
  NoiseModelParams params;
  // Distribution of the best iterate, with delta, epsilon and sensitivity set.
  TruncatedNoiseDistribution distribution;
  // Losses measured at the floor weight omega_min.
  double initial_loss = 0.0;
  double best_loss = 0.0;
  int best_epoch = 0;
};

// Gradient descent on the stacked-sigmoid parameters with Adam step scaling.
// The learning rate is halved after 100 epochs without a new low of the
// scheduled loss. Returns the iterate with the lowest loss at omega_min.
// Throws MisalignedSensitivityError when the sensitivity is off the grid
// lattice and OptimizerDivergedError on a non-finite loss.
OptimizationResult OptimizeDistribution(const OptimizerConfig& cfg,
                                        double range, int half_bins,
                                        int sigmoid_count, double steepness);

}  // namespace dpzono

#endif  // DPZONO_NOISE_OPTIMIZER_H_
