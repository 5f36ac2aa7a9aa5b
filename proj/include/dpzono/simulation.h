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

#ifndef DPZONO_SIMULATION_H_
#define DPZONO_SIMULATION_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dpzono/estimator.h"
#include "dpzono/noise.h"
#include "dpzono/noise_optimizer.h"
#include "dpzono/random.h"
#include "dpzono/zonotope.h"

namespace dpzono {

struct DpSettings {
  double epsilon = 0.3;
  double range = 7.0;
  int half_bins = 7;
  double sensitivity = 1.0;
};

struct SimConfig {
  PlantModel model;
  int steps = 200;
  int runs = 30;
  uint64_t seed = 0;
  std::optional<DpSettings> dp;
  int reduction_order = 20;
  Vector x0_true;
};

// Throws std::invalid_argument on an inconsistent configuration, including
// a DP section whose sensitivity is off the grid lattice.
void ValidateSimConfig(const SimConfig& cfg);

// The circular-motion tracking setup: 8 sensors alternating H = [1 0]
// (odd sensor index, 1-based) and [0 1] (even), Zv = <0, [0.01 0.02]>,
// Zw = <0, 0.5 I>, Z0 = <x0, 15 I>, x0 = [10, 0]. DP at eps 0.3, d 7,
// N 7, s 1.
SimConfig TrackingExperimentConfig();

// Random streams of Monte-Carlo run r: the plant uses
// Substream(seed, 2r) and the privacy mechanism Substream(seed, 2r + 1),
// so paired private and non-private runs see identical plant trajectories.
RandomStream PlantStream(uint64_t seed, uint64_t run);
RandomStream PrivacyStream(uint64_t seed, uint64_t run);

struct PlantTrajectory {
  // states[k] is x_k; states[0] = x0_true.
  std::vector<Vector> states;
  std::vector<Vector> measurements;
};

// x_{k+1} = F x_k + w_k and y_k^(i) = H^(i) x_k + v_k^(i), with every
// disturbance sampled from its zonotope.
PlantTrajectory SimulatePlant(const SimConfig& cfg, RandomStream& rng);

// Noise the sensor manager adds to every measurement, together with the
// interval <center, half_width> the estimator uses to bound it.
struct Privatizer {
  double center = 0.0;
  double half_width = 0.0;
  std::function<std::vector<double>(int, RandomStream&)> draw;

  Zonotope NoiseSet() const;
};

// Optimal truncated noise; bounded by <0, [range]>.
Privatizer OptimalNoisePrivatizer(const TruncatedNoiseDistribution& dist);

// Truncated Laplace noise on [-range, range].
Privatizer LaplacePrivatizer(double range, double epsilon,
                             double sensitivity);

// y + IID noise drawn from `dist`.
Vector PrivatizeMeasurements(const Vector& measurements,
                             const TruncatedNoiseDistribution& dist,
                             RandomStream& rng);

struct TraceRecord {
  int step = 0;
  Vector true_state;
  Vector measurements;
  Vector private_measurements;
  Zonotope corrected;
  Zonotope predicted;
  // |x_k - corrected center|_2.
  double error = 0.0;
  bool contained = false;
};

// One run of the estimator loop. With a privatizer each step privatizes
// the measurements, computes optimal weights for the widened noise sets,
// applies CorrectDp, predicts and reduces order; without one it applies
// Correct. Starts from the predicted set Z0.
std::vector<TraceRecord> RunEstimation(const SimConfig& cfg,
                                       const Privatizer* privatizer,
                                       uint64_t run);

std::vector<TraceRecord> RunPrivateEstimation(
    const SimConfig& cfg, const TruncatedNoiseDistribution& dist,
    uint64_t run = 0);

std::vector<TraceRecord> RunNonPrivateEstimation(const SimConfig& cfg,
                                                 uint64_t run = 0);

struct RunSummary {
  double mean_error = 0.0;
  double std_error = 0.0;
  double containment_rate = 0.0;
  int runs = 0;
  int steps = 0;
};

// Error statistics pooled over every step of every trace.
RunSummary Summarize(const std::vector<std::vector<TraceRecord>>& traces);

// cfg.runs independent runs, aggregated in run-index order.
RunSummary MonteCarlo(const SimConfig& cfg, const Privatizer* privatizer);

struct SweepCell {
  double epsilon = 0.0;
  double range = 0.0;
  double delta = 0.0;
  double mean_error = 0.0;
  double std_error = 0.0;
  double containment_rate = 0.0;
  double laplace_range = 0.0;
  double laplace_mean_error = 0.0;
};

struct SweepResult {
  std::vector<double> epsilons;
  std::vector<double> ranges;
  // Row-major: cells[i * ranges.size() + j] is (epsilons[i], ranges[j]).
  std::vector<SweepCell> cells;

  const SweepCell& at(size_t eps_index, size_t range_index) const {
    return cells[eps_index * ranges.size() + range_index];
  }
};

// For every (epsilon, range) pair: optimize a distribution on the grid with
// step = sensitivity (N = range / sensitivity), run `runs` Monte-Carlo
// estimations with it, then run the same seeds with truncated Laplace noise
// whose range reaches the same delta. `base` supplies the optimizer
// hyperparameters; its epsilon and sensitivity are overridden per cell.
SweepResult Sweep(const SimConfig& cfg, const std::vector<double>& epsilons,
                  const std::vector<double>& ranges, int runs,
                  const OptimizerConfig& base, double sensitivity);

}  // namespace dpzono

#endif  // DPZONO_SIMULATION_H_
