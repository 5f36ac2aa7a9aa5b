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

#ifndef DPZONO_NOISE_H_
#define DPZONO_NOISE_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "dpzono/random.h"

namespace dpzono {

// 2N equidistant, zero-free, symmetric noise values inside (-range, range):
// points[l] = -range + (l + 1/2) * step for l = 0 .. 2N-1, step = range / N.
struct NoiseGrid {
  double range = 0.0;
  int half_bins = 0;
  double step = 0.0;
  std::vector<double> points;

  int size() const { return 2 * half_bins; }
};

NoiseGrid BuildGrid(double range, int half_bins);

// Stacked-sigmoid model of the left half of the noise distribution:
//   r_l = ln[a^2 + sum_j b_j^2 * sigmoid(steepness * (phi_l - knots_j))].
// b and knots both hold v + 1 entries.
struct NoiseModelParams {
  double a = 1.0;
  std::vector<double> b;
  double steepness = 500.0;
  std::vector<double> knots;

  int sigmoid_count() const { return static_cast<int>(b.size()) - 1; }
};

// Symmetric discrete distribution on a NoiseGrid, with the delta it achieves
// at (epsilon, sensitivity).
struct TruncatedNoiseDistribution {
  NoiseGrid grid;
  std::vector<double> mass;
  double delta = 0.0;
  double epsilon = 0.0;
  double sensitivity = 0.0;
};

// Thrown when a sensitivity does not land on the grid lattice.
class MisalignedSensitivityError : public std::invalid_argument {
 public:
  MisalignedSensitivityError(const std::string& what, int suggested_half_bins)
      : std::invalid_argument(what), suggested_half_bins_(suggested_half_bins) {}

  // Closest half-bin count for which the sensitivity is aligned, or 0 if
  // none exists within the search window.
  int suggested_half_bins() const { return suggested_half_bins_; }

 private:
  int suggested_half_bins_;
};

// Softmax over the N left-half log-weights, halved and mirrored onto the
// right half. The delta field is left at zero. Throws std::invalid_argument
// if every left-half weight is zero or a parameter is non-finite.
TruncatedNoiseDistribution EvaluateNoiseModel(const NoiseModelParams& params,
                                              const NoiseGrid& grid);

// k = sensitivity / step, required to be an integer within 1e-9 relative.
int SensitivityShift(const NoiseGrid& grid, double sensitivity);

// Half-bin count nearest to `half_bins` that aligns `sensitivity` with the
// grid of the given range; 0 if none is found up to 100000.
int NearestAlignedHalfBins(double range, double sensitivity, int half_bins);

// Tight delta for a shift of `shift` bins (negative shifts allowed):
//   sum_l max(0, P_l - e^eps * P_{l+shift}), P outside the grid = 0.
double DeltaForShift(const std::vector<double>& mass, double epsilon,
                     int shift);

// Minimal delta for which the (epsilon, delta) subset inequality holds for
// the additive mechanism with the given sensitivity.
double DeltaOf(const TruncatedNoiseDistribution& dist, double epsilon,
               double sensitivity);

// (sum_l |phi_l|^gamma P_l)^(1/gamma), gamma in {1, 2}.
double UtilityLoss(const TruncatedNoiseDistribution& dist, int gamma);

// delta + omega * U.
double NoiseLoss(const TruncatedNoiseDistribution& dist, double epsilon,
                 double sensitivity, int gamma, double omega);

// Descriptions of every violated distribution, symmetry or monotonicity
// invariant. Empty when the distribution is valid.
std::vector<std::string> InvariantViolations(
    const TruncatedNoiseDistribution& dist);

// IID draws of grid points by inverse CDF.
std::vector<double> SampleNoise(const TruncatedNoiseDistribution& dist, int m,
                                RandomStream& rng);

// Laplace(scale) density integrated over each bin and renormalized on the
// grid. Used as a comparison baseline.
TruncatedNoiseDistribution DiscretizedLaplace(const NoiseGrid& grid,
                                              double scale);

// Range a of the truncated Laplace mechanism that reaches delta:
//   a = (s / eps) * ln(1 + e^eps * (1 - e^-eps) / (2 delta)).
double LaplaceRange(double epsilon, double delta, double sensitivity);

// Inverse of LaplaceRange in delta.
double LaplaceDelta(double range, double epsilon, double sensitivity);

// IID draws from Laplace(0, sensitivity / epsilon) restricted to
// [-range, range].
std::vector<double> SampleTruncatedLaplace(double range, double epsilon,
                                           double sensitivity, int m,
                                           RandomStream& rng);

}  // namespace dpzono

#endif  // DPZONO_NOISE_H_
