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

#include "dpzono/noise.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace dpzono {
namespace {

constexpr double kAlignmentTolerance = 1e-9;
constexpr double kSumTolerance = 1e-9;
constexpr double kShapeTolerance = 1e-12;

bool IsAligned(double ratio) {
  return std::abs(ratio - std::round(ratio)) <=
         kAlignmentTolerance * std::max(1.0, std::abs(ratio));
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string Format(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return buf;
}

}  // namespace

NoiseGrid BuildGrid(double range, int half_bins) {
  if (!(range > 0.0) || !std::isfinite(range)) {
    throw std::invalid_argument("noise range must be positive and finite");
  }
  if (half_bins < 1) {
    throw std::invalid_argument("half-bin count must be >= 1");
  }
  NoiseGrid grid;
  grid.range = range;
  grid.half_bins = half_bins;
  grid.step = range / half_bins;
  grid.points.resize(2 * half_bins);
  // Fill the left half and mirror it so that points[l] == -points[2N-1-l]
  // holds exactly.
  for (int l = 0; l < half_bins; ++l) {
    const double phi = -range + (l + 0.5) * grid.step;
    grid.points[l] = phi;
    grid.points[2 * half_bins - 1 - l] = -phi;
  }
  return grid;
}

TruncatedNoiseDistribution EvaluateNoiseModel(const NoiseModelParams& params,
                                              const NoiseGrid& grid) {
  if (params.b.size() != params.knots.size() || params.b.empty()) {
    throw std::invalid_argument(
        "noise model needs matching, non-empty B and F arrays");
  }
  bool finite = std::isfinite(params.a) && std::isfinite(params.steepness);
  for (size_t j = 0; j < params.b.size(); ++j) {
    finite = finite && std::isfinite(params.b[j]) &&
             std::isfinite(params.knots[j]);
  }
  if (!finite) throw std::invalid_argument("noise model has non-finite entry");

  const int n = grid.half_bins;
  std::vector<double> weight(n);
  for (int l = 0; l < n; ++l) {
    double w = params.a * params.a;
    for (size_t j = 0; j < params.b.size(); ++j) {
      w += params.b[j] * params.b[j] *
           Sigmoid(params.steepness * (grid.points[l] - params.knots[j]));
    }
    weight[l] = w;
  }

  // softmax(ln w) == w / sum(w); dividing by the largest weight first keeps
  // the sum well scaled.
  const double peak = *std::max_element(weight.begin(), weight.end());
  if (!(peak > 0.0)) {
    throw std::invalid_argument(
        "noise model weights are all zero (A = 0 and every B_j = 0)");
  }
  double total = 0.0;
  for (double& w : weight) {
    w /= peak;
    total += w;
  }

  TruncatedNoiseDistribution dist;
  dist.grid = grid;
  dist.mass.resize(2 * n);
  for (int l = 0; l < n; ++l) {
    const double p = 0.5 * weight[l] / total;
    dist.mass[l] = p;
    dist.mass[2 * n - 1 - l] = p;
  }
  return dist;
}

int NearestAlignedHalfBins(double range, double sensitivity, int half_bins) {
  constexpr int kSearchLimit = 100000;
  for (int offset = 0; offset < kSearchLimit; ++offset) {
    for (int candidate : {half_bins - offset, half_bins + offset}) {
      if (candidate < 1 || candidate > kSearchLimit) continue;
      if (IsAligned(sensitivity * candidate / range)) return candidate;
    }
  }
  return 0;
}

int SensitivityShift(const NoiseGrid& grid, double sensitivity) {
  if (!(sensitivity >= 0.0) || !std::isfinite(sensitivity)) {
    throw std::invalid_argument("sensitivity must be finite and >= 0");
  }
  const double ratio = sensitivity / grid.step;
  if (!IsAligned(ratio)) {
    const int suggestion =
        NearestAlignedHalfBins(grid.range, sensitivity, grid.half_bins);
    std::string msg =
        Format("sensitivity %g is not a multiple of the grid step %g", sensitivity,
               grid.step);
    if (suggestion > 0) {
      msg += "; nearest aligned bin count is N = " + std::to_string(suggestion);
    }
    throw MisalignedSensitivityError(msg, suggestion);
  }
  return static_cast<int>(std::lround(ratio));
}

double DeltaForShift(const std::vector<double>& mass, double epsilon,
                     int shift) {
  const double ratio = std::exp(epsilon);
  const int size = static_cast<int>(mass.size());
  double delta = 0.0;
  for (int l = 0; l < size; ++l) {
    const int shifted = l + shift;
    const double other = (shifted >= 0 && shifted < size) ? mass[shifted] : 0.0;
    delta += std::max(0.0, mass[l] - ratio * other);
  }
  return delta;
}

double DeltaOf(const TruncatedNoiseDistribution& dist, double epsilon,
               double sensitivity) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  return DeltaForShift(dist.mass, epsilon,
                       SensitivityShift(dist.grid, sensitivity));
}

double UtilityLoss(const TruncatedNoiseDistribution& dist, int gamma) {
  if (gamma != 1 && gamma != 2) {
    throw std::invalid_argument("utility norm gamma must be 1 or 2");
  }
  double moment = 0.0;
  for (size_t l = 0; l < dist.mass.size(); ++l) {
    const double a = std::abs(dist.grid.points[l]);
    moment += (gamma == 1 ? a : a * a) * dist.mass[l];
  }
  return gamma == 1 ? moment : std::sqrt(moment);
}

double NoiseLoss(const TruncatedNoiseDistribution& dist, double epsilon,
                 double sensitivity, int gamma, double omega) {
  return DeltaOf(dist, epsilon, sensitivity) +
         omega * UtilityLoss(dist, gamma);
}

std::vector<std::string> InvariantViolations(
    const TruncatedNoiseDistribution& dist) {
  std::vector<std::string> out;
  const int size = dist.grid.size();
  if (static_cast<int>(dist.mass.size()) != size ||
      static_cast<int>(dist.grid.points.size()) != size) {
    out.push_back("mass and grid sizes differ from 2N");
    return out;
  }
  double total = 0.0;
  for (int l = 0; l < size; ++l) {
    if (!(dist.mass[l] >= 0.0) || !std::isfinite(dist.mass[l])) {
      out.push_back("negative or non-finite mass at bin " + std::to_string(l));
    }
    total += dist.mass[l];
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    out.push_back(Format("mass sums to %.15g, not 1", total));
  }
  for (int l = 0; l < size / 2; ++l) {
    if (std::abs(dist.mass[l] - dist.mass[size - 1 - l]) > kShapeTolerance) {
      out.push_back("asymmetric mass at bins " + std::to_string(l) + " and " +
                    std::to_string(size - 1 - l));
    }
  }
  for (int l = size / 2; l + 1 < size; ++l) {
    if (dist.mass[l + 1] > dist.mass[l] + kShapeTolerance) {
      out.push_back("mass increases away from the center at bin " +
                    std::to_string(l + 1));
    }
  }
  return out;
}

std::vector<double> SampleNoise(const TruncatedNoiseDistribution& dist, int m,
                                RandomStream& rng) {
  std::vector<double> cdf(dist.mass.size());
  std::partial_sum(dist.mass.begin(), dist.mass.end(), cdf.begin());
  const double total = cdf.back();
  std::vector<double> out(m);
  for (double& x : out) {
    const double u = rng.Uniform01() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    // Skip zero-mass bins that share the CDF value of their predecessor.
    size_t bin = std::min<size_t>(it - cdf.begin(), cdf.size() - 1);
    while (dist.mass[bin] == 0.0 && bin > 0) --bin;
    x = dist.grid.points[bin];
  }
  return out;
}

TruncatedNoiseDistribution DiscretizedLaplace(const NoiseGrid& grid,
                                              double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
  TruncatedNoiseDistribution dist;
  dist.grid = grid;
  const int n = grid.half_bins;
  dist.mass.resize(2 * n);
  // Right-half bin j covers [j*step, (j+1)*step].
  std::vector<double> half(n);
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    half[j] = std::exp(-j * grid.step / scale) -
              std::exp(-(j + 1) * grid.step / scale);
    total += 2.0 * half[j];
  }
  for (int j = 0; j < n; ++j) {
    dist.mass[n + j] = half[j] / total;
    dist.mass[n - 1 - j] = half[j] / total;
  }
  return dist;
}

double LaplaceRange(double epsilon, double delta, double sensitivity) {
  if (!(epsilon > 0.0) || !(sensitivity > 0.0) || !(delta > 0.0) ||
      !(delta < 1.0)) {
    throw std::invalid_argument(
        "laplace range needs epsilon > 0, 0 < delta < 1, sensitivity > 0");
  }
  return sensitivity / epsilon *
         std::log1p(std::exp(epsilon) * -std::expm1(-epsilon) / (2.0 * delta));
}

double LaplaceDelta(double range, double epsilon, double sensitivity) {
  if (!(epsilon > 0.0) || !(sensitivity > 0.0) || !(range > 0.0)) {
    throw std::invalid_argument(
        "laplace delta needs positive range, epsilon and sensitivity");
  }
  return std::exp(epsilon) * -std::expm1(-epsilon) /
         (2.0 * std::expm1(range * epsilon / sensitivity));
}

std::vector<double> SampleTruncatedLaplace(double range, double epsilon,
                                           double sensitivity, int m,
                                           RandomStream& rng) {
  if (!(range > 0.0) || !(epsilon > 0.0) || !(sensitivity > 0.0)) {
    throw std::invalid_argument(
        "truncated laplace needs positive range, epsilon and sensitivity");
  }
  const double scale = sensitivity / epsilon;
  // |x| has density proportional to exp(-x / scale) on [0, range].
  const double tail = -std::expm1(-range / scale);
  std::vector<double> out(m);
  for (double& x : out) {
    const double sign = rng.Uniform01() < 0.5 ? -1.0 : 1.0;
    const double u = rng.Uniform01();
    const double magnitude = std::min(range, -scale * std::log1p(-u * tail));
    x = sign * magnitude;
  }
  return out;
}

}  // namespace dpzono
