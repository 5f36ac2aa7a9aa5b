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

#ifndef DPZONO_ESTIMATOR_H_
#define DPZONO_ESTIMATOR_H_

#include <vector>

#include "dpzono/zonotope.h"

namespace dpzono {

// Linear plant x_{k+1} = F x_k + w_k observed by m scalar sensors
// y^(i) = H^(i) x_k + v^(i), with w in process_noise and v^(i) in
// measurement_noise[i].
struct PlantModel {
  Matrix transition;
  // One 1 x n row per sensor, stacked into an m x n matrix.
  Matrix sensor_rows;
  Zonotope process_noise;
  // One-dimensional noise set per sensor.
  std::vector<Zonotope> measurement_noise;
  Zonotope initial_state;

  Eigen::Index state_dim() const { return transition.rows(); }
  Eigen::Index sensor_count() const { return sensor_rows.rows(); }
};

// Throws std::invalid_argument describing the first inconsistency.
void ValidateModel(const PlantModel& model);

// Fusion gains; column i is lambda^(i) (n x m, or n x m augmented in DP mode).
struct WeightMatrix {
  Matrix gains;
};

struct StateEstimate {
  Zonotope corrected;
  Zonotope predicted;
  int step = 0;
};

// F * corrected (+) process_noise.
Zonotope Predict(const Zonotope& corrected, const Matrix& transition,
                 const Zonotope& process_noise);

// Minimizer of ||[(I - Lambda H) G, lambda_1 Gv_1, ..., lambda_m Gv_m]||_F^2
// where noise_norms[i] = ||Gv_i||_F^2:
//   Lambda = Q H^T (H Q H^T + diag(noise_norms))^-1,  Q = G G^T.
// A ridge of 1e-12 * trace is added when the system is not positive
// definite. Throws std::invalid_argument on non-finite or negative input.
WeightMatrix OptimalWeights(const Matrix& predicted_generators,
                            const Matrix& sensor_rows,
                            const Vector& noise_norms);

// ||Gv_i||_F^2 for every sensor.
Vector NoiseGeneratorNorms(const PlantModel& model);

// ||[Gv_i, Gp]||_F^2 for every sensor.
Vector NoiseGeneratorNorms(const PlantModel& model,
                           const Zonotope& privacy_noise);

// Measurement update over the m sensor strips:
//   c = c_hat + sum_i lambda_i (y_i - H_i c_hat - c_v_i)
//   G = [(I - sum_i lambda_i H_i) G_hat, lambda_1 Gv_1, ..., lambda_m Gv_m]
Zonotope Correct(const Zonotope& predicted, const Vector& measurements,
                 const PlantModel& model, const WeightMatrix& weights);

// Measurement update with privatized measurements. Each sensor's noise set
// is widened to Zv_i (+) Zp:
//   c = c_hat + sum_i lambda_i (y_i - H_i c_hat - c_v_i - c_p)
//   G = [(I - sum_i lambda_i H_i) G_hat, lambda_1 [Gv_1, Gp], ...,
//        lambda_m [Gv_m, Gp]]
// Zp must be one-dimensional.
Zonotope CorrectDp(const Zonotope& predicted,
                   const Vector& private_measurements, const PlantModel& model,
                   const Zonotope& privacy_noise, const WeightMatrix& weights);

// Optimal weights followed by CorrectDp.
Zonotope CorrectDpOptimal(const Zonotope& predicted,
                          const Vector& private_measurements,
                          const PlantModel& model,
                          const Zonotope& privacy_noise);

// Optimal weights followed by Correct.
Zonotope CorrectOptimal(const Zonotope& predicted, const Vector& measurements,
                        const PlantModel& model);

}  // namespace dpzono

#endif  // DPZONO_ESTIMATOR_H_
