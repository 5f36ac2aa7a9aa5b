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

#include "dpzono/estimator.h"

#include <stdexcept>
#include <string>

namespace dpzono {
namespace {

Zonotope CorrectImpl(const Zonotope& predicted, const Vector& measurements,
                     const PlantModel& model, const WeightMatrix& weights,
                     const Zonotope* privacy_noise) {
  const Eigen::Index n = predicted.dimension();
  const Eigen::Index m = model.sensor_count();
  if (model.sensor_rows.cols() != n) {
    throw std::invalid_argument("correction: sensor rows do not match state");
  }
  if (static_cast<Eigen::Index>(model.measurement_noise.size()) != m) {
    throw std::invalid_argument("correction: one noise set per sensor needed");
  }
  if (measurements.size() != m) {
    throw std::invalid_argument("correction: expected " + std::to_string(m) +
                                " measurements, got " +
                                std::to_string(measurements.size()));
  }
  if (weights.gains.rows() != n || weights.gains.cols() != m) {
    throw std::invalid_argument("correction: weight matrix must be n x m");
  }
  if (privacy_noise != nullptr && privacy_noise->dimension() != 1) {
    throw std::invalid_argument("correction: privacy noise must be 1-D");
  }

  const Matrix& lambda = weights.gains;
  Vector center = predicted.center();
  Eigen::Index extra_cols = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Zonotope& noise = model.measurement_noise[i];
    double innovation = measurements[i] -
                        model.sensor_rows.row(i).dot(predicted.center()) -
                        noise.center()[0];
    extra_cols += noise.num_generators();
    if (privacy_noise != nullptr) {
      innovation -= privacy_noise->center()[0];
      extra_cols += privacy_noise->num_generators();
    }
    center += lambda.col(i) * innovation;
  }

  const Matrix shrink = Matrix::Identity(n, n) - lambda * model.sensor_rows;
  Matrix g(n, predicted.num_generators() + extra_cols);
  g.leftCols(predicted.num_generators()) = shrink * predicted.generators();
  Eigen::Index col = predicted.num_generators();
  for (Eigen::Index i = 0; i < m; ++i) {
    const Matrix& gv = model.measurement_noise[i].generators();
    g.middleCols(col, gv.cols()) = lambda.col(i) * gv;
    col += gv.cols();
    if (privacy_noise != nullptr) {
      const Matrix& gp = privacy_noise->generators();
      g.middleCols(col, gp.cols()) = lambda.col(i) * gp;
      col += gp.cols();
    }
  }
  return Zonotope(std::move(center), std::move(g));
}

}  // namespace

void ValidateModel(const PlantModel& model) {
  const Eigen::Index n = model.transition.rows();
  if (n < 1 || model.transition.cols() != n) {
    throw std::invalid_argument("plant model: F must be square and non-empty");
  }
  if (model.sensor_count() < 1) {
    throw std::invalid_argument("plant model: need at least one sensor");
  }
  if (model.sensor_rows.cols() != n) {
    throw std::invalid_argument("plant model: H rows must have n columns");
  }
  if (static_cast<Eigen::Index>(model.measurement_noise.size()) !=
      model.sensor_count()) {
    throw std::invalid_argument(
        "plant model: need one measurement noise zonotope per sensor");
  }
  for (const Zonotope& z : model.measurement_noise) {
    if (z.dimension() != 1) {
      throw std::invalid_argument(
          "plant model: measurement noise zonotopes must be 1-D");
    }
  }
  if (model.process_noise.dimension() != n ||
      model.initial_state.dimension() != n) {
    throw std::invalid_argument(
        "plant model: process noise and initial set must have dimension n");
  }
  if (!model.transition.allFinite() || !model.sensor_rows.allFinite()) {
    throw std::invalid_argument("plant model: non-finite F or H");
  }
}

Zonotope Predict(const Zonotope& corrected, const Matrix& transition,
                 const Zonotope& process_noise) {
  return MinkowskiSum(LinearMap(transition, corrected), process_noise);
}

WeightMatrix OptimalWeights(const Matrix& predicted_generators,
                            const Matrix& sensor_rows,
                            const Vector& noise_norms) {
  const Eigen::Index n = predicted_generators.rows();
  const Eigen::Index m = sensor_rows.rows();
  if (sensor_rows.cols() != n || noise_norms.size() != m) {
    throw std::invalid_argument("optimal weights: dimension mismatch");
  }
  if (!predicted_generators.allFinite() || !sensor_rows.allFinite() ||
      !noise_norms.allFinite() || (noise_norms.array() < 0.0).any()) {
    throw std::invalid_argument(
        "optimal weights: inputs must be finite, noise norms >= 0");
  }

  const Matrix q = predicted_generators * predicted_generators.transpose();
  const Matrix hq = sensor_rows * q;
  Matrix system = hq * sensor_rows.transpose();
  system.diagonal() += noise_norms;

  WeightMatrix out{Matrix::Zero(n, m)};
  const double trace = system.trace();
  if (!(trace > 0.0)) return out;

  // Lambda^T = S^-1 H Q since S and Q are symmetric.
  Eigen::LLT<Matrix> llt(system);
  Matrix solution;
  if (llt.info() == Eigen::Success) solution = llt.solve(hq);
  if (llt.info() != Eigen::Success || !solution.allFinite()) {
    system.diagonal().array() += 1e-12 * trace;
    llt.compute(system);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("optimal weights: singular system");
    }
    solution = llt.solve(hq);
  }
  out.gains = solution.transpose();
  return out;
}

Vector NoiseGeneratorNorms(const PlantModel& model) {
  Vector out(model.sensor_count());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] = model.measurement_noise[i].generators().squaredNorm();
  }
  return out;
}

Vector NoiseGeneratorNorms(const PlantModel& model,
                           const Zonotope& privacy_noise) {
  Vector out = NoiseGeneratorNorms(model);
  out.array() += privacy_noise.generators().squaredNorm();
  return out;
}

Zonotope Correct(const Zonotope& predicted, const Vector& measurements,
                 const PlantModel& model, const WeightMatrix& weights) {
  return CorrectImpl(predicted, measurements, model, weights, nullptr);
}

Zonotope CorrectDp(const Zonotope& predicted,
                   const Vector& private_measurements, const PlantModel& model,
                   const Zonotope& privacy_noise, const WeightMatrix& weights) {
  return CorrectImpl(predicted, private_measurements, model, weights,
                     &privacy_noise);
}

Zonotope CorrectDpOptimal(const Zonotope& predicted,
                          const Vector& private_measurements,
                          const PlantModel& model,
                          const Zonotope& privacy_noise) {
  const WeightMatrix weights =
      OptimalWeights(predicted.generators(), model.sensor_rows,
                     NoiseGeneratorNorms(model, privacy_noise));
  return CorrectDp(predicted, private_measurements, model, privacy_noise,
                   weights);
}

Zonotope CorrectOptimal(const Zonotope& predicted, const Vector& measurements,
                        const PlantModel& model) {
  const WeightMatrix weights = OptimalWeights(
      predicted.generators(), model.sensor_rows, NoiseGeneratorNorms(model));
  return Correct(predicted, measurements, model, weights);
}

}  // namespace dpzono
