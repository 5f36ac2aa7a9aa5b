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

#include "dpzono/simulation.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dpzono {

void ValidateSimConfig(const SimConfig& cfg) {
  ValidateModel(cfg.model);
  if (cfg.steps < 1) throw std::invalid_argument("sim config: steps must be >= 1");
  if (cfg.runs < 1) throw std::invalid_argument("sim config: runs must be >= 1");
  if (cfg.reduction_order < 1) {
    throw std::invalid_argument("sim config: reduction_order must be >= 1");
  }
  if (cfg.x0_true.size() != cfg.model.state_dim() || !cfg.x0_true.allFinite()) {
    throw std::invalid_argument("sim config: x0_true must have dimension n");
  }
  if (cfg.dp) {
    if (!(cfg.dp->epsilon > 0.0)) {
      throw std::invalid_argument("sim config: dp.epsilon must be > 0");
    }
    SensitivityShift(BuildGrid(cfg.dp->range, cfg.dp->half_bins),
                     cfg.dp->sensitivity);
  }
}

SimConfig TrackingExperimentConfig() {
  constexpr int kSensors = 8;
  SimConfig cfg;
  cfg.x0_true = Vector(2);
  cfg.x0_true << 10.0, 0.0;

  PlantModel& model = cfg.model;
  model.transition = Matrix(2, 2);
  model.transition << 0.9920, -0.1247, 0.1247, 0.9920;
  model.sensor_rows = Matrix::Zero(kSensors, 2);
  Matrix gv(1, 2);
  gv << 0.01, 0.02;
  for (int i = 0; i < kSensors; ++i) {
    // Sensor i + 1 (1-based): odd indices see x1, even indices see x2.
    model.sensor_rows(i, i % 2) = 1.0;
    model.measurement_noise.emplace_back(Vector::Zero(1), gv);
  }
  model.process_noise = Zonotope(Vector::Zero(2), 0.5 * Matrix::Identity(2, 2));
  model.initial_state = Zonotope(cfg.x0_true, 15.0 * Matrix::Identity(2, 2));
  cfg.dp = DpSettings{};
  return cfg;
}

RandomStream PlantStream(uint64_t seed, uint64_t run) {
  return RandomStream::Substream(seed, 2 * run);
}

RandomStream PrivacyStream(uint64_t seed, uint64_t run) {
  return RandomStream::Substream(seed, 2 * run + 1);
}

PlantTrajectory SimulatePlant(const SimConfig& cfg, RandomStream& rng) {
  const PlantModel& model = cfg.model;
  PlantTrajectory out;
  out.states.reserve(cfg.steps);
  out.measurements.reserve(cfg.steps);
  Vector x = cfg.x0_true;
  for (int k = 0; k < cfg.steps; ++k) {
    Vector y = model.sensor_rows * x;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      y[i] += SamplePoint(model.measurement_noise[i], rng)[0];
    }
    out.states.push_back(x);
    out.measurements.push_back(std::move(y));
    x = model.transition * x + SamplePoint(model.process_noise, rng);
  }
  return out;
}

Zonotope Privatizer::NoiseSet() const {
  Vector c(1);
  c << center;
  Matrix g(1, 1);
  g << half_width;
  return Zonotope(std::move(c), std::move(g));
}

Privatizer OptimalNoisePrivatizer(const TruncatedNoiseDistribution& dist) {
  Privatizer p;
  p.center = 0.0;
  p.half_width = dist.grid.range;
  p.draw = [dist](int m, RandomStream& rng) { return SampleNoise(dist, m, rng); };
  return p;
}

Privatizer LaplacePrivatizer(double range, double epsilon,
                             double sensitivity) {
  Privatizer p;
  p.center = 0.0;
  p.half_width = range;
  p.draw = [=](int m, RandomStream& rng) {
    return SampleTruncatedLaplace(range, epsilon, sensitivity, m, rng);
  };
  return p;
}

Vector PrivatizeMeasurements(const Vector& measurements,
                             const TruncatedNoiseDistribution& dist,
                             RandomStream& rng) {
  const std::vector<double> noise =
      SampleNoise(dist, static_cast<int>(measurements.size()), rng);
  Vector out = measurements;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += noise[i];
  return out;
}

std::vector<TraceRecord> RunEstimation(const SimConfig& cfg,
                                       const Privatizer* privatizer,
                                       uint64_t run) {
  ValidateSimConfig(cfg);
  const PlantModel& model = cfg.model;
  RandomStream plant_rng = PlantStream(cfg.seed, run);
  RandomStream privacy_rng = PrivacyStream(cfg.seed, run);
  const PlantTrajectory plant = SimulatePlant(cfg, plant_rng);

  std::optional<Zonotope> privacy_set;
  Vector privacy_norms;
  if (privatizer != nullptr) {
    privacy_set = privatizer->NoiseSet();
    privacy_norms = NoiseGeneratorNorms(model, *privacy_set);
  }
  const Vector plain_norms = NoiseGeneratorNorms(model);
  const int m = static_cast<int>(model.sensor_count());

  std::vector<TraceRecord> trace;
  trace.reserve(cfg.steps);
  Zonotope predicted = model.initial_state;
  for (int k = 0; k < cfg.steps; ++k) {
    TraceRecord rec{k,
                    plant.states[k],
                    plant.measurements[k],
                    plant.measurements[k],
                    predicted,
                    predicted,
                    0.0,
                    false};
    if (privatizer != nullptr) {
      // Sensor manager: release y + phi.
      const std::vector<double> noise = privatizer->draw(m, privacy_rng);
      for (int i = 0; i < m; ++i) rec.private_measurements[i] += noise[i];
      // Cloud estimator: only sees the privatized vector.
      const WeightMatrix weights = OptimalWeights(
          predicted.generators(), model.sensor_rows, privacy_norms);
      rec.corrected = CorrectDp(predicted, rec.private_measurements, model,
                                *privacy_set, weights);
    } else {
      const WeightMatrix weights = OptimalWeights(
          predicted.generators(), model.sensor_rows, plain_norms);
      rec.corrected =
          Correct(predicted, rec.private_measurements, model, weights);
    }
    rec.error = (rec.true_state - rec.corrected.center()).norm();
    rec.contained = ContainsPoint(rec.corrected, rec.true_state);
    predicted = ReduceOrder(
        Predict(rec.corrected, model.transition, model.process_noise),
        cfg.reduction_order);
    trace.push_back(std::move(rec));
  }
  return trace;
}

std::vector<TraceRecord> RunPrivateEstimation(
    const SimConfig& cfg, const TruncatedNoiseDistribution& dist,
    uint64_t run) {
  const Privatizer privatizer = OptimalNoisePrivatizer(dist);
  return RunEstimation(cfg, &privatizer, run);
}

std::vector<TraceRecord> RunNonPrivateEstimation(const SimConfig& cfg,
                                                 uint64_t run) {
  return RunEstimation(cfg, nullptr, run);
}

namespace {

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  long contained = 0;
  long count = 0;

  void Add(const std::vector<TraceRecord>& trace) {
    for (const TraceRecord& r : trace) {
      sum += r.error;
      sum_sq += r.error * r.error;
      contained += r.contained ? 1 : 0;
      ++count;
    }
  }

  RunSummary Finish(int runs, int steps) const {
    RunSummary s;
    s.runs = runs;
    s.steps = steps;
    if (count == 0) return s;
    s.mean_error = sum / count;
    s.std_error =
        std::sqrt(std::max(0.0, sum_sq / count - s.mean_error * s.mean_error));
    s.containment_rate = static_cast<double>(contained) / count;
    return s;
  }
};

}  // namespace

RunSummary Summarize(const std::vector<std::vector<TraceRecord>>& traces) {
  Accumulator acc;
  for (const auto& t : traces) acc.Add(t);
  const int steps = traces.empty() ? 0 : static_cast<int>(traces[0].size());
  return acc.Finish(static_cast<int>(traces.size()), steps);
}

RunSummary MonteCarlo(const SimConfig& cfg, const Privatizer* privatizer) {
  Accumulator acc;
  for (int run = 0; run < cfg.runs; ++run) {
    acc.Add(RunEstimation(cfg, privatizer, run));
  }
  return acc.Finish(cfg.runs, cfg.steps);
}

SweepResult Sweep(const SimConfig& cfg, const std::vector<double>& epsilons,
                  const std::vector<double>& ranges, int runs,
                  const OptimizerConfig& base, double sensitivity) {
  if (runs < 1) throw std::invalid_argument("sweep: runs must be >= 1");
  if (!(sensitivity > 0.0)) {
    throw std::invalid_argument("sweep: sensitivity must be > 0");
  }
  SweepResult out;
  out.epsilons = epsilons;
  out.ranges = ranges;
  SimConfig run_cfg = cfg;
  run_cfg.runs = runs;
  run_cfg.dp.reset();

  for (double eps : epsilons) {
    for (double range : ranges) {
      const double bins = range / sensitivity;
      const int half_bins = static_cast<int>(std::lround(bins));
      if (half_bins < 1 ||
          std::abs(bins - half_bins) > 1e-9 * std::max(1.0, bins)) {
        throw std::invalid_argument(
            "sweep: range " + std::to_string(range) +
            " is not a multiple of the sensitivity " +
            std::to_string(sensitivity));
      }
      OptimizerConfig opt = base;
      opt.epsilon = eps;
      opt.sensitivity = sensitivity;
      const OptimizationResult learned =
          OptimizeDistribution(opt, range, half_bins,
                               DefaultSigmoidCount(half_bins), 500.0);

      SweepCell cell;
      cell.epsilon = eps;
      cell.range = range;
      cell.delta = learned.distribution.delta;

      const Privatizer optimal = OptimalNoisePrivatizer(learned.distribution);
      const RunSummary opt_summary = MonteCarlo(run_cfg, &optimal);
      cell.mean_error = opt_summary.mean_error;
      cell.std_error = opt_summary.std_error;
      cell.containment_rate = opt_summary.containment_rate;

      cell.laplace_range = LaplaceRange(eps, cell.delta, sensitivity);
      const Privatizer laplace =
          LaplacePrivatizer(cell.laplace_range, eps, sensitivity);
      cell.laplace_mean_error = MonteCarlo(run_cfg, &laplace).mean_error;
      out.cells.push_back(cell);
    }
  }
  return out;
}

}  // namespace dpzono
