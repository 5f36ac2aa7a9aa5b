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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Usage: acceptance <cli-binary> <source-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dpzono/estimator.h"
#include "dpzono/noise.h"
#include "dpzono/noise_optimizer.h"
#include "dpzono/random.h"
#include "dpzono/simulation.h"
#include "dpzono/zonotope.h"
#include "json.hpp"
#include "oracles.h"

namespace dpzono {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using ::dpzono::testing::BruteForceDelta;
using ::dpzono::testing::CorrectedFrobenius;
using ::dpzono::testing::RandomMatrix;
using ::dpzono::testing::RandomMonotoneDistribution;
using ::dpzono::testing::RandomVector;

int failures = 0;

Matrix NonZeroColumns(const Matrix& g) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    if (g.col(j).cwiseAbs().maxCoeff() > 0.0) keep.push_back(j);
  }
  Matrix out(g.rows(), static_cast<Eigen::Index>(keep.size()));
  for (size_t j = 0; j < keep.size(); ++j) out.col(j) = g.col(keep[j]);
  return out;
}

void Report(int id, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << detail
            << std::endl;
  if (!pass) ++failures;
}

std::string ReadAll(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Timed {
  int code;
  double seconds;
  std::string out;
};

Timed Shell(const std::string& cli, const std::string& args,
            const fs::path& stdout_file) {
  const std::string cmd =
      "\"" + cli + "\" " + args + " > \"" + stdout_file.string() + "\"";
  const auto start = std::chrono::steady_clock::now();
  const int status = std::system(cmd.c_str());
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return {status, secs, ReadAll(stdout_file)};
}

std::string Fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

void DeltaBand(const std::string& cli, const fs::path& dir) {
  const Timed lo = Shell(cli,
                         "noise-optimize --epsilon 0.3 --range 7 --bins 7 "
                         "--sensitivity 1 --out " + (dir / "n03.json").string(),
                         dir / "n03.out");
  const Timed hi = Shell(cli,
                         "noise-optimize --epsilon 0.7 --range 7 --bins 7 "
                         "--sensitivity 1 --out " + (dir / "n07.json").string(),
                         dir / "n07.out");
  if (lo.code != 0 || hi.code != 0) {
    Report(1, false, "noise-optimize exited non-zero");
    return;
  }
  const double d03 = json::parse(lo.out)["delta"].get<double>();
  const double d07 = json::parse(hi.out)["delta"].get<double>();
  const bool pass = d03 <= 0.0488 && d03 <= 1.0 / 14 && d07 <= 0.0076 &&
                    lo.seconds <= 60 && hi.seconds <= 60;
  Report(1, pass,
         "delta(0.3,7)=" + Fmt(d03) + " <= 0.0488, delta(0.7,7)=" + Fmt(d07) +
             " <= 0.0076, runtimes " + Fmt(lo.seconds) + "s/" +
             Fmt(hi.seconds) + "s <= 60s");
}

struct Row {
  double epsilon, d, delta, mean_error, std_error;
};

std::vector<Row> ParseSweep(const std::string& csv) {
  std::vector<Row> rows;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<double> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(std::stod(cell));
    rows.push_back({f[0], f[1], f[2], f[3], f[4]});
  }
  return rows;
}

const Row* Find(const std::vector<Row>& rows, double eps, double d) {
  for (const Row& r : rows) {
    if (r.epsilon == eps && r.d == d) return &r;
  }
  return nullptr;
}

// Returns the sweep rows for criterion 5.
std::vector<Row> SweepMonotone(const std::string& cli, const fs::path& config,
                               const fs::path& dir) {
  const Timed t = Shell(cli,
                        "sweep --config \"" + config.string() + "\" --out " +
                            (dir / "sweep.csv").string(),
                        dir / "sweep.out");
  if (t.code != 0) {
    Report(2, false, "sweep exited non-zero");
    return {};
  }
  const std::vector<Row> rows = ParseSweep(ReadAll(dir / "sweep.csv"));
  const std::vector<double> eps = {0.1, 0.3, 0.5, 0.7};
  const std::vector<double> ds = {3, 5, 7, 9, 11, 13, 15};
  int violations = 0, missing = 0;
  for (size_t i = 0; i < eps.size(); ++i) {
    for (size_t j = 0; j < ds.size(); ++j) {
      const Row* r = Find(rows, eps[i], ds[j]);
      if (r == nullptr) {
        ++missing;
        continue;
      }
      const Row* right = j + 1 < ds.size() ? Find(rows, eps[i], ds[j + 1]) : nullptr;
      const Row* below = i + 1 < eps.size() ? Find(rows, eps[i + 1], ds[j]) : nullptr;
      if (right && right->delta > r->delta) ++violations;
      if (below && below->delta > r->delta) ++violations;
    }
  }
  Report(2, rows.size() == 28 && missing == 0 && violations == 0 &&
                t.seconds <= 1800,
         std::to_string(rows.size()) + " cells, " + std::to_string(violations) +
             " monotonicity violations, runtime " + Fmt(t.seconds) +
             "s <= 1800s");
  return rows;
}

void LaplaceClosedForm() {
  const double range = LaplaceRange(0.3, 0.0244, 1.0);
  double worst = 0.0;
  for (double eps : {0.1, 0.3, 0.5, 0.7, 1.5}) {
    for (double delta : {1e-6, 1e-3, 0.0244, 0.1, 0.4}) {
      for (double s : {0.5, 1.0, 2.0}) {
        const double back = LaplaceDelta(LaplaceRange(eps, delta, s), eps, s);
        worst = std::max(worst, std::abs(back - delta) / delta);
      }
    }
  }
  Report(3, std::abs(range - 7.0011) <= 1e-3 && worst <= 1e-12,
         "laplace_range(0.3,0.0244,1)=" + Fmt(range) +
             ", worst round-trip relative error " + Fmt(worst));
}

void Containment() {
  SimConfig cfg = TrackingExperimentConfig();
  const RunSummary plain = MonteCarlo(cfg, nullptr);
  OptimizerConfig opt;
  opt.epsilon = cfg.dp->epsilon;
  opt.sensitivity = cfg.dp->sensitivity;
  opt.seed = cfg.seed;
  const int n = cfg.dp->half_bins;
  const OptimizationResult noise =
      OptimizeDistribution(opt, cfg.dp->range, n, DefaultSigmoidCount(n), 500.0);
  const Privatizer priv = OptimalNoisePrivatizer(noise.distribution);
  const RunSummary dp = MonteCarlo(cfg, &priv);
  Report(4, plain.containment_rate == 1.0 && dp.containment_rate == 1.0 &&
                plain.runs == 30 && plain.steps == 200,
         "containment without DP " + Fmt(plain.containment_rate) + ", with DP " +
             Fmt(dp.containment_rate) + " over " + std::to_string(dp.runs) +
             "x" + std::to_string(dp.steps));
}

void UtilityTrend(const std::vector<Row>& rows, int runs) {
  const std::vector<double> ds = {3, 7, 11, 15};
  bool pass = true;
  std::string detail = "eps 0.3 errors";
  for (size_t j = 0; j < ds.size(); ++j) {
    const Row* r = Find(rows, 0.3, ds[j]);
    if (r == nullptr) {
      Report(5, false, "missing sweep row");
      return;
    }
    detail += " " + Fmt(r->mean_error);
    if (j == 0) continue;
    const Row* prev = Find(rows, 0.3, ds[j - 1]);
    const double pooled = std::sqrt(
        (prev->std_error * prev->std_error + r->std_error * r->std_error) / runs);
    if (r->mean_error < prev->mean_error - pooled) pass = false;
  }
  Report(5, pass, detail + " non-decreasing within pooled standard error");
}

void DpConsistency() {
  RandomStream rng(101);
  const Zonotope zero_noise(Vector::Zero(1), Matrix::Zero(1, 1));
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 1 + trial % 6;
    PlantModel model;
    model.transition = RandomMatrix(2, 2, rng);
    model.sensor_rows = RandomMatrix(m, 2, rng);
    model.process_noise = Zonotope(Vector::Zero(2), RandomMatrix(2, 2, rng, 0, 0.3));
    for (int i = 0; i < m; ++i) {
      model.measurement_noise.emplace_back(RandomVector(1, rng, -0.2, 0.2),
                                           RandomMatrix(1, 1 + i % 2, rng, -0.5, 0.5));
    }
    model.initial_state = Zonotope(Vector::Zero(2), Matrix::Identity(2, 2));
    const Zonotope zhat(RandomVector(2, rng, -5, 5), RandomMatrix(2, 3, rng, -2, 2));
    const Vector y = RandomVector(m, rng, -5, 5);
    const WeightMatrix w = OptimalWeights(zhat.generators(), model.sensor_rows,
                                          NoiseGeneratorNorms(model, zero_noise));
    const WeightMatrix w_plain = OptimalWeights(
        zhat.generators(), model.sensor_rows, NoiseGeneratorNorms(model));
    const Zonotope plain = Correct(zhat, y, model, w_plain);
    const Zonotope dp = CorrectDp(zhat, y, model, zero_noise, w);
    // Each sensor block carries one zero privacy generator.
    const bool same = w.gains == w_plain.gains &&
                      plain.center() == dp.center() &&
                      NonZeroColumns(plain.generators()) ==
                          NonZeroColumns(dp.generators());
    if (!same) ++mismatches;
  }
  Report(6, mismatches == 0,
         std::to_string(mismatches) + " of 1000 instances differ from the "
                                      "plain update");
}

void DeltaOracle() {
  RandomStream rng(202);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 7;
    const int shift = 1 + trial % 2;
    const TruncatedNoiseDistribution dist =
        RandomMonotoneDistribution(static_cast<double>(n), n, rng);
    const double eps = rng.Uniform(0.05, 1.5);
    const double got = DeltaOf(dist, eps, shift * dist.grid.step);
    worst = std::max(worst, std::abs(got - BruteForceDelta(dist.mass, eps, shift)));
  }
  Report(7, worst <= 1e-12,
         "worst |delta - exhaustive| over 100 distributions " + Fmt(worst));
}

void WeightOptimality() {
  RandomStream rng(303);
  int beaten = 0;
  double worst_deriv = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + trial % 4;
    const Matrix g = RandomMatrix(2, 2 + trial % 5, rng);
    const Matrix h = RandomMatrix(m, 2, rng);
    const Vector v = RandomVector(m, rng, 0.0, 1.0);
    const Matrix best = OptimalWeights(g, h, v).gains;
    const double cost = std::sqrt(CorrectedFrobenius(g, h, v, best));
    for (int k = 0; k < 1000; ++k) {
      Matrix dir = RandomMatrix(2, m, rng);
      dir /= dir.norm();
      if (std::sqrt(CorrectedFrobenius(g, h, v, best + 1e-3 * dir)) < cost) {
        ++beaten;
      }
      if (k < 100) {
        const double step = 1e-5;
        const double deriv = (CorrectedFrobenius(g, h, v, best + step * dir) -
                              CorrectedFrobenius(g, h, v, best - step * dir)) /
                             (2 * step);
        worst_deriv = std::max(worst_deriv, std::abs(deriv));
      }
    }
  }
  Report(8, beaten == 0 && worst_deriv <= 1e-6,
         std::to_string(beaten) + " of 100000 perturbations improve, worst "
                                  "directional derivative " + Fmt(worst_deriv));
}

void Determinism(const std::string& cli, const fs::path& config,
                 const fs::path& dir) {
  const std::string base = "simulate --config \"" + config.string() + "\" --out ";
  const Timed a = Shell(cli, base + (dir / "t1.csv").string(), dir / "t1.out");
  const Timed b = Shell(cli, base + (dir / "t2.csv").string(), dir / "t2.out");
  const std::string ta = ReadAll(dir / "t1.csv");
  const std::string tb = ReadAll(dir / "t2.csv");
  Report(9, a.code == 0 && b.code == 0 && !ta.empty() && ta == tb,
         "two simulate traces of " + std::to_string(ta.size()) + " bytes " +
             (ta == tb ? "identical" : "differ"));
}

}  // namespace
}  // namespace dpzono

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <cli-binary> <source-dir>\n";
    return 2;
  }
  namespace fs = std::filesystem;
  const std::string cli = argv[1];
  const fs::path config = fs::path(argv[2]) / "configs" / "tracking.json";
  const fs::path dir = fs::temp_directory_path() / "dpzono_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  dpzono::DeltaBand(cli, dir);
  const auto rows = dpzono::SweepMonotone(cli, config, dir);
  dpzono::LaplaceClosedForm();
  dpzono::Containment();
  dpzono::UtilityTrend(rows, dpzono::TrackingExperimentConfig().runs);
  dpzono::DpConsistency();
  dpzono::DeltaOracle();
  dpzono::WeightOptimality();
  dpzono::Determinism(cli, config, dir);

  fs::remove_all(dir);
  std::cout << (dpzono::failures == 0 ? "all criteria passed"
                                      : std::to_string(dpzono::failures) +
                                            " criteria failed")
            << std::endl;
  return dpzono::failures == 0 ? 0 : 1;
}
