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

#include "dpzono/cli.h"

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpzono/noise.h"
#include "dpzono/noise_optimizer.h"
#include "dpzono/serialization.h"
#include "dpzono/simulation.h"

namespace dpzono {
namespace {

using nlohmann::json;

struct OptimizeFlags {
  double epsilon = 0.0;
  double range = 0.0;
  int bins = 0;
  double sensitivity = 0.0;
  int gamma = 1;
  uint64_t seed = 0;
  std::string out;
  std::optional<int> sigmoids;
  double steepness = 500.0;
  OptimizerConfig optimizer;
};

struct DeltaFlags {
  std::string dist;
  double epsilon = 0.0;
  double sensitivity = 0.0;
};

struct LaplaceFlags {
  double epsilon = 0.0;
  double delta = 0.0;
  double sensitivity = 0.0;
};

struct SimulateFlags {
  std::string config;
  std::string noise;
  std::string out;
  std::string summary;
};

struct SweepFlags {
  std::string config;
  std::vector<double> epsilons{0.1, 0.3, 0.5, 0.7};
  std::vector<double> ranges{3, 5, 7, 9, 11, 13, 15};
  std::string out;
  std::optional<int> runs;
  std::optional<double> sensitivity;
  OptimizerConfig optimizer;
};

void AddOptimizerOverrides(CLI::App* cmd, OptimizerConfig& cfg) {
  cmd->add_option("--epochs", cfg.epochs, "Optimizer epochs")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--learning-rate", cfg.learning_rate, "Base learning rate")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--omega-start", cfg.omega_start, "Initial utility weight");
  cmd->add_option("--omega-min", cfg.omega_min, "Utility weight floor");
  cmd->add_option("--omega-half-life", cfg.omega_half_life,
                  "Epochs per halving of the utility weight");
}

std::string Json(const json& j) { return j.dump(); }

int NoiseOptimize(const OptimizeFlags& f, std::ostream& out) {
  OptimizerConfig cfg = f.optimizer;
  cfg.epsilon = f.epsilon;
  cfg.sensitivity = f.sensitivity;
  cfg.gamma = f.gamma;
  cfg.seed = f.seed;
  const int sigmoids = f.sigmoids.value_or(DefaultSigmoidCount(f.bins));
  const OptimizationResult result =
      OptimizeDistribution(cfg, f.range, f.bins, sigmoids, f.steepness);

  NoiseFile file{result.distribution, result.params, f.seed, cfg};
  WriteNoiseFile(f.out, file);
  out << Json({{"delta", RoundToSignificant(result.distribution.delta)},
               {"utility", RoundToSignificant(
                               UtilityLoss(result.distribution, cfg.gamma))}})
      << "\n";
  return kExitOk;
}

int NoiseDelta(const DeltaFlags& f, std::ostream& out) {
  const NoiseFile file = ReadNoiseFile(f.dist);
  const double delta = DeltaOf(file.distribution, f.epsilon, f.sensitivity);
  out << Json({{"delta", RoundToSignificant(delta)}}) << "\n";
  return kExitOk;
}

int LaplaceRangeCmd(const LaplaceFlags& f, std::ostream& out) {
  out << Json({{"range", RoundToSignificant(
                             LaplaceRange(f.epsilon, f.delta, f.sensitivity))}})
      << "\n";
  return kExitOk;
}

// Noise for `simulate`: --noise wins, then dp.noise_file, then a
// distribution optimized from the dp section with the config seed.
std::optional<TruncatedNoiseDistribution> ResolveNoise(
    const LoadedSimConfig& loaded, const std::string& noise_flag) {
  if (!noise_flag.empty()) return ReadNoiseFile(noise_flag).distribution;
  if (loaded.noise_file) return ReadNoiseFile(*loaded.noise_file).distribution;
  const SimConfig& cfg = loaded.config;
  if (!cfg.dp) return std::nullopt;
  OptimizerConfig opt;
  opt.epsilon = cfg.dp->epsilon;
  opt.sensitivity = cfg.dp->sensitivity;
  opt.seed = cfg.seed;
  return OptimizeDistribution(opt, cfg.dp->range, cfg.dp->half_bins,
                              DefaultSigmoidCount(cfg.dp->half_bins), 500.0)
      .distribution;
}

int Simulate(const SimulateFlags& f, std::ostream& out) {
  const LoadedSimConfig loaded = ReadSimConfig(f.config);
  const SimConfig& cfg = loaded.config;
  const std::optional<TruncatedNoiseDistribution> dist =
      ResolveNoise(loaded, f.noise);

  std::optional<Privatizer> privatizer;
  if (dist) privatizer = OptimalNoisePrivatizer(*dist);
  const Privatizer* p = privatizer ? &*privatizer : nullptr;

  std::ostringstream trace_csv;
  WriteTraceCsv(trace_csv, RunEstimation(cfg, p, 0));
  WriteTextFile(f.out, trace_csv.str());

  SummaryInfo info;
  info.summary = MonteCarlo(cfg, p);
  info.seed = cfg.seed;
  if (dist) {
    info.delta = dist->delta;
    info.epsilon = dist->epsilon;
    info.range = dist->grid.range;
  }
  const json summary = SummaryToJson(info);
  if (!f.summary.empty()) WriteTextFile(f.summary, summary.dump(2) + "\n");
  out << Json(summary) << "\n";
  return kExitOk;
}

int SweepCmd(const SweepFlags& f, std::ostream& out) {
  const LoadedSimConfig loaded = ReadSimConfig(f.config);
  const SimConfig& cfg = loaded.config;
  const double sensitivity =
      f.sensitivity.value_or(cfg.dp ? cfg.dp->sensitivity : 1.0);
  OptimizerConfig opt = f.optimizer;
  opt.seed = cfg.seed;
  const SweepResult result =
      Sweep(cfg, f.epsilons, f.ranges, f.runs.value_or(cfg.runs), opt,
            sensitivity);
  std::ostringstream csv;
  WriteSweepCsv(csv, result);
  WriteTextFile(f.out, csv.str());
  out << Json({{"rows", result.cells.size()}, {"out", f.out}}) << "\n";
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Differentially private zonotopic set-membership estimation"};
  app.require_subcommand(1);

  OptimizeFlags opt_flags;
  CLI::App* optimize =
      app.add_subcommand("noise-optimize", "Learn a truncated noise distribution");
  optimize->add_option("--epsilon", opt_flags.epsilon, "Privacy epsilon")->required();
  optimize->add_option("--range", opt_flags.range, "Noise half-range d")->required();
  optimize->add_option("--bins", opt_flags.bins, "Bins per half N")->required();
  optimize->add_option("--sensitivity", opt_flags.sensitivity, "Sensitivity s")
      ->required();
  optimize->add_option("--gamma", opt_flags.gamma, "Utility norm (1 or 2)");
  optimize->add_option("--seed", opt_flags.seed, "Initialization seed");
  optimize->add_option("--out", opt_flags.out, "Output noise file")->required();
  optimize->add_option("--sigmoids", opt_flags.sigmoids,
                       "Sigmoid count v (default max(10, 2N-1))");
  optimize->add_option("--steepness", opt_flags.steepness, "Sigmoid steepness C");
  AddOptimizerOverrides(optimize, opt_flags.optimizer);

  DeltaFlags delta_flags;
  CLI::App* delta =
      app.add_subcommand("noise-delta", "Tight delta of a noise distribution file");
  delta->add_option("--dist", delta_flags.dist, "Noise file")->required();
  delta->add_option("--epsilon", delta_flags.epsilon, "Privacy epsilon")->required();
  delta->add_option("--sensitivity", delta_flags.sensitivity, "Sensitivity s")
      ->required();

  LaplaceFlags laplace_flags;
  CLI::App* laplace = app.add_subcommand(
      "laplace-range", "Truncated Laplace range for a target (epsilon, delta)");
  laplace->add_option("--epsilon", laplace_flags.epsilon, "Privacy epsilon")->required();
  laplace->add_option("--delta", laplace_flags.delta, "Target delta")->required();
  laplace->add_option("--sensitivity", laplace_flags.sensitivity, "Sensitivity s")
      ->required();

  SimulateFlags sim_flags;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Run the tracking estimator and write a trace");
  simulate->add_option("--config", sim_flags.config, "Sim config JSON")->required();
  simulate->add_option("--noise", sim_flags.noise, "Noise file (optional)");
  simulate->add_option("--out", sim_flags.out, "Trace CSV of run 0")->required();
  simulate->add_option("--summary", sim_flags.summary, "Summary JSON over all runs");

  SweepFlags sweep_flags;
  CLI::App* sweep =
      app.add_subcommand("sweep", "Optimal vs Laplace noise over an (epsilon, d) grid");
  sweep->add_option("--config", sweep_flags.config, "Sim config JSON")->required();
  sweep->add_option("--epsilons", sweep_flags.epsilons, "Comma-separated epsilons")
      ->delimiter(',');
  sweep->add_option("--ranges", sweep_flags.ranges, "Comma-separated ranges d")
      ->delimiter(',');
  sweep->add_option("--out", sweep_flags.out, "Sweep CSV")->required();
  sweep->add_option("--runs", sweep_flags.runs, "Monte-Carlo runs per cell");
  sweep->add_option("--sensitivity", sweep_flags.sensitivity,
                    "Sensitivity s (default dp.s or 1)");
  AddOptimizerOverrides(sweep, sweep_flags.optimizer);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (*optimize) return NoiseOptimize(opt_flags, out);
    if (*delta) return NoiseDelta(delta_flags, out);
    if (*laplace) return LaplaceRangeCmd(laplace_flags, out);
    if (*simulate) return Simulate(sim_flags, out);
    if (*sweep) return SweepCmd(sweep_flags, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIoFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const OptimizerDivergedError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitInvalidInput;
}

}  // namespace dpzono
