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

#ifndef DPZONO_SERIALIZATION_H_
#define DPZONO_SERIALIZATION_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "dpzono/noise.h"
#include "dpzono/noise_optimizer.h"
#include "dpzono/simulation.h"

namespace dpzono {

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Real numbers are written with 12 significant digits everywhere.
std::string FormatReal(double value);
double RoundToSignificant(double value);

struct NoiseFile {
  TruncatedNoiseDistribution distribution;
  std::optional<NoiseModelParams> params;
  uint64_t seed = 0;
  std::optional<OptimizerConfig> config;
};

nlohmann::json NoiseFileToJson(const NoiseFile& file);

// Validates the grid, the distribution invariants and the stored delta
// (recomputed at the stored epsilon and sensitivity; must agree to 1e-9).
// Throws std::invalid_argument on any violation.
NoiseFile NoiseFileFromJson(const nlohmann::json& j);

void WriteNoiseFile(const std::filesystem::path& path, const NoiseFile& file);
NoiseFile ReadNoiseFile(const std::filesystem::path& path);

// Sim config JSON mirrors SimConfig:
//   {"model": {"F", "H", "Zw", "Zv", "Z0"?}, "x0_true", "steps"?, "runs"?,
//    "seed"?, "reduction_order"?, "dp"?: {"epsilon", "d", "N", "s",
//    "noise_file"?}}
// Zonotopes are {"center": [...], "generators": [[row], ...]}. "Zv" is an
// array with one zonotope per H row, or a single zonotope shared by all.
// Missing required fields are reported together in one
// std::invalid_argument.
struct LoadedSimConfig {
  SimConfig config;
  // dp.noise_file resolved against the config file's directory.
  std::optional<std::filesystem::path> noise_file;
};

LoadedSimConfig SimConfigFromJson(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir = {});
LoadedSimConfig ReadSimConfig(const std::filesystem::path& path);
nlohmann::json SimConfigToJson(const SimConfig& cfg);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path,
                   const std::string& contents);

// k,true_x1,true_x2,center_x1,center_x2,error,contained
void WriteTraceCsv(std::ostream& out, const std::vector<TraceRecord>& trace);

struct SummaryInfo {
  RunSummary summary;
  std::optional<double> delta;
  std::optional<double> epsilon;
  std::optional<double> range;
  uint64_t seed = 0;
};

nlohmann::json SummaryToJson(const SummaryInfo& info);

// epsilon,d,delta,mean_error,std_error,containment_rate,
// laplace_range_for_same_delta,laplace_mean_error
void WriteSweepCsv(std::ostream& out, const SweepResult& result);

}  // namespace dpzono

#endif  // DPZONO_SERIALIZATION_H_
