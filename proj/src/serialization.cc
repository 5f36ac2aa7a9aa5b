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

#include "dpzono/serialization.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dpzono {

using nlohmann::json;

namespace {

constexpr double kDeltaAgreement = 1e-9;

json RealArray(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(RoundToSignificant(v));
  return out;
}

json VectorJson(const Vector& v) {
  return RealArray(std::vector<double>(v.data(), v.data() + v.size()));
}

json MatrixJson(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(RoundToSignificant(m(r, c)));
    }
    rows.push_back(row);
  }
  return rows;
}

json ZonotopeJson(const Zonotope& z) {
  return json{{"center", VectorJson(z.center())},
              {"generators", MatrixJson(z.generators())}};
}

double ReadNumber(const json& j, const std::string& what) {
  if (!j.is_number()) throw std::invalid_argument(what + " must be a number");
  return j.get<double>();
}

std::vector<double> ReadReals(const json& j, const std::string& what) {
  if (!j.is_array()) throw std::invalid_argument(what + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const json& v : j) out.push_back(ReadNumber(v, what + " entry"));
  return out;
}

Vector ReadVector(const json& j, const std::string& what) {
  const std::vector<double> v = ReadReals(j, what);
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix ReadMatrix(const json& j, const std::string& what) {
  if (!j.is_array()) throw std::invalid_argument(what + " must be an array of rows");
  if (j.empty()) return Matrix(0, 0);
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix out(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) {
    const std::vector<double> row = ReadReals(j[r], what + " row");
    if (row.size() != cols) {
      throw std::invalid_argument(what + " rows have different lengths");
    }
    for (size_t c = 0; c < cols; ++c) out(r, c) = row[c];
  }
  return out;
}

Zonotope ReadZonotope(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("center")) {
    throw std::invalid_argument(what + " must be an object with a center");
  }
  Vector c = ReadVector(j["center"], what + ".center");
  if (!j.contains("generators")) return Zonotope::Point(std::move(c));
  Matrix g = ReadMatrix(j["generators"], what + ".generators");
  if (g.rows() == 0) g.resize(c.size(), 0);
  return Zonotope(std::move(c), std::move(g));
}

json OptimizerConfigJson(const OptimizerConfig& c) {
  return json{{"epsilon", RoundToSignificant(c.epsilon)},
              {"sensitivity", RoundToSignificant(c.sensitivity)},
              {"gamma", c.gamma},
              {"omega_start", RoundToSignificant(c.omega_start)},
              {"omega_min", RoundToSignificant(c.omega_min)},
              {"omega_half_life", RoundToSignificant(c.omega_half_life)},
              {"epochs", c.epochs},
              {"learning_rate", RoundToSignificant(c.learning_rate)},
              {"seed", c.seed}};
}

OptimizerConfig OptimizerConfigFromJson(const json& j) {
  OptimizerConfig c;
  c.epsilon = j.value("epsilon", c.epsilon);
  c.sensitivity = j.value("sensitivity", c.sensitivity);
  c.gamma = j.value("gamma", c.gamma);
  c.omega_start = j.value("omega_start", c.omega_start);
  c.omega_min = j.value("omega_min", c.omega_min);
  c.omega_half_life = j.value("omega_half_life", c.omega_half_life);
  c.epochs = j.value("epochs", c.epochs);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.seed = j.value("seed", c.seed);
  return c;
}

}  // namespace

std::string FormatReal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

double RoundToSignificant(double value) {
  if (!std::isfinite(value)) return value;
  return std::strtod(FormatReal(value).c_str(), nullptr);
}

json NoiseFileToJson(const NoiseFile& file) {
  const TruncatedNoiseDistribution& d = file.distribution;
  json j{{"epsilon", RoundToSignificant(d.epsilon)},
         {"sensitivity", RoundToSignificant(d.sensitivity)},
         {"d", RoundToSignificant(d.grid.range)},
         {"N", d.grid.half_bins},
         {"phi", RealArray(d.grid.points)},
         {"p", RealArray(d.mass)},
         {"delta", RoundToSignificant(d.delta)},
         {"seed", file.seed}};
  if (file.params) {
    j["params"] = json{{"A", RoundToSignificant(file.params->a)},
                       {"B", RealArray(file.params->b)},
                       {"C", RoundToSignificant(file.params->steepness)},
                       {"F", RealArray(file.params->knots)}};
  }
  if (file.config) j["config"] = OptimizerConfigJson(*file.config);
  return j;
}

namespace {

NoiseFile ParseNoiseFile(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("noise file must be a JSON object");
  std::vector<std::string> missing;
  for (const char* key : {"epsilon", "sensitivity", "d", "N", "phi", "p", "delta"}) {
    if (!j.contains(key)) missing.push_back(key);
  }
  if (!missing.empty()) {
    std::string msg = "noise file is missing fields:";
    for (const auto& m : missing) msg += " " + m;
    throw std::invalid_argument(msg);
  }
  if (!j["N"].is_number_integer()) throw std::invalid_argument("N must be an integer");

  NoiseFile file;
  TruncatedNoiseDistribution& dist = file.distribution;
  dist.grid = BuildGrid(ReadNumber(j["d"], "d"), j["N"].get<int>());
  dist.epsilon = ReadNumber(j["epsilon"], "epsilon");
  dist.sensitivity = ReadNumber(j["sensitivity"], "sensitivity");

  const std::vector<double> phi = ReadReals(j["phi"], "phi");
  dist.mass = ReadReals(j["p"], "p");
  if (static_cast<int>(phi.size()) != dist.grid.size() ||
      static_cast<int>(dist.mass.size()) != dist.grid.size()) {
    throw std::invalid_argument("phi and p must each hold 2N values");
  }
  const double tol = 1e-9 * std::max(1.0, dist.grid.range);
  for (size_t l = 0; l < phi.size(); ++l) {
    if (l > 0 && !(phi[l] > phi[l - 1])) {
      throw std::invalid_argument("phi must be strictly ascending");
    }
    if (std::abs(phi[l] - dist.grid.points[l]) > tol) {
      throw std::invalid_argument("phi does not match the grid for d and N");
    }
  }
  const std::vector<std::string> violations = InvariantViolations(dist);
  if (!violations.empty()) {
    throw std::invalid_argument("invalid noise distribution: " + violations[0]);
  }
  const double stored = ReadNumber(j["delta"], "delta");
  dist.delta = DeltaOf(dist, dist.epsilon, dist.sensitivity);
  if (std::abs(stored - dist.delta) > kDeltaAgreement) {
    throw std::invalid_argument("stored delta " + FormatReal(stored) +
                                " disagrees with recomputed " +
                                FormatReal(dist.delta));
  }

  file.seed = j.value("seed", uint64_t{0});
  if (j.contains("params")) {
    const json& p = j["params"];
    NoiseModelParams params;
    params.a = ReadNumber(p.at("A"), "params.A");
    params.b = ReadReals(p.at("B"), "params.B");
    params.steepness = ReadNumber(p.at("C"), "params.C");
    params.knots = ReadReals(p.at("F"), "params.F");
    if (params.b.size() != params.knots.size()) {
      throw std::invalid_argument("params.B and params.F lengths differ");
    }
    file.params = std::move(params);
  }
  if (j.contains("config")) file.config = OptimizerConfigFromJson(j["config"]);
  return file;
}

}  // namespace

NoiseFile NoiseFileFromJson(const json& j) {
  try {
    return ParseNoiseFile(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("noise file: ") + e.what());
  }
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void WriteTextFile(const std::filesystem::path& path,
                   const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void WriteNoiseFile(const std::filesystem::path& path, const NoiseFile& file) {
  WriteTextFile(path, NoiseFileToJson(file).dump(2) + "\n");
}

NoiseFile ReadNoiseFile(const std::filesystem::path& path) {
  return NoiseFileFromJson(ReadJsonFile(path));
}

namespace {

LoadedSimConfig ParseSimConfig(const json& j,
                               const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw std::invalid_argument("sim config must be a JSON object");
  std::vector<std::string> missing;
  const json empty = json::object();
  const json& model = j.contains("model") ? j["model"] : empty;
  if (!j.contains("model")) missing.push_back("model");
  for (const char* key : {"F", "H", "Zw", "Zv"}) {
    if (!model.contains(key)) missing.push_back(std::string("model.") + key);
  }
  if (!j.contains("x0_true")) missing.push_back("x0_true");
  if (j.contains("dp")) {
    for (const char* key : {"epsilon", "d", "N", "s"}) {
      if (!j["dp"].contains(key)) missing.push_back(std::string("dp.") + key);
    }
  }
  if (!missing.empty()) {
    std::string msg = "sim config is missing fields:";
    for (const auto& m : missing) msg += " " + m;
    throw std::invalid_argument(msg);
  }

  LoadedSimConfig loaded;
  SimConfig& cfg = loaded.config;
  cfg.x0_true = ReadVector(j["x0_true"], "x0_true");
  cfg.model.transition = ReadMatrix(model["F"], "model.F");
  cfg.model.sensor_rows = ReadMatrix(model["H"], "model.H");
  cfg.model.process_noise = ReadZonotope(model["Zw"], "model.Zw");
  const json& zv = model["Zv"];
  if (zv.is_array()) {
    for (size_t i = 0; i < zv.size(); ++i) {
      cfg.model.measurement_noise.push_back(
          ReadZonotope(zv[i], "model.Zv[" + std::to_string(i) + "]"));
    }
  } else {
    const Zonotope shared = ReadZonotope(zv, "model.Zv");
    cfg.model.measurement_noise.assign(cfg.model.sensor_rows.rows(), shared);
  }
  if (model.contains("Z0")) {
    cfg.model.initial_state = ReadZonotope(model["Z0"], "model.Z0");
  } else {
    cfg.model.initial_state = Zonotope(
        cfg.x0_true,
        15.0 * Matrix::Identity(cfg.x0_true.size(), cfg.x0_true.size()));
  }
  cfg.steps = j.value("steps", cfg.steps);
  cfg.runs = j.value("runs", cfg.runs);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.reduction_order = j.value("reduction_order", cfg.reduction_order);
  if (j.contains("dp")) {
    const json& dp = j["dp"];
    DpSettings s;
    s.epsilon = ReadNumber(dp["epsilon"], "dp.epsilon");
    s.range = ReadNumber(dp["d"], "dp.d");
    if (!dp["N"].is_number_integer()) throw std::invalid_argument("dp.N must be an integer");
    s.half_bins = dp["N"].get<int>();
    s.sensitivity = ReadNumber(dp["s"], "dp.s");
    cfg.dp = s;
    if (dp.contains("noise_file")) {
      std::filesystem::path p = dp["noise_file"].get<std::string>();
      loaded.noise_file = p.is_absolute() ? p : base_dir / p;
    }
  }
  ValidateSimConfig(cfg);
  return loaded;
}

}  // namespace

LoadedSimConfig SimConfigFromJson(const json& j,
                                  const std::filesystem::path& base_dir) {
  try {
    return ParseSimConfig(j, base_dir);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("sim config: ") + e.what());
  }
}

LoadedSimConfig ReadSimConfig(const std::filesystem::path& path) {
  return SimConfigFromJson(ReadJsonFile(path), path.parent_path());
}

json SimConfigToJson(const SimConfig& cfg) {
  json zv = json::array();
  for (const Zonotope& z : cfg.model.measurement_noise) zv.push_back(ZonotopeJson(z));
  json j{{"model",
          {{"F", MatrixJson(cfg.model.transition)},
           {"H", MatrixJson(cfg.model.sensor_rows)},
           {"Zw", ZonotopeJson(cfg.model.process_noise)},
           {"Zv", zv},
           {"Z0", ZonotopeJson(cfg.model.initial_state)}}},
         {"x0_true", VectorJson(cfg.x0_true)},
         {"steps", cfg.steps},
         {"runs", cfg.runs},
         {"seed", cfg.seed},
         {"reduction_order", cfg.reduction_order}};
  if (cfg.dp) {
    j["dp"] = json{{"epsilon", RoundToSignificant(cfg.dp->epsilon)},
                   {"d", RoundToSignificant(cfg.dp->range)},
                   {"N", cfg.dp->half_bins},
                   {"s", RoundToSignificant(cfg.dp->sensitivity)}};
  }
  return j;
}

void WriteTraceCsv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "k,true_x1,true_x2,center_x1,center_x2,error,contained\n";
  for (const TraceRecord& r : trace) {
    out << r.step << ',' << FormatReal(r.true_state[0]) << ','
        << FormatReal(r.true_state[1]) << ','
        << FormatReal(r.corrected.center()[0]) << ','
        << FormatReal(r.corrected.center()[1]) << ',' << FormatReal(r.error)
        << ',' << (r.contained ? 1 : 0) << '\n';
  }
}

json SummaryToJson(const SummaryInfo& info) {
  auto optional_real = [](const std::optional<double>& v) {
    return v ? json(RoundToSignificant(*v)) : json(nullptr);
  };
  return json{{"mean_error", RoundToSignificant(info.summary.mean_error)},
              {"std_error", RoundToSignificant(info.summary.std_error)},
              {"containment_rate",
               RoundToSignificant(info.summary.containment_rate)},
              {"delta", optional_real(info.delta)},
              {"epsilon", optional_real(info.epsilon)},
              {"d", optional_real(info.range)},
              {"runs", info.summary.runs},
              {"steps", info.summary.steps},
              {"seed", info.seed}};
}

void WriteSweepCsv(std::ostream& out, const SweepResult& result) {
  out << "epsilon,d,delta,mean_error,std_error,containment_rate,"
         "laplace_range_for_same_delta,laplace_mean_error\n";
  for (const SweepCell& c : result.cells) {
    out << FormatReal(c.epsilon) << ',' << FormatReal(c.range) << ','
        << FormatReal(c.delta) << ',' << FormatReal(c.mean_error) << ','
        << FormatReal(c.std_error) << ',' << FormatReal(c.containment_rate)
        << ',' << FormatReal(c.laplace_range) << ','
        << FormatReal(c.laplace_mean_error) << '\n';
  }
}

}  // namespace dpzono
