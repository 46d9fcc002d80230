#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nhmech/diagnostics.hpp"
#include "nhmech/errors.hpp"

namespace nhmech::cli {

/// Named numeric fields; scalars have one entry, 3-vectors three, 3x3
/// matrices nine (row-major).
using Values = std::map<std::string, std::vector<double>>;

struct OutputConfig {
  std::string trajectory = "trajectory.csv";
  std::string summary = "summary.json";
  std::string report = "report.json";
  std::string format = "csv";  // csv | json

  bool operator==(const OutputConfig&) const = default;
};

struct CheckConfig {
  std::vector<Values> points;  // regularity sample points, same fields as `initial`
  int steps = 20;              // length of the trajectory used for reversibility/Legendre checks

  bool operator==(const CheckConfig&) const = default;
};

struct MomentumConfig {
  std::string spec;  // particle_y | particle_xz

  bool operator==(const MomentumConfig&) const = default;
};

struct RunConfig {
  std::string system;
  Values params;
  Values initial;
  bool project_initial = false;
  int steps = 0;
  SolverOptions solver;
  OutputConfig output;
  std::optional<CheckConfig> check;
  std::optional<MomentumConfig> momentum;
};

bool operator==(const RunConfig& a, const RunConfig& b);

/// Thrown for schema violations; maps to exit status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

RunConfig parse_config(const nlohmann::ordered_json& j);
RunConfig load_config(const std::string& path);
nlohmann::ordered_json to_json(const RunConfig& c);

/// Names of the built-in systems accepted by the config.
std::vector<std::string> system_names();

NhProblem build_problem(const RunConfig& c);
/// Initial element from `initial`-style values (projected onto M_c when
/// requested). Throws ConfigError when it is not on M_c.
GroupoidElement build_element(const RunConfig& c, const NhProblem& p, const Values& v);
MomentumSpec build_momentum_spec(const std::string& name);

}  // namespace nhmech::cli
