#pragma once

#include <iosfwd>
#include <string>

#include "nhmech/config.hpp"

namespace nhmech::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kSolveError = 3, kIoError = 4 };

class IoError : public Error {
 public:
  using Error::Error;
};

struct RunContext {
  std::string out_dir = ".";
  bool verbose = false;
  std::ostream* out = nullptr;  // structured summary record (stdout by default)
  std::ostream* log = nullptr;  // diagnostics (stderr by default)
};

/// Decimal rendering with 17 significant digits.
std::string format_number(double v);

/// CSV text of a trajectory: header plus N+1 rows, LF line endings.
std::string trajectory_csv(const NhProblem& p, const Trajectory& t);
std::string trajectory_json(const NhProblem& p, const Trajectory& t);

/// Writes through a temporary file in the same directory and renames it into
/// place. Throws IoError.
void write_atomic(const std::string& path, const std::string& contents);

int run_simulate(const RunConfig& c, const RunContext& ctx);
int run_check(const RunConfig& c, const RunContext& ctx);
int run_momentum(const RunConfig& c, const RunContext& ctx);

/// Loads the config and dispatches; maps exceptions to exit codes.
int run_command(const std::string& command, const std::string& config_path,
                const RunContext& ctx);

}  // namespace nhmech::cli
