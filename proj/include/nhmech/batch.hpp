#pragma once

#include <string>
#include <vector>

#include "nhmech/diagnostics.hpp"

namespace nhmech::batch {

/// Result of one independent trajectory. `failed_step` is -1 on success.
struct Outcome {
  Trajectory trajectory;
  std::ptrdiff_t failed_step = -1;
  std::string error;
};

/// Serial reference: evolves every initial element in order.
std::vector<Outcome> evolve_many_serial(const NhProblem& p,
                                        const std::vector<GroupoidElement>& initial, int N,
                                        const SolverOptions& opts = {});
/// OpenMP version; results are bit-identical to the serial reference.
std::vector<Outcome> evolve_many(const NhProblem& p, const std::vector<GroupoidElement>& initial,
                                 int N, const SolverOptions& opts = {});

std::vector<RegularityReport> regularity_sweep_serial(const NhProblem& p,
                                                      const std::vector<GroupoidElement>& points);
std::vector<RegularityReport> regularity_sweep(const NhProblem& p,
                                               const std::vector<GroupoidElement>& points);

int max_threads();

}  // namespace nhmech::batch
