#include "nhmech/batch.hpp"

#include <omp.h>

#include "nhmech/errors.hpp"

namespace nhmech::batch {

namespace {

Outcome run_one(const NhProblem& p, const GroupoidElement& g0, int N, const SolverOptions& opts) {
  Outcome out;
  try {
    out.trajectory = evolve(p, g0, N, opts);
  } catch (const SolveError& e) {
    out.failed_step = e.step_index();
    out.error = e.what();
  } catch (const Error& e) {
    out.failed_step = 0;
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::vector<Outcome> evolve_many_serial(const NhProblem& p,
                                        const std::vector<GroupoidElement>& initial, int N,
                                        const SolverOptions& opts) {
  std::vector<Outcome> out(initial.size());
  for (std::size_t i = 0; i < initial.size(); ++i) out[i] = run_one(p, initial[i], N, opts);
  return out;
}

std::vector<Outcome> evolve_many(const NhProblem& p, const std::vector<GroupoidElement>& initial,
                                 int N, const SolverOptions& opts) {
  const auto count = static_cast<std::ptrdiff_t>(initial.size());
  std::vector<Outcome> out(initial.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) out[i] = run_one(p, initial[i], N, opts);
  return out;
}

std::vector<RegularityReport> regularity_sweep_serial(const NhProblem& p,
                                                      const std::vector<GroupoidElement>& points) {
  std::vector<RegularityReport> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = regularity_report(p, points[i]);
  return out;
}

std::vector<RegularityReport> regularity_sweep(const NhProblem& p,
                                               const std::vector<GroupoidElement>& points) {
  const auto count = static_cast<std::ptrdiff_t>(points.size());
  std::vector<RegularityReport> out(points.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < count; ++i) out[i] = regularity_report(p, points[i]);
  return out;
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace nhmech::batch
