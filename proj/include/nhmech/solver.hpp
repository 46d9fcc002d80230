#pragma once

#include <utility>
#include <vector>

#include "nhmech/problem.hpp"

namespace nhmech {

struct SolverOptions {
  double tol_residual = 1e-10;  // ∞-norm
  int max_iters = 50;
  int max_backtracks = 30;
  double cond_limit = 1e14;
  bool warm_start = true;
  int reorthonormalize_every = 0;  // evolve(): polar-project rotations every k steps, 0 = off
  DerivativeOptions derivatives;
};

struct StepResult {
  GroupoidElement next;
  Vec multipliers;
  int iterations = 0;
  double residual_norm = 0.0;
  double jacobian_condition_estimate = 0.0;
  std::vector<double> residual_history;  // ∞-norm at each Newton iterate
  std::vector<double> step_history;      // ∞-norm of each accepted chart update
};

struct Trajectory {
  std::vector<GroupoidElement> elements;  // g_0 .. g_N
  std::vector<StepResult> steps;          // steps[k] solved (g_k, g_{k+1})
};

/// @brief Element of D_c* at `base`, in the dual of the D_c basis.
struct NhCovector {
  Vec base;
  Vec components;
};

/// Starting point of the Newton iteration: g's own displacement transported
/// to target(g) (warm start), or the identity over target(g).
GroupoidElement initial_guess(const NhProblem& p, const GroupoidElement& g, bool warm_start);

/// Solves the discrete nonholonomic equations for the element following g.
/// Throws Singular, NoConvergence.
StepResult step(const NhProblem& p, const GroupoidElement& g, const SolverOptions& opts = {});
StepResult step_from(const NhProblem& p, const GroupoidElement& g, const GroupoidElement& guess,
                     const SolverOptions& opts = {});

/// N steps from g0; errors carry the index of the failing step.
Trajectory evolve(const NhProblem& p, const GroupoidElement& g0, int N,
                  const SolverOptions& opts = {});

NhCovector legendre_plus(const NhProblem& p, const GroupoidElement& g,
                         const DerivativeOptions& opts = {});
NhCovector legendre_minus(const NhProblem& p, const GroupoidElement& h,
                          const DerivativeOptions& opts = {});

/// (F+(g), F+(next)) for the solved next element.
std::pair<NhCovector, NhCovector> hamiltonian_step(const NhProblem& p, const GroupoidElement& g,
                                                   const SolverOptions& opts = {});

}  // namespace nhmech
