#include "nhmech/solver.hpp"

#include <Eigen/LU>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "nhmech/errors.hpp"

namespace nhmech {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double inf_norm(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double condition_of(const Eigen::PartialPivLU<Mat>& lu) {
  const double rc = lu.rcond();
  return rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
}

struct Factored {
  Eigen::PartialPivLU<Mat> lu;
  double condition;
};

Factored factor(const NhProblem& p, const GroupoidElement& g, const GroupoidElement& h,
                const SolverOptions& opts) {
  const Mat jac = residual_jacobian(p, g, h, Vec::Zero(p.rank()), opts.derivatives);
  Factored f{Eigen::PartialPivLU<Mat>(jac), 0.0};
  f.condition = jac.allFinite() ? condition_of(f.lu) : std::numeric_limits<double>::infinity();
  if (!(f.condition <= opts.cond_limit))
    throw Singular(p.name + ": Newton Jacobian condition estimate " +
                       sci(f.condition) + " exceeds limit",
                   f.condition);
  return f;
}

}  // namespace

GroupoidElement initial_guess(const NhProblem& p, const GroupoidElement& g, bool warm_start) {
  const Groupoid& G = p.groupoid;
  const GroupoidElement e = G.identity_at(g.target);
  if (!warm_start) return e;
  try {
    return G.fiber_retract(e, G.displacement(g));
  } catch (const Error&) {
    return e;
  }
}

StepResult step_from(const NhProblem& p, const GroupoidElement& g, const GroupoidElement& guess,
                     const SolverOptions& opts) {
  const int n = p.rank();
  const Vec zero = Vec::Zero(n);
  StepResult res;
  GroupoidElement h = guess;
  Vec f = residual(p, g, h, zero, opts.derivatives);
  double cond = 0.0;

  for (int it = 0;; ++it) {
    const double norm = inf_norm(f);
    res.residual_history.push_back(norm);
    if (!std::isfinite(norm)) break;
    if (norm <= opts.tol_residual) {
      if (it == 0) cond = factor(p, g, h, opts).condition;
      res.next = h;
      res.iterations = it;
      res.residual_norm = norm;
      res.jacobian_condition_estimate = cond;
      res.multipliers = lagrange_multipliers(p, g, h, opts.derivatives).lambda;
      return res;
    }
    if (it == opts.max_iters) break;

    const Factored fac = factor(p, g, h, opts);
    cond = fac.condition;
    const Vec d = fac.lu.solve(-f);

    // Backtracking on the merit 0.5|F|^2 with the Armijo test.
    const double merit = 0.5 * f.squaredNorm();
    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt, t *= 0.5) {
      try {
        const GroupoidElement trial = p.groupoid.fiber_retract(h, t * d);
        const Vec ft = residual(p, g, trial, zero, opts.derivatives);
        if (0.5 * ft.squaredNorm() <= (1.0 - 2.0e-4 * t) * merit) {
          h = trial;
          f = ft;
          res.step_history.push_back(t * inf_norm(d));
          accepted = true;
          break;
        }
      } catch (const ChartDomain&) {
      }
    }
    if (!accepted) {
      throw NoConvergence(p.name + ": line search failed at residual " + sci(norm),
                          cond);
    }
  }
  throw NoConvergence(p.name + ": no convergence after " + std::to_string(opts.max_iters) +
                          " iterations",
                      cond);
}

StepResult step(const NhProblem& p, const GroupoidElement& g, const SolverOptions& opts) {
  GroupoidElement guess = initial_guess(p, g, opts.warm_start);
  try {
    if (p.manifold.guard) p.manifold.guard(guess);
  } catch (const ChartDomain&) {
    guess = initial_guess(p, g, false);
  }
  try {
    return step_from(p, g, guess, opts);
  } catch (const ChartDomain& e) {
    throw NoConvergence(p.name + ": " + e.what(), 0.0);
  }
}

Trajectory evolve(const NhProblem& p, const GroupoidElement& g0, int N, const SolverOptions& opts) {
  if (N < 0) throw DomainError("evolve: negative step count");
  if (constraint_violation(p, g0) > 1e-9)
    throw DomainError(p.name + ": initial element is not on the constraint manifold");
  Trajectory traj;
  traj.elements.reserve(N + 1);
  traj.steps.reserve(N);
  traj.elements.push_back(g0);
  for (int k = 0; k < N; ++k) {
    try {
      StepResult s = step(p, traj.elements.back(), opts);
      GroupoidElement next = s.next;
      if (opts.reorthonormalize_every > 0 && (k + 1) % opts.reorthonormalize_every == 0)
        next = p.groupoid.reorthonormalize(next);
      traj.elements.push_back(std::move(next));
      traj.steps.push_back(std::move(s));
    } catch (SolveError& e) {
      e.set_step_index(k);
      throw;
    }
  }
  return traj;
}

NhCovector legendre_plus(const NhProblem& p, const GroupoidElement& g,
                         const DerivativeOptions& opts) {
  const Mat b = p.distribution.basis(g.target);
  return {g.target, b.transpose() * left_grad(p.groupoid, p.lagrangian, g, opts)};
}

NhCovector legendre_minus(const NhProblem& p, const GroupoidElement& h,
                          const DerivativeOptions& opts) {
  const Mat b = p.distribution.basis(h.source);
  return {h.source, b.transpose() * right_grad(p.groupoid, p.lagrangian, h, opts)};
}

std::pair<NhCovector, NhCovector> hamiltonian_step(const NhProblem& p, const GroupoidElement& g,
                                                   const SolverOptions& opts) {
  const StepResult s = step(p, g, opts);
  return {legendre_plus(p, g, opts.derivatives), legendre_plus(p, s.next, opts.derivatives)};
}

}  // namespace nhmech
