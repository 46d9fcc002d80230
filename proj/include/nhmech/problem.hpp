#pragma once

#include <functional>
#include <string>

#include "nhmech/groupoid.hpp"

namespace nhmech {

/// @brief Rank-r subbundle of the algebroid given by a local basis.
///
/// basis(x) is n x r (columns X_a(x)); annihilator(x) is n x (n-r)
/// (columns are the covectors X^alpha(x)).
struct ConstraintDistribution {
  int rank = 0;
  std::function<Mat(const Vec&)> basis;
  std::function<Mat(const Vec&)> annihilator;
};

/// @brief Constraint submanifold {phi = 0} of codimension n - r.
///
/// phi_left_jacobian(h), when present, returns the (n-r) x n matrix of
/// left-invariant derivatives of phi at h. guard(h), when present, throws
/// ChartDomain outside the open set on which phi defines the submanifold.
struct ConstraintManifold {
  int codim = 0;
  std::function<Vec(const GroupoidElement&)> phi;
  std::function<Mat(const GroupoidElement&)> phi_left_jacobian;
  std::function<void(const GroupoidElement&)> guard;
  bool contains_identities = true;
};

using DiscreteLagrangian = GroupoidFunction;

struct ProblemFlags {
  bool declared_reversible = false;
  bool chaplygin = false;
};

/// @brief A discrete nonholonomic system (L_d, M_c, D_c).
struct NhProblem {
  std::string name;
  Groupoid groupoid;
  DiscreteLagrangian lagrangian;
  ConstraintDistribution distribution;
  ConstraintManifold manifold;
  ProblemFlags flags;

  int rank() const { return groupoid.rank(); }
  /// Throws DomainError unless rank r + codim = n and the closures are set.
  void validate() const;
};

/// Full discrete Euler-Lagrange covector lvec(g)L - rvec(h)L (length n),
/// in the dual canonical basis at target(g).
Vec del_full(const NhProblem& p, const GroupoidElement& g, const GroupoidElement& h,
             const DerivativeOptions& opts = {});

/// Components lvec X_a(g)(L) - rvec X_a(h)(L), a = 1..r, X_a at target(g).
Vec del_projected(const NhProblem& p, const GroupoidElement& g, const GroupoidElement& h,
                  const DerivativeOptions& opts = {});

/// Residual of the step from g to h = fiber_retract(center, u):
/// del_projected (r rows) over phi(h) (n - r rows). source(center) must
/// equal target(g).
Vec residual(const NhProblem& p, const GroupoidElement& g, const GroupoidElement& center,
             const Vec& u, const DerivativeOptions& opts = {});
/// Same with the chart centred at the identity over target(g).
Vec residual(const NhProblem& p, const GroupoidElement& g, const Vec& u,
             const DerivativeOptions& opts = {});

/// Jacobian of residual() in u. At u = 0 it is assembled from the cross
/// form and the phi gradient (analytic where the problem provides them);
/// elsewhere by central differences of residual(). No row or column
/// scaling is applied.
Mat residual_jacobian(const NhProblem& p, const GroupoidElement& g,
                      const GroupoidElement& center, const Vec& u,
                      const DerivativeOptions& opts = {});
Mat residual_jacobian(const NhProblem& p, const GroupoidElement& g, const Vec& u,
                      const DerivativeOptions& opts = {});

/// Left-invariant derivatives of phi at h, (n-r) x n.
Mat phi_left_jacobian(const NhProblem& p, const GroupoidElement& h,
                      const DerivativeOptions& opts = {});
/// Right-invariant derivatives of phi at g, (n-r) x n.
Mat phi_right_jacobian(const NhProblem& p, const GroupoidElement& g,
                       const DerivativeOptions& opts = {});

struct MultiplierFit {
  Vec lambda;
  double fit_residual = 0.0;  // ∞-norm of del_full - annihilator·lambda
};

/// Least-squares multipliers with del_full(g,h) = sum lambda_alpha X^alpha.
MultiplierFit lagrange_multipliers(const NhProblem& p, const GroupoidElement& g,
                                   const GroupoidElement& h, const DerivativeOptions& opts = {});

double constraint_violation(const NhProblem& p, const GroupoidElement& g);

/// Moves g along its source fibre onto M_c (minimum-norm Gauss-Newton).
GroupoidElement project_to_manifold(const NhProblem& p, const GroupoidElement& g,
                                    double tol = 1e-13, int max_iters = 50);

}  // namespace nhmech
