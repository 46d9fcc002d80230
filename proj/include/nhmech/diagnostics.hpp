#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nhmech/solver.hpp"

namespace nhmech {

/// @brief Nondegeneracy of the restricted cross form at a point of M_c.
///
/// Right: rows D_c(source), columns the left-translated tangent space of
/// M_c at the point (kernel of phi_left_jacobian). Left: rows the
/// right-translated tangent space (kernel of phi_right_jacobian), columns
/// D_c(target). Flags use a relative singular-value threshold of 1e-10. When
/// phi does not depend on one end (holonomic sphere) the left form is
/// rectangular and nondegenerate means full column rank.
struct RegularityReport {
  GroupoidElement point;
  bool right_nondegenerate = false;
  double right_sigma_min = 0.0;
  bool left_nondegenerate = false;
  double left_sigma_min = 0.0;
  double jacobian_condition = 0.0;

  bool regular() const { return right_nondegenerate && left_nondegenerate; }
};

RegularityReport regularity_report(const NhProblem& p, const GroupoidElement& g,
                                   const DerivativeOptions& opts = {});

/// Orthonormal basis of the kernel of m (columns), SVD threshold
/// 1e-10 · largest singular value.
Mat null_space(const Mat& m, int n_cols);

struct ReversibilityReport {
  int samples = 0;
  int solved = 0;  // samples for which forward and reversed steps solved
  double max_lagrangian_defect = 0.0;   // |L(i g) - L(g)| / (1 + |L(g)|)
  double max_manifold_defect = 0.0;     // |phi(i g)|
  double max_reversed_residual = 0.0;   // residual of (h^-1, g^-1), relative
  double max_involution_defect = 0.0;   // distance(step(i(step(g))), i(g))
  bool lagrangian_invariant = false;
  bool manifold_invariant = false;
  bool reversed_pairs_solve = false;
  bool measured_reversible = false;
  bool declared_reversible = false;
  bool agrees_with_declaration = false;
};

ReversibilityReport reversibility_report(const NhProblem& p,
                                         const std::vector<GroupoidElement>& samples,
                                         const SolverOptions& opts = {}, double tol = 1e-8);

/// @brief Linear map Psi: g -> sections of the algebroid and a section xi~.
struct MomentumSpec {
  std::string name;
  int dim = 0;
  std::function<Vec(const Vec& xi, const Vec& x)> psi;
  std::function<Vec(const Vec& x)> xi_tilde;
};

/// lvec Psi(xi)(g)(L). Throws NotInConstraintCone when Psi(xi)(target(g))
/// is not in D_c.
double momentum_value(const MomentumSpec& spec, const NhProblem& p, const GroupoidElement& g,
                      const Vec& xi, const DerivativeOptions& opts = {});

struct DriftEntry {
  double drift = 0.0;      // J(g_{k+1}) - J(g_k), J evaluated with xi~ at each target
  double predicted = 0.0;  // lvec Psi(xi~(x_{k+1}) - xi~(x_k))(g_{k+1})(L)
};

std::vector<DriftEntry> momentum_drift(const MomentumSpec& spec, const NhProblem& p,
                                       const Trajectory& traj, const DerivativeOptions& opts = {});

/// max over basis xi of |lvec Psi(xi)(g)(L) - rvec Psi(xi)(g)(L)|; zero for
/// Lagrangians invariant under the action generated by Psi.
double invariance_defect(const MomentumSpec& spec, const NhProblem& p, const GroupoidElement& g,
                         const DerivativeOptions& opts = {});

/// Element of M_c over the base pair (x, y), by Newton in the group chart
/// from `seed`. Atiyah backends with codim = dim G only.
GroupoidElement invert_anchor(const NhProblem& p, const Vec& x, const Vec& y,
                              const GroupoidElement& seed);

/// Reduced (forced) discrete Euler-Lagrange residual on M x M for a
/// Chaplygin system at the pair (g, h), one component per coordinate field.
Vec chaplygin_residual(const NhProblem& p, const GroupoidElement& g, const GroupoidElement& h);

}  // namespace nhmech
