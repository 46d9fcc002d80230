#include "nhmech/diagnostics.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <limits>
#include <tuple>

#include "nhmech/errors.hpp"

namespace nhmech {

namespace {

double inf_norm(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Smallest singular value and full-rank flag of a restricted form. Forms are
// square unless M_c leaves one end unconstrained; then full rank is
// min(rows, cols).
std::pair<double, bool> restricted_rank(const Mat& m) {
  if (m.size() == 0) return {0.0, false};
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  return {smin, s[0] > 0 && smin > 1e-10 * s[0]};
}

}  // namespace

Mat null_space(const Mat& m, int n_cols) {
  if (m.rows() == 0) return Mat::Identity(n_cols, n_cols);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  const double thr = s.size() && s[0] > 0 ? 1e-10 * s[0] : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > thr) ++rank;
  return svd.matrixV().rightCols(n_cols - rank);
}

RegularityReport regularity_report(const NhProblem& p, const GroupoidElement& g,
                                   const DerivativeOptions& opts) {
  const int n = p.rank();
  RegularityReport rep;
  rep.point = g;
  const Mat c = cross_matrix(p.groupoid, p.lagrangian, g, opts);
  const Mat bs = p.distribution.basis(g.source);
  const Mat bt = p.distribution.basis(g.target);
  const Mat kl = null_space(phi_left_jacobian(p, g, opts), n);
  const Mat kr = null_space(phi_right_jacobian(p, g, opts), n);

  std::tie(rep.right_sigma_min, rep.right_nondegenerate) = restricted_rank(bs.transpose() * c * kl);
  std::tie(rep.left_sigma_min, rep.left_nondegenerate) = restricted_rank(kr.transpose() * c * bt);

  Mat jac(n, n);
  jac.topRows(p.distribution.rank) = bs.transpose() * c;
  jac.bottomRows(p.manifold.codim) = phi_left_jacobian(p, g, opts);
  const Eigen::PartialPivLU<Mat> lu(jac);
  const double rc = lu.rcond();
  rep.jacobian_condition = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  return rep;
}

ReversibilityReport reversibility_report(const NhProblem& p,
                                         const std::vector<GroupoidElement>& samples,
                                         const SolverOptions& opts, double tol) {
  const Groupoid& G = p.groupoid;
  ReversibilityReport rep;
  rep.declared_reversible = p.flags.declared_reversible;
  rep.samples = static_cast<int>(samples.size());
  bool all_solved = !samples.empty();
  for (const auto& g : samples) {
    const GroupoidElement gi = G.invert(g);
    const double lg = p.lagrangian.eval(g);
    rep.max_lagrangian_defect =
        std::max(rep.max_lagrangian_defect, std::abs(p.lagrangian.eval(gi) - lg) / (1.0 + std::abs(lg)));
    rep.max_manifold_defect = std::max(rep.max_manifold_defect, constraint_violation(p, gi));
    try {
      const GroupoidElement h = step(p, g, opts).next;
      const GroupoidElement hi = G.invert(h);
      const Vec res = residual(p, hi, gi, Vec::Zero(p.rank()), opts.derivatives);
      const double scale = 1.0 + inf_norm(left_grad(G, p.lagrangian, hi, opts.derivatives)) +
                           inf_norm(right_grad(G, p.lagrangian, gi, opts.derivatives));
      rep.max_reversed_residual = std::max(rep.max_reversed_residual, inf_norm(res) / scale);
      const GroupoidElement back = step(p, hi, opts).next;
      rep.max_involution_defect = std::max(rep.max_involution_defect, G.distance(back, gi));
      ++rep.solved;
    } catch (const Error&) {
      all_solved = false;
    }
  }
  rep.lagrangian_invariant = rep.max_lagrangian_defect <= tol;
  rep.manifold_invariant = rep.max_manifold_defect <= tol;
  rep.reversed_pairs_solve =
      all_solved && rep.max_reversed_residual <= tol && rep.max_involution_defect <= tol;
  rep.measured_reversible =
      rep.lagrangian_invariant && rep.manifold_invariant && rep.reversed_pairs_solve;
  rep.agrees_with_declaration = rep.measured_reversible == rep.declared_reversible;
  return rep;
}

double momentum_value(const MomentumSpec& spec, const NhProblem& p, const GroupoidElement& g,
                      const Vec& xi, const DerivativeOptions& opts) {
  const Vec v = spec.psi(xi, g.target);
  const Mat b = p.distribution.basis(g.target);
  const Vec off = v - b * b.completeOrthogonalDecomposition().solve(v);
  if (inf_norm(off) > 1e-10 * (1.0 + inf_norm(v)))
    throw NotInConstraintCone(spec.name + ": Psi(xi) is not in the constraint distribution");
  return left_deriv(p.groupoid, p.lagrangian, g, v, opts);
}

std::vector<DriftEntry> momentum_drift(const MomentumSpec& spec, const NhProblem& p,
                                       const Trajectory& traj, const DerivativeOptions& opts) {
  std::vector<DriftEntry> out;
  if (traj.elements.size() < 2) return out;
  out.reserve(traj.elements.size() - 1);
  auto value = [&](const GroupoidElement& g) {
    return momentum_value(spec, p, g, spec.xi_tilde(g.target), opts);
  };
  double prev = value(traj.elements[0]);
  for (std::size_t k = 0; k + 1 < traj.elements.size(); ++k) {
    const GroupoidElement& g = traj.elements[k];
    const GroupoidElement& h = traj.elements[k + 1];
    const double cur = value(h);
    const Vec dxi = spec.xi_tilde(h.target) - spec.xi_tilde(g.target);
    DriftEntry e;
    e.drift = cur - prev;
    e.predicted = left_deriv(p.groupoid, p.lagrangian, h, spec.psi(dxi, h.target), opts);
    out.push_back(e);
    prev = cur;
  }
  return out;
}

double invariance_defect(const MomentumSpec& spec, const NhProblem& p, const GroupoidElement& g,
                         const DerivativeOptions& opts) {
  double d = 0.0;
  for (int k = 0; k < spec.dim; ++k) {
    const Vec xi = Vec::Unit(spec.dim, k);
    const double l = left_deriv(p.groupoid, p.lagrangian, g, spec.psi(xi, g.target), opts);
    const double r = right_deriv(p.groupoid, p.lagrangian, g, spec.psi(xi, g.source), opts);
    d = std::max(d, std::abs(l - r));
  }
  return d;
}

GroupoidElement invert_anchor(const NhProblem& p, const Vec& x, const Vec& y,
                              const GroupoidElement& seed) {
  const Groupoid& G = p.groupoid;
  if (G.kind() != BackendKind::Atiyah || p.manifold.codim != 3)
    throw ChartInversionFailed(p.name + ": anchor inversion needs an Atiyah backend with codim 3");
  GroupoidElement cur = G.make_atiyah(x, y, *seed.group);
  for (int it = 0; it < 60; ++it) {
    const Vec f = p.manifold.phi(cur);
    if (inf_norm(f) <= 1e-14) return cur;
    const Mat jac = phi_left_jacobian(p, cur).rightCols(3);
    const Eigen::PartialPivLU<Mat> lu(jac);
    if (!(lu.rcond() > 1e-12)) break;
    Vec u = Vec::Zero(G.rank());
    u.tail(3) = -lu.solve(f);
    try {
      cur = G.fiber_retract(cur, u);
    } catch (const ChartDomain&) {
      break;
    }
  }
  if (inf_norm(p.manifold.phi(cur)) <= 1e-12) return cur;
  throw ChartInversionFailed(p.name + ": constraint chart inversion did not converge");
}

Vec chaplygin_residual(const NhProblem& p, const GroupoidElement& g, const GroupoidElement& h) {
  if (!p.flags.chaplygin) throw DomainError(p.name + ": not flagged as a Chaplygin system");
  const Groupoid& G = p.groupoid;
  if (!G.composable(g, h)) throw NotComposable("chaplygin_residual: target(g) != source(h)");
  const int m = G.base_coords();
  const Vec& x = g.source;
  const Vec& y = g.target;
  const Vec& z = h.target;

  const Mat b = p.distribution.basis(y);
  const Eigen::PartialPivLU<Mat> anchor(b.topRows(m));
  if (!(anchor.rcond() > 1e-12))
    throw ChartInversionFailed(p.name + ": anchor restricted to D_c is not invertible");

  auto reduced_l = [&](const Vec& a, const Vec& c, const GroupoidElement& seed) {
    return p.lagrangian.eval(invert_anchor(p, a, c, seed));
  };
  // Five-point derivative of t -> f(t) at 0.
  const double t = 1e-3;
  auto d5 = [t](const std::function<double(double)>& f) {
    return (-f(2 * t) + 8 * f(t) - 8 * f(-t) + f(-2 * t)) / (12 * t);
  };

  const Vec lg = left_grad(G, p.lagrangian, g);
  const Vec rg = right_grad(G, p.lagrangian, h);
  Vec out(m);
  for (int i = 0; i < m; ++i) {
    const Vec yv = Vec::Unit(m, i);
    const Vec X = b * anchor.solve(yv);
    const double lY = d5([&](double s) { return reduced_l(x, y + s * yv, g); });
    const double rY = -d5([&](double s) { return reduced_l(y + s * yv, z, h); });
    const double f_plus = -(lg.dot(X) - lY);
    const double f_minus = -(rg.dot(X) - rY);
    out[i] = lY - rY - f_plus + f_minus;
  }
  return out;
}

}  // namespace nhmech
