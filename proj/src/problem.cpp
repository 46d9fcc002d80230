#include "nhmech/problem.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "nhmech/errors.hpp"

namespace nhmech {

namespace {

double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double fd_step(const GroupoidElement& g, const DerivativeOptions& opts) {
  if (opts.fd_step > 0) return opts.fd_step;
  return std::cbrt(std::numeric_limits<double>::epsilon()) *
         (1.0 + Groupoid::coordinate_scale(g));
}

}  // namespace

void NhProblem::validate() const {
  const int n = groupoid.rank();
  if (distribution.rank <= 0 || distribution.rank > n)
    throw DomainError(name + ": distribution rank out of range");
  if (distribution.rank + manifold.codim != n)
    throw DomainError(name + ": rank + codim != algebroid rank");
  if (!lagrangian.eval || !distribution.basis || !distribution.annihilator ||
      (manifold.codim > 0 && !manifold.phi))
    throw DomainError(name + ": missing closure");
}

Vec del_full(const NhProblem& p, const GroupoidElement& g, const GroupoidElement& h,
             const DerivativeOptions& opts) {
  if (!p.groupoid.composable(g, h)) throw NotComposable("del: target(g) != source(h)");
  return left_grad(p.groupoid, p.lagrangian, g, opts) -
         right_grad(p.groupoid, p.lagrangian, h, opts);
}

Vec del_projected(const NhProblem& p, const GroupoidElement& g, const GroupoidElement& h,
                  const DerivativeOptions& opts) {
  return p.distribution.basis(g.target).transpose() * del_full(p, g, h, opts);
}

Vec residual(const NhProblem& p, const GroupoidElement& g, const GroupoidElement& center,
             const Vec& u, const DerivativeOptions& opts) {
  const GroupoidElement h = p.groupoid.fiber_retract(center, u);
  if (p.manifold.guard) p.manifold.guard(h);
  const int r = p.distribution.rank;
  Vec out(p.rank());
  out.head(r) = del_projected(p, g, h, opts);
  if (p.manifold.codim > 0) out.tail(p.manifold.codim) = p.manifold.phi(h);
  return out;
}

Vec residual(const NhProblem& p, const GroupoidElement& g, const Vec& u,
             const DerivativeOptions& opts) {
  return residual(p, g, p.groupoid.identity_at(g.target), u, opts);
}

Mat phi_left_jacobian(const NhProblem& p, const GroupoidElement& h,
                      const DerivativeOptions& opts) {
  const int n = p.rank(), c = p.manifold.codim;
  if (c == 0) return Mat(0, n);
  if (p.manifold.phi_left_jacobian && !opts.finite_differences)
    return p.manifold.phi_left_jacobian(h);
  const double t = fd_step(h, opts);
  Mat out(c, n);
  for (int k = 0; k < n; ++k) {
    const Vec e = Vec::Unit(n, k);
    out.col(k) = (p.manifold.phi(p.groupoid.left_curve(h, e, t)) -
                  p.manifold.phi(p.groupoid.left_curve(h, e, -t))) /
                 (2.0 * t);
  }
  return out;
}

Mat phi_right_jacobian(const NhProblem& p, const GroupoidElement& g,
                       const DerivativeOptions& opts) {
  const int n = p.rank(), c = p.manifold.codim;
  if (c == 0) return Mat(0, n);
  const double t = fd_step(g, opts);
  Mat out(c, n);
  for (int k = 0; k < n; ++k) {
    const Vec e = Vec::Unit(n, k);
    out.col(k) = -(p.manifold.phi(p.groupoid.right_curve(g, e, t)) -
                   p.manifold.phi(p.groupoid.right_curve(g, e, -t))) /
                 (2.0 * t);
  }
  return out;
}

Mat residual_jacobian(const NhProblem& p, const GroupoidElement& g,
                      const GroupoidElement& center, const Vec& u,
                      const DerivativeOptions& opts) {
  const int n = p.rank(), r = p.distribution.rank;
  if (!p.groupoid.composable(g, center)) throw NotComposable("jacobian: target(g) != source(h)");
  if (u.size() == n && u.isZero(0.0)) {
    Mat jac(n, n);
    jac.topRows(r) = p.distribution.basis(g.target).transpose() *
                     cross_matrix(p.groupoid, p.lagrangian, center, opts);
    jac.bottomRows(n - r) = phi_left_jacobian(p, center, opts);
    return jac;
  }
  const double t = fd_step(center, opts);
  Mat jac(n, n);
  for (int k = 0; k < n; ++k) {
    const Vec e = Vec::Unit(n, k);
    jac.col(k) = (residual(p, g, center, u + t * e, opts) - residual(p, g, center, u - t * e, opts)) /
                 (2.0 * t);
  }
  return jac;
}

Mat residual_jacobian(const NhProblem& p, const GroupoidElement& g, const Vec& u,
                      const DerivativeOptions& opts) {
  return residual_jacobian(p, g, p.groupoid.identity_at(g.target), u, opts);
}

MultiplierFit lagrange_multipliers(const NhProblem& p, const GroupoidElement& g,
                                   const GroupoidElement& h, const DerivativeOptions& opts) {
  const Vec full = del_full(p, g, h, opts);
  MultiplierFit fit;
  if (p.manifold.codim == 0) {
    fit.lambda = Vec(0);
    fit.fit_residual = max_abs(full);
    return fit;
  }
  const Mat a = p.distribution.annihilator(g.target);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  if (s.size() < a.cols() || s[s.size() - 1] <= 1e-10 * s[0])
    throw RankDeficientAnnihilator(p.name + ": annihilator basis is rank deficient");
  fit.lambda = svd.solve(full);
  fit.fit_residual = max_abs(full - a * fit.lambda);
  return fit;
}

double constraint_violation(const NhProblem& p, const GroupoidElement& g) {
  if (p.manifold.codim == 0) return 0.0;
  return max_abs(p.manifold.phi(g));
}

GroupoidElement project_to_manifold(const NhProblem& p, const GroupoidElement& g, double tol,
                                    int max_iters) {
  GroupoidElement cur = g;
  for (int it = 0; it < max_iters; ++it) {
    const Vec f = p.manifold.phi(cur);
    if (max_abs(f) <= tol) return cur;
    const Mat jac = phi_left_jacobian(p, cur);
    const Vec du = -jac.completeOrthogonalDecomposition().solve(f);
    cur = p.groupoid.fiber_retract(cur, du);
  }
  if (max_abs(p.manifold.phi(cur)) <= 1e3 * tol) return cur;
  throw DomainError(p.name + ": projection onto the constraint manifold failed");
}

}  // namespace nhmech
