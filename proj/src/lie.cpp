#include "nhmech/lie.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "nhmech/errors.hpp"

namespace nhmech::lie {

namespace {

constexpr double kPi = std::numbers::pi;

Mat3 se2_hat(const Vec3& v) {
  Mat3 m = Mat3::Zero();
  m(0, 1) = -v[0];
  m(1, 0) = v[0];
  m(0, 2) = v[1];
  m(1, 2) = v[2];
  return m;
}

// (sin w)/w and (1 - cos w)/w with a Taylor guard at the removable singularity.
void se2_coefficients(double w, double& a, double& b) {
  if (std::abs(w) < 1e-6) {
    a = 1.0 - w * w / 6.0;
    b = w / 2.0 - w * w * w / 24.0;
  } else {
    a = std::sin(w) / w;
    b = (1.0 - std::cos(w)) / w;
  }
}

}  // namespace

Rotation3 Rotation3::checked(const Mat3& r, double tol) {
  const double orth = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (orth > tol || std::abs(r.determinant() - 1.0) > tol)
    throw DomainError("matrix is not a rotation");
  return Rotation3(r);
}

Rotation3 Rotation3::orthonormalized() const {
  Eigen::JacobiSVD<Mat3> svd(r_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0) u.col(2) *= -1.0;
  return Rotation3(u * v.transpose());
}

double Rotation3::orthogonality_defect() const {
  return (r_.transpose() * r_ - Mat3::Identity()).cwiseAbs().maxCoeff();
}

double wrap_angle(double a) {
  if (a > -kPi && a <= kPi) return a;
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

SE2Element::SE2Element(double theta_, double x_, double y_)
    : theta(wrap_angle(theta_)), x(x_), y(y_) {}

Mat3 SE2Element::matrix() const {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat3 m;
  m << c, -s, x, s, c, y, 0.0, 0.0, 1.0;
  return m;
}

SE2Element SE2Element::operator*(const SE2Element& o) const {
  const double c = std::cos(theta), s = std::sin(theta);
  return SE2Element(theta + o.theta, x + c * o.x - s * o.y, y + s * o.x + c * o.y);
}

SE2Element SE2Element::inverse() const {
  const double c = std::cos(theta), s = std::sin(theta);
  return SE2Element(-theta, -(c * x + s * y), s * x - c * y);
}

Mat3 hat(const Vec3& v, Algebra algebra) {
  if (algebra == Algebra::se2) return se2_hat(v);
  Mat3 m;
  m << 0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0;
  return m;
}

Vec3 vee(const Mat3& m, Algebra algebra) {
  if (algebra == Algebra::se2) return Vec3(m(1, 0), m(0, 2), m(1, 2));
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

Rotation3 exp_so3(const Vec3& w) {
  const double t2 = w.squaredNorm();
  const double t = std::sqrt(t2);
  const Mat3 k = hat(w, Algebra::so3);
  double a, b;
  if (t < 1e-4) {
    a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  } else {
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t2;
  }
  return Rotation3(Mat3::Identity() + a * k + b * k * k);
}

SE2Element exp_se2(const Vec3& xi) {
  double a, b;
  se2_coefficients(xi[0], a, b);
  return SE2Element(xi[0], a * xi[1] - b * xi[2], b * xi[1] + a * xi[2]);
}

GroupElement group_exp(const Vec3& xi, GroupKind group) {
  if (group == GroupKind::SE2) return exp_se2(xi);
  return exp_so3(xi);
}

Vec3 log_so3(const Rotation3& rot) {
  const Mat3& r = rot.matrix();
  const double tr = r.trace();
  if (tr + 1.0 <= 1e-12) throw DomainError("SO(3) log: trace is -1 (cut locus)");
  const Vec3 s = 0.5 * vee(r - r.transpose(), Algebra::so3);  // sin(t) n
  const double c = std::clamp(0.5 * (tr - 1.0), -1.0, 1.0);
  const double t = std::acos(c);
  if (t < 1e-4) return (1.0 + t * t / 6.0) * s;
  if (t < kPi - 1e-3) return (t / std::sin(t)) * s;
  // Near pi the skew part is tiny; read the axis from the symmetric part.
  const Mat3 sym = 0.5 * (r + r.transpose()) - c * Mat3::Identity();  // (1-c) n nᵀ
  Eigen::Index k;
  sym.diagonal().maxCoeff(&k);
  Vec3 n = sym.col(k) / std::sqrt(sym(k, k) * (1.0 - c));
  n.normalize();
  if (n.dot(s) < 0) n = -n;
  return t * n;
}

Vec3 log_se2(const SE2Element& g) {
  if (std::abs(g.theta) >= kPi) throw DomainError("SE(2) log: |theta| >= pi");
  double a, b;
  se2_coefficients(g.theta, a, b);
  const double d = a * a + b * b;
  return Vec3(g.theta, (a * g.x + b * g.y) / d, (-b * g.x + a * g.y) / d);
}

Vec3 group_log(const GroupElement& g) {
  if (const auto* r = std::get_if<Rotation3>(&g)) return log_so3(*r);
  return log_se2(std::get<SE2Element>(g));
}

GroupKind kind(const GroupElement& g) {
  return std::holds_alternative<Rotation3>(g) ? GroupKind::SO3 : GroupKind::SE2;
}

Algebra algebra_of(GroupKind group) {
  return group == GroupKind::SO3 ? Algebra::so3 : Algebra::se2;
}

GroupElement group_identity(GroupKind group) {
  if (group == GroupKind::SE2) return SE2Element();
  return Rotation3();
}

GroupElement multiply(const GroupElement& a, const GroupElement& b) {
  if (const auto* r = std::get_if<Rotation3>(&a)) return *r * std::get<Rotation3>(b);
  return std::get<SE2Element>(a) * std::get<SE2Element>(b);
}

GroupElement inverse(const GroupElement& g) {
  if (const auto* r = std::get_if<Rotation3>(&g)) return r->inverse();
  return std::get<SE2Element>(g).inverse();
}

Mat3 matrix(const GroupElement& g) {
  if (const auto* r = std::get_if<Rotation3>(&g)) return r->matrix();
  return std::get<SE2Element>(g).matrix();
}

Mat3 adjoint_matrix(const GroupElement& g) {
  if (const auto* r = std::get_if<Rotation3>(&g)) return r->matrix();
  const auto& e = std::get<SE2Element>(g);
  const double c = std::cos(e.theta), s = std::sin(e.theta);
  Mat3 ad;
  ad << 1.0, 0.0, 0.0,
        e.y, c, -s,
        -e.x, s, c;
  return ad;
}

Vec3 adjoint(const GroupElement& g, const Vec3& xi) { return adjoint_matrix(g) * xi; }

Vec3 coadjoint(const GroupElement& g, const Vec3& p) {
  return adjoint_matrix(g).transpose() * p;
}

}  // namespace nhmech::lie
