#include "nhmech/models.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <cmath>

#include "nhmech/errors.hpp"

namespace nhmech::models {

namespace {

using lie::Algebra;
using lie::GroupKind;
using lie::Rotation3;
using lie::SE2Element;

double frob(const Mat3& a, const Mat3& b) { return (a.array() * b.array()).sum(); }

Mat3 basis_matrix(int k, Algebra alg) { return lie::hat(Vec3::Unit(k), alg); }

const Mat3& rot(const GroupoidElement& g) { return std::get<Rotation3>(*g.group).matrix(); }
const SE2Element& se2(const GroupoidElement& g) { return std::get<SE2Element>(*g.group); }

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw DomainError(std::string(what) + " must be positive");
}

// Left/right gradients and cross form of L(M) along the group directions,
// for L with Euclidean gradient grad(M) and second variation
// d grad[Mdot] = dgrad(Mdot).
template <class Grad, class DGrad>
struct MatrixCalculus {
  Algebra alg;
  Grad grad;
  DGrad dgrad;

  Vec3 left(const Mat3& m) const {
    const Mat3 d = grad(m);
    Vec3 out;
    for (int k = 0; k < 3; ++k) out[k] = frob(d, m * basis_matrix(k, alg));
    return out;
  }
  Vec3 right(const Mat3& m) const {
    const Mat3 d = grad(m);
    Vec3 out;
    for (int k = 0; k < 3; ++k) out[k] = frob(d, basis_matrix(k, alg) * m);
    return out;
  }
  // G(a,b) = -lvec_b(rvec_a L)
  Mat3 cross(const Mat3& m) const {
    const Mat3 d = grad(m);
    Mat3 out;
    for (int a = 0; a < 3; ++a) {
      const Mat3 ea = basis_matrix(a, alg);
      for (int b = 0; b < 3; ++b) {
        const Mat3 mb = m * basis_matrix(b, alg);
        out(a, b) = -(frob(dgrad(mb), ea * m) + frob(d, ea * mb));
      }
    }
    return out;
  }
};

template <class Grad, class DGrad>
MatrixCalculus<Grad, DGrad> matrix_calculus(Algebra alg, Grad grad, DGrad dgrad) {
  return {alg, grad, dgrad};
}

Mat basis_particle(const Vec& q) {
  Mat b = Mat::Zero(3, 2);
  b(0, 0) = 1.0;
  b(2, 0) = q[1];
  b(1, 1) = 1.0;
  return b;
}

Mat annihilator_particle(const Vec& q) {
  Mat a(3, 1);
  a << -q[1], 0.0, 1.0;
  return a;
}

GroupoidFunction free_pair_lagrangian(double h, double force_x) {
  const double h2 = h * h;
  GroupoidFunction L;
  L.eval = [h2, force_x](const GroupoidElement& g) {
    return 0.5 * (g.target - g.source).squaredNorm() / h2 -
           force_x * 0.5 * (g.source[0] + g.target[0]);
  };
  L.left_grad = [h2, force_x](const GroupoidElement& g) {
    Vec d = (g.target - g.source) / h2;
    d[0] -= 0.5 * force_x;
    return d;
  };
  L.right_grad = [h2, force_x](const GroupoidElement& g) {
    Vec d = (g.target - g.source) / h2;
    d[0] += 0.5 * force_x;
    return d;
  };
  L.cross = [h2](const GroupoidElement&) { return Mat(-Mat::Identity(3, 3) / h2); };
  return L;
}

}  // namespace

double sinc(double s) {
  if (std::abs(s) < 1e-4) return 1.0 - s * s / 6.0;
  return std::sin(s) / s;
}

double versinc(double s) {
  if (std::abs(s) < 1e-4) return s / 2.0 - s * s * s / 24.0;
  const double half = std::sin(0.5 * s);
  return 2.0 * half * half / s;  // 1 - cos s without cancellation
}

namespace {

// Series below 0.1: the closed form loses digits to cancellation there.
double sinc_prime(double s) {
  if (std::abs(s) < 0.1) {
    const double s2 = s * s;
    return s * (-1.0 / 3.0 + s2 * (1.0 / 30.0 + s2 * (-1.0 / 840.0 + s2 / 45360.0)));
  }
  return (s * std::cos(s) - std::sin(s)) / (s * s);
}

double versinc_prime(double s) {
  if (std::abs(s) < 1e-4) return 0.5 - s * s / 8.0;
  return sinc(s) - versinc(s) / s;
}

}  // namespace

Eigen::Matrix<double, 3, 2> orthogonal_plane(const Vec3& q) {
  Eigen::Index k;
  q.cwiseAbs().minCoeff(&k);
  const Vec3 u1 = q.cross(Vec3::Unit(k)).normalized();
  const Vec3 u2 = q.cross(u1).normalized();
  Eigen::Matrix<double, 3, 2> b;
  b.col(0) = u1;
  b.col(1) = u2;
  return b;
}

// ---------------------------------------------------------------------------

NhProblem make_constrained_particle(double h, double force_x) {
  require_positive(h, "h");
  NhProblem p{"particle", Groupoid::pair(3), free_pair_lagrangian(h, force_x), {}, {}, {}};
  p.distribution = {2, basis_particle, annihilator_particle};
  p.manifold.codim = 1;
  p.manifold.phi = [h](const GroupoidElement& g) {
    const Vec& q0 = g.source;
    const Vec& q1 = g.target;
    Vec f(1);
    f[0] = (q1[2] - q0[2]) / h - 0.5 * (q1[1] + q0[1]) * (q1[0] - q0[0]) / h;
    return f;
  };
  p.manifold.phi_left_jacobian = [h](const GroupoidElement& g) {
    const Vec& q0 = g.source;
    const Vec& q1 = g.target;
    Mat j(1, 3);
    j << -0.5 * (q1[1] + q0[1]) / h, -0.5 * (q1[0] - q0[0]) / h, 1.0 / h;
    return j;
  };
  p.flags.declared_reversible = true;
  p.validate();
  return p;
}

NhProblem make_holonomic_sphere(double h) {
  require_positive(h, "h");
  NhProblem p{"holonomic_sphere", Groupoid::pair(3), free_pair_lagrangian(h, 0.0), {}, {}, {}};
  p.distribution.rank = 2;
  p.distribution.basis = [](const Vec& q) { return Mat(orthogonal_plane(q.head<3>())); };
  p.distribution.annihilator = [](const Vec& q) { return Mat(q); };
  p.manifold.codim = 1;
  p.manifold.phi = [](const GroupoidElement& g) {
    Vec f(1);
    f[0] = g.target.squaredNorm() - 1.0;
    return f;
  };
  p.manifold.phi_left_jacobian = [](const GroupoidElement& g) {
    return Mat(2.0 * g.target.transpose());
  };
  p.manifold.contains_identities = true;
  p.flags.declared_reversible = true;
  p.validate();
  return p;
}

NhProblem make_suslov(const Mat3& J, double h) {
  require_positive(h, "h");
  if ((J - J.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw DomainError("suslov: inertia must be symmetric");
  const auto calc = matrix_calculus(
      Algebra::so3, [J](const Mat3&) -> Mat3 { return 0.5 * J; },
      [](const Mat3&) -> Mat3 { return Mat3::Zero(); });

  NhProblem p{"suslov", Groupoid::lie_group(GroupKind::SO3), {}, {}, {}, {}};
  p.lagrangian.eval = [J](const GroupoidElement& g) { return 0.5 * (rot(g) * J).trace(); };
  p.lagrangian.left_grad = [calc](const GroupoidElement& g) { return Vec(calc.left(rot(g))); };
  p.lagrangian.right_grad = [calc](const GroupoidElement& g) { return Vec(calc.right(rot(g))); };
  p.lagrangian.cross = [calc](const GroupoidElement& g) { return Mat(calc.cross(rot(g))); };

  p.distribution.rank = 2;
  p.distribution.basis = [](const Vec&) {
    Mat b = Mat::Zero(3, 2);
    b(0, 0) = b(1, 1) = 1.0;
    return b;
  };
  p.distribution.annihilator = [](const Vec&) { return Mat(Vec::Unit(3, 2)); };
  p.manifold.codim = 1;
  const Mat3 e3 = basis_matrix(2, Algebra::so3);
  p.manifold.phi = [e3](const GroupoidElement& g) {
    Vec f(1);
    f[0] = (rot(g) * e3).trace();
    return f;
  };
  p.manifold.phi_left_jacobian = [e3](const GroupoidElement& g) {
    Mat j(1, 3);
    for (int k = 0; k < 3; ++k) j(0, k) = (rot(g) * basis_matrix(k, Algebra::so3) * e3).trace();
    return j;
  };
  p.flags.declared_reversible = true;
  p.validate();
  return p;
}

Mat3 sleigh_inertia(double m, double a, double b, double J) {
  Mat3 jj;
  jj << J / 2 + m * a * a, m * a * b, m * a,
        m * a * b, J / 2 + m * b * b, m * b,
        m * a, m * b, m;
  return jj;
}

NhProblem make_chaplygin_sleigh(double m, double a, double b, double J) {
  require_positive(m, "m");
  require_positive(J, "J");
  const Mat3 jj = sleigh_inertia(m, a, b, J);
  const auto calc = matrix_calculus(
      Algebra::se2, [jj](const Mat3& M) -> Mat3 { return M * jj - jj; },
      [jj](const Mat3& Md) -> Mat3 { return Md * jj; });

  NhProblem p{"chaplygin_sleigh", Groupoid::lie_group(GroupKind::SE2), {}, {}, {}, {}};
  p.lagrangian.eval = [jj](const GroupoidElement& g) {
    const Mat3 M = se2(g).matrix();
    return 0.5 * (M * jj * M.transpose()).trace() - (M * jj).trace();
  };
  p.lagrangian.left_grad = [calc](const GroupoidElement& g) {
    return Vec(calc.left(se2(g).matrix()));
  };
  p.lagrangian.right_grad = [calc](const GroupoidElement& g) {
    return Vec(calc.right(se2(g).matrix()));
  };
  p.lagrangian.cross = [calc](const GroupoidElement& g) {
    return Mat(calc.cross(se2(g).matrix()));
  };

  p.distribution.rank = 2;
  p.distribution.basis = [](const Vec&) {
    Mat b = Mat::Zero(3, 2);
    b(0, 0) = b(1, 1) = 1.0;
    return b;
  };
  p.distribution.annihilator = [](const Vec&) { return Mat(Vec::Unit(3, 2)); };
  p.manifold.codim = 1;
  p.manifold.phi = [](const GroupoidElement& g) {
    const auto& e = se2(g);
    Vec f(1);
    f[0] = e.x * std::sin(e.theta / 2) - e.y * std::cos(e.theta / 2);
    return f;
  };
  p.manifold.phi_left_jacobian = [](const GroupoidElement& g) {
    const auto& e = se2(g);
    const double s = std::sin(e.theta / 2), c = std::cos(e.theta / 2);
    Mat j(1, 3);
    j << 0.5 * (e.x * c + e.y * s), -s, -c;
    return j;
  };
  p.manifold.guard = [](const GroupoidElement& g) {
    if (std::abs(se2(g).theta) >= 3.14159) throw ChartDomain("sleigh: |theta| reaches pi");
  };
  p.flags.declared_reversible = true;
  p.validate();
  return p;
}

NhProblem make_veselova(const VeselovaParams& vp) {
  require_positive(vp.h, "h");
  if ((vp.inertia - vp.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw DomainError("veselova: inertia must be symmetric");
  if (std::abs(vp.e.norm() - 1.0) > 1e-12) throw DomainError("veselova: e must be a unit vector");
  const Mat3 II = 0.5 * vp.inertia.trace() * Mat3::Identity() - vp.inertia;
  const double h = vp.h;
  const double pot = h * vp.m * vp.g * vp.l;
  const Vec3 e = vp.e;

  NhProblem p{"veselova", Groupoid::sphere_action(), {}, {}, {}, {}};
  p.lagrangian.eval = [II, h, pot, e](const GroupoidElement& g) {
    return -(II * rot(g)).trace() / h - pot * g.source.head<3>().dot(e);
  };
  p.lagrangian.left_grad = [II, h](const GroupoidElement& g) {
    Vec d(3);
    for (int k = 0; k < 3; ++k) d[k] = -(II * rot(g) * basis_matrix(k, Algebra::so3)).trace() / h;
    return d;
  };
  p.lagrangian.right_grad = [II, h, pot, e](const GroupoidElement& g) {
    const Vec3 gamma = g.source.head<3>();
    Vec d(3);
    for (int k = 0; k < 3; ++k)
      d[k] = -(II * basis_matrix(k, Algebra::so3) * rot(g)).trace() / h -
             pot * Vec3::Unit(k).cross(gamma).dot(e);
    return d;
  };
  p.lagrangian.cross = [II, h](const GroupoidElement& g) {
    Mat c(3, 3);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        c(a, b) = (II * basis_matrix(a, Algebra::so3) * rot(g) * basis_matrix(b, Algebra::so3))
                      .trace() / h;
    return c;
  };

  p.distribution.rank = 2;
  p.distribution.basis = [](const Vec& x) { return Mat(orthogonal_plane(x.head<3>())); };
  p.distribution.annihilator = [](const Vec& x) { return Mat(x); };
  p.manifold.codim = 1;
  p.manifold.phi = [](const GroupoidElement& g) {
    const Mat3& R = rot(g);
    Vec f(1);
    f[0] = g.source.head<3>().dot(lie::vee(R - R.transpose(), Algebra::so3));
    return f;
  };
  p.manifold.phi_left_jacobian = [](const GroupoidElement& g) {
    const Mat3& R = rot(g);
    Mat j(1, 3);
    for (int k = 0; k < 3; ++k) {
      const Mat3 ek = basis_matrix(k, Algebra::so3);
      j(0, k) = g.source.head<3>().dot(lie::vee(R * ek + ek * R.transpose(), Algebra::so3));
    }
    return j;
  };
  p.manifold.guard = [](const GroupoidElement& g) {
    const double tr = rot(g).trace();
    if (std::abs(tr - 1.0) <= 1e-6 || std::abs(tr + 1.0) <= 1e-6)
      throw ChartDomain("veselova: iterate on the critical set of the constraint");
  };
  p.flags.declared_reversible = false;
  p.validate();
  return p;
}

GroupoidElement veselova_element(const NhProblem& p, const Vec3& gamma, const Vec3& xi) {
  const GroupoidElement g =
      p.groupoid.make_action(gamma.normalized(), lie::exp_so3(xi));
  return project_to_manifold(p, g);
}

// ---------------------------------------------------------------------------

double ball_alpha(const RollingBallParams& p) { return p.I * p.omega / (p.I + p.m * p.r * p.r); }

Eigen::Matrix2d ball_velocity_map(double alpha, double h) {
  const double a2 = alpha * alpha * h * h;
  Eigen::Matrix2d A;
  A << 4.0 - a2, -4.0 * alpha * h, 4.0 * alpha * h, 4.0 - a2;
  return A / (4.0 + a2);
}

Eigen::Vector2d closed_form_ball(const Eigen::Vector4d& s, double alpha, double h) {
  const double a2 = alpha * alpha * h * h;
  const double d = a2 + 4.0;
  return {(8.0 * s[2] + (a2 - 4.0) * s[0] - 4.0 * alpha * h * (s[3] - s[1])) / d,
          (8.0 * s[3] + (a2 - 4.0) * s[1] + 4.0 * alpha * h * (s[2] - s[0])) / d};
}

NhProblem make_rolling_ball(const RollingBallParams& bp) {
  require_positive(bp.m, "m");
  require_positive(bp.r, "r");
  require_positive(bp.I, "I");
  require_positive(bp.h, "h");
  const double h = bp.h, h2 = h * h, m = bp.m, r = bp.r, I = bp.I, w = bp.omega;
  const Mat3 E1 = basis_matrix(0, Algebra::so3), E2 = basis_matrix(1, Algebra::so3);

  NhProblem p{"rolling_ball", Groupoid::atiyah(2, GroupKind::SO3), {}, {}, {}, {}};
  p.lagrangian.eval = [=](const GroupoidElement& g) {
    return 0.5 * m * (g.target - g.source).squaredNorm() / h2 - I / (2 * h2) * rot(g).trace();
  };
  p.lagrangian.left_grad = [=](const GroupoidElement& g) {
    Vec d(5);
    d.head<2>() = m * (g.target - g.source) / h2;
    for (int k = 0; k < 3; ++k)
      d[2 + k] = -I / (2 * h2) * (rot(g) * basis_matrix(k, Algebra::so3)).trace();
    return d;
  };
  p.lagrangian.right_grad = [=](const GroupoidElement& g) {
    Vec d(5);
    d.head<2>() = m * (g.target - g.source) / h2;
    for (int k = 0; k < 3; ++k)
      d[2 + k] = -I / (2 * h2) * (basis_matrix(k, Algebra::so3) * rot(g)).trace();
    return d;
  };
  p.lagrangian.cross = [=](const GroupoidElement& g) {
    Mat c = Mat::Zero(5, 5);
    c.topLeftCorner<2, 2>() = -m / h2 * Eigen::Matrix2d::Identity();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        c(2 + a, 2 + b) = I / (2 * h2) *
                          (basis_matrix(a, Algebra::so3) * rot(g) * basis_matrix(b, Algebra::so3))
                              .trace();
    return c;
  };

  p.distribution.rank = 3;
  p.distribution.basis = [r](const Vec&) {
    Mat b = Mat::Zero(5, 3);
    b(4, 0) = 1.0;
    b(0, 1) = r;
    b(3, 1) = 1.0;
    b(1, 2) = r;
    b(2, 2) = -1.0;
    return b;
  };
  p.distribution.annihilator = [r](const Vec&) {
    Mat a = Mat::Zero(5, 2);
    a(0, 0) = 1.0;
    a(3, 0) = -r;
    a(1, 1) = 1.0;
    a(2, 1) = r;
    return a;
  };
  p.manifold.codim = 2;
  p.manifold.phi = [=](const GroupoidElement& g) {
    const Vec& a = g.source;
    const Vec& b = g.target;
    const Mat3& W = rot(g);
    Vec f(2);
    f[0] = (b[0] - a[0]) / h + r / (2 * h) * (W * E2).trace() + w * (b[1] + a[1]) / 2;
    f[1] = (b[1] - a[1]) / h - r / (2 * h) * (W * E1).trace() - w * (b[0] + a[0]) / 2;
    return f;
  };
  p.manifold.phi_left_jacobian = [=](const GroupoidElement& g) {
    const Mat3& W = rot(g);
    Mat j(2, 5);
    j(0, 0) = 1.0 / h;
    j(0, 1) = w / 2;
    j(1, 0) = -w / 2;
    j(1, 1) = 1.0 / h;
    for (int k = 0; k < 3; ++k) {
      const Mat3 wk = W * basis_matrix(k, Algebra::so3);
      j(0, 2 + k) = r / (2 * h) * (wk * E2).trace();
      j(1, 2 + k) = -r / (2 * h) * (wk * E1).trace();
    }
    return j;
  };
  p.manifold.contains_identities = false;
  p.flags.declared_reversible = false;
  p.validate();
  return p;
}

GroupoidElement rolling_ball_element(const RollingBallParams& bp, double x0, double y0,
                                     double x1, double y1) {
  const double h = bp.h, r = bp.r, w = bp.omega;
  // Tr(W E_i) = -2 sin(t) n_i for W = exp(t n).
  const double t2 = 2 * h / r * (-(x1 - x0) / h - w * (y1 + y0) / 2);
  const double t1 = 2 * h / r * ((y1 - y0) / h - w * (x1 + x0) / 2);
  const Vec3 s(-t1 / 2, -t2 / 2, 0.0);
  const double sn = s.norm();
  if (sn > 1.0) throw DomainError("rolling ball: increments too large for one step");
  const Vec3 axis_angle = sn > 0 ? Vec3(std::asin(sn) / sn * s) : Vec3::Zero();
  Vec a(2), b(2);
  a << x0, y0;
  b << x1, y1;
  return Groupoid::atiyah(2, GroupKind::SO3).make_atiyah(a, b, lie::exp_so3(axis_angle));
}

// ---------------------------------------------------------------------------

Mat3 robot_inertia(const RobotParams& p) {
  const double mass = p.m0 + 2 * p.m1;
  Mat3 jj;
  jj << p.J / 2, 0.0, p.m0 * p.l,
        0.0, p.J / 2, 0.0,
        p.m0 * p.l, 0.0, mass;
  return jj;
}

NhProblem make_mobile_robot(const RobotParams& rp) {
  for (double v : {rp.m0, rp.m1, rp.J, rp.J1, rp.R, rp.c, rp.h}) require_positive(v, "robot parameter");
  const Mat3 jj = robot_inertia(rp);
  const double h2 = rp.h * rp.h, J1 = rp.J1, R = rp.R, c = rp.c;
  const auto calc = matrix_calculus(
      Algebra::se2,
      [jj, h2](const Mat3& M) -> Mat3 { return (M - Mat3::Identity()) * jj / h2; },
      [jj, h2](const Mat3& Md) -> Mat3 { return Md * jj / h2; });

  NhProblem p{"mobile_robot", Groupoid::atiyah(2, GroupKind::SE2), {}, {}, {}, {}};
  p.lagrangian.eval = [=](const GroupoidElement& g) {
    const Mat3 D = se2(g).matrix() - Mat3::Identity();
    return (D * jj * D.transpose()).trace() / (2 * h2) +
           J1 / (2 * h2) * (g.target - g.source).squaredNorm();
  };
  p.lagrangian.left_grad = [=](const GroupoidElement& g) {
    Vec d(5);
    d.head<2>() = J1 * (g.target - g.source) / h2;
    d.tail<3>() = calc.left(se2(g).matrix());
    return d;
  };
  p.lagrangian.right_grad = [=](const GroupoidElement& g) {
    Vec d(5);
    d.head<2>() = J1 * (g.target - g.source) / h2;
    d.tail<3>() = calc.right(se2(g).matrix());
    return d;
  };
  p.lagrangian.cross = [=](const GroupoidElement& g) {
    Mat cm = Mat::Zero(5, 5);
    cm.topLeftCorner<2, 2>() = -J1 / h2 * Eigen::Matrix2d::Identity();
    cm.bottomRightCorner<3, 3>() = calc.cross(se2(g).matrix());
    return cm;
  };

  p.distribution.rank = 2;
  p.distribution.basis = [R, c](const Vec&) {
    Mat b = Mat::Zero(5, 2);
    b.col(0) << -1.0, 0.0, R / (2 * c), R / 2, 0.0;
    b.col(1) << 0.0, -1.0, -R / (2 * c), R / 2, 0.0;
    return b;
  };
  p.distribution.annihilator = [R, c](const Vec&) {
    Mat a = Mat::Zero(5, 3);
    a.col(0) << 0.0, 0.0, 0.0, 0.0, 1.0;
    a.col(1) << R / (2 * c), -R / (2 * c), 1.0, 0.0, 0.0;
    a.col(2) << R / 2, R / 2, 0.0, 1.0, 0.0;
    return a;
  };
  p.manifold.codim = 3;
  p.manifold.phi = [R, c](const GroupoidElement& g) {
    const Vec d = g.target - g.source;
    const double s = R * (d[0] - d[1]) / (2 * c);
    const double S = R / 2 * (d[0] + d[1]);
    const auto& e = se2(g);
    Vec f(3);
    f << lie::wrap_angle(e.theta + s), e.x + S * sinc(s), e.y - S * versinc(s);
    return f;
  };
  p.manifold.phi_left_jacobian = [R, c](const GroupoidElement& g) {
    const Vec d = g.target - g.source;
    const double s = R * (d[0] - d[1]) / (2 * c);
    const double S = R / 2 * (d[0] + d[1]);
    const auto& e = se2(g);
    const double ct = std::cos(e.theta), st = std::sin(e.theta);
    const double ds[2] = {R / (2 * c), -R / (2 * c)};
    Mat j = Mat::Zero(3, 5);
    for (int i = 0; i < 2; ++i) {
      j(0, i) = ds[i];
      j(1, i) = R / 2 * sinc(s) + S * sinc_prime(s) * ds[i];
      j(2, i) = -(R / 2 * versinc(s) + S * versinc_prime(s) * ds[i]);
    }
    j(0, 2) = 1.0;
    j(1, 3) = ct;
    j(1, 4) = -st;
    j(2, 3) = st;
    j(2, 4) = ct;
    return j;
  };
  p.manifold.guard = [](const GroupoidElement& g) {
    if (std::abs(se2(g).theta) >= 3.14159) throw ChartDomain("robot: |theta| reaches pi");
  };
  p.flags.declared_reversible = true;
  p.flags.chaplygin = true;
  p.validate();
  return p;
}

GroupoidElement robot_element(const RobotParams& rp, double phi0, double psi0, double dphi,
                              double dpsi) {
  const double s = rp.R * (dphi - dpsi) / (2 * rp.c);
  const double S = rp.R / 2 * (dphi + dpsi);
  Vec a(2), b(2);
  a << phi0, psi0;
  b << phi0 + dphi, psi0 + dpsi;
  return Groupoid::atiyah(2, GroupKind::SE2)
      .make_atiyah(a, b, SE2Element(-s, -S * sinc(s), S * versinc(s)));
}

}  // namespace nhmech::models
