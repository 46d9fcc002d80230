#include "nhmech/groupoid.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "nhmech/errors.hpp"

namespace nhmech {

namespace {

using lie::GroupKind;
using lie::Rotation3;
using lie::SE2Element;
using lie::Vec3;

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_group_chart(const Vec3& u, GroupKind group) {
  const double size = group == GroupKind::SO3 ? u.norm() : std::abs(u[0]);
  if (!(size < std::numbers::pi)) throw ChartDomain("chart coordinate reaches the cut locus");
}

Vec3 group_part(const Vec& u, int offset) { return u.segment<3>(offset); }

double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

Groupoid Groupoid::pair(int m) {
  if (m <= 0) throw DomainError("pair groupoid needs positive dimension");
  return Groupoid(BackendKind::Pair, m, std::nullopt);
}

Groupoid Groupoid::lie_group(GroupKind group) {
  return Groupoid(BackendKind::LieGroup, 0, group);
}

Groupoid Groupoid::sphere_action() {
  return Groupoid(BackendKind::Action, 3, GroupKind::SO3);
}

Groupoid Groupoid::atiyah(int m, GroupKind group) {
  if (m <= 0) throw DomainError("Atiyah groupoid needs positive base dimension");
  return Groupoid(BackendKind::Atiyah, m, group);
}

int Groupoid::base_dim() const {
  switch (kind_) {
    case BackendKind::Pair:
    case BackendKind::Atiyah:
      return base_coords_;
    case BackendKind::LieGroup:
      return 0;
    case BackendKind::Action:
      return 2;
  }
  return 0;
}

int Groupoid::rank() const {
  switch (kind_) {
    case BackendKind::Pair:
      return base_coords_;
    case BackendKind::LieGroup:
    case BackendKind::Action:
      return 3;
    case BackendKind::Atiyah:
      return base_coords_ + 3;
  }
  return 0;
}

GroupoidElement Groupoid::make_pair(const Vec& q0, const Vec& q1) const {
  if (kind_ != BackendKind::Pair || q0.size() != base_coords_ || q1.size() != base_coords_)
    throw DomainError("make_pair: backend or dimension mismatch");
  return {q0, q1, std::nullopt};
}

GroupoidElement Groupoid::make_group(const lie::GroupElement& g) const {
  if (kind_ != BackendKind::LieGroup || lie::kind(g) != *group_)
    throw DomainError("make_group: backend mismatch");
  return {Vec(0), Vec(0), g};
}

GroupoidElement Groupoid::make_action(const Vec3& x, const Rotation3& h) const {
  if (kind_ != BackendKind::Action) throw DomainError("make_action: backend mismatch");
  if (std::abs(x.norm() - 1.0) > 1e-9) throw DomainError("sphere base point is not unit");
  return {Vec(x), Vec(h.matrix().transpose() * x), lie::GroupElement(h)};
}

GroupoidElement Groupoid::make_atiyah(const Vec& x, const Vec& y,
                                      const lie::GroupElement& g) const {
  if (kind_ != BackendKind::Atiyah || x.size() != base_coords_ || y.size() != base_coords_ ||
      lie::kind(g) != *group_)
    throw DomainError("make_atiyah: backend or dimension mismatch");
  return {x, y, g};
}

bool Groupoid::composable(const GroupoidElement& g, const GroupoidElement& h,
                          double tol) const {
  if (g.target.size() != h.source.size()) return false;
  return max_abs(g.target - h.source) <= tol;
}

GroupoidElement Groupoid::compose(const GroupoidElement& g, const GroupoidElement& h) const {
  if (!composable(g, h)) throw NotComposable("target(g) != source(h)");
  switch (kind_) {
    case BackendKind::Pair:
      return {g.source, h.target, std::nullopt};
    case BackendKind::LieGroup:
      return {Vec(0), Vec(0), lie::multiply(*g.group, *h.group)};
    case BackendKind::Action: {
      const auto gh = lie::multiply(*g.group, *h.group);
      return {g.source, Vec(lie::matrix(gh).transpose() * g.source), gh};
    }
    case BackendKind::Atiyah:
      return {g.source, h.target, lie::multiply(*g.group, *h.group)};
  }
  return g;
}

GroupoidElement Groupoid::invert(const GroupoidElement& g) const {
  switch (kind_) {
    case BackendKind::Pair:
      return {g.target, g.source, std::nullopt};
    case BackendKind::LieGroup:
      return {Vec(0), Vec(0), lie::inverse(*g.group)};
    case BackendKind::Action:
    case BackendKind::Atiyah:
      return {g.target, g.source, lie::inverse(*g.group)};
  }
  return g;
}

GroupoidElement Groupoid::identity_at(const Vec& x) const {
  switch (kind_) {
    case BackendKind::Pair:
      return make_pair(x, x);
    case BackendKind::LieGroup:
      return {Vec(0), Vec(0), lie::group_identity(*group_)};
    case BackendKind::Action:
      if (x.size() != 3 || std::abs(x.norm() - 1.0) > 1e-9)
        throw DomainError("sphere base point is not unit");
      return {x, x, lie::group_identity(*group_)};
    case BackendKind::Atiyah:
      return make_atiyah(x, x, lie::group_identity(*group_));
  }
  return {};
}

GroupoidElement Groupoid::fiber_retract(const GroupoidElement& g, const Vec& u) const {
  if (u.size() != rank()) throw DomainError("fiber_retract: chart dimension mismatch");
  switch (kind_) {
    case BackendKind::Pair:
      return {g.source, g.target + u, std::nullopt};
    case BackendKind::LieGroup: {
      check_group_chart(group_part(u, 0), *group_);
      return {Vec(0), Vec(0),
              lie::multiply(*g.group, lie::group_exp(group_part(u, 0), *group_))};
    }
    case BackendKind::Action: {
      check_group_chart(group_part(u, 0), *group_);
      const auto h = lie::multiply(*g.group, lie::group_exp(group_part(u, 0), *group_));
      return {g.source, Vec(lie::matrix(h).transpose() * g.source), h};
    }
    case BackendKind::Atiyah: {
      const int m = base_coords_;
      check_group_chart(group_part(u, m), *group_);
      return {g.source, g.target + u.head(m),
              lie::multiply(*g.group, lie::group_exp(group_part(u, m), *group_))};
    }
  }
  return g;
}

Vec Groupoid::displacement(const GroupoidElement& g) const {
  switch (kind_) {
    case BackendKind::Pair:
      return g.target - g.source;
    case BackendKind::LieGroup:
    case BackendKind::Action:
      return lie::group_log(*g.group);
    case BackendKind::Atiyah: {
      Vec u(rank());
      u.head(base_coords_) = g.target - g.source;
      u.tail<3>() = lie::group_log(*g.group);
      return u;
    }
  }
  return Vec();
}

GroupoidElement Groupoid::left_curve(const GroupoidElement& g, const Vec& v, double t) const {
  return fiber_retract(g, t * v);
}

GroupoidElement Groupoid::right_curve(const GroupoidElement& g, const Vec& v, double t) const {
  const GroupoidElement delta = fiber_retract(identity_at(g.source), t * v);
  return compose(invert(delta), g);
}

double Groupoid::distance(const GroupoidElement& a, const GroupoidElement& b) const {
  double d = 0.0;
  if (a.source.size()) d = std::max(d, max_abs(a.source - b.source));
  if (a.target.size()) d = std::max(d, max_abs(a.target - b.target));
  if (a.group) d = std::max(d, (lie::matrix(*a.group) - lie::matrix(*b.group)).cwiseAbs().maxCoeff());
  return d;
}

double Groupoid::coordinate_scale(const GroupoidElement& g) {
  return std::max(max_abs(g.source), max_abs(g.target));
}

Vec Groupoid::coordinates(const GroupoidElement& g) const {
  std::vector<double> c;
  for (double v : g.source) c.push_back(v);
  if (kind_ == BackendKind::Pair || kind_ == BackendKind::Atiyah)
    for (double v : g.target) c.push_back(v);
  if (g.group) {
    if (const auto* r = std::get_if<Rotation3>(&*g.group)) {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) c.push_back(r->matrix()(i, j));
    } else {
      const auto& e = std::get<SE2Element>(*g.group);
      c.insert(c.end(), {e.theta, e.x, e.y});
    }
  }
  return Eigen::Map<Vec>(c.data(), static_cast<Eigen::Index>(c.size()));
}

std::vector<std::string> Groupoid::coordinate_names() const {
  std::vector<std::string> names;
  const int m = base_coords_;
  auto add_base = [&](const std::string& prefix) {
    for (int i = 0; i < m; ++i) names.push_back(prefix + std::to_string(i + 1));
  };
  switch (kind_) {
    case BackendKind::Pair:
      add_base("q0_");
      add_base("q1_");
      break;
    case BackendKind::Action:
      add_base("gamma_");
      break;
    case BackendKind::Atiyah:
      add_base("x_");
      add_base("y_");
      break;
    case BackendKind::LieGroup:
      break;
  }
  if (group_ == GroupKind::SO3) {
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) names.push_back("g_" + std::to_string(i) + std::to_string(j));
  } else if (group_ == GroupKind::SE2) {
    names.insert(names.end(), {"g_theta", "g_x", "g_y"});
  }
  return names;
}

GroupoidElement Groupoid::from_coordinates(const Vec& c) const {
  const int m = base_coords_;
  const int nb = (kind_ == BackendKind::Pair || kind_ == BackendKind::Atiyah) ? 2 * m : m;
  const int ng = !group_ ? 0 : (*group_ == GroupKind::SO3 ? 9 : 3);
  if (c.size() != nb + ng) throw DomainError("from_coordinates: wrong length");
  std::optional<lie::GroupElement> grp;
  if (group_ == GroupKind::SO3) {
    lie::Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = c[nb + 3 * i + j];
    grp = Rotation3::checked(r, 1e-9);
  } else if (group_ == GroupKind::SE2) {
    grp = SE2Element(c[nb], c[nb + 1], c[nb + 2]);
  }
  switch (kind_) {
    case BackendKind::Pair:
      return make_pair(c.head(m), c.segment(m, m));
    case BackendKind::LieGroup:
      return make_group(*grp);
    case BackendKind::Action:
      return make_action(c.head<3>(), std::get<Rotation3>(*grp));
    case BackendKind::Atiyah:
      return make_atiyah(c.head(m), c.segment(m, m), *grp);
  }
  return {};
}

GroupoidElement Groupoid::reorthonormalize(const GroupoidElement& g) const {
  GroupoidElement out = g;
  if (g.group) {
    if (const auto* r = std::get_if<Rotation3>(&*g.group)) out.group = r->orthonormalized();
  }
  if (kind_ == BackendKind::Action) out.target = lie::matrix(*out.group).transpose() * out.source;
  return out;
}

// ---------------------------------------------------------------------------
// Derivative engine

namespace {

double first_step(const GroupoidElement& g, const DerivativeOptions& opts) {
  if (opts.fd_step > 0) return opts.fd_step;
  return std::cbrt(kEps) * (1.0 + Groupoid::coordinate_scale(g));
}

double second_step(const GroupoidElement& g, const DerivativeOptions& opts) {
  if (opts.fd_step > 0) return opts.fd_step;
  return std::sqrt(std::sqrt(kEps)) * (1.0 + Groupoid::coordinate_scale(g));
}

}  // namespace

double left_deriv(const Groupoid& G, const GroupoidFunction& L, const GroupoidElement& g,
                  const Vec& v, const DerivativeOptions& opts) {
  if (L.left_grad && !opts.finite_differences) return L.left_grad(g).dot(v);
  const double nv = v.norm();
  if (nv == 0.0) return 0.0;
  const Vec w = v / nv;
  const double t = first_step(g, opts);
  return nv * (L.eval(G.left_curve(g, w, t)) - L.eval(G.left_curve(g, w, -t))) / (2.0 * t);
}

double right_deriv(const Groupoid& G, const GroupoidFunction& L, const GroupoidElement& g,
                   const Vec& v, const DerivativeOptions& opts) {
  if (L.right_grad && !opts.finite_differences) return L.right_grad(g).dot(v);
  const double nv = v.norm();
  if (nv == 0.0) return 0.0;
  const Vec w = v / nv;
  const double t = first_step(g, opts);
  return -nv * (L.eval(G.right_curve(g, w, t)) - L.eval(G.right_curve(g, w, -t))) / (2.0 * t);
}

Vec left_grad(const Groupoid& G, const GroupoidFunction& L, const GroupoidElement& g,
              const DerivativeOptions& opts) {
  if (L.left_grad && !opts.finite_differences) return L.left_grad(g);
  const int n = G.rank();
  Vec out(n);
  for (int k = 0; k < n; ++k) out[k] = left_deriv(G, L, g, Vec::Unit(n, k), opts);
  return out;
}

Vec right_grad(const Groupoid& G, const GroupoidFunction& L, const GroupoidElement& g,
               const DerivativeOptions& opts) {
  if (L.right_grad && !opts.finite_differences) return L.right_grad(g);
  const int n = G.rank();
  Vec out(n);
  for (int k = 0; k < n; ++k) out[k] = right_deriv(G, L, g, Vec::Unit(n, k), opts);
  return out;
}

double cross_form(const Groupoid& G, const GroupoidFunction& L, const GroupoidElement& g,
                  const Vec& a, const Vec& b, const DerivativeOptions& opts) {
  if (L.cross && !opts.finite_differences) return a.dot(L.cross(g) * b);
  if (L.right_grad && !opts.finite_differences) {
    const double nb = b.norm();
    if (nb == 0.0) return 0.0;
    const Vec w = b / nb;
    const double t = first_step(g, opts);
    const double fp = L.right_grad(G.left_curve(g, w, t)).dot(a);
    const double fm = L.right_grad(G.left_curve(g, w, -t)).dot(a);
    return -nb * (fp - fm) / (2.0 * t);
  }
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  const Vec wa = a / na, wb = b / nb;
  const double s = second_step(g, opts);
  auto f = [&](double ss, double tt) {
    return L.eval(G.right_curve(G.left_curve(g, wb, tt), wa, ss));
  };
  return na * nb * (f(s, s) - f(s, -s) - f(-s, s) + f(-s, -s)) / (4.0 * s * s);
}

Mat cross_matrix(const Groupoid& G, const GroupoidFunction& L, const GroupoidElement& g,
                 const DerivativeOptions& opts) {
  if (L.cross && !opts.finite_differences) return L.cross(g);
  const int n = G.rank();
  Mat out(n, n);
  if (L.right_grad && !opts.finite_differences) {
    const double t = first_step(g, opts);
    for (int b = 0; b < n; ++b) {
      const Vec e = Vec::Unit(n, b);
      out.col(b) = -(L.right_grad(G.left_curve(g, e, t)) - L.right_grad(G.left_curve(g, e, -t))) /
                   (2.0 * t);
    }
    return out;
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      out(a, b) = cross_form(G, L, g, Vec::Unit(n, a), Vec::Unit(n, b), opts);
  return out;
}

}  // namespace nhmech
