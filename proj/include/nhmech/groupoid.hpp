#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nhmech/lie.hpp"

namespace nhmech {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class BackendKind { Pair, LieGroup, Action, Atiyah };

/// @brief A point of a Lie groupoid.
///
/// Base points are stored in the coordinates of the backend base
/// (empty for Lie groups, a unit 3-vector for the sphere action).
/// The target is cached; backends keep it consistent.
struct GroupoidElement {
  Vec source;
  Vec target;
  std::optional<lie::GroupElement> group;
};

/// @brief One of the four supported groupoid structures.
///
/// Algebroid vectors are coordinate vectors of length rank() in the
/// backend's canonical section basis:
///   Pair      d/dq^i
///   LieGroup  standard algebra basis
///   Action    constant sections C_eta for the algebra basis
///   Atiyah    (d/dx^i of the base, then algebra basis)
class Groupoid {
 public:
  static Groupoid pair(int m);
  static Groupoid lie_group(lie::GroupKind group);
  /// S² with SO(3) acting on the right by x·h = hᵀx.
  static Groupoid sphere_action();
  static Groupoid atiyah(int m, lie::GroupKind group);

  BackendKind kind() const { return kind_; }
  /// Manifold dimension of the base.
  int base_dim() const;
  /// Length of stored base coordinate vectors.
  int base_coords() const { return base_coords_; }
  /// Rank n of the Lie algebroid.
  int rank() const;
  std::optional<lie::GroupKind> group_kind() const { return group_; }

  GroupoidElement make_pair(const Vec& q0, const Vec& q1) const;
  GroupoidElement make_group(const lie::GroupElement& g) const;
  GroupoidElement make_action(const lie::Vec3& x, const lie::Rotation3& h) const;
  GroupoidElement make_atiyah(const Vec& x, const Vec& y, const lie::GroupElement& g) const;

  GroupoidElement compose(const GroupoidElement& g, const GroupoidElement& h) const;
  GroupoidElement invert(const GroupoidElement& g) const;
  GroupoidElement identity_at(const Vec& x) const;

  /// Chart on the source fibre through g. Throws ChartDomain when the group
  /// part of u reaches the cut locus.
  GroupoidElement fiber_retract(const GroupoidElement& g, const Vec& u) const;
  /// Chart coordinates of g in the chart centred at identity_at(source(g)).
  Vec displacement(const GroupoidElement& g) const;

  /// g·delta(t,v), delta the fibre curve through the identity at target(g).
  GroupoidElement left_curve(const GroupoidElement& g, const Vec& v, double t) const;
  /// delta(t,v)^{-1}·g, delta the fibre curve through the identity at source(g).
  GroupoidElement right_curve(const GroupoidElement& g, const Vec& v, double t) const;

  /// Max-abs difference over base coordinates and group matrix entries.
  double distance(const GroupoidElement& a, const GroupoidElement& b) const;
  /// Scale of the stored coordinates, used to size finite-difference steps.
  static double coordinate_scale(const GroupoidElement& g);

  /// Flat storage coordinates: source, then target (Pair, Atiyah), then
  /// group matrix entries row-major (SO(3)) or (theta, x, y) (SE(2)).
  Vec coordinates(const GroupoidElement& g) const;
  std::vector<std::string> coordinate_names() const;
  GroupoidElement from_coordinates(const Vec& c) const;

  /// Replaces rotation parts by their polar projection.
  GroupoidElement reorthonormalize(const GroupoidElement& g) const;

  bool composable(const GroupoidElement& g, const GroupoidElement& h,
                  double tol = 1e-9) const;

 private:
  Groupoid(BackendKind kind, int base_coords, std::optional<lie::GroupKind> group)
      : kind_(kind), base_coords_(base_coords), group_(group) {}

  BackendKind kind_;
  int base_coords_;
  std::optional<lie::GroupKind> group_;
};

/// @brief Real function on a groupoid with optional analytic derivatives.
///
/// left_grad(g)[k] is the left-invariant derivative along the k-th basis
/// section at target(g); right_grad(g)[k] the right-invariant derivative
/// along the k-th basis section at source(g); cross(g) the matrix of
/// cross_form in the canonical bases.
struct GroupoidFunction {
  std::function<double(const GroupoidElement&)> eval;
  std::function<Vec(const GroupoidElement&)> left_grad;
  std::function<Vec(const GroupoidElement&)> right_grad;
  std::function<Mat(const GroupoidElement&)> cross;
};

struct DerivativeOptions {
  bool finite_differences = false;  // ignore analytic closures
  double fd_step = 0.0;             // 0 selects the default step
};

/// d/dt L(g·delta(t,v)) at t = 0.
double left_deriv(const Groupoid& G, const GroupoidFunction& L, const GroupoidElement& g,
                  const Vec& v, const DerivativeOptions& opts = {});
/// -d/dt L(delta(t,v)^{-1}·g) at t = 0; on a Lie group d/dt L(exp(t v)·g).
double right_deriv(const Groupoid& G, const GroupoidFunction& L, const GroupoidElement& g,
                   const Vec& v, const DerivativeOptions& opts = {});

Vec left_grad(const Groupoid& G, const GroupoidFunction& L, const GroupoidElement& g,
              const DerivativeOptions& opts = {});
Vec right_grad(const Groupoid& G, const GroupoidFunction& L, const GroupoidElement& g,
               const DerivativeOptions& opts = {});

/// G_g(a, b) = -rvec_a(lvec_b L)(g), a at source(g), b at target(g).
double cross_form(const Groupoid& G, const GroupoidFunction& L, const GroupoidElement& g,
                  const Vec& a, const Vec& b, const DerivativeOptions& opts = {});
/// Matrix of cross_form in the canonical bases (rows a, columns b).
Mat cross_matrix(const Groupoid& G, const GroupoidFunction& L, const GroupoidElement& g,
                 const DerivativeOptions& opts = {});

}  // namespace nhmech
