#pragma once

#include <Eigen/Core>
#include <variant>

namespace nhmech::lie {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class Algebra { so3, se2 };
enum class GroupKind { SO3, SE2 };

/// @brief Element of SO(3) stored as an orthogonal 3x3 matrix.
///
/// The constructor does not validate; use checked() for external input.
class Rotation3 {
 public:
  Rotation3() : r_(Mat3::Identity()) {}
  explicit Rotation3(const Mat3& r) : r_(r) {}

  /// Throws DomainError unless rᵀr = I and det r = 1 within tol.
  static Rotation3 checked(const Mat3& r, double tol = 1e-12);

  const Mat3& matrix() const { return r_; }
  Rotation3 operator*(const Rotation3& o) const { return Rotation3(r_ * o.r_); }
  Rotation3 inverse() const { return Rotation3(r_.transpose()); }

  /// Nearest rotation in the Frobenius norm (polar projection).
  Rotation3 orthonormalized() const;
  double orthogonality_defect() const;

 private:
  Mat3 r_;
};

/// @brief Element of SE(2) in coordinates (theta, x, y).
///
/// Homogeneous form [[cos, -sin, x], [sin, cos, y], [0, 0, 1]].
/// theta is kept in (-pi, pi].
struct SE2Element {
  double theta = 0.0;
  double x = 0.0;
  double y = 0.0;

  SE2Element() = default;
  SE2Element(double theta_, double x_, double y_);

  Mat3 matrix() const;
  SE2Element operator*(const SE2Element& o) const;
  SE2Element inverse() const;
};

using GroupElement = std::variant<Rotation3, SE2Element>;

double wrap_angle(double a);

Mat3 hat(const Vec3& v, Algebra algebra);
Vec3 vee(const Mat3& m, Algebra algebra);

Rotation3 exp_so3(const Vec3& w);
SE2Element exp_se2(const Vec3& xi);
GroupElement group_exp(const Vec3& xi, GroupKind group);

/// Throws DomainError on the cut locus (trace = -1).
Vec3 log_so3(const Rotation3& r);
/// Throws DomainError when |theta| >= pi.
Vec3 log_se2(const SE2Element& g);
Vec3 group_log(const GroupElement& g);

GroupKind kind(const GroupElement& g);
Algebra algebra_of(GroupKind group);
GroupElement group_identity(GroupKind group);
GroupElement multiply(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& g);
Mat3 matrix(const GroupElement& g);

/// Ad_g as a 3x3 matrix in the standard algebra basis.
Mat3 adjoint_matrix(const GroupElement& g);
Vec3 adjoint(const GroupElement& g, const Vec3& xi);
/// Ad*_g p, defined by <Ad*_g p, xi> = <p, Ad_g xi>.
Vec3 coadjoint(const GroupElement& g, const Vec3& p);

}  // namespace nhmech::lie
