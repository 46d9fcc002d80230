#pragma once

#include <Eigen/Core>

#include "nhmech/problem.hpp"

namespace nhmech::models {

using lie::Mat3;
using lie::Vec3;

struct VeselovaParams {
  Mat3 inertia = Mat3::Identity();
  double m = 1.0;
  double g = 9.81;
  double l = 1.0;
  Vec3 e = Vec3(0.0, 0.0, 1.0);
  double h = 0.01;
};

struct RollingBallParams {
  double m = 1.0;
  double r = 1.0;
  double I = 0.4;
  double omega = 1.0;  // angular rate of the turntable
  double h = 0.01;
};

/// Two-wheeled robot. J1 is the wheel inertia, l the offset of the centre
/// of mass along the body axis, c the half distance between the wheels.
struct RobotParams {
  double m0 = 1.0;
  double m1 = 0.1;
  double J = 1.0;
  double J1 = 0.1;
  double R = 0.5;
  double c = 1.0;
  double l = 0.2;
  double h = 0.01;
};

/// Particle in R³ with constraint zdot = y xdot. `force_x` adds a uniform
/// force along x (potential force_x·x averaged over the step).
NhProblem make_constrained_particle(double h, double force_x = 0.0);
NhProblem make_holonomic_sphere(double h);
NhProblem make_suslov(const Mat3& J, double h);
NhProblem make_chaplygin_sleigh(double m, double a, double b, double J);
NhProblem make_veselova(const VeselovaParams& p);
NhProblem make_rolling_ball(const RollingBallParams& p);
NhProblem make_mobile_robot(const RobotParams& p);

/// Inertia-like matrix of the sleigh Lagrangian.
Mat3 sleigh_inertia(double m, double a, double b, double J);
Mat3 robot_inertia(const RobotParams& p);

double ball_alpha(const RollingBallParams& p);
/// Velocity map (u, v) -> (u', v') of the rolling ball in closed form.
Eigen::Matrix2d ball_velocity_map(double alpha, double h);
/// (x_k, y_k, x_{k+1}, y_{k+1}) -> (x_{k+2}, y_{k+2}).
Eigen::Vector2d closed_form_ball(const Eigen::Vector4d& state, double alpha, double h);

/// Element ((p0, p1), W) on the constraint manifold with the E3 component of
/// log W equal to zero. Throws DomainError if the data cannot be matched.
GroupoidElement rolling_ball_element(const RollingBallParams& p, double x0, double y0,
                                     double x1, double y1);
/// Element ((phi0, psi0), (phi0+dphi, psi0+dpsi)) with the group part fixed
/// by the rolling constraints.
GroupoidElement robot_element(const RobotParams& p, double phi0, double psi0, double dphi,
                              double dpsi);
/// (gamma, exp(xi)) with xi projected to satisfy the constraint.
GroupoidElement veselova_element(const NhProblem& p, const Vec3& gamma, const Vec3& xi);

/// Orthonormal basis of the plane orthogonal to q (3 x 2).
Eigen::Matrix<double, 3, 2> orthogonal_plane(const Vec3& q);

double sinc(double s);
/// (1 - cos s) / s with value 0 at s = 0.
double versinc(double s);

}  // namespace nhmech::models
