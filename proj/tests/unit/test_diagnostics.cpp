#include <gtest/gtest.h>

#include <random>

#include "nhmech/config.hpp"
#include "nhmech/diagnostics.hpp"
#include "nhmech/errors.hpp"
#include "oracles.hpp"

using namespace nhmech;

namespace {

GroupoidElement particle_pair(const NhProblem& p, double x0, double y0, double x1, double y1) {
  const Vec q0 = Eigen::Vector3d(x0, y0, 0.0);
  const Vec q1 = Eigen::Vector3d(x1, y1, 0.5 * (y0 + y1) * (x1 - x0));
  return p.groupoid.make_pair(q0, q1);
}

// Free particle in the plane carried by Atiyah(R², SE(2)) with the group
// part pinned to the identity: a Chaplygin system whose reduced motion is
// uniform, z = 2y - x.
NhProblem pinned_planar_particle(double h) {
  NhProblem p{"pinned_planar_particle", Groupoid::atiyah(2, lie::GroupKind::SE2), {}, {}, {}, {}};
  p.lagrangian.eval = [h](const GroupoidElement& g) {
    const Vec v = (g.target - g.source) / h;
    const lie::Vec3 w = lie::log_se2(std::get<lie::SE2Element>(*g.group));
    return h * (0.5 * v.squaredNorm() + 0.5 * w.squaredNorm());
  };
  p.distribution.rank = 2;
  p.distribution.basis = [](const Vec&) -> Mat { return Mat::Identity(5, 2); };
  p.distribution.annihilator = [](const Vec&) -> Mat { return Mat::Identity(5, 5).rightCols(3); };
  p.manifold.codim = 3;
  p.manifold.phi = [](const GroupoidElement& g) -> Vec {
    return lie::log_se2(std::get<lie::SE2Element>(*g.group));
  };
  p.flags.chaplygin = true;
  p.validate();
  return p;
}

}  // namespace

TEST(Diagnostics, ParticleDegenerateEnds) {
  const NhProblem p = models::make_constrained_particle(0.1);
  // 2 + y0² + y0 y1 = 0 kills the right form, the mirrored pair the left one.
  const RegularityReport right = regularity_report(p, particle_pair(p, 0, 1, 0.1, -3));
  EXPECT_FALSE(right.right_nondegenerate);
  EXPECT_TRUE(right.left_nondegenerate);
  EXPECT_FALSE(right.regular());
  const RegularityReport left = regularity_report(p, particle_pair(p, 0, -3, 0.1, 1));
  EXPECT_TRUE(left.right_nondegenerate);
  EXPECT_FALSE(left.left_nondegenerate);
  EXPECT_TRUE(regularity_report(p, particle_pair(p, 0, 0, 0.1, 0.2)).regular());
}

TEST(Diagnostics, SleighSingularAlongBodyAxis) {
  const oracle::SleighParams s;
  const NhProblem p = models::make_chaplygin_sleigh(s.m, s.a, s.b, s.J);
  const double xs = -2.0 * (s.a * s.a * s.m + s.J) / (s.a * s.m);
  auto at = [&](double x) { return regularity_report(p, p.groupoid.make_group(lie::SE2Element(0, x, 0))); };
  EXPECT_FALSE(at(xs).right_nondegenerate);
  EXPECT_TRUE(at(xs).left_nondegenerate);
  EXPECT_TRUE(at(xs - 0.2).regular());
  EXPECT_TRUE(at(xs + 0.2).regular());
}

TEST(Diagnostics, BuiltinSamplesAreRegular) {
  std::mt19937_64 rng(31);
  for (const auto& b : oracle::builtin_systems())
    EXPECT_TRUE(regularity_report(b.problem, b.sample(rng)).regular()) << b.name;
}

TEST(Diagnostics, NullSpaceIsOrthonormalKernel) {
  Mat m(2, 4);
  m << 1, 2, 0, 1, 0, 1, 1, 0;
  const Mat k = null_space(m, 4);
  ASSERT_EQ(k.cols(), 2);
  EXPECT_LT((m * k).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((k.transpose() * k - Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Diagnostics, ReversibilityMatchesDeclarations) {
  std::mt19937_64 rng(32);
  for (const auto& b : oracle::builtin_systems()) {
    std::vector<GroupoidElement> pts;
    for (int i = 0; i < 5; ++i) pts.push_back(b.sample(rng));
    const ReversibilityReport r = reversibility_report(b.problem, pts);
    EXPECT_EQ(r.samples, 5) << b.name;
    EXPECT_TRUE(r.agrees_with_declaration) << b.name;
    if (b.name == "suslov" || b.name == "chaplygin_sleigh") {
      EXPECT_TRUE(r.measured_reversible);
    }
    if (b.name == "veselova") {
      EXPECT_FALSE(r.lagrangian_invariant);
    }
    if (b.name == "rolling_ball") {
      EXPECT_FALSE(r.manifold_invariant);
    }
  }
}

TEST(Diagnostics, FreeMomentumIsConserved) {
  const NhProblem p = models::make_constrained_particle(0.1);
  const MomentumSpec spec = cli::build_momentum_spec("particle_y");
  const Trajectory t = evolve(p, particle_pair(p, 0.2, -0.3, 0.27, -0.25), 50);
  EXPECT_LT(invariance_defect(spec, p, t.elements[0]), 1e-9);
  for (const auto& e : momentum_drift(spec, p, t)) {
    EXPECT_LT(std::abs(e.drift), 1e-9);
    EXPECT_EQ(e.predicted, 0.0);
  }
}

TEST(Diagnostics, MomentumIdentityAndForcedControl) {
  const MomentumSpec spec = cli::build_momentum_spec("particle_xz");
  const NhProblem free = models::make_constrained_particle(0.1);
  const NhProblem forced = models::make_constrained_particle(0.1, 0.5);
  const GroupoidElement g0 = particle_pair(free, 0.2, -0.3, 0.27, -0.25);
  double free_gap = 0.0, forced_gap = 0.0;
  for (const auto& e : momentum_drift(spec, free, evolve(free, g0, 50)))
    free_gap = std::max(free_gap, std::abs(e.drift - e.predicted));
  for (const auto& e : momentum_drift(spec, forced, evolve(forced, g0, 50)))
    forced_gap = std::max(forced_gap, std::abs(e.drift - e.predicted));
  EXPECT_LT(free_gap, 1e-9);
  EXPECT_GT(forced_gap, 1e-3);
  EXPECT_GT(invariance_defect(spec, forced, g0), 1e-3);
}

TEST(Diagnostics, MomentumOutsideConstraintConeThrows) {
  const NhProblem p = models::make_constrained_particle(0.1);
  const MomentumSpec spec = cli::build_momentum_spec("particle_xz");
  const GroupoidElement g = particle_pair(p, 0.0, 0.4, 0.1, 0.5);
  EXPECT_THROW(momentum_value(spec, p, g, Eigen::Vector2d(1.0, 0.0)), NotInConstraintCone);
  EXPECT_NO_THROW(momentum_value(spec, p, g, spec.xi_tilde(g.target)));
}

TEST(Diagnostics, AnchorInversionRecoversRobotElement) {
  const auto rp = oracle::robot_params();
  const NhProblem p = models::make_mobile_robot(rp);
  const GroupoidElement g = models::robot_element(rp, 0.3, -0.2, 0.05, -0.03);
  const GroupoidElement seed = p.groupoid.identity_at(g.source);
  const GroupoidElement back = invert_anchor(p, g.source, g.target, seed);
  EXPECT_LT(p.groupoid.distance(back, g), 1e-12);
  const NhProblem particle = models::make_constrained_particle(0.1);
  EXPECT_THROW(invert_anchor(particle, Vec::Zero(3), Vec::Zero(3), particle_pair(particle, 0, 0, 0, 0)),
               ChartInversionFailed);
}

TEST(Diagnostics, ChaplyginResidualOfPinnedParticle) {
  const double h = 0.1;
  const NhProblem p = pinned_planar_particle(h);
  const Vec x = Eigen::Vector2d(0.1, -0.2), y = Eigen::Vector2d(0.3, 0.1);
  const GroupoidElement g = p.groupoid.make_atiyah(x, y, lie::SE2Element());
  SolverOptions o;
  o.tol_residual = 1e-11;
  const StepResult s = step(p, g, o);
  EXPECT_LT((s.next.target - (2 * y - x)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(chaplygin_residual(p, g, s.next).cwiseAbs().maxCoeff(), 1e-8);
  const Vec z = 2 * y - x + Vec(Eigen::Vector2d(1e-3, 0.0));
  const Vec off = chaplygin_residual(p, g, p.groupoid.make_atiyah(y, z, lie::SE2Element()));
  EXPECT_NEAR(off[0], -1e-3 / h, 1e-6);
  EXPECT_NEAR(off[1], 0.0, 1e-9);
}

TEST(Diagnostics, ChaplyginResidualVanishesOnRobotSteps) {
  const auto rp = oracle::robot_params();
  const NhProblem p = models::make_mobile_robot(rp);
  SolverOptions o;
  o.tol_residual = 1e-12;
  const GroupoidElement g = models::robot_element(rp, 0.3, -0.2, 0.02, -0.01);
  const StepResult s = step(p, g, o);
  EXPECT_LT(chaplygin_residual(p, g, s.next).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_THROW(chaplygin_residual(models::make_suslov(oracle::suslov_inertia(), 0.01),
                                  GroupoidElement{}, GroupoidElement{}),
               DomainError);
}
