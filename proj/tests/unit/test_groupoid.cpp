#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "nhmech/errors.hpp"
#include "nhmech/groupoid.hpp"
#include "oracles.hpp"

using namespace nhmech;

namespace {

struct Backend {
  std::string name;
  Groupoid G;
  std::function<GroupoidElement(std::mt19937_64&)> sample;
};

double uni(std::mt19937_64& rng, double s = 1.0) {
  return std::uniform_real_distribution<double>(-s, s)(rng);
}

lie::Vec3 rvec(std::mt19937_64& rng, double s = 1.0) { return {uni(rng, s), uni(rng, s), uni(rng, s)}; }

std::vector<Backend> backends() {
  const Groupoid pair = Groupoid::pair(3);
  const Groupoid so3 = Groupoid::lie_group(lie::GroupKind::SO3);
  const Groupoid se2 = Groupoid::lie_group(lie::GroupKind::SE2);
  const Groupoid act = Groupoid::sphere_action();
  const Groupoid at3 = Groupoid::atiyah(2, lie::GroupKind::SO3);
  const Groupoid at2 = Groupoid::atiyah(2, lie::GroupKind::SE2);
  return {
      {"pair", pair, [pair](std::mt19937_64& r) { return pair.make_pair(rvec(r), rvec(r)); }},
      {"so3", so3, [so3](std::mt19937_64& r) { return so3.make_group(lie::exp_so3(rvec(r))); }},
      {"se2", se2, [se2](std::mt19937_64& r) { return se2.make_group(lie::exp_se2(rvec(r))); }},
      {"action", act,
       [act](std::mt19937_64& r) { return act.make_action(rvec(r).normalized(), lie::exp_so3(rvec(r))); }},
      {"atiyah_so3", at3,
       [at3](std::mt19937_64& r) {
         return at3.make_atiyah(Vec(rvec(r).head<2>()), Vec(rvec(r).head<2>()),
                                lie::exp_so3(rvec(r)));
       }},
      {"atiyah_se2", at2,
       [at2](std::mt19937_64& r) {
         return at2.make_atiyah(Vec(rvec(r).head<2>()), Vec(rvec(r).head<2>()),
                                lie::exp_se2(rvec(r)));
       }},
  };
}

Vec random_algebroid(const Groupoid& G, std::mt19937_64& rng, double s) {
  Vec v(G.rank());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uni(rng, s);
  return v;
}

// Smooth test function of the storage coordinates, no analytic closures.
GroupoidFunction smooth_function(const Groupoid& G) {
  GroupoidFunction L;
  L.eval = [G](const GroupoidElement& g) {
    const Vec c = G.coordinates(g);
    double s = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) s += std::sin(0.7 * (i + 1) * c[i]) + 0.3 * c[i] * c[i];
    return s;
  };
  return L;
}

}  // namespace

TEST(Groupoid, Axioms) {
  std::mt19937_64 rng(1);
  for (const auto& b : backends()) {
    const Groupoid& G = b.G;
    for (int i = 0; i < 10; ++i) {
      const GroupoidElement x = b.sample(rng);
      const GroupoidElement y = G.fiber_retract(G.identity_at(x.target), random_algebroid(G, rng, 0.5));
      const GroupoidElement z = G.fiber_retract(G.identity_at(y.target), random_algebroid(G, rng, 0.5));
      EXPECT_LT(G.distance(G.compose(G.compose(x, y), z), G.compose(x, G.compose(y, z))), 1e-13)
          << b.name;
      EXPECT_LT(G.distance(G.compose(G.identity_at(x.source), x), x), 1e-14) << b.name;
      EXPECT_LT(G.distance(G.compose(x, G.identity_at(x.target)), x), 1e-14) << b.name;
      EXPECT_LT(G.distance(G.compose(x, G.invert(x)), G.identity_at(x.source)), 1e-14) << b.name;
      EXPECT_LT(G.distance(G.invert(G.invert(x)), x), 1e-15) << b.name;
      const GroupoidElement xy = G.compose(x, y);
      EXPECT_LT((xy.source - x.source).cwiseAbs().sum() + (xy.target - y.target).cwiseAbs().sum(),
                1e-14)
          << b.name;
    }
  }
}

TEST(Groupoid, NotComposableDetected) {
  std::mt19937_64 rng(2);
  for (const auto& b : backends()) {
    if (b.G.kind() == BackendKind::LieGroup) continue;
    const GroupoidElement x = b.sample(rng), y = b.sample(rng);
    EXPECT_FALSE(b.G.composable(x, y)) << b.name;
    EXPECT_THROW(b.G.compose(x, y), NotComposable) << b.name;
  }
}

TEST(Groupoid, ChartRoundTrips) {
  std::mt19937_64 rng(3);
  for (const auto& b : backends()) {
    const Groupoid& G = b.G;
    for (int i = 0; i < 10; ++i) {
      const GroupoidElement x = b.sample(rng);
      EXPECT_LT(G.distance(G.fiber_retract(G.identity_at(x.source), G.displacement(x)), x), 1e-12)
          << b.name;
      const Vec c = G.coordinates(x);
      EXPECT_EQ(static_cast<std::size_t>(c.size()), G.coordinate_names().size());
      EXPECT_LT(G.distance(G.from_coordinates(c), x), 1e-15) << b.name;
    }
  }
}

TEST(Groupoid, ChartDomainAtCutLocus) {
  const Groupoid G = Groupoid::lie_group(lie::GroupKind::SO3);
  EXPECT_THROW(G.fiber_retract(G.identity_at(Vec(0)), Vec(lie::Vec3(3.2, 0, 0))), ChartDomain);
  const Groupoid H = Groupoid::lie_group(lie::GroupKind::SE2);
  EXPECT_THROW(H.fiber_retract(H.identity_at(Vec(0)), Vec(lie::Vec3(-3.2, 0, 0))), ChartDomain);
}

TEST(Groupoid, MakeActionRejectsNonUnitBase) {
  const Groupoid G = Groupoid::sphere_action();
  EXPECT_THROW(G.make_action(lie::Vec3(1, 1, 0), lie::Rotation3()), DomainError);
}

TEST(Groupoid, FiniteDifferenceIsSecondOrder) {
  std::mt19937_64 rng(4);
  for (const auto& b : backends()) {
    const Groupoid& G = b.G;
    const GroupoidFunction L = smooth_function(G);
    const GroupoidElement g = b.sample(rng);
    const Vec v = random_algebroid(G, rng, 1.0);
    // Richardson-extrapolated reference along the same curve.
    auto f = [&](double t) { return L.eval(G.left_curve(g, v, t)); };
    const double ref = (16 * oracle::d5(f, 1e-3) - oracle::d5(f, 2e-3)) / 15;
    DerivativeOptions o1, o2;
    o1.finite_differences = o2.finite_differences = true;
    o1.fd_step = 2e-2;
    o2.fd_step = 1e-2;
    const double e1 = std::abs(left_deriv(G, L, g, v, o1) - ref);
    const double e2 = std::abs(left_deriv(G, L, g, v, o2) - ref);
    EXPECT_NEAR(e1 / e2, 4.0, 0.4) << b.name;
  }
}

TEST(Groupoid, GradientsAreLinear) {
  std::mt19937_64 rng(5);
  for (const auto& b : backends()) {
    const Groupoid& G = b.G;
    const GroupoidFunction L = smooth_function(G);
    const GroupoidElement g = b.sample(rng);
    const Vec v = random_algebroid(G, rng, 1.0), w = random_algebroid(G, rng, 1.0);
    const Vec lg = left_grad(G, L, g), rg = right_grad(G, L, g);
    EXPECT_NEAR(left_deriv(G, L, g, 2 * v - w), lg.dot(2 * v - w), 1e-7) << b.name;
    EXPECT_NEAR(right_deriv(G, L, g, 2 * v - w), rg.dot(2 * v - w), 1e-7) << b.name;
  }
}

TEST(Groupoid, PairSignConventions) {
  // L(q0, q1) = sin(a·q1) + b·q0: left derivative along v is ∂L/∂q1·v,
  // right derivative is -∂L/∂q0·v.
  const Groupoid G = Groupoid::pair(3);
  const Vec a = Vec(lie::Vec3(0.3, -0.2, 0.5)), bb = Vec(lie::Vec3(1.0, 2.0, -1.0));
  GroupoidFunction L;
  L.eval = [&](const GroupoidElement& g) { return std::sin(a.dot(g.target)) + bb.dot(g.source); };
  const GroupoidElement g = G.make_pair(Vec(lie::Vec3(0.1, 0.2, 0.3)), Vec(lie::Vec3(-0.4, 0.5, 0.6)));
  const Vec v = Vec(lie::Vec3(0.7, -0.1, 0.2));
  EXPECT_NEAR(left_deriv(G, L, g, v), std::cos(a.dot(g.target)) * a.dot(v), 1e-9);
  EXPECT_NEAR(right_deriv(G, L, g, v), -bb.dot(v), 1e-9);
}

TEST(Groupoid, LieGroupSignConventions) {
  const Groupoid G = Groupoid::lie_group(lie::GroupKind::SO3);
  lie::Mat3 W;
  W << 1, 2, 0, -1, 3, 1, 0.5, 0, 2;
  GroupoidFunction L;
  L.eval = [&](const GroupoidElement& g) { return (W * lie::matrix(*g.group)).trace(); };
  const GroupoidElement g = G.make_group(lie::exp_so3(lie::Vec3(0.3, -0.4, 0.2)));
  const lie::Vec3 v(0.2, 0.1, -0.3);
  const lie::Mat3 R = lie::matrix(*g.group), V = lie::hat(v, lie::Algebra::so3);
  // d/dt L(g exp(tv)) and d/dt L(exp(tv) g).
  EXPECT_NEAR(left_deriv(G, L, g, v), (W * R * V).trace(), 1e-9);
  EXPECT_NEAR(right_deriv(G, L, g, v), (W * V * R).trace(), 1e-9);
}

TEST(Groupoid, CrossFormMatchesNestedDifferences) {
  std::mt19937_64 rng(6);
  for (const auto& b : backends()) {
    const Groupoid& G = b.G;
    const GroupoidFunction L = smooth_function(G);
    const GroupoidElement g = b.sample(rng);
    const Vec a = random_algebroid(G, rng, 1.0), c = random_algebroid(G, rng, 1.0);
    const GroupoidElement es = G.identity_at(g.source), et = G.identity_at(g.target);
    // +∂s∂t L(delta_a(s)^-1 · g · delta_b(t)).
    const double ref = oracle::d5([&](double s) {
      const GroupoidElement left = G.compose(G.invert(G.fiber_retract(es, s * a)), g);
      return oracle::d5(
          [&](double t) { return L.eval(G.compose(left, G.fiber_retract(et, t * c))); }, 1e-3);
    }, 1e-3);
    EXPECT_NEAR(cross_form(G, L, g, a, c), ref, 1e-5 * (1 + std::abs(ref))) << b.name;
    EXPECT_NEAR(a.dot(cross_matrix(G, L, g) * c), ref, 1e-5 * (1 + std::abs(ref))) << b.name;
  }
}
