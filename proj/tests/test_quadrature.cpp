#include <gtest/gtest.h>

#include <cmath>

#include "newtpot/quadrature.hpp"
#include "newtpot/radial_reference.hpp"
#include "newtpot/verify.hpp"
#include "oracles.hpp"

using namespace newtpot;

namespace {

std::vector<double> on_axis(int n, double r) {
  std::vector<double> x(n, 0.0);
  x[0] = r;
  return x;
}

NewtonianPotential default_potential(const SourceFunction& f, int n) {
  return NewtonianPotential(f, n, QuadratureConfig::defaults_for(f, n));
}

}  // namespace

TEST(TailConstants, ClosedForms) {
  EXPECT_DOUBLE_EQ(c1_constant(3, 8.0), 0.25);
  EXPECT_DOUBLE_EQ(c1_constant(3, 0.5), 0.125);
  EXPECT_DOUBLE_EQ(c1_constant(5, 0.5), 0.125 / 16.0);
  EXPECT_DOUBLE_EQ(c1_gradient_constant(3, 8.0), 0.125);
  EXPECT_DOUBLE_EQ(c1_gradient_constant(4, 0.5), 0.125 / 16.0);
}

TEST(QuadratureConfig, Validation) {
  QuadratureConfig c;
  EXPECT_NO_THROW(c.validate(3));
  auto bad = [](auto mutate, int n = 3) {
    QuadratureConfig q;
    mutate(q);
    EXPECT_THROW(q.validate(n), precondition_error);
  };
  bad([](QuadratureConfig& q) { q.split_radius = 0.0; });
  bad([](QuadratureConfig& q) { q.split_radius = 3.0; });  // > R/4
  bad([](QuadratureConfig& q) { q.radial_nodes = 1; });
  bad([](QuadratureConfig& q) { q.midfield_samples = 2; });
  bad([](QuadratureConfig& q) { q.inner_radius = 0.5; });
  bad([](QuadratureConfig& q) { q.kernel_sign = 0.5; });
  bad([](QuadratureConfig&) {}, 4);  // product rule needs n = 3
  EXPECT_EQ(QuadratureConfig::defaults_for(make_poly_bump(6.0), 3).truncation_radius, 24.0);
  EXPECT_EQ(QuadratureConfig::defaults_for(make_gaussian(1, 1), 5).angular_rule, AngularRule::monte_carlo);
}

TEST(Potential, UniformBallGoldenValues) {
  const auto P = default_potential(make_uniform_ball(), 3);
  const auto r0 = P.potential(on_axis(3, 0.0));
  const auto r2 = P.potential(on_axis(3, 2.0));
  EXPECT_NEAR(r0.u, oracle::ball3_u0, 1e-3);
  EXPECT_NEAR(r2.u, oracle::ball3_u2, 1e-3);
  EXPECT_EQ(P.zone_sharing(), ZoneSharing::balance);
  EXPECT_EQ(r0.tail_bound, 0.0);  // support inside B(0,R)
}

TEST(Potential, RadialClosedFormsWithinBudget) {
  struct Case {
    SourceFunction f;
    int n;
    double r, exact;
  };
  const std::vector<Case> cases = {
      {make_gaussian(1, 1), 3, 0.5, oracle::gauss3_r05}, {make_gaussian(1, 1), 3, 2.0, oracle::gauss3_r2},
      {make_poly_bump(1), 3, 0.3, oracle::bump3_r03},    {make_poly_bump(1), 3, 3.0, oracle::bump3_r3},
      {make_inverse_power(4), 3, 1.0, oracle::ip4_r1},   {make_gaussian(1, 1), 4, 1.0, oracle::gauss4_r1},
      {make_uniform_ball(), 4, 2.0, oracle::ball4_u2},
  };
  for (const auto& c : cases) {
    const auto P = default_potential(c.f, c.n);
    const auto res = P.potential(on_axis(c.n, c.r));
    const double budget = res.u_error_budget(P.config().rel_tolerance);
    EXPECT_LE(std::abs(res.u - c.exact), budget) << c.f.name << " n=" << c.n << " r=" << c.r << " u=" << res.u;
    EXPECT_GT(res.statistical_error, 0.0);
  }
}

TEST(Potential, TailCertificateBoundsTheTruncatedMass) {
  // inverse_power(4): the far field beyond R is not sampled, its bound must cover the gap
  const auto f = make_inverse_power(4);
  QuadratureConfig cfg;
  cfg.truncation_radius = 4.0;
  cfg.split_radius = 0.5;
  const NewtonianPotential P(f, 3, cfg);
  const auto res = P.potential(on_axis(3, 0.5));
  EXPECT_GT(res.tail_bound, 0.0);
  EXPECT_LE(std::abs(res.u - oracle::ip4_r05), res.u_error_budget(cfg.rel_tolerance));
  const auto& t = P.tail();
  EXPECT_DOUBLE_EQ(t.truncation_radius, 4.0);
  EXPECT_NEAR(t.bound, t.weighted_tail / (4 * std::numbers::pi * c1_constant(3, 4.0)), 1e-12 * t.bound);
}

TEST(Potential, GradientMatchesRadialDerivative) {
  const auto f = make_gaussian(1, 1);
  const auto P = default_potential(f, 3);
  const std::vector<double> x{0.6, 0.8, 0.0};  // |x| = 1
  const auto res = P.gradient(x);
  const double dr = radial_green_derivative(f, 3, 1.0);
  for (int i = 0; i < 3; ++i)
    EXPECT_NEAR(res.grad[i], dr * x[i], res.grad_statistical_error + res.grad_tail_bound + 1e-3 * std::abs(dr));
}

TEST(Potential, HessianTraceRecoversTheSource) {
  const auto P = default_potential(make_gaussian(1, 1), 3);
  for (double r : {0.0, 0.4, 1.1}) {
    const auto res = P.hessian(on_axis(3, r));
    EXPECT_LE(std::abs(res.laplacian_residual()), 5e-3 * std::max(1.0, std::abs(res.f_at_x)) + res.trace_statistical_error)
        << "r=" << r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_EQ(res.hess_at(i, j), res.hess_at(j, i));
  }
}

TEST(Potential, SeedDeterminismAndIndependence) {
  const auto f = make_gaussian(1, 1);
  QuadratureConfig a = QuadratureConfig::defaults_for(f, 3), b = a;
  b.seed = 99;
  const auto x = on_axis(3, 0.7);
  const auto ra1 = NewtonianPotential(f, 3, a).evaluate(x, component::all);
  const auto ra2 = NewtonianPotential(f, 3, a).evaluate(x, component::all);
  const auto rb = NewtonianPotential(f, 3, b).evaluate(x, component::all);
  EXPECT_EQ(ra1.u, ra2.u);
  EXPECT_EQ(ra1.grad, ra2.grad);
  EXPECT_EQ(ra1.hess, ra2.hess);
  EXPECT_NE(ra1.u, rb.u);
  EXPECT_LE(std::abs(ra1.u - rb.u), ra1.statistical_error + rb.statistical_error);
}

TEST(Potential, NearZoneMatchesIndependentOracle) {
  for (const auto& f : {make_gaussian(1, 1), make_inverse_power(4)}) {
    const auto P = default_potential(f, 3);
    for (double a : {0.0, 0.3, 1.2}) {
      const auto res = P.potential(on_axis(3, a));
      EXPECT_NEAR(res.u_near, near_zone_reference(f, 3, a, P.config().split_radius), 1e-12) << f.name << " a=" << a;
    }
  }
}

TEST(Potential, OddSourceIsAntisymmetric) {
  const auto f = make_source("odd_bump", {}, 3);
  const auto P = default_potential(f, 3);
  const std::vector<double> x{0.4, 0.2, -0.1}, mx{-0.4, -0.2, 0.1};
  const auto rp = P.potential(x), rm = P.potential(mx);
  EXPECT_LE(std::abs(rp.u + rm.u), rp.statistical_error + rm.statistical_error + 1e-3 * std::abs(rp.u));
  EXPECT_LT(rp.u, 0.0);  // closer to the positive lobe
}

TEST(Potential, KernelSignHookFlipsTheResult) {
  const auto f = make_poly_bump(1);
  QuadratureConfig cfg = QuadratureConfig::defaults_for(f, 3);
  const auto x = on_axis(3, 0.3);
  const double u = NewtonianPotential(f, 3, cfg).potential(x).u;
  cfg.kernel_sign = -1.0;
  EXPECT_DOUBLE_EQ(NewtonianPotential(f, 3, cfg).potential(x).u, -u);
}

TEST(Potential, Errors) {
  EXPECT_THROW(default_potential(make_inverse_power(1.5), 3), admissibility_error);
  const auto ball = default_potential(make_uniform_ball(), 3);
  EXPECT_THROW(ball.hessian(on_axis(3, 0.5)), admissibility_error);
  EXPECT_THROW(ball.potential(on_axis(3, 4.0)), precondition_error);  // |x| = R/2
  EXPECT_THROW(ball.potential(std::vector<double>{0.0, 0.0}), precondition_error);
  EXPECT_THROW(NewtonianPotential(make_gaussian(1, 1), 2, QuadratureConfig{}), domain_error);
}

TEST(Potential, SmootherstepWeightsPartitionTheNearBall) {
  EXPECT_DOUBLE_EQ(detail::near_weight(0.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(detail::near_weight(0.5, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(detail::near_weight(1.0, 1.0), 0.0);
  double prev = 1.0;
  for (int i = 0; i <= 100; ++i) {
    const double w = detail::near_weight(i / 100.0, 1.0);
    EXPECT_LE(w, prev + 1e-15);
    prev = w;
  }
}

TEST(Potential, MidfieldSamplesFillTheBall) {
  const auto m = detail::build_midfield(3, 2.0, 40000, 5);
  EXPECT_EQ(m.size(), 40000u);
  double vol = 0.0;
  for (double v : m.cell_volume) vol += v;
  EXPECT_NEAR(vol, ball_volume(3) * 8.0, 1e-10);
  for (std::size_t i = 0; i < m.size(); ++i) ASSERT_LE(norm(m.point(i)), 2.0);
}
