#include <gtest/gtest.h>

#include <cmath>

#include "newtpot/kernel.hpp"
#include "newtpot/verify.hpp"

using namespace newtpot;

TEST(Slope, LeastSquaresOnPowerLaw) {
  const std::vector<double> h{0.2, 0.1, 0.05, 0.025};
  std::vector<double> v;
  for (double x : h) v.push_back(3.0 * x * x);
  EXPECT_NEAR(log_log_slope(h, v), 2.0, 1e-12);
}

TEST(MeanValue, KernelIsHarmonicOffItsPole) {
  const std::vector<double> z{0.5, 0.0, 0.0}, c{2.0, 1.0, 0.0};
  auto u = [&](std::span<const double> y) {
    std::vector<double> d(y.begin(), y.end());
    for (int k = 0; k < 3; ++k) d[k] -= z[k];
    return eval_kernel(3, d).value;
  };
  std::vector<double> dc{c[0] - z[0], c[1] - z[1], c[2]};
  const double at_c = eval_kernel(3, dc).value;
  // exact up to the angular rule, whose error decays spectrally with the pole 0.8 off the sphere
  const auto coarse = product_gauss_sphere(16), rule = product_gauss_sphere(48);
  EXPECT_NEAR(sphere_average(u, c, 1.0, rule), at_c, 1e-14);
  EXPECT_NEAR(ball_average(u, c, 1.0, rule, 8), at_c, 1e-14);
  EXPECT_LT(std::abs(sphere_average(u, c, 1.0, rule) - at_c), std::abs(sphere_average(u, c, 1.0, coarse) - at_c));
  // threads only reorder the work
  EXPECT_EQ(sphere_average(u, c, 1.0, rule, 3), sphere_average(u, c, 1.0, rule, 1));
}

TEST(MeanValue, BallAverageOfQuadratic) {
  const std::vector<double> c{0.3, -0.2, 0.1};
  auto u = [](std::span<const double> y) { return y[0] * y[0] + y[1] * y[1] + y[2] * y[2]; };
  const double r = 0.7;
  EXPECT_NEAR(ball_average(u, c, r, product_gauss_sphere(6), 6), 0.14 + 3.0 / 5.0 * r * r, 1e-13);
  EXPECT_NEAR(sphere_average(u, c, r, product_gauss_sphere(6)), 0.14 + r * r, 1e-13);
}

TEST(MeanValue, ExteriorOfBumpPasses) {
  const auto f = make_poly_bump(1);
  const NewtonianPotential P(f, 3, QuadratureConfig::defaults_for(f, 3));
  const std::vector<double> c{3.0, 0.0, 0.0};
  for (double r : {0.4, 0.2, 0.1}) {
    const auto rep = mean_value_check(P, c, r);
    EXPECT_TRUE(rep.passed()) << "r=" << r << " sphere " << rep.discrepancies.first << " ball "
                              << rep.discrepancies.second << " tol " << rep.tolerance;
    EXPECT_NEAR(rep.center_value, radial_green_potential(f, 3, 3.0), rep.tolerance);
  }
}

TEST(MeanValue, BallMeetingTheSupportIsRejected) {
  const auto f = make_poly_bump(1);
  const NewtonianPotential P(f, 3, QuadratureConfig::defaults_for(f, 3));
  const std::vector<double> c{1.2, 0.0, 0.0};
  EXPECT_THROW(mean_value_check(P, c, 0.5), precondition_error);
}

TEST(MeanValue, InteriorDefectScalesQuadratically) {
  const auto f = make_poly_bump(1);
  const NewtonianPotential P(f, 3, QuadratureConfig::defaults_for(f, 3));
  const std::vector<double> c{0.3, 0.0, 0.0};
  const auto s = mean_value_scaling(P, c, {0.4, 0.2, 0.1});
  EXPECT_GE(s.sphere_slope, 1.8);
  EXPECT_GE(s.ball_slope, 1.8);
  // leading Taylor term r^2 f(c) / (2n)
  EXPECT_NEAR(s.sphere_defects.back(), s.sphere_predictions.back(), 0.1 * std::abs(s.sphere_predictions.back()));
}

TEST(Residual, GaussianAtOriginPassesAndConverges) {
  const auto f = make_gaussian(1, 1);
  ResidualOptions o;
  const auto e = fd_laplacian_residual(f, 3, std::vector<double>{0.0, 0.0, 0.0}, QuadratureConfig::defaults_for(f, 3), o);
  EXPECT_TRUE(e.passed(o)) << "fd " << e.fd_residual << " hess " << e.hessian_residual;
  EXPECT_TRUE(e.has_hessian);
  EXPECT_EQ(e.laplacians.size(), o.h_values.size());
  // error against f shrinks with h
  EXPECT_LT(std::abs(e.residuals.back()), std::abs(e.residuals.front()));
  EXPECT_TRUE(e.slope_ok(o.min_slope));
}

TEST(Residual, HarmonicExteriorOfBump) {
  const auto f = make_poly_bump(1);
  ResidualOptions o;
  o.with_hessian = false;
  const auto e = fd_laplacian_residual(f, 3, std::vector<double>{2.0, 0.0, 0.0}, QuadratureConfig::defaults_for(f, 3), o);
  EXPECT_EQ(e.f_value, 0.0);
  EXPECT_LE(std::abs(e.richardson), o.rel_tolerance + e.fd_statistical_error);
}

TEST(Residual, MisSignedKernelFails) {
  const auto f = make_gaussian(1, 1);
  auto cfg = QuadratureConfig::defaults_for(f, 3);
  cfg.kernel_sign = -1.0;
  ResidualOptions o;
  o.replicates = 1;
  const auto e = fd_laplacian_residual(f, 3, std::vector<double>{0.2, 0.0, 0.0}, cfg, o);
  EXPECT_FALSE(e.passed(o));
}

TEST(Residual, ReportIsThreadInvariant) {
  const auto f = make_gaussian(1, 1);
  ResidualOptions o1;
  o1.replicates = 1;
  o1.with_hessian = false;
  auto o2 = o1;
  o2.threads = 3;
  const std::vector<std::vector<double>> pts{{0.1, 0.0, 0.0}, {0.0, 0.5, 0.2}, {-0.3, 0.3, 0.3}};
  const auto cfg = QuadratureConfig::defaults_for(f, 3);
  const auto a = ResidualVerifier(f, 3, cfg, o1).check_all(pts);
  const auto b = ResidualVerifier(f, 3, cfg, o2).check_all(pts);
  EXPECT_EQ(a.fd_residuals, b.fd_residuals);
  EXPECT_EQ(a.convergence_slopes, b.convergence_slopes);
  EXPECT_EQ(a.points, pts);
}

TEST(Residual, OptionValidation) {
  const auto f = make_gaussian(1, 1);
  const auto cfg = QuadratureConfig::defaults_for(f, 3);
  ResidualOptions o;
  o.h_values = {0.1, 0.05};
  EXPECT_THROW(ResidualVerifier(f, 3, cfg, o), domain_error);
  o.h_values = {0.1, -0.05, 0.02};
  EXPECT_THROW(ResidualVerifier(f, 3, cfg, o), domain_error);
}

TEST(Harness, NoViolationsAcrossDimensions) {
  for (int n = 3; n <= 8; ++n) {
    const auto rep = inequality_harness(n, 10000, 1);
    EXPECT_EQ(rep.violations(), 0u) << "n=" << n;
    EXPECT_GT(rep.boundary_probes, 0u);
    for (const auto& t : rep.tallies) {
      EXPECT_GT(t.checked, 0u) << t.name;
      EXPECT_TRUE(t.witness.empty());
    }
  }
}

TEST(Harness, SeededAndReproducible) {
  const auto a = inequality_harness(4, 2000, 9), b = inequality_harness(4, 2000, 9);
  ASSERT_EQ(a.tallies.size(), b.tallies.size());
  for (std::size_t k = 0; k < a.tallies.size(); ++k) {
    EXPECT_EQ(a.tallies[k].checked, b.tallies[k].checked);
    EXPECT_EQ(a.tallies[k].min_margin, b.tallies[k].min_margin);
  }
  EXPECT_THROW(inequality_harness(2, 10, 1), domain_error);
  EXPECT_THROW(inequality_harness(3, 0, 1), domain_error);
}
