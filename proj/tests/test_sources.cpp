#include <gtest/gtest.h>

#include <cmath>

#include "newtpot/admissibility.hpp"
#include "newtpot/radial_reference.hpp"
#include "newtpot/sources.hpp"
#include "oracles.hpp"

using namespace newtpot;

TEST(Sources, CorpusBuildsEveryEntry) {
  for (const auto& e : corpus()) {
    const auto f = make_source(e.name, {}, 3);
    EXPECT_FALSE(f.name.empty());
    const std::vector<double> y{0.1, 0.2, 0.05};
    EXPECT_TRUE(std::isfinite(f.value(y)));
  }
  EXPECT_THROW(make_source("nope", {}, 3), domain_error);
  EXPECT_THROW(make_source("gaussian", {{"sigma", 1.0}}, 3), domain_error);
  EXPECT_THROW(make_source("gaussian", {{"width", -1.0}}, 3), domain_error);
}

TEST(Sources, AnalyticGradientsMatchFiniteDifferences) {
  const std::vector<double> y{0.31, -0.22, 0.17};
  for (const auto& e : corpus()) {
    if (e.name == "uniform_ball") continue;  // piecewise constant
    const auto f = make_source(e.name, {}, 3);
    const auto g = f.gradient(y);
    for (int i = 0; i < 3; ++i) {
      auto p = y, m = y;
      p[i] += 1e-6;
      m[i] -= 1e-6;
      EXPECT_NEAR(g[i], (f.value(p) - f.value(m)) / 2e-6, 1e-6) << e.name << " component " << i;
    }
  }
}

TEST(Sources, MetadataFlags) {
  EXPECT_FALSE(make_uniform_ball().is_c1);
  EXPECT_TRUE(make_poly_bump(1).is_c1);
  EXPECT_TRUE(make_poly_bump(1).compactly_supported());
  EXPECT_FALSE(make_gaussian(1, 1).compactly_supported());
  EXPECT_TRUE(make_gaussian(1, 1).is_radial);
  EXPECT_TRUE(make_gaussian(1, 1).is_smooth);
  EXPECT_TRUE(make_inverse_power(3).is_smooth);
  EXPECT_FALSE(make_poly_bump(1).is_smooth);  // second derivatives jump at the support edge
  EXPECT_FALSE(make_uniform_ball().is_smooth);
  EXPECT_TRUE(make_scaled(make_gaussian(1, 1), 2.0).is_smooth);
  const auto odd = make_source("odd_bump", {}, 3);
  EXPECT_FALSE(odd.is_radial);
  const std::vector<double> y{0.4, 0.1, 0.0}, my{-0.4, -0.1, 0.0};
  EXPECT_NEAR(odd.value(y), -odd.value(my), 1e-15);
  const auto sh = make_source("shifted_bump", {{"offset", 0.5}, {"radius", 0.5}}, 3);
  EXPECT_DOUBLE_EQ(sh.support_radius, 1.0);
}

TEST(Admissibility, InversePowerVerdicts) {
  for (int n : {3, 4}) {
    EXPECT_TRUE(check_conditions(make_inverse_power(4.0), n).f_condition_finite);
    EXPECT_TRUE(check_conditions(make_inverse_power(2.5), n).f_condition_finite);
    EXPECT_FALSE(check_conditions(make_inverse_power(2.0), n).f_condition_finite);
    EXPECT_FALSE(check_conditions(make_inverse_power(1.5), n).f_condition_finite);
  }
}

TEST(Admissibility, GradientConditionAndCompactSources) {
  const auto r = check_conditions(make_inverse_power(1.5), 3);
  // |grad f| ~ |y|^{-2.5}: int r^{n-1} r^{-2.5} / r^{n-1} converges
  EXPECT_TRUE(r.gradf_condition_finite);
  const auto b = check_conditions(make_poly_bump(1.0), 3);
  EXPECT_TRUE(b.f_condition_finite && b.gradf_condition_finite);
  // int_{B(0,1)} (1-r^2)^2/(1+r) 4 pi r^2 dr, via the 1-D rule
  const double ref = 4 * std::numbers::pi * detail::radial_integral(make_poly_bump(1.0),
      [](double s) { return s * s * std::pow(1 - s * s, 2) / (1 + s); }, 0.0, 1.0);
  EXPECT_NEAR(b.weighted_f_integral, ref, 1e-10);
}

TEST(Admissibility, TruncationTraceNondecreasing) {
  for (double s : {1.5, 2.0, 2.5, 4.0}) {
    const auto r = check_conditions(make_inverse_power(s), 3);
    for (std::size_t k = 1; k < r.truncation_trace.size(); ++k) {
      EXPECT_GT(r.truncation_trace[k].first, r.truncation_trace[k - 1].first);
      EXPECT_GE(r.truncation_trace[k].second, r.truncation_trace[k - 1].second);
    }
  }
}

TEST(Admissibility, VerdictIgnoresDeclaredDecay) {
  auto f = make_inverse_power(1.5);
  f.decay_exponent = 10.0;  // a wrong declaration must not change the verdict
  EXPECT_FALSE(check_conditions(f, 3).f_condition_finite);
}

TEST(Admissibility, NonRadialSourcesUseSphereRules) {
  const auto odd = make_source("odd_bump", {}, 3);
  const auto r3 = check_conditions(odd, 3);
  EXPECT_TRUE(r3.f_condition_finite);
  const auto r4 = check_conditions(make_source("shifted_bump", {}, 4), 4);
  EXPECT_TRUE(r4.f_condition_finite);
}

TEST(Admissibility, EvaluatorFailuresCarryThePoint) {
  SourceFunction f = make_gaussian(1, 1);
  f.eval_f = [](std::span<const double> y) { return y[0] > 3.0 ? NAN : 1.0 / (1.0 + y[0] * y[0] * y[0] * y[0]); };
  try {
    check_conditions(f, 3);
    FAIL() << "expected evaluation_error";
  } catch (const evaluation_error& e) {
    EXPECT_NE(std::string(e.what()).find("non-finite value at ("), std::string::npos);
  }
}

TEST(RadialReference, ClosedFormsAndTwoRoutesAgree) {
  struct Case {
    SourceFunction f;
    int n;
    std::vector<std::pair<double, double>> values;
  };
  const std::vector<Case> cases = {
      {make_gaussian(1, 1), 3, {{0.5, oracle::gauss3_r05}, {1.0, oracle::gauss3_r1}, {2.0, oracle::gauss3_r2}, {3.5, oracle::gauss3_r35}}},
      {make_gaussian(1, 1), 4, {{0.5, oracle::gauss4_r05}, {1.0, oracle::gauss4_r1}, {2.0, oracle::gauss4_r2}}},
      {make_poly_bump(1), 3, {{0.3, oracle::bump3_r03}, {0.9, oracle::bump3_r09}, {2.0, oracle::bump3_r2}, {3.0, oracle::bump3_r3}}},
      {make_inverse_power(4), 3, {{0.5, oracle::ip4_r05}, {1.0, oracle::ip4_r1}, {2.0, oracle::ip4_r2}}},
      {make_uniform_ball(), 3, {{0.0, oracle::ball3_u0}, {2.0, oracle::ball3_u2}}},
      {make_uniform_ball(), 4, {{0.0, oracle::ball4_u0}, {2.0, oracle::ball4_u2}}},
  };
  for (const auto& c : cases) {
    const auto prof = radial_reference_potential(c.f, c.n, 4.0, 81);
    for (const auto& [r, u] : c.values) {
      EXPECT_NEAR(radial_green_potential(c.f, c.n, r), u, 1e-11) << c.f.name << " n=" << c.n << " r=" << r;
      const std::size_t idx = static_cast<std::size_t>(std::lround(r / 0.05));
      ASSERT_NEAR(prof.radii[idx], r, 1e-12);
      EXPECT_NEAR(prof.u[idx], u, 1e-8) << "ODE route " << c.f.name << " r=" << r;
    }
  }
}

TEST(RadialReference, DerivativeMatchesGradientOfClosedForm) {
  const auto f = make_gaussian(1, 1);
  const double r = 1.3, h = 1e-5;
  const double fd = (radial_green_potential(f, 3, r + h) - radial_green_potential(f, 3, r - h)) / (2 * h);
  EXPECT_NEAR(radial_green_derivative(f, 3, r), fd, 1e-8);
}

TEST(RadialReference, RejectsNonRadialAndNonAdmissible) {
  EXPECT_THROW(radial_green_potential(make_source("odd_bump", {}, 3), 3, 1.0), domain_error);
  EXPECT_THROW(radial_reference_potential(make_inverse_power(1.5), 3, 2.0), admissibility_error);
}
