#pragma once

// Reference potentials for radial sources.  Two independent routes:
//  * the radial ODE (r^{n-1} u')' = r^{n-1} f with u'(0) = 0, matched to the
//    exterior solution at r_max;
//  * direct 1-D quadrature of the radial Green's function
//      u(r) = -1/(n-2) [ r^{2-n} int_0^r s^{n-1} f(s) ds + int_r^inf s f(s) ds ].

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include "newtpot/admissibility.hpp"
#include "newtpot/errors.hpp"
#include "newtpot/sources.hpp"

namespace newtpot {

struct RadialProfile {
  std::vector<double> radii;
  std::vector<double> u;
};

namespace detail {

/// Sorted radii in (lo, hi) where the profile may be non-smooth.
inline std::vector<double> radial_breaks(const SourceFunction& f, double lo, double hi) {
  std::vector<double> b{lo};
  for (double p : f.breakpoints)
    if (p > lo && p < hi) b.push_back(p);
  if (f.compactly_supported() && f.support_radius > lo && f.support_radius < hi) b.push_back(f.support_radius);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  b.push_back(hi);
  return b;
}

/// int_lo^hi g(s) ds, piecewise between the source's break radii; hi may be +inf.
template <class G>
double radial_integral(const SourceFunction& f, G&& g, double lo, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  if (f.compactly_supported()) hi = std::min(hi, f.support_radius);
  if (!(hi > lo)) return 0.0;
  const auto breaks = radial_breaks(f, lo, hi);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1];
    // keep samples strictly inside the panel so jumps at the ends are seen from the correct side
    const double eps = std::isfinite(b) ? 1e-14 * std::max(1.0, b) : 0.0;
    auto inner = [&](double s) {
      s = std::max(s, a + eps);
      if (std::isfinite(b)) s = std::min(s, b - eps);
      return g(s);
    };
    double err = 0.0;
    total += gauss_kronrod<double, 61>::integrate(inner, a, b, 20, 1e-14, &err);
  }
  return total;
}

}  // namespace detail

/// Mass-like moment int_0^r s^{n-1} f(s) ds.
inline double radial_inner_moment(const SourceFunction& f, int n, double r) {
  return detail::radial_integral(
      f, [&](double s) { return std::pow(s, n - 1) * f.radial_value(n, s); }, 0.0, r);
}

/// Outer moment int_r^inf s f(s) ds.
inline double radial_outer_moment(const SourceFunction& f, int n, double r) {
  return detail::radial_integral(
      f, [&](double s) { return s * f.radial_value(n, s); }, r, std::numeric_limits<double>::infinity());
}

inline void require_radial(const SourceFunction& f, int n, const char* who) {
  if (n < 3) throw domain_error(std::string(who) + ": dimension must be >= 3");
  if (!f.is_radial) throw domain_error(std::string(who) + ": source '" + f.name + "' is not radial");
}

/// Newtonian potential of a radial source at radius r by direct quadrature.
inline double radial_green_potential(const SourceFunction& f, int n, double r) {
  require_radial(f, n, "radial_green_potential");
  const double outer = radial_outer_moment(f, n, r);
  const double inner = r > 0.0 ? std::pow(r, 2 - n) * radial_inner_moment(f, n, r) : 0.0;
  return -(inner + outer) / (n - 2);
}

/// du/dr of the radial potential: r^{1-n} int_0^r s^{n-1} f(s) ds.
inline double radial_green_derivative(const SourceFunction& f, int n, double r) {
  require_radial(f, n, "radial_green_derivative");
  return r > 0.0 ? std::pow(r, 1 - n) * radial_inner_moment(f, n, r) : 0.0;
}

/// Reference potential on a uniform grid [0, r_max] from the radial ODE.
inline RadialProfile radial_reference_potential(const SourceFunction& f, int n, double r_max, int grid_points = 401) {
  require_radial(f, n, "radial_reference_potential");
  if (!(r_max > 0.0)) throw domain_error("radial_reference_potential: r_max must be positive");
  if (grid_points < 2) throw domain_error("radial_reference_potential: need at least two grid points");
  ConditionOptions copts;
  copts.doublings = 8;
  if (!check_conditions(f, n, copts).f_condition_finite)
    throw admissibility_error("radial_reference_potential: weighted integrability condition fails for " + f.name);

  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;  // {u, m = r^{n-1} u'}

  RadialProfile out;
  out.radii.resize(grid_points);
  for (int i = 0; i < grid_points; ++i) out.radii[i] = r_max * i / (grid_points - 1);

  auto stops = out.radii;
  for (double b : detail::radial_breaks(f, 0.0, r_max)) stops.push_back(b);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  State x{0.0, 0.0};
  std::vector<double> u_ode(grid_points, 0.0);
  double m_at_rmax = 0.0;
  std::size_t next_grid = 1;
  for (std::size_t k = 0; k + 1 < stops.size(); ++k) {
    const double a = stops[k], b = stops[k + 1];
    const double eps = 1e-14 * std::max(1.0, b);
    auto rhs = [&](const State& s, State& ds, double r) {
      const double rc = std::clamp(r, a + eps, b - eps);
      const double rn1 = std::pow(r, n - 1);
      ds[0] = r > 0.0 ? s[1] / rn1 : 0.0;
      ds[1] = rn1 * f.radial_value(n, rc);
    };
    auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
    odeint::integrate_adaptive(stepper, rhs, x, a, b, (b - a) / 16.0);
    while (next_grid < out.radii.size() && out.radii[next_grid] <= b + 1e-15 * std::max(1.0, b)) {
      if (out.radii[next_grid] >= b - 1e-15 * std::max(1.0, b)) u_ode[next_grid] = x[0];
      ++next_grid;
    }
    if (b >= r_max) m_at_rmax = x[1];
  }

  // exterior matching: u(r_max) = -[r_max^{2-n} m(r_max) + int_{r_max}^inf s f] / (n-2)
  const double u_match = -(std::pow(r_max, 2 - n) * m_at_rmax + radial_outer_moment(f, n, r_max)) / (n - 2);
  const double shift = u_match - u_ode.back();
  out.u.resize(grid_points);
  for (int i = 0; i < grid_points; ++i) out.u[i] = u_ode[i] + shift;
  return out;
}

}  // namespace newtpot
