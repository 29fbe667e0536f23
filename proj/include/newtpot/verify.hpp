#pragma once

// Independent checks on computed potentials: finite-difference Laplacian
// residuals, mean-value formulas in harmonic regions, and a property harness
// for the kernel lower bounds used by the far-field estimates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "newtpot/errors.hpp"
#include "newtpot/gauss_legendre.hpp"
#include "newtpot/kernel.hpp"
#include "newtpot/parallel.hpp"
#include "newtpot/quadrature.hpp"
#include "newtpot/radial_reference.hpp"
#include "newtpot/random.hpp"
#include "newtpot/sphere_rule.hpp"

namespace newtpot {

/// Least-squares slope of log|v| against log h.  Non-positive entries are skipped; NaN if fewer than two remain.
inline double log_log_slope(std::span<const double> h, std::span<const double> v) {
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < h.size() && k < v.size(); ++k)
    if (h[k] > 0.0 && std::abs(v[k]) > 0.0) {
      lx.push_back(std::log(h[k]));
      ly.push_back(std::log(std::abs(v[k])));
    }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Laplacian residuals

struct ResidualOptions {
  std::vector<double> h_values{0.2, 0.1, 0.05, 0.025};
  int replicates = 3;             // extra seeds used only to size the FD statistical error
  bool with_hessian = true;       // also evaluate trace(Hess u) - f
  double rel_tolerance = 5e-3;    // on max(1, |f(x)|)
  double min_slope = 1.8;
  int threads = 1;                // points are checked in parallel; results do not depend on it
};

/// FD and Hessian residuals at one point.
struct ResidualEntry {
  std::vector<double> point;
  double f_value = 0.0;
  std::vector<double> laplacians;       // 2n+1-point Laplacian per h
  std::vector<double> residuals;        // laplacian - f per h
  std::vector<double> increments;       // |L(h_k) - L(h_{k+1})|, tagged with h_k
  std::vector<double> increment_floor;  // 3 sd of each increment across seeds
  double richardson = 0.0;              // (4 L(h_last) - L(h_prev)) / 3
  double fd_residual = 0.0;             // richardson - f
  double fd_statistical_error = 0.0;    // 3 sd of the extrapolated value across seeds
  double self_convergence_slope = 0.0;  // over increments above their noise floor
  double residual_slope = 0.0;          // log|L(h) - f| against log h, all steps
  std::size_t slope_points = 0;
  double hessian_trace = 0.0;
  double hessian_residual = 0.0;        // trace - f
  double trace_statistical_error = 0.0;
  bool has_hessian = false;

  double tolerance(double rel) const { return rel * std::max(1.0, std::abs(f_value)); }
  bool hessian_ok(double rel) const {
    return !has_hessian || std::abs(hessian_residual) <= tolerance(rel) + trace_statistical_error;
  }
  bool fd_ok(double rel) const { return std::abs(fd_residual) <= tolerance(rel) + fd_statistical_error; }
  /// Fewer than two increments resolved above the seed-to-seed noise floor.
  bool noise_limited() const { return slope_points < 2; }
  bool slope_ok(double min_slope) const { return noise_limited() || self_convergence_slope >= min_slope; }
  /// FD and Hessian are two estimates of the same Laplacian.
  bool consistent(double rel) const {
    return !has_hessian ||
           std::abs(richardson - hessian_trace) <= tolerance(rel) + fd_statistical_error + trace_statistical_error;
  }
  bool passed(const ResidualOptions& o) const {
    return hessian_ok(o.rel_tolerance) && fd_ok(o.rel_tolerance) && slope_ok(o.min_slope) && consistent(o.rel_tolerance);
  }
};

struct ResidualReport {
  std::vector<std::vector<double>> points;
  std::vector<double> residuals;           // trace(Hess u) - f
  std::vector<double> fd_residuals;        // extrapolated FD Laplacian - f
  std::vector<double> h_values;
  std::vector<double> convergence_slopes;  // self-convergence slope per point
  std::vector<ResidualEntry> entries;
  ResidualOptions options;

  std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [&](const ResidualEntry& e) { return !e.passed(options); }));
  }
  bool passed() const { return failures() == 0; }
  std::size_t noise_limited() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [](const ResidualEntry& e) { return e.noise_limited(); }));
  }
};

/// Holds the primary evaluator and its seed replicates so many points share one setup.
class ResidualVerifier {
 public:
  ResidualVerifier(const SourceFunction& f, int n, const QuadratureConfig& cfg, ResidualOptions opts = {})
      : opts_(std::move(opts)) {
    if (opts_.h_values.size() < 3) throw domain_error("fd_laplacian_residual: need at least three step sizes");
    for (double h : opts_.h_values)
      if (!(h > 0.0)) throw domain_error("fd_laplacian_residual: step sizes must be positive");
    if (opts_.replicates < 1) throw domain_error("fd_laplacian_residual: need at least one replicate");
    runs_.push_back(std::make_unique<NewtonianPotential>(f, n, cfg));
    for (int k = 1; k <= opts_.replicates; ++k) {
      QuadratureConfig c = cfg;
      c.seed = derive_seed(cfg.seed, stream::replicate, k);
      runs_.push_back(std::make_unique<NewtonianPotential>(f, n, c));
    }
  }

  const NewtonianPotential& primary() const { return *runs_.front(); }
  const ResidualOptions& options() const { return opts_; }

  ResidualEntry check(std::span<const double> x) const {
    const int n = primary().dimension();
    const auto& hs = opts_.h_values;
    const std::size_t m = hs.size();
    ResidualEntry e;
    e.point.assign(x.begin(), x.end());
    e.f_value = detail::checked_value(primary().source(), x);

    // laplacians[run][k]
    std::vector<std::vector<double>> lap(runs_.size(), std::vector<double>(m));
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t run = 0; run < runs_.size(); ++run) {
      const auto& P = *runs_[run];
      const double u0 = P.potential(x).u;
      for (std::size_t k = 0; k < m; ++k) {
        const double h = hs[k];
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
          y[i] = x[i] + h;
          s += P.potential(y).u;
          y[i] = x[i] - h;
          s += P.potential(y).u;
          y[i] = x[i];
        }
        lap[run][k] = (s - 2.0 * n * u0) / (h * h);
      }
    }
    auto rich = [&](const std::vector<double>& L) { return (4.0 * L[m - 1] - L[m - 2]) / 3.0; };
    auto sd = [&](auto&& value) {
      double mean = 0.0, sq = 0.0;
      for (std::size_t run = 0; run < runs_.size(); ++run) mean += value(run);
      mean /= runs_.size();
      for (std::size_t run = 0; run < runs_.size(); ++run) sq += (value(run) - mean) * (value(run) - mean);
      return std::sqrt(sq / (runs_.size() - 1.0));
    };

    e.laplacians = lap[0];
    for (double L : e.laplacians) e.residuals.push_back(L - e.f_value);
    e.richardson = rich(lap[0]);
    e.fd_residual = e.richardson - e.f_value;
    e.fd_statistical_error = 3.0 * sd([&](std::size_t run) { return rich(lap[run]); });

    std::vector<double> hh, dd;
    bool above = true;
    for (std::size_t k = 0; k + 1 < m; ++k) {
      const double d = std::abs(lap[0][k] - lap[0][k + 1]);
      const double floor = 3.0 * sd([&](std::size_t run) { return lap[run][k] - lap[run][k + 1]; });
      e.increments.push_back(d);
      e.increment_floor.push_back(floor);
      // slope over the leading run of increments still resolved above the noise
      above = above && d > floor;
      if (above) {
        hh.push_back(hs[k]);
        dd.push_back(d);
      }
    }
    e.slope_points = hh.size();
    e.self_convergence_slope = log_log_slope(hh, dd);
    e.residual_slope = log_log_slope(hs, e.residuals);

    if (opts_.with_hessian) {
      const auto H = primary().hessian(x);
      e.has_hessian = true;
      e.hessian_trace = H.hess_trace();
      e.hessian_residual = e.hessian_trace - e.f_value;
      e.trace_statistical_error = H.trace_statistical_error;
    }
    return e;
  }

  ResidualReport check_all(const std::vector<std::vector<double>>& points) const {
    ResidualReport rep;
    rep.options = opts_;
    rep.h_values = opts_.h_values;
    rep.entries = parallel_map<ResidualEntry>(points.size(), opts_.threads, [&](std::size_t i) { return check(points[i]); });
    for (const auto& e : rep.entries) {
      rep.points.push_back(e.point);
      rep.residuals.push_back(e.hessian_residual);
      rep.fd_residuals.push_back(e.fd_residual);
      rep.convergence_slopes.push_back(e.self_convergence_slope);
    }
    return rep;
  }

 private:
  ResidualOptions opts_;
  std::vector<std::unique_ptr<NewtonianPotential>> runs_;
};

inline ResidualEntry fd_laplacian_residual(const SourceFunction& f, int n, std::span<const double> x,
                                           const QuadratureConfig& cfg, ResidualOptions opts = {}) {
  return ResidualVerifier(f, n, cfg, std::move(opts)).check(x);
}

// ---------------------------------------------------------------------------
// Near-zone oracle

/// The near-zone part of u at |x| = a for a radial source, by nested 1-D
/// quadrature: -1/(n-2) int_0^r chi(rho) rho <f>_{S(x,rho)} drho, where the
/// sphere average of the radial profile F is
///   <f>(rho) = (omega_{n-2}/omega_{n-1}) int_{-1}^{1} F(sqrt(a^2+rho^2+2 a rho t)) (1-t^2)^{(n-3)/2} dt.
/// Independent of the angular and radial rules used by the solver.
inline double near_zone_reference(const SourceFunction& f, int n, double a, double split_radius) {
  require_radial(f, n, "near_zone_reference");
  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> radii = f.breakpoints;
  if (f.compactly_supported()) radii.push_back(f.support_radius);
  const double ratio = surface_area(n - 1) / surface_area(n);
  const double r = split_radius;

  auto panels = [](std::vector<double> b, double lo, double hi) {
    std::vector<double> out{lo};
    for (double v : b)
      if (v > lo && v < hi) out.push_back(v);
    std::sort(out.begin(), out.end());
    out.push_back(hi);
    return out;
  };
  auto integrate = [](auto&& g, const std::vector<double>& br) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
      const double lo = br[k], hi = br[k + 1];
      if (!(hi > lo)) continue;
      const double eps = 1e-14 * std::max(1.0, std::abs(hi));
      auto inner = [&](double t) { return g(std::clamp(t, lo + eps, hi - eps)); };
      double err = 0.0;
      total += gauss_kronrod<double, 61>::integrate(inner, lo, hi, 15, 1e-13, &err);
    }
    return total;
  };
  auto sphere_mean = [&](double rho) {
    if (a == 0.0) return f.radial_value(n, rho);
    std::vector<double> tb;
    for (double b : radii) tb.push_back((b * b - a * a - rho * rho) / (2.0 * a * rho));
    auto g = [&](double t) {
      const double s2 = std::max(0.0, a * a + rho * rho + 2.0 * a * rho * t);
      return f.radial_value(n, std::sqrt(s2)) * std::pow(1.0 - t * t, 0.5 * (n - 3));
    };
    return ratio * integrate(g, panels(tb, -1.0, 1.0));
  };
  std::vector<double> rb{0.5 * r};
  for (double b : radii) {
    rb.push_back(std::abs(b - a));
    rb.push_back(b + a);
  }
  auto outer = [&](double rho) { return detail::near_weight(rho, r) * rho * sphere_mean(rho); };
  return -integrate(outer, panels(rb, 0.0, r)) / (n - 2);
}

// ---------------------------------------------------------------------------
// Mean-value formulas

/// Average of u over the sphere |y - center| = radius under `rule` (weights sum to omega).
/// u must be safe to call concurrently when threads > 1; the sum is taken in rule order.
template <class U>
double sphere_average(U&& u, std::span<const double> center, double radius, const SphereRule& rule, int threads = 1) {
  const int n = static_cast<int>(center.size());
  const auto values = parallel_map<double>(rule.size(), threads, [&](std::size_t a) {
    std::vector<double> y(n);
    const auto w = rule.direction(a);
    for (int d = 0; d < n; ++d) y[d] = center[d] + radius * w[d];
    return u(std::span<const double>(y));
  });
  double s = 0.0, wsum = 0.0;
  for (std::size_t a = 0; a < rule.size(); ++a) {
    s += rule.weights[a] * values[a];
    wsum += rule.weights[a];
  }
  return s / wsum;
}

/// Average of u over the ball B(center, radius): Gauss-Legendre in the radius
/// with density n rho^{n-1} / radius^n, nested sphere averages.
template <class U>
double ball_average(U&& u, std::span<const double> center, double radius, const SphereRule& rule, int radial_nodes,
                    int threads = 1) {
  const int n = static_cast<int>(center.size());
  const GaussRule g = gauss_legendre(radial_nodes, 0.0, radius);
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    s += g.weights[k] * n * std::pow(g.nodes[k], n - 1) / std::pow(radius, n) *
         sphere_average(u, center, g.nodes[k], rule, threads);
  return s;
}

struct MeanValueOptions {
  int theta_nodes = 8;       // product rule for n = 3
  int mc_directions = 512;   // n >= 4
  int radial_nodes = 6;
  double tolerance_factor = 2.0;
  std::uint64_t seed = 0;
  int threads = 1;
};

inline SphereRule mean_value_rule(int n, const MeanValueOptions& o) {
  return n == 3 ? product_gauss_sphere(o.theta_nodes)
                : monte_carlo_sphere(n, o.mc_directions, derive_seed(o.seed, stream::near_sphere, 1));
}

struct MeanValueReport {
  std::vector<double> center;
  double radius = 0.0;
  double sphere_average = 0.0;
  double ball_average = 0.0;
  double center_value = 0.0;
  std::pair<double, double> discrepancies{0.0, 0.0};  // (sphere - center, ball - center)
  double tolerance = 0.0;                              // factor x quadrature budget at the center

  bool passed() const {
    return std::abs(discrepancies.first) <= tolerance && std::abs(discrepancies.second) <= tolerance;
  }
};

/// Sphere and ball averages of the computed potential where it is harmonic.
inline MeanValueReport mean_value_check(const NewtonianPotential& P, std::span<const double> center, double radius,
                                        MeanValueOptions opts = {}) {
  const auto& f = P.source();
  const int n = P.dimension();
  if (static_cast<int>(center.size()) != n) throw precondition_error("mean_value_check: center has the wrong dimension");
  if (!(radius > 0.0)) throw precondition_error("mean_value_check: radius must be positive");
  if (!f.compactly_supported())
    throw precondition_error("mean_value_check: '" + f.name + "' has unbounded support, no ball avoids it");
  if (!(norm(center) - radius > f.support_radius)) {
    std::ostringstream os;
    os << "mean_value_check: B(" << detail::format_point(center) << ", " << radius << ") meets the support of "
       << f.name << " (radius " << f.support_radius << ")";
    throw precondition_error(os.str());
  }
  opts.seed = P.config().seed;
  const SphereRule rule = mean_value_rule(n, opts);
  auto u = [&](std::span<const double> y) { return P.potential(y).u; };
  MeanValueReport rep;
  rep.center.assign(center.begin(), center.end());
  rep.radius = radius;
  const auto c = P.potential(center);
  rep.center_value = c.u;
  rep.sphere_average = sphere_average(u, center, radius, rule, opts.threads);
  rep.ball_average = ball_average(u, center, radius, rule, opts.radial_nodes, opts.threads);
  rep.discrepancies = {rep.sphere_average - rep.center_value, rep.ball_average - rep.center_value};
  rep.tolerance = opts.tolerance_factor * c.u_error_budget(P.config().rel_tolerance);
  return rep;
}

inline MeanValueReport mean_value_check(const SourceFunction& f, int n, std::span<const double> center, double radius,
                                        const QuadratureConfig& cfg, MeanValueOptions opts = {}) {
  return mean_value_check(NewtonianPotential(f, n, cfg), center, radius, opts);
}

/// Mean-value defects without the harmonicity requirement, against the Taylor
/// terms r^2 f(c) / (2n) (sphere) and r^2 f(c) / (2(n+2)) (ball).
struct MeanValueScaling {
  std::vector<double> center;
  std::vector<double> radii;
  std::vector<double> sphere_defects, ball_defects;
  std::vector<double> sphere_predictions, ball_predictions;
  double sphere_slope = 0.0, ball_slope = 0.0;
  double f_center = 0.0;
};

inline MeanValueScaling mean_value_scaling(const NewtonianPotential& P, std::span<const double> center,
                                           std::vector<double> radii, MeanValueOptions opts = {}) {
  const int n = P.dimension();
  opts.seed = P.config().seed;
  const SphereRule rule = mean_value_rule(n, opts);
  auto u = [&](std::span<const double> y) { return P.potential(y).u; };
  MeanValueScaling s;
  s.center.assign(center.begin(), center.end());
  s.radii = std::move(radii);
  s.f_center = detail::checked_value(P.source(), center);
  const double uc = P.potential(center).u;
  for (double r : s.radii) {
    s.sphere_defects.push_back(sphere_average(u, center, r, rule, opts.threads) - uc);
    s.ball_defects.push_back(ball_average(u, center, r, rule, opts.radial_nodes, opts.threads) - uc);
    s.sphere_predictions.push_back(r * r * s.f_center / (2.0 * n));
    s.ball_predictions.push_back(r * r * s.f_center / (2.0 * (n + 2)));
  }
  s.sphere_slope = log_log_slope(s.radii, s.sphere_defects);
  s.ball_slope = log_log_slope(s.radii, s.ball_defects);
  return s;
}

// ---------------------------------------------------------------------------
// Inequality harness

struct InequalityTally {
  std::string name;
  std::size_t checked = 0;
  std::size_t violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();  // min (lhs - rhs) / |rhs|
  std::string witness;                                          // first violation
};

struct HarnessReport {
  int dimension = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<InequalityTally> tallies;
  std::size_t boundary_probes = 0;

  std::size_t violations() const {
    std::size_t v = 0;
    for (const auto& t : tallies) v += t.violations;
    return v;
  }
  bool passed() const { return violations() == 0; }
};

namespace detail {

class TallyBook {
 public:
  explicit TallyBook(std::vector<std::string> names) {
    for (auto& nm : names) {
      InequalityTally t;
      t.name = std::move(nm);
      tallies_.push_back(std::move(t));
    }
  }

  /// Records lhs > rhs (strict) or lhs >= rhs.
  void record(std::size_t idx, double lhs, double rhs, bool strict, const std::string& context) {
    auto& t = tallies_[idx];
    ++t.checked;
    const bool ok = strict ? lhs > rhs : lhs >= rhs;
    const double margin = (lhs - rhs) / std::max(std::abs(rhs), std::numeric_limits<double>::min());
    t.min_margin = std::min(t.min_margin, margin);
    if (!ok) {
      if (t.violations == 0) {
        std::ostringstream os;
        os.precision(17);
        os << t.name << ": lhs=" << lhs << " rhs=" << rhs << " at " << context;
        t.witness = os.str();
      }
      ++t.violations;
    }
  }

  std::vector<InequalityTally> take() { return std::move(tallies_); }

 private:
  std::vector<InequalityTally> tallies_;
};

inline double log_uniform(Rng& rng, double lo, double hi) {
  return lo * std::exp(rng.uniform() * std::log(hi / lo));
}

}  // namespace detail

/// Transcription check of the far-field kernel bounds, with their exact constants:
///   |x| < R/2 <= R <= |y|:
///     |x-y| >= |y| - |x| > R/2,   |x-y| > |y|/2,
///     |x-y|^{n-2} > (1/2)[(R/2)^{n-2} + (|y|/2)^{n-2}] >= c_1 (1 + |y|^{n-2}),
///     c_1 = min{R^{n-2}, 1} / 2^{n-1};
///   |x_k| < M, M > 1/2, R > 2M, |y| >= R:
///     |x_k-y| >= |y| - |x_k| > R - M > M,   |x_k-y| > |y|/2 + R/2 - M > |y|/2,
///     |x_k-y|^{n-1} >= (1/2)[M^{n-1} + (|y|/2)^{n-1}] = 2^{-n}[(2M)^{n-1} + |y|^{n-1}] >= 2^{-n}(1 + |y|^{n-1}),
///     |x_k-y|^{n-2} >= (1/2)[M^{n-2} + (|y|/2)^{n-2}] >= c_2 (1 + |y|^{n-2}),  c_2 = min{(2M)^{n-2}, 1} / 2^{n-1}.
/// Radii are log-uniform in [1e-2, 1e3].  Half the trials align x against y,
/// the worst case of the triangle inequality.  The boundary probe puts
/// |x| = R/2 - eps and |y| = R + eps (and M = 1/2 + eps) for eps = 1e-9.
inline HarnessReport inequality_harness(int n, std::size_t trials, std::uint64_t seed) {
  if (n < 3) throw domain_error("inequality_harness: dimension must be >= 3");
  if (trials < 1) throw domain_error("inequality_harness: need at least one trial");
  enum : std::size_t {
    near_split, half_y, c1_middle, c1_bound,
    m_split, m_half_y, gradient_middle, gradient_bound, c2_middle, c2_bound
  };
  detail::TallyBook book({"|x-y| > R/2", "|x-y| > |y|/2", "|x-y|^(n-2) > mean of halves", "mean of halves >= c1(1+|y|^(n-2))",
                          "|x_k-y| > R-M > M", "|x_k-y| > |y|/2", "|x_k-y|^(n-1) >= mean of halves",
                          "2^-n((2M)^(n-1)+|y|^(n-1)) >= 2^-n(1+|y|^(n-1))", "|x_k-y|^(n-2) >= mean of halves",
                          "mean of halves >= c2(1+|y|^(n-2))"});
  Rng rng(derive_seed(seed, stream::harness, static_cast<std::uint64_t>(n)));
  std::vector<double> dx(n), dy(n), x(n), y(n);
  auto context = [&](double R, double M) {
    std::ostringstream os;
    os.precision(17);
    os << "n=" << n << " R=" << R << " M=" << M << " x=" << detail::format_point(x) << " y=" << detail::format_point(y);
    return os.str();
  };

  auto c1_chain = [&](double R, double xr, double yr, bool aligned) {
    random_unit_vector(rng, n, dy);
    if (aligned) dx = dy; else random_unit_vector(rng, n, dx);
    for (int d = 0; d < n; ++d) {
      x[d] = xr * dx[d];
      y[d] = yr * dy[d];
    }
    double dist2 = 0.0;
    for (int d = 0; d < n; ++d) dist2 += (x[d] - y[d]) * (x[d] - y[d]);
    const double dist = std::sqrt(dist2), ay = norm(y);
    const auto ctx = context(R, 0.0);
    book.record(near_split, dist, 0.5 * R, true, ctx);
    book.record(half_y, dist, 0.5 * ay, true, ctx);
    // (1/2)[(R/2)^k + (|y|/2)^k] evaluated as 2^{-(k+1)}[R^k + |y|^k], the same number without the extra roundings
    const double middle = std::pow(2.0, 1 - n) * (std::pow(R, n - 2) + std::pow(ay, n - 2));
    book.record(c1_middle, std::pow(dist, n - 2), middle, true, ctx);
    book.record(c1_bound, middle, c1_constant(n, R) * (1.0 + std::pow(ay, n - 2)), false, ctx);
  };

  auto m_chain = [&](double M, double R, double xr, double yr, bool aligned) {
    random_unit_vector(rng, n, dy);
    if (aligned) dx = dy; else random_unit_vector(rng, n, dx);
    for (int d = 0; d < n; ++d) {
      x[d] = xr * dx[d];
      y[d] = yr * dy[d];
    }
    double dist2 = 0.0;
    for (int d = 0; d < n; ++d) dist2 += (x[d] - y[d]) * (x[d] - y[d]);
    const double dist = std::sqrt(dist2), ay = norm(y);
    const auto ctx = context(R, M);
    book.record(m_split, dist, std::max(R - M, M), true, ctx);
    book.record(m_half_y, dist, 0.5 * ay, true, ctx);
    const double middle = std::pow(2.0, -n) * (std::pow(2.0 * M, n - 1) + std::pow(ay, n - 1));
    book.record(gradient_middle, std::pow(dist, n - 1), middle, false, ctx);
    const double p2n = std::pow(2.0, -n);
    book.record(gradient_bound, middle, p2n * (1.0 + std::pow(ay, n - 1)), false, ctx);
    const double middle2 = std::pow(2.0, 1 - n) * (std::pow(2.0 * M, n - 2) + std::pow(ay, n - 2));
    book.record(c2_middle, std::pow(dist, n - 2), middle2, false, ctx);
    const double c2 = std::min(std::pow(2.0 * M, n - 2), 1.0) / std::pow(2.0, n - 1);
    book.record(c2_bound, middle2, c2 * (1.0 + std::pow(ay, n - 2)), false, ctx);
  };

  for (std::size_t t = 0; t < trials; ++t) {
    const bool aligned = t % 2 == 1;
    const double R = detail::log_uniform(rng, 1e-2, 1e3);
    const double xr = 0.5 * R * rng.uniform();
    const double yr = R * detail::log_uniform(rng, 1.0, 1e3);
    c1_chain(R, xr, yr, aligned);

    const double M = 0.5 + detail::log_uniform(rng, 1e-9, 1e3);
    const double R2 = 2.0 * M * detail::log_uniform(rng, 1.0 + 1e-12, 1e3);
    const double xm = M * rng.uniform();
    const double ym = R2 * detail::log_uniform(rng, 1.0, 1e3);
    m_chain(M, R2, xm, ym, aligned);
  }

  HarnessReport rep;
  const double eps = 1e-9;
  for (double R : {1e-2, 0.5, 1.0, 2.0, 10.0, 1e3}) {
    c1_chain(R, 0.5 * R - eps, R + eps, true);
    ++rep.boundary_probes;
  }
  for (double M : {0.5 + eps, 1.0, 10.0}) {
    const double R = 2.0 * M + eps;
    m_chain(M, R, M - eps, R + eps, true);
    ++rep.boundary_probes;
  }

  rep.dimension = n;
  rep.trials = trials;
  rep.seed = seed;
  rep.tallies = book.take();
  return rep;
}

}  // namespace newtpot
