#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "newtpot/errors.hpp"
#include "newtpot/gauss_legendre.hpp"
#include "newtpot/kernel.hpp"
#include "newtpot/sources.hpp"
#include "newtpot/sphere_rule.hpp"

namespace newtpot {

namespace detail {

inline std::string format_point(std::span<const double> y) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (std::size_t k = 0; k < y.size(); ++k) os << (k ? ", " : "") << y[k];
  os << ")";
  return os.str();
}

/// f(y), rethrowing evaluator failures and non-finite values with the location attached.
inline double checked_value(const SourceFunction& f, std::span<const double> y) {
  double v;
  try {
    v = f.eval_f(y);
  } catch (const std::exception& e) {
    throw evaluation_error(f.name + ": evaluation failed at " + format_point(y) + ": " + e.what());
  }
  if (!std::isfinite(v)) throw evaluation_error(f.name + ": non-finite value at " + format_point(y));
  return v;
}

inline void checked_gradient(const SourceFunction& f, std::span<const double> y, std::span<double> g) {
  try {
    f.eval_grad_f(y, g);
  } catch (const std::exception& e) {
    throw evaluation_error(f.name + ": gradient evaluation failed at " + format_point(y) + ": " + e.what());
  }
  for (double v : g)
    if (!std::isfinite(v)) throw evaluation_error(f.name + ": non-finite gradient at " + format_point(y));
}

}  // namespace detail

/// Controls for the doubling-radius finiteness test on improper integrals.
struct ConditionOptions {
  double base_radius = 4.0;        // R_0
  int doublings = 12;              // R_k = 2^k R_0, k = 0..doublings
  double rel_increment_tol = 1e-6; // last increment / partial below this: converged
  double decay_ratio_max = 0.95;   // increments shrinking at least this fast: geometric tail
  int decay_window = 4;            // consecutive increment ratios that must show decay
  int radial_nodes = 48;           // Gauss points per radial panel
  int theta_nodes = 16;            // product rule on S^2 for non-radial sources
  int mc_directions = 4096;        // sphere samples for non-radial sources, n >= 4
  std::uint64_t seed = 0;
};

/// Partial integrals over growing balls and the verdict drawn from them.
struct TruncationSeries {
  std::vector<std::pair<double, double>> trace;  // (R_k, partial integral over B(0,R_k) or the shell run)
  bool finite = false;
  double total = 0.0;       // partial + geometric extrapolation when finite, +inf otherwise
  double decay_ratio = 0.0; // worst increment ratio over the decay window
};

/// Verdict from a nondecreasing sequence of partial integrals.
inline TruncationSeries judge_series(std::vector<std::pair<double, double>> trace, const ConditionOptions& opts) {
  TruncationSeries s;
  s.trace = std::move(trace);
  const std::size_t m = s.trace.size();
  const double last = s.trace.back().second;
  if (m < 2 || last == 0.0) {
    s.finite = true;
    s.total = last;
    return s;
  }
  std::vector<double> inc;
  for (std::size_t k = 1; k < m; ++k) inc.push_back(s.trace[k].second - s.trace[k - 1].second);
  const double d_last = inc.back();
  if (d_last <= opts.rel_increment_tol * last) {
    s.finite = true;
    s.total = last + std::max(d_last, 0.0);
    return s;
  }
  const std::size_t w = std::min<std::size_t>(opts.decay_window, inc.size() - 1);
  double worst = 0.0;
  bool decaying = w > 0;
  for (std::size_t k = inc.size() - w; k < inc.size(); ++k) {
    if (!(inc[k - 1] > 0.0)) {
      decaying = false;
      break;
    }
    worst = std::max(worst, inc[k] / inc[k - 1]);
  }
  s.decay_ratio = worst;
  if (decaying && worst <= opts.decay_ratio_max) {
    s.finite = true;
    s.total = last + d_last * worst / (1.0 - worst);
  } else {
    s.finite = false;
    s.total = std::numeric_limits<double>::infinity();
  }
  return s;
}

/// Integrates |f(y)|/(1+|y|^{k_f}) and |grad f(y)|/(1+|y|^{k_g}) over spherical
/// shells.  Radial sources reduce to a 1-D radial rule; others use the
/// product rule on S^2 (n = 3) or seeded sphere samples (n >= 4).
class ShellIntegrator {
 public:
  ShellIntegrator(const SourceFunction& f, int n, double exponent_f, double exponent_g, ConditionOptions opts = {})
      : f_(f), n_(n), kf_(exponent_f), kg_(exponent_g), opts_(opts), omega_(surface_area(n)) {
    if (!f.is_radial) {
      sphere_ = n == 3 ? product_gauss_sphere(opts.theta_nodes)
                       : monte_carlo_sphere(n, opts.mc_directions, derive_seed(opts.seed, stream::shell_sphere, 0));
    }
  }

  /// (f-integral, gradient-integral) over a <= |y| <= b.
  std::pair<double, double> shell(double a, double b) const {
    std::vector<double> breaks{a};
    for (double bp : f_.breakpoints)
      if (bp > a && bp < b) breaks.push_back(bp);
    if (f_.compactly_supported() && f_.support_radius > a && f_.support_radius < b) breaks.push_back(f_.support_radius);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    breaks.push_back(b);
    // beyond the support nothing contributes
    if (f_.compactly_supported() && a >= f_.support_radius) return {0.0, 0.0};
    const GaussRule radial = composite_gauss_legendre(breaks, opts_.radial_nodes);

    std::vector<double> y(n_), g(n_);
    double sf = 0.0, sg = 0.0;
    for (std::size_t k = 0; k < radial.size(); ++k) {
      const double r = radial.nodes[k];
      const double jac = radial.weights[k] * std::pow(r, n_ - 1);
      double af = 0.0, ag = 0.0;
      if (f_.is_radial) {
        std::fill(y.begin(), y.end(), 0.0);
        y[0] = r;
        af = omega_ * std::abs(detail::checked_value(f_, y));
        detail::checked_gradient(f_, y, g);
        ag = omega_ * norm(g);
      } else {
        for (std::size_t d = 0; d < sphere_.size(); ++d) {
          const auto dir = sphere_.direction(d);
          for (int c = 0; c < n_; ++c) y[c] = r * dir[c];
          af += sphere_.weights[d] * std::abs(detail::checked_value(f_, y));
          detail::checked_gradient(f_, y, g);
          ag += sphere_.weights[d] * norm(g);
        }
      }
      sf += jac * af / (1.0 + std::pow(r, kf_));
      sg += jac * ag / (1.0 + std::pow(r, kg_));
    }
    return {sf, sg};
  }

  /// Partial integrals over B(0, R_k) for R_k = 2^k R_0 (inner radius 0), or
  /// over R_0 <= |y| <= R_k when `from_origin` is false.
  std::pair<TruncationSeries, TruncationSeries> doubling_series(double base, int doublings, bool from_origin) const {
    std::vector<std::pair<double, double>> tf, tg;
    double pf = 0.0, pg = 0.0;
    if (from_origin) {
      // geometric refinement towards the origin keeps narrow sources resolved
      double lo = 0.0;
      for (int k = 6; k >= 0; --k) {
        const double hi = base / std::pow(2.0, k);
        const auto [a, b] = shell(lo, hi);
        pf += a;
        pg += b;
        lo = hi;
      }
    }
    tf.emplace_back(base, pf);
    tg.emplace_back(base, pg);
    double r = base;
    for (int k = 1; k <= doublings; ++k) {
      const auto [a, b] = shell(r, 2.0 * r);
      pf += a;
      pg += b;
      r *= 2.0;
      tf.emplace_back(r, pf);
      tg.emplace_back(r, pg);
    }
    return {judge_series(std::move(tf), opts_), judge_series(std::move(tg), opts_)};
  }

 private:
  const SourceFunction& f_;
  int n_;
  double kf_, kg_;
  ConditionOptions opts_;
  double omega_;
  SphereRule sphere_;
};

/// The two weighted-L^1 hypotheses for the Newtonian potential and its derivatives.
struct ConditionReport {
  double weighted_f_integral = 0.0;      // int |f| / (1 + |y|^{n-2})
  double weighted_gradf_integral = 0.0;  // int |grad f| / (1 + |y|^{n-1})
  bool f_condition_finite = false;
  bool gradf_condition_finite = false;
  std::vector<std::pair<double, double>> truncation_trace;        // f condition
  std::vector<std::pair<double, double>> gradf_truncation_trace;  // gradient condition
  double f_decay_ratio = 0.0;
  double gradf_decay_ratio = 0.0;
};

inline ConditionReport check_conditions(const SourceFunction& f, int n, ConditionOptions opts = {}) {
  if (n < 3) throw domain_error("check_conditions: dimension must be >= 3");
  ShellIntegrator shells(f, n, n - 2.0, n - 1.0, opts);
  auto [sf, sg] = shells.doubling_series(opts.base_radius, opts.doublings, true);
  ConditionReport rep;
  rep.weighted_f_integral = sf.total;
  rep.weighted_gradf_integral = sg.total;
  rep.f_condition_finite = sf.finite;
  rep.gradf_condition_finite = sg.finite;
  rep.truncation_trace = std::move(sf.trace);
  rep.gradf_truncation_trace = std::move(sg.trace);
  rep.f_decay_ratio = sf.decay_ratio;
  rep.gradf_decay_ratio = sg.decay_ratio;
  return rep;
}

}  // namespace newtpot
