#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "newtpot/errors.hpp"
#include "newtpot/kernel.hpp"

namespace newtpot {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// A source term f for the Poisson equation, with its analytic gradient and
/// the metadata the solver needs to pick sampling regions and oracles.
///
/// Evaluators must be pure and safe to call concurrently. Extension point:
/// any caller may assemble a SourceFunction from its own callables.
struct SourceFunction {
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

  std::string name;
  ValueFn eval_f;
  GradientFn eval_grad_f;
  double support_radius = infinity;         // f = 0 outside B(0, support_radius)
  std::optional<double> decay_exponent;     // |f(y)| = O(|y|^-s); infinity for faster-than-any-power decay
  bool is_radial = false;
  bool is_c1 = true;
  bool is_smooth = false;                   // C^infinity: FD self-convergence is expected everywhere
  bool radially_nonincreasing = false;      // |f| is a nonincreasing function of |y|
  std::vector<double> breakpoints;          // radii where a radial profile loses smoothness

  bool compactly_supported() const { return std::isfinite(support_radius); }

  double value(std::span<const double> y) const { return eval_f(y); }

  std::vector<double> gradient(std::span<const double> y) const {
    std::vector<double> g(y.size(), 0.0);
    eval_grad_f(y, g);
    return g;
  }

  /// f(r e_1): the radial profile of a radial source.
  double radial_value(int n, double r) const {
    std::vector<double> y(n, 0.0);
    y[0] = r;
    return eval_f(y);
  }
};

namespace detail {

inline double squared_norm(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return s;
}

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << what << " must be a positive finite number, got " << v;
    throw domain_error(os.str());
  }
}

}  // namespace detail

/// f(y) = amplitude * exp(-|y|^2 / width^2).
inline SourceFunction make_gaussian(double amplitude, double width) {
  detail::require_positive(width, "gaussian width");
  const double inv_w2 = 1.0 / (width * width);
  SourceFunction f;
  std::ostringstream os;
  os << "gaussian(amplitude=" << amplitude << ",width=" << width << ")";
  f.name = os.str();
  f.eval_f = [=](std::span<const double> y) { return amplitude * std::exp(-detail::squared_norm(y) * inv_w2); };
  f.eval_grad_f = [=](std::span<const double> y, std::span<double> g) {
    const double v = amplitude * std::exp(-detail::squared_norm(y) * inv_w2);
    for (std::size_t k = 0; k < y.size(); ++k) g[k] = -2.0 * y[k] * inv_w2 * v;
  };
  f.decay_exponent = infinity;
  f.is_radial = true;
  f.is_smooth = true;
  f.radially_nonincreasing = true;
  return f;
}

/// C^1 compactly supported bump (1 - |y|^2/radius^2)^2 on B(0, radius).
inline SourceFunction make_poly_bump(double radius) {
  detail::require_positive(radius, "poly_bump radius");
  const double inv_r2 = 1.0 / (radius * radius);
  SourceFunction f;
  std::ostringstream os;
  os << "poly_bump(radius=" << radius << ")";
  f.name = os.str();
  f.eval_f = [=](std::span<const double> y) {
    const double t = 1.0 - detail::squared_norm(y) * inv_r2;
    return t > 0.0 ? t * t : 0.0;
  };
  f.eval_grad_f = [=](std::span<const double> y, std::span<double> g) {
    const double t = 1.0 - detail::squared_norm(y) * inv_r2;
    const double c = t > 0.0 ? -4.0 * t * inv_r2 : 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) g[k] = c * y[k];
  };
  f.support_radius = radius;
  f.decay_exponent = infinity;
  f.is_radial = true;
  f.radially_nonincreasing = true;
  f.breakpoints = {radius};
  return f;
}

/// f(y) = (1 + |y|^2)^{-s/2}; the weighted integrability condition holds iff s > 2.
inline SourceFunction make_inverse_power(double s) {
  detail::require_positive(s, "inverse_power exponent s");
  SourceFunction f;
  std::ostringstream os;
  os << "inverse_power(s=" << s << ")";
  f.name = os.str();
  f.eval_f = [=](std::span<const double> y) { return std::pow(1.0 + detail::squared_norm(y), -0.5 * s); };
  f.eval_grad_f = [=](std::span<const double> y, std::span<double> g) {
    const double c = -s * std::pow(1.0 + detail::squared_norm(y), -0.5 * s - 1.0);
    for (std::size_t k = 0; k < y.size(); ++k) g[k] = c * y[k];
  };
  f.decay_exponent = s;
  f.is_radial = true;
  f.is_smooth = true;
  f.radially_nonincreasing = true;
  return f;
}

/// density * indicator of B(0, radius). Discontinuous: usable as a quadrature
/// oracle for u and grad u, rejected wherever C^1 is required.
inline SourceFunction make_uniform_ball(double radius = 1.0, double density = 1.0) {
  detail::require_positive(radius, "uniform_ball radius");
  const double r2 = radius * radius;
  SourceFunction f;
  std::ostringstream os;
  os << "uniform_ball(radius=" << radius << ",density=" << density << ")";
  f.name = os.str();
  f.eval_f = [=](std::span<const double> y) { return detail::squared_norm(y) <= r2 ? density : 0.0; };
  f.eval_grad_f = [](std::span<const double> y, std::span<double> g) {
    for (std::size_t k = 0; k < y.size(); ++k) g[k] = 0.0;
  };
  f.support_radius = radius;
  f.decay_exponent = infinity;
  f.is_radial = true;
  f.is_c1 = false;
  f.radially_nonincreasing = true;
  f.breakpoints = {radius};
  return f;
}

/// y -> base(y - center).
inline SourceFunction make_shifted(SourceFunction base, std::vector<double> center) {
  SourceFunction f;
  std::ostringstream os;
  os << "shifted(" << base.name << ",|c|=" << norm(center) << ")";
  f.name = os.str();
  auto shift = [center](std::span<const double> y) {
    if (y.size() != center.size()) throw evaluation_error("shifted source: point dimension does not match center");
    std::vector<double> z(y.begin(), y.end());
    for (std::size_t k = 0; k < z.size(); ++k) z[k] -= center[k];
    return z;
  };
  f.eval_f = [shift, g = base.eval_f](std::span<const double> y) { return g(shift(y)); };
  f.eval_grad_f = [shift, g = base.eval_grad_f](std::span<const double> y, std::span<double> out) {
    g(shift(y), out);
  };
  f.support_radius = base.support_radius + norm(center);
  f.decay_exponent = base.decay_exponent;
  f.is_c1 = base.is_c1;
  f.is_smooth = base.is_smooth;
  f.is_radial = norm(center) == 0.0 && base.is_radial;
  f.radially_nonincreasing = f.is_radial && base.radially_nonincreasing;
  if (f.is_radial) f.breakpoints = base.breakpoints;
  return f;
}

/// y -> a * base(y).
inline SourceFunction make_scaled(SourceFunction base, double a) {
  SourceFunction f = base;
  std::ostringstream os;
  os << a << "*" << base.name;
  f.name = os.str();
  f.eval_f = [a, g = base.eval_f](std::span<const double> y) { return a * g(y); };
  f.eval_grad_f = [a, g = base.eval_grad_f](std::span<const double> y, std::span<double> out) {
    g(y, out);
    for (double& v : out) v *= a;
  };
  if (a == 0.0) f.support_radius = 0.0;
  return f;
}

/// y -> base(y) - base(-y).
inline SourceFunction make_odd_symmetrized(SourceFunction base) {
  SourceFunction f;
  f.name = "odd(" + base.name + ")";
  f.eval_f = [g = base.eval_f](std::span<const double> y) {
    std::vector<double> m(y.begin(), y.end());
    for (double& v : m) v = -v;
    return g(y) - g(m);
  };
  f.eval_grad_f = [g = base.eval_grad_f](std::span<const double> y, std::span<double> out) {
    std::vector<double> m(y.begin(), y.end());
    for (double& v : m) v = -v;
    std::vector<double> gm(y.size());
    g(y, out);
    g(m, gm);
    // d/dy [b(-y)] = -grad b(-y)
    for (std::size_t k = 0; k < y.size(); ++k) out[k] += gm[k];
  };
  f.support_radius = base.support_radius;
  f.decay_exponent = base.decay_exponent;
  f.is_c1 = base.is_c1;
  f.is_smooth = base.is_smooth;
  return f;
}

// ---------------------------------------------------------------------------
// Named corpus

using ParameterMap = std::map<std::string, double>;

struct CorpusEntry {
  std::string name;
  std::string description;
  ParameterMap defaults;
};

inline const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = {
      {"gaussian", "amplitude * exp(-|y|^2/width^2)", {{"amplitude", 1.0}, {"width", 1.0}}},
      {"poly_bump", "(1 - |y|^2/radius^2)^2 on B(0,radius), C^1 compact support", {{"radius", 1.0}}},
      {"inverse_power", "(1 + |y|^2)^(-s/2); admissible iff s > 2", {{"s", 4.0}}},
      {"uniform_ball", "density on B(0,radius); discontinuous oracle source", {{"radius", 1.0}, {"density", 1.0}}},
      {"shifted_bump", "poly_bump(radius) centred at offset*e_1", {{"radius", 0.5}, {"offset", 0.5}}},
      {"odd_bump", "bump(y - offset e_1) - bump(y + offset e_1)", {{"radius", 0.5}, {"offset", 0.5}}},
  };
  return entries;
}

/// Builds a corpus member by name. Unknown names or parameters throw domain_error.
inline SourceFunction make_source(const std::string& name, const ParameterMap& params, int dimension) {
  const CorpusEntry* entry = nullptr;
  for (const auto& e : corpus())
    if (e.name == name) entry = &e;
  if (!entry) throw domain_error("unknown source '" + name + "'");
  ParameterMap p = entry->defaults;
  for (const auto& [k, v] : params) {
    if (!p.contains(k)) throw domain_error("source '" + name + "' has no parameter '" + k + "'");
    p[k] = v;
  }
  if (name == "gaussian") return make_gaussian(p["amplitude"], p["width"]);
  if (name == "poly_bump") return make_poly_bump(p["radius"]);
  if (name == "inverse_power") return make_inverse_power(p["s"]);
  if (name == "uniform_ball") return make_uniform_ball(p["radius"], p["density"]);
  std::vector<double> offset(dimension, 0.0);
  if (dimension < 1) throw domain_error("source '" + name + "' needs a dimension");
  offset[0] = p["offset"];
  if (name == "shifted_bump") return make_shifted(make_poly_bump(p["radius"]), offset);
  return make_odd_symmetrized(make_shifted(make_poly_bump(p["radius"]), offset));
}

}  // namespace newtpot
