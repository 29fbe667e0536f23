#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "newtpot/errors.hpp"

namespace newtpot {

/// Surface area of the unit sphere S^{n-1} in R^n, 2 pi^{n/2} / Gamma(n/2).
inline double surface_area(int n) {
  if (n < 2) throw domain_error("surface_area: dimension must be >= 2, got " + std::to_string(n));
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Volume of the unit ball in R^n.
inline double ball_volume(int n) { return surface_area(n) / n; }

inline double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

/// Value, gradient and (for n >= 3) Hessian of the fundamental solution at x.
/// The Hessian is stored row-major, n*n entries; empty for n = 2.
struct KernelValue {
  double value = 0.0;
  std::vector<double> gradient;
  std::vector<double> hessian;

  bool has_hessian() const { return !hessian.empty(); }
  double hessian_at(std::size_t i, std::size_t j) const { return hessian[i * gradient.size() + j]; }
  double hessian_trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < gradient.size(); ++i) t += hessian_at(i, i);
    return t;
  }
};

struct KernelOptions {
  /// Evaluations with |x| at or below this radius raise singularity_error.
  double singular_cutoff = 1e-300;
};

// Scalar forms in terms of r = |x| > 0, shared with the quadrature inner loops.

/// E_n(r) for n >= 3: -r^{2-n} / ((n-2) omega_{n-1}).
inline double kernel_radial_value(int n, double r, double omega) {
  return -std::pow(r, 2 - n) / ((n - 2) * omega);
}

/// |grad E_n| = r^{1-n} / omega_{n-1}; the gradient is this times x/|x|.
inline double kernel_radial_slope(int n, double r, double omega) { return std::pow(r, 1 - n) / omega; }

/// Fundamental solution of the Laplacian: E_n < 0 for n >= 3, (1/2pi) ln|x| for n = 2.
inline KernelValue eval_kernel(int n, std::span<const double> x, KernelOptions opts = {}) {
  if (n < 2) throw domain_error("eval_kernel: dimension must be >= 2, got " + std::to_string(n));
  if (static_cast<int>(x.size()) != n)
    throw domain_error("eval_kernel: point has " + std::to_string(x.size()) + " coordinates, expected " +
                       std::to_string(n));
  for (double v : x)
    if (!std::isfinite(v)) throw domain_error("eval_kernel: non-finite coordinate");

  const double r = norm(x);
  if (!(r > opts.singular_cutoff)) throw singularity_error("eval_kernel: |x| is at the kernel singularity");

  const double omega = surface_area(n);
  KernelValue k;
  k.value = n == 2 ? std::log(r) / (2.0 * std::numbers::pi) : kernel_radial_value(n, r, omega);

  const double rn = std::pow(r, n);
  k.gradient.resize(n);
  for (int j = 0; j < n; ++j) k.gradient[j] = x[j] / (omega * rn);

  if (n >= 3) {
    const double r2 = r * r;
    const double denom = omega * rn * r2;
    k.hessian.assign(static_cast<std::size_t>(n) * n, 0.0);
    // fill the upper triangle and mirror it so the matrix is exactly symmetric
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        k.hessian[i * n + j] = k.hessian[j * n + i] = ((i == j ? r2 : 0.0) - n * (x[i] * x[j])) / denom;
  }
  return k;
}

}  // namespace newtpot
