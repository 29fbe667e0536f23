#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "newtpot/errors.hpp"
#include "newtpot/gauss_legendre.hpp"
#include "newtpot/kernel.hpp"
#include "newtpot/random.hpp"

namespace newtpot {

/// Weighted directions on S^{n-1}; weights sum to omega_{n-1}.
struct SphereRule {
  int dimension = 0;
  std::vector<double> directions;  // size() * dimension, row-major
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> direction(std::size_t i) const {
    return {directions.data() + i * dimension, static_cast<std::size_t>(dimension)};
  }
};

inline void random_unit_vector(Rng& rng, int n, std::span<double> out) {
  double s = 0.0;
  do {
    s = 0.0;
    for (int k = 0; k < n; ++k) {
      out[k] = rng.normal();
      s += out[k] * out[k];
    }
  } while (s == 0.0);
  const double inv = 1.0 / std::sqrt(s);
  for (int k = 0; k < n; ++k) out[k] *= inv;
}

/// Product Gauss rule on S^2: Gauss-Legendre in theta on [0, pi] carrying the
/// sin(theta) Jacobian, Gauss-Legendre in phi on [0, 2 pi] with twice as many nodes.
inline SphereRule product_gauss_sphere(int theta_nodes) {
  if (theta_nodes < 1) throw precondition_error("product_gauss_sphere: theta node count must be positive");
  const GaussRule theta = gauss_legendre(theta_nodes, 0.0, std::numbers::pi);
  const GaussRule phi = gauss_legendre(2 * theta_nodes, 0.0, 2.0 * std::numbers::pi);
  SphereRule rule;
  rule.dimension = 3;
  rule.directions.reserve(theta.size() * phi.size() * 3);
  rule.weights.reserve(theta.size() * phi.size());
  for (std::size_t a = 0; a < theta.size(); ++a) {
    const double st = std::sin(theta.nodes[a]), ct = std::cos(theta.nodes[a]);
    for (std::size_t b = 0; b < phi.size(); ++b) {
      rule.directions.push_back(st * std::cos(phi.nodes[b]));
      rule.directions.push_back(st * std::sin(phi.nodes[b]));
      rule.directions.push_back(ct);
      rule.weights.push_back(theta.weights[a] * st * phi.weights[b]);
    }
  }
  return rule;
}

/// Seeded Monte Carlo directions (normalized standard normals) in antithetic pairs.
inline SphereRule monte_carlo_sphere(int n, int count, std::uint64_t seed) {
  if (n < 2) throw domain_error("monte_carlo_sphere: dimension must be >= 2");
  if (count < 1) throw precondition_error("monte_carlo_sphere: sample count must be positive");
  SphereRule rule;
  rule.dimension = n;
  rule.directions.resize(static_cast<std::size_t>(count) * n);
  rule.weights.assign(count, surface_area(n) / count);
  Rng rng(seed);
  std::vector<double> v(n);
  for (int i = 0; i < count; i += 2) {
    random_unit_vector(rng, n, v);
    for (int k = 0; k < n; ++k) rule.directions[i * n + k] = v[k];
    if (i + 1 < count)
      for (int k = 0; k < n; ++k) rule.directions[(i + 1) * n + k] = -v[k];
  }
  return rule;
}

}  // namespace newtpot
