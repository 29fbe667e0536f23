#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace newtpot {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// N-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_N.
inline GaussRule gauss_legendre(int count) {
  if (count < 1) throw std::invalid_argument("gauss_legendre: node count must be positive");
  GaussRule rule;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  const int half = (count + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= count; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = count * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= count; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = count * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[count - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[count - 1 - i] = w;
  }
  if (count % 2 == 1) rule.nodes[count / 2] = 0.0;
  return rule;
}

/// Gauss-Legendre rule mapped onto [a, b].
inline GaussRule gauss_legendre(int count, double a, double b) {
  GaussRule rule = gauss_legendre(count);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

/// Composite rule: one `per_panel`-point Gauss panel between consecutive breaks.
inline GaussRule composite_gauss_legendre(const std::vector<double>& breaks, int per_panel) {
  GaussRule out;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    if (!(breaks[k + 1] > breaks[k])) continue;
    GaussRule panel = gauss_legendre(per_panel, breaks[k], breaks[k + 1]);
    out.nodes.insert(out.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    out.weights.insert(out.weights.end(), panel.weights.begin(), panel.weights.end());
  }
  return out;
}

}  // namespace newtpot
