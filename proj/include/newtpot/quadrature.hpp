#pragma once

// Newtonian potential u = E_n * f, its gradient and Hessian at a point.
//
// Zones, for an evaluation point x with |x| < R/2:
//   near   B(x, r)              polar coordinates centred at x; the r^{n-1}
//                               volume element cancels the kernel singularity,
//                               so the integrands are bounded (rho f for u, f
//                               for grad u, grad f for the Hessian).
//   inner  B(x, s) \ B(x, r)    stratified Monte Carlo with a fixed sample set
//                               translated to x (y = x + z).
//   outer  B(0, R) \ B(x, s)    stratified Monte Carlo over shells centred at 0.
//   far    |y| > R              never sampled; bounded by the tail certificate.
// The near boundary is a C^4 partition of unity chi(|x - y|), 1 on B(x, r/2) and
// 0 outside B(x, r).  The remaining weight 1 - chi is shared between the inner
// and outer sample sets, either
//   partition  psi(|x - y|) = 1 on B(x, s/2), 0 outside B(x, s), or
//   balance    the balance heuristic on smooth models of the two sample
//              densities, q_inner ~ 1/|x-y|^{n-1} tapered to 0 at s and
//              q_outer ~ 1/|y|^{n-1}.
// s defaults to R/2, or 2r for the partition when f has a support edge or breakpoints.
// Every sample set is fixed for a given seed and all weights are smooth in x,
// so each zone estimate is a smooth function of x.  With the partition the
// inner set alone covers a wide ball around x, so derivatives in x of the
// estimator fall on f and finite differences stay as accurate as the estimator
// itself; C^1 sources use it by default.  Discontinuous sources default to the
// balance heuristic, which keeps x-centred cells away from the jump.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "newtpot/admissibility.hpp"
#include "newtpot/errors.hpp"
#include "newtpot/gauss_legendre.hpp"
#include "newtpot/kernel.hpp"
#include "newtpot/random.hpp"
#include "newtpot/sources.hpp"
#include "newtpot/sphere_rule.hpp"

namespace newtpot {

enum class AngularRule { product_gauss, monte_carlo };

inline const char* to_string(AngularRule r) { return r == AngularRule::product_gauss ? "product_gauss" : "monte_carlo"; }

enum class ZoneSharing { automatic, partition, balance };

inline const char* to_string(ZoneSharing z) {
  switch (z) {
    case ZoneSharing::partition: return "partition";
    case ZoneSharing::balance: return "balance";
    default: return "automatic";
  }
}

struct QuadratureConfig {
  double split_radius = 0.5;       // r: radius of the near ball around x
  double truncation_radius = 8.0;  // R: nothing beyond B(0, R) is sampled
  int radial_nodes = 64;           // Gauss-Legendre points in rho over the near ball
  AngularRule angular_rule = AngularRule::product_gauss;
  int angular_nodes = 32;          // theta nodes (product rule, phi gets twice as many) or direction samples
  std::size_t midfield_samples = 200000;  // split evenly between the inner and outer zones
  double inner_radius = 0.0;       // s: radius of the translated zone; 0 picks a default
  ZoneSharing zone_sharing = ZoneSharing::automatic;
  std::uint64_t seed = 0;
  double rel_tolerance = 1e-3;
  double kernel_sign = 1.0;        // -1 flips the kernel; mutation-testing hook only

  /// Default budgets for a given source: R = max(8, 4 * support radius).
  static QuadratureConfig defaults_for(const SourceFunction& f, int n) {
    QuadratureConfig c;
    if (f.compactly_supported()) c.truncation_radius = std::max(8.0, 4.0 * f.support_radius);
    if (n != 3) {
      c.angular_rule = AngularRule::monte_carlo;
      c.angular_nodes = 4096;
    }
    return c;
  }

  void validate(int n) const {
    auto fail = [](const std::string& m) { throw precondition_error("quadrature config: " + m); };
    if (n < 3) fail("dimension must be >= 3");
    if (!(split_radius > 0.0) || !std::isfinite(split_radius)) fail("split_radius must be positive");
    if (!(truncation_radius > split_radius) || !std::isfinite(truncation_radius))
      fail("truncation_radius must exceed split_radius");
    if (split_radius > 0.25 * truncation_radius) fail("split_radius must not exceed truncation_radius/4");
    if (radial_nodes < 2) fail("radial_nodes must be >= 2");
    if (angular_nodes < 1) fail("angular_nodes must be >= 1");
    if (angular_rule == AngularRule::product_gauss && n != 3) fail("product_gauss angular rule requires n = 3");
    if (midfield_samples < 4) fail("midfield_samples must be >= 4");
    if (inner_radius != 0.0 && !(inner_radius >= 2.0 * split_radius && inner_radius <= 0.5 * truncation_radius))
      fail("inner_radius must be 0 (automatic) or lie in [2 split_radius, truncation_radius/2]");
    if (!(rel_tolerance > 0.0 && rel_tolerance < 1.0)) fail("rel_tolerance must lie in (0, 1)");
    if (kernel_sign != 1.0 && kernel_sign != -1.0) fail("kernel_sign must be +1 or -1");
  }
};

/// c_1(n, R) = min{R^{n-2}, 1} / 2^{n-1}: |x-y|^{n-2} >= c_1 (1 + |y|^{n-2})
/// whenever |x| < R/2 <= R <= |y|.
inline double c1_constant(int n, double R) { return std::min(std::pow(R, n - 2), 1.0) / std::pow(2.0, n - 1); }

/// Gradient-kernel analogue: |x-y|^{n-1} >= min{R^{n-1}, 1} / 2^n (1 + |y|^{n-1}).
inline double c1_gradient_constant(int n, double R) { return std::min(std::pow(R, n - 1), 1.0) / std::pow(2.0, n); }

/// Certified bounds on the omitted far field |y| > R, valid for |x| < R/2.
struct TailCertificate {
  double truncation_radius = 0.0;
  double c1 = 0.0;
  double weighted_tail = 0.0;           // int_{|y|>R} |f| / (1 + |y|^{n-2})
  double bound = 0.0;                   // on |far-field part of u|
  double c1_gradient = 0.0;
  double weighted_tail_gradient = 0.0;  // int_{|y|>R} |f| / (1 + |y|^{n-1})
  double gradient_bound = 0.0;          // on each far-field component of grad u
  double weighted_tail_gradf = 0.0;     // int_{|y|>R} |grad f| / (1 + |y|^{n-1})
  double hessian_bound = 0.0;           // on each far-field entry of Hess u
};

inline TailCertificate tail_certificate(const SourceFunction& f, int n, const QuadratureConfig& cfg,
                                        ConditionOptions opts = {}) {
  if (n < 3) throw domain_error("tail_certificate: dimension must be >= 3");
  const double R = cfg.truncation_radius;
  const double omega = surface_area(n);
  TailCertificate t;
  t.truncation_radius = R;
  t.c1 = c1_constant(n, R);
  t.c1_gradient = c1_gradient_constant(n, R);
  if (!(f.compactly_supported() && f.support_radius <= R)) {
    opts.seed = cfg.seed;
    ShellIntegrator a(f, n, n - 2.0, n - 1.0, opts);
    ShellIntegrator b(f, n, n - 1.0, n - 1.0, opts);
    auto [tf, tg] = a.doubling_series(R, opts.doublings, false);
    auto [tf1, unused] = b.doubling_series(R, opts.doublings, false);
    (void)unused;
    t.weighted_tail = tf.total;
    t.weighted_tail_gradf = tg.total;
    t.weighted_tail_gradient = tf1.total;
  }
  t.bound = t.weighted_tail / ((n - 2) * omega * t.c1);
  t.gradient_bound = t.weighted_tail_gradient / (omega * t.c1_gradient);
  t.hessian_bound = t.weighted_tail_gradf / (omega * t.c1_gradient);
  return t;
}

namespace component {
inline constexpr unsigned value = 1u;
inline constexpr unsigned gradient = 2u;
inline constexpr unsigned hessian = 4u;
inline constexpr unsigned all = 7u;
}  // namespace component

struct PotentialResult {
  std::vector<double> x;
  unsigned components = 0;
  double u = 0.0;
  std::vector<double> grad;
  std::vector<double> hess;  // row-major n*n, symmetrized
  double tail_bound = 0.0;
  double grad_tail_bound = 0.0;
  double hess_tail_bound = 0.0;
  double statistical_error = 0.0;       // 3 standard errors on u
  double grad_statistical_error = 0.0;  // worst component
  double hess_statistical_error = 0.0;  // worst entry
  double trace_statistical_error = 0.0; // on trace(Hess u)
  double hess_asymmetry = 0.0;          // max |H_ij - H_ji| / 2 before symmetrization
  double f_at_x = 0.0;
  double u_near = 0.0;
  double u_mid = 0.0;    // inner + outer
  double u_inner = 0.0;
  std::size_t nodes_used = 0;

  std::size_t dimension() const { return x.size(); }
  double hess_at(std::size_t i, std::size_t j) const { return hess[i * x.size() + j]; }
  double hess_trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) t += hess_at(i, i);
    return t;
  }
  /// trace(Hess u) - f(x); zero for a classical solution.
  double laplacian_residual() const { return hess_trace() - f_at_x; }
  /// Statistical error plus far-field bound plus relative tolerance on u.
  double u_error_budget(double rel_tolerance) const {
    return statistical_error + tail_bound + rel_tolerance * std::abs(u);
  }
};

namespace detail {

/// C^4 smootherstep: 0 at t <= 0, 1 at t >= 1.
inline double smootherstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double t5 = t * t * t * t * t;
  return t5 * (126.0 + t * (-420.0 + t * (540.0 + t * (-315.0 + 70.0 * t))));
}

/// Near-zone weight: 1 on [0, r/2], 0 beyond r.
inline double near_weight(double rho, double r) { return 1.0 - smootherstep(2.0 * rho / r - 1.0); }

/// Fixed stratified sample set over B(0, radius): radial shells of equal width,
/// times (cos theta, phi) cells for n = 3.  Stored once; reused for every x.
struct MidfieldSamples {
  int dimension = 0;
  double radius = 0.0;
  std::vector<double> points;            // flat, dimension per sample
  std::vector<std::size_t> cell_offsets; // cell c owns samples [off[c], off[c+1])
  std::vector<double> cell_volume;

  std::size_t cells() const { return cell_volume.size(); }
  std::size_t size() const { return dimension ? points.size() / dimension : 0; }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * dimension, static_cast<std::size_t>(dimension)};
  }
};

inline MidfieldSamples build_midfield(int n, double radius, std::size_t samples, std::uint64_t seed) {
  MidfieldSamples m;
  m.dimension = n;
  m.radius = radius;
  if (!(radius > 0.0)) {
    m.cell_offsets = {0};
    return m;
  }
  int shells = n == 3 ? 32 : 256;
  int ntheta = n == 3 ? 8 : 1;
  int nphi = n == 3 ? 16 : 1;
  auto cell_count = [&] { return static_cast<std::size_t>(shells) * ntheta * nphi; };
  while (samples < 2 * cell_count() && shells > 1) shells /= 2;
  while (samples < 2 * cell_count() && ntheta > 1) {
    ntheta /= 2;
    nphi /= 2;
  }
  const std::size_t cells = cell_count();
  const std::size_t base = samples / cells, extra = samples % cells;
  const double omega = surface_area(n);
  const double dcos = 2.0 / ntheta, dphi = 2.0 * std::numbers::pi / nphi;

  m.points.reserve(samples * n);
  m.cell_offsets.reserve(cells + 1);
  m.cell_offsets.push_back(0);
  std::vector<double> dir(n);
  std::size_t c = 0;
  for (int s = 0; s < shells; ++s) {
    const double r_lo = radius * s / shells, r_hi = radius * (s + 1) / shells;
    const double p_lo = std::pow(r_lo, n), p_hi = std::pow(r_hi, n);
    for (int a = 0; a < ntheta; ++a) {
      for (int b = 0; b < nphi; ++b, ++c) {
        const std::size_t count = base + (c < extra ? 1 : 0);
        Rng rng(derive_seed(seed, stream::midfield, c));
        for (std::size_t k = 0; k < count; ++k) {
          const double rr = std::pow(p_lo + rng.uniform() * (p_hi - p_lo), 1.0 / n);
          if (n == 3) {
            const double ct = 1.0 - (a + rng.uniform()) * dcos;
            const double ph = (b + rng.uniform()) * dphi;
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            m.points.push_back(rr * st * std::cos(ph));
            m.points.push_back(rr * st * std::sin(ph));
            m.points.push_back(rr * ct);
          } else {
            random_unit_vector(rng, n, dir);
            for (int d = 0; d < n; ++d) m.points.push_back(rr * dir[d]);
          }
        }
        m.cell_offsets.push_back(m.points.size() / n);
        const double shell_volume = (p_hi - p_lo) / n;
        m.cell_volume.push_back(n == 3 ? shell_volume * dcos * dphi : shell_volume * omega);
      }
    }
  }
  return m;
}

}  // namespace detail

/// Evaluator for one source, dimension and configuration.  Construction runs the
/// admissibility checks and the tail certificate once; evaluation is const and
/// a pure function of x.
class NewtonianPotential {
 public:
  NewtonianPotential(SourceFunction f, int n, QuadratureConfig cfg, ConditionOptions copts = {})
      : f_(std::move(f)), n_(n), cfg_(cfg), omega_(surface_area(n >= 2 ? n : 2)) {
    if (n < 3) throw domain_error("NewtonianPotential: dimension must be >= 3");
    cfg_.validate(n);
    copts.seed = cfg.seed;
    conditions_ = check_conditions(f_, n, copts);
    if (!conditions_.f_condition_finite)
      throw admissibility_error("source '" + f_.name + "' fails int |f|/(1+|y|^{n-2}) < inf");
    tail_ = tail_certificate(f_, n, cfg_, copts);

    // near-zone radial rule on [0, r/2] and [r/2, r], chi folded into the weights
    const double r = cfg_.split_radius;
    const int first = (cfg_.radial_nodes + 1) / 2, second = cfg_.radial_nodes / 2;
    const GaussRule inner = gauss_legendre(first, 0.0, 0.5 * r), outer = gauss_legendre(second, 0.5 * r, r);
    for (const GaussRule* g : {&inner, &outer})
      for (std::size_t k = 0; k < g->size(); ++k) {
        rho_.push_back(g->nodes[k]);
        rho_weight_.push_back(g->weights[k] * detail::near_weight(g->nodes[k], r));
      }
    sphere_ = cfg_.angular_rule == AngularRule::product_gauss
                  ? product_gauss_sphere(cfg_.angular_nodes)
                  : monte_carlo_sphere(n, cfg_.angular_nodes, derive_seed(cfg_.seed, stream::near_sphere, 0));

    const double R = cfg_.truncation_radius;
    balance_ = cfg_.zone_sharing == ZoneSharing::balance ||
               (cfg_.zone_sharing == ZoneSharing::automatic && !f_.is_c1);
    // a support edge or breakpoint is best left to the fixed outer samples, whose kinks do not move with x
    const bool rough = f_.compactly_supported() || !f_.breakpoints.empty();
    const double auto_radius = balance_ || !rough ? 0.5 * R : 2.0 * r;
    inner_radius_ = cfg_.inner_radius > 0.0 ? cfg_.inner_radius : auto_radius;
    const std::size_t inner_count = cfg_.midfield_samples / 2;
    inner_ = detail::build_midfield(n, inner_radius_, inner_count,
                                    derive_seed(cfg_.seed, stream::inner_midfield, 0));
    outer_radius_ = std::min(R, f_.support_radius);
    mid_ = detail::build_midfield(n, outer_radius_, cfg_.midfield_samples - inner_count, cfg_.seed);
    inner_density_ = static_cast<double>(inner_.size()) / inner_radius_;
    outer_density_ = outer_radius_ > 0.0 ? static_cast<double>(mid_.size()) / outer_radius_ : 0.0;
  }

  const SourceFunction& source() const { return f_; }
  int dimension() const { return n_; }
  const QuadratureConfig& config() const { return cfg_; }
  const ConditionReport& conditions() const { return conditions_; }
  const TailCertificate& tail() const { return tail_; }
  double inner_radius() const { return inner_radius_; }
  ZoneSharing zone_sharing() const { return balance_ ? ZoneSharing::balance : ZoneSharing::partition; }

  PotentialResult potential(std::span<const double> x) const { return evaluate(x, component::value); }
  PotentialResult gradient(std::span<const double> x) const { return evaluate(x, component::gradient); }
  PotentialResult hessian(std::span<const double> x) const { return evaluate(x, component::hessian); }

  PotentialResult evaluate(std::span<const double> x, unsigned components) const {
    check_point(x);
    const bool want_u = components & component::value;
    const bool want_g = components & component::gradient;
    const bool want_h = components & component::hessian;
    if (want_h) {
      if (!f_.is_c1) throw admissibility_error("Hessian needs a C^1 source; '" + f_.name + "' is not");
      if (!conditions_.gradf_condition_finite)
        throw admissibility_error("source '" + f_.name + "' fails int |grad f|/(1+|y|^{n-1}) < inf");
    }
    const int n = n_;
    const std::size_t nn = static_cast<std::size_t>(n) * n;

    // slot layout: [u | grad(n) | hess(n*n) | trace]
    const std::size_t slot_g = 1, slot_h = 1 + n, slot_t = 1 + n + nn, slots = 2 + n + nn;

    PotentialResult res;
    res.x.assign(x.begin(), x.end());
    res.components = components;
    res.f_at_x = detail::checked_value(f_, x);

    // ---- near zone
    std::vector<double> near(slots, 0.0);
    std::vector<double> y(n), gf(n);
    const bool mc_sphere = cfg_.angular_rule == AngularRule::monte_carlo;
    std::vector<double> per_direction_u;
    if (mc_sphere) per_direction_u.assign(sphere_.size(), 0.0);
    for (std::size_t a = 0; a < sphere_.size(); ++a) {
      const auto w = sphere_.direction(a);
      const double va = sphere_.weights[a];
      for (std::size_t k = 0; k < rho_.size(); ++k) {
        const double rho = rho_[k];
        const double W = va * rho_weight_[k];
        for (int d = 0; d < n; ++d) y[d] = x[d] + rho * w[d];
        if (want_u || want_g) {
          const double fv = detail::checked_value(f_, y);
          if (want_u) {
            near[0] += W * rho * fv;
            if (mc_sphere) per_direction_u[a] += rho_weight_[k] * rho * fv;
          }
          if (want_g)
            for (int j = 0; j < n; ++j) near[slot_g + j] += W * w[j] * fv;
        }
        if (want_h) {
          detail::checked_gradient(f_, y, gf);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) near[slot_h + i * n + j] += W * w[j] * gf[i];
        }
      }
    }
    const double s = cfg_.kernel_sign;
    near[0] *= -s / ((n - 2) * omega_);
    for (std::size_t k = slot_g; k < slot_t; ++k) near[k] *= -s / omega_;
    for (int i = 0; i < n; ++i) near[slot_t] += near[slot_h + i * n + i];

    double near_u_var = 0.0;
    if (mc_sphere && want_u && sphere_.size() >= 4) {
      // antithetic pairs are the independent units
      const std::size_t pairs = sphere_.size() / 2;
      double mean = 0.0, sq = 0.0;
      for (std::size_t p = 0; p < pairs; ++p) {
        const double v = 0.5 * (per_direction_u[2 * p] + per_direction_u[2 * p + 1]);
        mean += v;
        sq += v * v;
      }
      mean /= pairs;
      const double var = std::max(0.0, sq / pairs - mean * mean) * pairs / (pairs - 1.0);
      const double scale = s / (n - 2);
      near_u_var = scale * scale * var / pairs;
    }

    // ---- inner and outer zones
    std::vector<double> mid(slots, 0.0), var(slots, 0.0);
    std::vector<double> sum(slots), sumsq(slots), g(slots);
    std::vector<double> z(n), yv(n);
    const double r = cfg_.split_radius;
    auto accumulate = [&](const detail::MidfieldSamples& samples, bool translated) {
      for (std::size_t c = 0; c < samples.cells(); ++c) {
        const std::size_t lo = samples.cell_offsets[c], hi = samples.cell_offsets[c + 1];
        const std::size_t m = hi - lo;
        if (m == 0) continue;
        std::fill(sum.begin(), sum.end(), 0.0);
        std::fill(sumsq.begin(), sumsq.end(), 0.0);
        for (std::size_t i = lo; i < hi; ++i) {
          const auto sp = samples.point(i);
          double d2 = 0.0;
          for (int k = 0; k < n; ++k) {
            // z = x - y in both cases
            yv[k] = translated ? x[k] + sp[k] : sp[k];
            z[k] = x[k] - yv[k];
            d2 += z[k] * z[k];
          }
          const double dist = std::sqrt(d2);
          const double outside = 1.0 - detail::near_weight(dist, r);
          if (outside == 0.0) continue;
          const double share = inner_share(dist, yv);
          const double wgt = outside * (translated ? share : 1.0 - share);
          if (wgt == 0.0) continue;
          std::fill(g.begin(), g.end(), 0.0);
          if (want_u || want_g) {
            const double fv = detail::checked_value(f_, yv);
            if (want_u) g[0] = wgt * s * kernel_radial_value(n, dist, omega_) * fv;
            if (want_g) {
              const double c0 = wgt * s * fv / (omega_ * std::pow(dist, n));
              for (int j = 0; j < n; ++j) g[slot_g + j] = c0 * z[j];
            }
          }
          if (want_h) {
            detail::checked_gradient(f_, yv, gf);
            const double c0 = wgt * s / (omega_ * std::pow(dist, n));
            double tr = 0.0;
            for (int i2 = 0; i2 < n; ++i2)
              for (int j = 0; j < n; ++j) {
                const double v = c0 * z[j] * gf[i2];
                g[slot_h + i2 * n + j] = v;
                if (i2 == j) tr += v;
              }
            g[slot_t] = tr;
          }
          for (std::size_t k = 0; k < slots; ++k) {
            sum[k] += g[k];
            sumsq[k] += g[k] * g[k];
          }
        }
        const double vol = samples.cell_volume[c];
        for (std::size_t k = 0; k < slots; ++k) {
          const double mean = sum[k] / m;
          mid[k] += vol * mean;
          if (m > 1) {
            const double sv = std::max(0.0, (sumsq[k] - m * mean * mean) / (m - 1.0));
            var[k] += vol * vol * sv / m;
          }
        }
      }
    };
    accumulate(inner_, true);
    const double inner_u = mid[0];
    accumulate(mid_, false);

    // ---- combine
    res.nodes_used = rho_.size() * sphere_.size() + inner_.size() + mid_.size();
    if (want_u) {
      res.u_near = near[0];
      res.u_mid = mid[0];
      res.u_inner = inner_u;
      res.u = near[0] + mid[0];
      res.statistical_error = 3.0 * std::sqrt(var[0] + near_u_var);
      res.tail_bound = tail_.bound;
    }
    if (want_g) {
      res.grad.resize(n);
      for (int j = 0; j < n; ++j) {
        res.grad[j] = near[slot_g + j] + mid[slot_g + j];
        res.grad_statistical_error = std::max(res.grad_statistical_error, 3.0 * std::sqrt(var[slot_g + j]));
      }
      res.grad_tail_bound = tail_.gradient_bound;
    }
    if (want_h) {
      std::vector<double> h(nn);
      for (std::size_t k = 0; k < nn; ++k) {
        h[k] = near[slot_h + k] + mid[slot_h + k];
        res.hess_statistical_error = std::max(res.hess_statistical_error, 3.0 * std::sqrt(var[slot_h + k]));
      }
      res.hess.resize(nn);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          res.hess[i * n + j] = 0.5 * (h[i * n + j] + h[j * n + i]);
          res.hess_asymmetry = std::max(res.hess_asymmetry, 0.5 * std::abs(h[i * n + j] - h[j * n + i]));
        }
      res.trace_statistical_error = 3.0 * std::sqrt(var[slot_t]);
      res.hess_tail_bound = tail_.hessian_bound;
    }
    return res;
  }

 private:
  void check_point(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_)
      throw precondition_error("evaluation point has " + std::to_string(x.size()) + " coordinates, expected " +
                               std::to_string(n_));
    for (double v : x)
      if (!std::isfinite(v)) throw precondition_error("evaluation point has a non-finite coordinate");
    if (!(norm(x) < 0.5 * cfg_.truncation_radius)) {
      std::ostringstream os;
      os << "evaluation point " << detail::format_point(x) << " must satisfy |x| < truncation_radius/2 = "
         << 0.5 * cfg_.truncation_radius;
      throw precondition_error(os.str());
    }
  }

  SourceFunction f_;
  int n_;
  QuadratureConfig cfg_;
  double omega_;
  ConditionReport conditions_;
  TailCertificate tail_;
  std::vector<double> rho_, rho_weight_;
  SphereRule sphere_;
  /// Share of the weight outside the near ball given to the inner set at y, |x - y| = dist.
  double inner_share(double dist, std::span<const double> y) const {
    if (!balance_) return detail::near_weight(dist, inner_radius_);
    const double a = inner_density_ * detail::near_weight(dist, inner_radius_) / std::pow(dist, n_ - 1);
    if (a == 0.0) return 0.0;
    const double ry = norm(y);
    if (!(ry < outer_radius_)) return 1.0;
    if (ry == 0.0) return 0.0;
    const double b = outer_density_ / std::pow(ry, n_ - 1);
    return a / (a + b);
  }

  bool balance_ = false;
  double inner_radius_ = 0.0, outer_radius_ = 0.0;
  double inner_density_ = 0.0, outer_density_ = 0.0;  // sample count per unit radius of each shell set
  detail::MidfieldSamples inner_, mid_;
};

inline PotentialResult eval_potential(const SourceFunction& f, int n, std::span<const double> x,
                                      const QuadratureConfig& cfg) {
  return NewtonianPotential(f, n, cfg).potential(x);
}

inline PotentialResult eval_gradient(const SourceFunction& f, int n, std::span<const double> x,
                                     const QuadratureConfig& cfg) {
  return NewtonianPotential(f, n, cfg).gradient(x);
}

inline PotentialResult eval_hessian(const SourceFunction& f, int n, std::span<const double> x,
                                    const QuadratureConfig& cfg) {
  return NewtonianPotential(f, n, cfg).hessian(x);
}

}  // namespace newtpot
