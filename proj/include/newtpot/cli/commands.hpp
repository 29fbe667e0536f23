#pragma once

// Subcommands of the command-line driver.  Each takes a resolved RunConfig,
// evaluates in parallel, and writes its files single-threaded in point order.
// Files are written atomically (temp file + rename).  Per-point wall times go to
// timing.json only, so every other output is byte-identical across reruns and
// thread counts at a fixed seed.
//
// Exit codes: 0 success, 2 configuration error, 3 admissibility failure,
// 4 verification failure, 1 I/O or unexpected failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "newtpot/admissibility.hpp"
#include "newtpot/cli/run_config.hpp"
#include "newtpot/lorentz.hpp"
#include "newtpot/parallel.hpp"
#include "newtpot/quadrature.hpp"
#include "newtpot/radial_reference.hpp"
#include "newtpot/verify.hpp"

namespace newtpot::cli {

using detail::number;

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int config = 2;
inline constexpr int admissibility = 3;
inline constexpr int verification = 4;
}  // namespace exit_code

struct RunOptions {
  int threads = 1;
  bool harness_only = false;        // verify: run only the inequality harness
  bool mutate_kernel_sign = false;  // test hook: flips the kernel sign
  std::ostream* log = &std::cerr;
};

struct CommandResult {
  int exit_code = exit_code::ok;
  std::vector<std::string> files;
};

// ---------------------------------------------------------------------------
// Output helpers

/// %.17g; non-finite values as inf, -inf, nan.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes content to path via a sibling temp file and rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, path);
}

class OutputSet {
 public:
  OutputSet(std::string dir, CommandResult& result) : dir_(std::move(dir)), result_(result) {}
  void write(const std::string& name, const std::string& content) {
    const auto p = std::filesystem::path(dir_) / name;
    write_atomic(p, content);
    result_.files.push_back(p.string());
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

 private:
  std::string dir_;
  CommandResult& result_;
};

inline bool wants_csv(OutputFormat f) { return f != OutputFormat::json; }
inline bool wants_json(OutputFormat f) { return f != OutputFormat::csv; }

namespace detail {

inline json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline json trace_json(const std::vector<std::pair<double, double>>& t) {
  json a = json::array();
  for (const auto& [r, v] : t) a.push_back({number(r), number(v)});
  return a;
}

inline std::string csv_join(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s + "\n";
}

/// n points uniform in B(0, radius).
inline std::vector<std::vector<double>> random_ball_points(int n, int count, double radius, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> pts;
  for (int k = 0; k < count; ++k) {
    std::vector<double> p(n);
    double s = 0.0;
    for (double& v : p) {
      v = rng.normal();
      s += v * v;
    }
    const double scale = radius * std::pow(rng.uniform(), 1.0 / n) / std::sqrt(s);
    for (double& v : p) v *= scale;
    pts.push_back(std::move(p));
  }
  return pts;
}

inline QuadratureConfig run_quadrature(const RunConfig& rc, const RunOptions& opt) {
  QuadratureConfig q = rc.quadrature;
  q.seed = rc.seed;
  if (opt.mutate_kernel_sign) q.kernel_sign = -1.0;
  return q;
}

}  // namespace detail

inline json to_json(const ConditionReport& c) {
  return {{"weighted_f_integral", detail::number(c.weighted_f_integral)},
          {"weighted_gradf_integral", detail::number(c.weighted_gradf_integral)},
          {"f_condition_finite", c.f_condition_finite},
          {"gradf_condition_finite", c.gradf_condition_finite},
          {"f_decay_ratio", detail::number(c.f_decay_ratio)},
          {"gradf_decay_ratio", detail::number(c.gradf_decay_ratio)},
          {"truncation_trace", detail::trace_json(c.truncation_trace)},
          {"gradf_truncation_trace", detail::trace_json(c.gradf_truncation_trace)}};
}

inline json to_json(const TailCertificate& t) {
  return {{"truncation_radius", t.truncation_radius},
          {"c1", t.c1},
          {"weighted_tail", detail::number(t.weighted_tail)},
          {"bound", detail::number(t.bound)},
          {"c1_gradient", t.c1_gradient},
          {"weighted_tail_gradient", detail::number(t.weighted_tail_gradient)},
          {"gradient_bound", detail::number(t.gradient_bound)},
          {"weighted_tail_gradf", detail::number(t.weighted_tail_gradf)},
          {"hessian_bound", detail::number(t.hessian_bound)}};
}

inline json source_json(const SourceFunction& f) {
  return {{"name", f.name},
          {"is_c1", f.is_c1},
          {"is_smooth", f.is_smooth},
          {"is_radial", f.is_radial},
          {"compactly_supported", f.compactly_supported()},
          {"support_radius", detail::number(f.support_radius)}};
}

inline json to_json(const LorentzReport& r) {
  json d = json::array();
  for (const auto& [l, m] : r.distribution_samples) d.push_back({number(l), number(m)});
  return {{"p", r.params.p},
          {"q", r.params.weak() ? json("inf") : json(r.params.q)},
          {"quasi_norm", detail::number(r.quasi_norm)},
          {"standard_error", detail::number(r.standard_error)},
          {"finite", r.finite},
          {"method", to_string(r.method)},
          {"distribution_samples", d}};
}

/// ConditionReport on stderr and in summary.json: exit code 3.
inline CommandResult admissibility_failure(const std::string& command, const RunConfig& rc, const SourceFunction& f,
                                           const ConditionReport& cond, const std::string& reason,
                                           const RunOptions& opt) {
  CommandResult res;
  res.exit_code = exit_code::admissibility;
  json j = {{"schema_version", schema_version},
            {"command", command},
            {"status", "admissibility_failure"},
            {"reason", reason},
            {"config", to_json(rc)},
            {"source", source_json(f)},
            {"conditions", to_json(cond)}};
  *opt.log << "admissibility failure: " << reason << "\n" << to_json(cond).dump(2) << "\n";
  OutputSet(rc.output_directory, res).write_json("summary.json", j);
  return res;
}

// ---------------------------------------------------------------------------
// solve

/// CSV columns of the solve table for dimension n.
inline std::vector<std::string> solve_columns(int n) {
  std::vector<std::string> c{"index"};
  for (int i = 0; i < n; ++i) c.push_back("x" + std::to_string(i));
  c.push_back("u");
  for (int i = 0; i < n; ++i) c.push_back("grad" + std::to_string(i));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c.push_back("hess" + std::to_string(i) + std::to_string(j));
  for (const char* s : {"tail_bound", "statistical_error", "grad_tail_bound", "grad_statistical_error",
                        "hess_tail_bound", "hess_statistical_error", "f", "laplacian_residual",
                        "trace_statistical_error", "nodes_used"})
    c.push_back(s);
  return c;
}

inline std::vector<std::string> solve_row(std::size_t index, const PotentialResult& r) {
  const int n = static_cast<int>(r.dimension());
  const bool g = r.components & component::gradient, h = r.components & component::hessian,
             u = r.components & component::value;
  auto cell = [](bool on, double v) { return on ? format_double(v) : std::string(); };
  std::vector<std::string> row{std::to_string(index)};
  for (double v : r.x) row.push_back(format_double(v));
  row.push_back(cell(u, r.u));
  for (int i = 0; i < n; ++i) row.push_back(cell(g, r.grad.empty() ? 0.0 : r.grad[i]));
  for (int i = 0; i < n * n; ++i) row.push_back(cell(h, r.hess.empty() ? 0.0 : r.hess[i]));
  row.push_back(cell(u, r.tail_bound));
  row.push_back(cell(u, r.statistical_error));
  row.push_back(cell(g, r.grad_tail_bound));
  row.push_back(cell(g, r.grad_statistical_error));
  row.push_back(cell(h, r.hess_tail_bound));
  row.push_back(cell(h, r.hess_statistical_error));
  row.push_back(format_double(r.f_at_x));
  row.push_back(cell(h, h ? r.laplacian_residual() : 0.0));
  row.push_back(cell(h, r.trace_statistical_error));
  row.push_back(std::to_string(r.nodes_used));
  return row;
}

inline json record_json(std::size_t index, const PotentialResult& r) {
  json j = {{"index", index}, {"x", detail::vec(r.x)}, {"f", detail::number(r.f_at_x)}, {"nodes_used", r.nodes_used}};
  if (r.components & component::value) {
    j["u"] = detail::number(r.u);
    j["tail_bound"] = detail::number(r.tail_bound);
    j["statistical_error"] = detail::number(r.statistical_error);
  }
  if (r.components & component::gradient) {
    j["grad"] = detail::vec(r.grad);
    j["grad_tail_bound"] = detail::number(r.grad_tail_bound);
    j["grad_statistical_error"] = detail::number(r.grad_statistical_error);
  }
  if (r.components & component::hessian) {
    j["hess"] = detail::vec(r.hess);
    j["hess_tail_bound"] = detail::number(r.hess_tail_bound);
    j["hess_statistical_error"] = detail::number(r.hess_statistical_error);
    j["laplacian_residual"] = detail::number(r.laplacian_residual());
    j["trace_statistical_error"] = detail::number(r.trace_statistical_error);
  }
  return j;
}

inline CommandResult cmd_solve(const RunConfig& rc, const RunOptions& opt = {}) {
  const auto points = rc.evaluation_points();
  if (points.empty()) throw config_error("/evaluation_points", "no evaluation points");
  const int n = rc.dimension;
  const SourceFunction f = rc.source();
  const QuadratureConfig cfg = detail::run_quadrature(rc, opt);
  ConditionOptions copts;
  copts.seed = cfg.seed;
  const ConditionReport cond = check_conditions(f, n, copts);
  const unsigned mask = rc.solve.mask();
  if (!cond.f_condition_finite)
    return admissibility_failure("solve", rc, f, cond, "int |f|/(1+|y|^{n-2}) diverges for " + f.name, opt);
  if ((mask & component::hessian) && !f.is_c1)
    return admissibility_failure("solve", rc, f, cond, "Hessian requested but " + f.name + " is not C^1", opt);
  if ((mask & component::hessian) && !cond.gradf_condition_finite)
    return admissibility_failure("solve", rc, f, cond, "int |grad f|/(1+|y|^{n-1}) diverges for " + f.name, opt);

  const NewtonianPotential P(f, n, cfg, copts);
  std::vector<double> wall(points.size());
  const auto results = parallel_map<PotentialResult>(points.size(), opt.threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = P.evaluate(points[i], mask);
    wall[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  });

  CommandResult res;
  OutputSet out(rc.output_directory, res);
  double max_se = 0.0, max_tail = 0.0, max_budget = 0.0, max_resid = 0.0, max_trace_se = 0.0;
  for (const auto& r : results) {
    max_se = std::max(max_se, r.statistical_error);
    max_tail = std::max(max_tail, r.tail_bound);
    max_budget = std::max(max_budget, r.u_error_budget(cfg.rel_tolerance));
    if (mask & component::hessian) {
      max_resid = std::max(max_resid, std::abs(r.laplacian_residual()));
      max_trace_se = std::max(max_trace_se, r.trace_statistical_error);
    }
  }
  const auto cols = solve_columns(n);
  if (wants_csv(rc.format)) {
    std::string csv = detail::csv_join(cols);
    for (std::size_t i = 0; i < results.size(); ++i) csv += detail::csv_join(solve_row(i, results[i]));
    out.write("results.csv", csv);
  }
  if (wants_json(rc.format)) {
    json recs = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) recs.push_back(record_json(i, results[i]));
    out.write_json("results.json", {{"schema_version", schema_version}, {"records", recs}});
  }
  json agg = {{"points", results.size()},
              {"max_statistical_error", number(max_se)},
              {"max_tail_bound", number(max_tail)},
              {"max_u_error_budget", number(max_budget)}};
  if (mask & component::hessian) {
    agg["max_abs_laplacian_residual"] = number(max_resid);
    agg["max_trace_statistical_error"] = number(max_trace_se);
  }
  out.write_json("summary.json", {{"schema_version", schema_version},
                                  {"command", "solve"},
                                  {"status", "ok"},
                                  {"config", to_json(rc)},
                                  {"source", source_json(f)},
                                  {"columns", cols},
                                  {"conditions", to_json(cond)},
                                  {"tail", to_json(P.tail())},
                                  {"zones", {{"inner_radius", P.inner_radius()}, {"zone_sharing", to_string(P.zone_sharing())}}},
                                  {"aggregate", agg}});
  json tj = json::array();
  for (std::size_t i = 0; i < wall.size(); ++i) tj.push_back({{"index", i}, {"wall_time", wall[i]}});
  out.write_json("timing.json", {{"schema_version", schema_version}, {"threads", opt.threads}, {"records", tj}});
  return res;
}

// ---------------------------------------------------------------------------
// verify

inline json to_json(const ResidualEntry& e, const ResidualOptions& o) {
  return {{"point", detail::vec(e.point)},
          {"f", number(e.f_value)},
          {"laplacians", detail::vec(e.laplacians)},
          {"residuals", detail::vec(e.residuals)},
          {"increments", detail::vec(e.increments)},
          {"increment_floor", detail::vec(e.increment_floor)},
          {"richardson", number(e.richardson)},
          {"fd_residual", number(e.fd_residual)},
          {"fd_statistical_error", number(e.fd_statistical_error)},
          {"self_convergence_slope", number(e.self_convergence_slope)},
          {"slope_points", e.slope_points},
          {"noise_limited", e.noise_limited()},
          {"residual_slope", number(e.residual_slope)},
          {"has_hessian", e.has_hessian},
          {"hessian_trace", number(e.hessian_trace)},
          {"hessian_residual", number(e.hessian_residual)},
          {"trace_statistical_error", number(e.trace_statistical_error)},
          {"tolerance", number(e.tolerance(o.rel_tolerance))},
          {"hessian_ok", e.hessian_ok(o.rel_tolerance)},
          {"fd_ok", e.fd_ok(o.rel_tolerance)},
          {"slope_ok", e.slope_ok(o.min_slope)},
          {"consistent", e.consistent(o.rel_tolerance)},
          {"passed", e.passed(o)}};
}

inline json to_json(const MeanValueReport& m) {
  return {{"center", detail::vec(m.center)},
          {"radius", m.radius},
          {"sphere_average", number(m.sphere_average)},
          {"ball_average", number(m.ball_average)},
          {"center_value", number(m.center_value)},
          {"discrepancies", {number(m.discrepancies.first), number(m.discrepancies.second)}},
          {"tolerance", number(m.tolerance)},
          {"passed", m.passed()}};
}

inline json to_json(const HarnessReport& h) {
  json t = json::array();
  for (const auto& x : h.tallies)
    t.push_back({{"name", x.name},
                 {"checked", x.checked},
                 {"violations", x.violations},
                 {"min_margin", number(x.min_margin)},
                 {"witness", x.witness}});
  return {{"dimension", h.dimension},
          {"trials", h.trials},
          {"seed", h.seed},
          {"boundary_probes", h.boundary_probes},
          {"violations", h.violations()},
          {"passed", h.passed()},
          {"tallies", t}};
}

/// Interior trend passes when both slopes reach this.
inline constexpr double mean_value_min_slope = 1.8;

inline CommandResult cmd_verify(const RunConfig& rc, const RunOptions& opt = {}) {
  const int n = rc.dimension;
  const SourceFunction f = rc.source();
  const QuadratureConfig cfg = detail::run_quadrature(rc, opt);
  const std::vector<std::string> suites = opt.harness_only ? std::vector<std::string>{"harness"} : rc.verify.suites;
  auto has = [&](const char* s) { return std::find(suites.begin(), suites.end(), s) != suites.end(); };

  CommandResult res;
  OutputSet out(rc.output_directory, res);
  json report = {{"schema_version", schema_version},
                 {"command", "verify"},
                 {"config", to_json(rc)},
                 {"source", source_json(f)},
                 {"suites", suites}};
  bool ok = true;

  if (has("residual") || has("mean_value")) {
    ConditionOptions copts;
    copts.seed = cfg.seed;
    const auto cond = check_conditions(f, n, copts);
    if (!cond.f_condition_finite)
      return admissibility_failure("verify", rc, f, cond, "int |f|/(1+|y|^{n-2}) diverges for " + f.name, opt);
    if (has("residual") && rc.verify.residual.with_hessian && (!f.is_c1 || !cond.gradf_condition_finite))
      return admissibility_failure("verify", rc, f, cond, "residual suite needs a C^1 source with int |grad f|/(1+|y|^{n-1}) < inf", opt);
  }

  if (has("residual")) {
    const auto& rs = rc.verify.residual;
    auto pts = rs.points.empty()
                   ? detail::random_ball_points(n, rs.random_points, rs.random_radius,
                                                derive_seed(rc.seed, stream::verify_points, 0))
                   : rs.points;
    const double reach = *std::max_element(rs.h_values.begin(), rs.h_values.end());
    for (const auto& p : pts)
      if (!(norm(p) + reach < 0.5 * cfg.truncation_radius))
        throw config_error("/verify/residual", "stencil leaves |x| < truncation_radius/2");
    ResidualOptions ro;
    ro.h_values = rs.h_values;
    ro.replicates = rs.replicates;
    ro.rel_tolerance = rs.rel_tolerance;
    ro.min_slope = rs.min_slope;
    ro.with_hessian = rs.with_hessian;
    ro.threads = opt.threads;
    const ResidualVerifier verifier(f, n, cfg, ro);
    const auto rep = verifier.check_all(pts);
    json entries = json::array();
    for (const auto& e : rep.entries) entries.push_back(to_json(e, ro));
    report["residual"] = {{"points", rep.points.size()},
                          {"h_values", rep.h_values},
                          {"residuals", detail::vec(rep.residuals)},
                          {"fd_residuals", detail::vec(rep.fd_residuals)},
                          {"convergence_slopes", detail::vec(rep.convergence_slopes)},
                          {"failures", rep.failures()},
                          {"noise_limited", rep.noise_limited()},
                          {"passed", rep.passed()},
                          {"entries", entries}};
    ok = ok && rep.passed();
    if (wants_csv(rc.format)) {
      std::vector<std::string> cols{"index"};
      for (int i = 0; i < n; ++i) cols.push_back("x" + std::to_string(i));
      for (const char* c : {"f", "hessian_trace", "hessian_residual", "trace_statistical_error", "richardson",
                            "fd_residual", "fd_statistical_error", "self_convergence_slope", "slope_points",
                            "noise_limited", "passed"})
        cols.push_back(c);
      std::string csv = detail::csv_join(cols);
      for (std::size_t i = 0; i < rep.entries.size(); ++i) {
        const auto& e = rep.entries[i];
        std::vector<std::string> row{std::to_string(i)};
        for (double v : e.point) row.push_back(format_double(v));
        for (double v : {e.f_value, e.hessian_trace, e.hessian_residual, e.trace_statistical_error, e.richardson,
                         e.fd_residual, e.fd_statistical_error, e.self_convergence_slope})
          row.push_back(format_double(v));
        row.push_back(std::to_string(e.slope_points));
        row.push_back(e.noise_limited() ? "1" : "0");
        row.push_back(e.passed(ro) ? "1" : "0");
        csv += detail::csv_join(row);
      }
      out.write("residuals.csv", csv);
    }
    for (const auto& e : rep.entries)
      if (!e.passed(ro)) *opt.log << "residual check failed at " << newtpot::detail::format_point(e.point) << "\n";
  }

  if (has("mean_value")) {
    const auto& ms = rc.verify.mean_value;
    if (!f.compactly_supported())
      throw config_error("/verify/suites", "mean_value suite needs a compactly supported source; " + f.name + " is not");
    const NewtonianPotential P(f, n, cfg);
    MeanValueOptions mo;
    mo.theta_nodes = ms.theta_nodes;
    mo.mc_directions = ms.mc_directions;
    mo.radial_nodes = ms.radial_nodes;
    mo.tolerance_factor = ms.tolerance_factor;
    mo.threads = opt.threads;
    json checks = json::array();
    bool mv_ok = true;
    std::vector<double> sphere_d, ball_d;
    for (double r : ms.radii) {
      MeanValueReport m;
      try {
        m = mean_value_check(P, ms.center, r, mo);
      } catch (const precondition_error& e) {
        throw config_error("/verify/mean_value", e.what());
      }
      checks.push_back(to_json(m));
      mv_ok = mv_ok && m.passed();
      sphere_d.push_back(m.discrepancies.first);
      ball_d.push_back(m.discrepancies.second);
    }
    json mv = {{"exterior", checks},
               {"exterior_sphere_slope", number(log_log_slope(ms.radii, sphere_d))},
               {"exterior_ball_slope", number(log_log_slope(ms.radii, ball_d))}};
    if (!ms.scaling_center.empty()) {
      const auto s = mean_value_scaling(P, ms.scaling_center, ms.radii, mo);
      const bool trend = s.sphere_slope >= mean_value_min_slope && s.ball_slope >= mean_value_min_slope;
      mv["interior"] = {{"center", detail::vec(s.center)},
                        {"radii", s.radii},
                        {"f_center", number(s.f_center)},
                        {"sphere_defects", detail::vec(s.sphere_defects)},
                        {"ball_defects", detail::vec(s.ball_defects)},
                        {"sphere_predictions", detail::vec(s.sphere_predictions)},
                        {"ball_predictions", detail::vec(s.ball_predictions)},
                        {"sphere_slope", number(s.sphere_slope)},
                        {"ball_slope", number(s.ball_slope)},
                        {"min_slope", mean_value_min_slope},
                        {"passed", trend}};
      mv_ok = mv_ok && trend;
    }
    mv["passed"] = mv_ok;
    report["mean_value"] = mv;
    ok = ok && mv_ok;
    if (!mv_ok) *opt.log << "mean-value check failed\n";
  }

  if (has("harness")) {
    json hs = json::array();
    std::size_t violations = 0;
    const auto& dims = rc.verify.harness.dimensions;
    const auto reps = parallel_map<HarnessReport>(dims.size(), opt.threads, [&](std::size_t i) {
      return inequality_harness(dims[i], rc.verify.harness.trials, rc.seed);
    });
    for (const auto& h : reps) {
      hs.push_back(to_json(h));
      violations += h.violations();
      for (const auto& t : h.tallies)
        if (t.violations) *opt.log << "inequality violated (n=" << h.dimension << ", " << t.name << "): " << t.witness << "\n";
    }
    report["harness"] = {{"violations", violations}, {"passed", violations == 0}, {"dimensions", hs}};
    ok = ok && violations == 0;
  }

  report["passed"] = ok;
  report["status"] = ok ? "ok" : "verification_failure";
  out.write_json("verify.json", report);
  res.exit_code = ok ? exit_code::ok : exit_code::verification;
  return res;
}

// ---------------------------------------------------------------------------
// norms

inline CommandResult cmd_norms(const RunConfig& rc, const RunOptions& opt = {}) {
  const int n = rc.dimension;
  const SourceFunction f = rc.source();
  const QuadratureConfig cfg = detail::run_quadrature(rc, opt);
  const auto& ns = rc.norms;
  ConditionOptions copts;
  copts.seed = cfg.seed;
  const auto cond = check_conditions(f, n, copts);
  if (!cond.f_condition_finite)
    return admissibility_failure("norms", rc, f, cond, "int |f|/(1+|y|^{n-2}) diverges for " + f.name, opt);
  if (ns.sup_grid_points > 0 && !(ns.sup_grid_radius < 0.5 * cfg.truncation_radius))
    throw config_error("/norms/sup_grid_radius", "must be < truncation_radius/2");

  const LorentzMethod method = ns.method == "analytic_radial" ? LorentzMethod::analytic_radial
                               : ns.method == "monte_carlo"   ? LorentzMethod::monte_carlo
                                                              : LorentzMethod::automatic;
  CommandResult res;
  OutputSet out(rc.output_directory, res);
  bool ok = true;

  // kernel level sets
  const auto level = parallel_map<LevelSetEstimate>(ns.level_set_lambdas.size(), opt.threads, [&](std::size_t i) {
    return estimate_kernel_level_set(n, ns.level_set_lambdas[i], ns.level_set_samples,
                                     derive_seed(rc.seed, stream::level_set, i));
  });
  const double cn = weak_norm_constant(n);
  json levels = json::array();
  for (const auto& e : level) {
    const double scale = std::pow(e.lambda, n / (n - 2.0));
    levels.push_back({{"lambda", e.lambda},
                      {"measure", number(e.measure)},
                      {"standard_error", number(e.standard_error)},
                      {"exact_measure", number(kernel_level_set_measure(n, e.lambda))},
                      {"scaled_measure", number(scale * e.measure)},
                      {"relative_deviation", number(scale * e.measure / cn - 1.0)},
                      {"samples", e.samples}});
  }

  try {
    json norms = json::array();
    for (const auto& [p, q] : ns.params) norms.push_back(to_json(lorentz_quasi_norm(f, n, LorentzParams{p, q}, cfg, method)));

    const NormalizedSolution sol(f, n, cfg);
    const std::vector<double> origin(n, 0.0);
    const double u0 = sol(origin);
    const auto& cr = sol.c_result();
    json normalized = {{"c", number(sol.c())},
                       {"c_statistical_error", number(cr.statistical_error)},
                       {"c_tail_bound", number(cr.tail_bound)},
                       {"c_error_budget", number(cr.u_error_budget(cfg.rel_tolerance))},
                       {"holder_constant", lorentz_holder_constant},
                       {"kernel_weak_norm", number(sol.kernel_norm())},
                       {"source_norm", to_json(sol.source_norm())},
                       {"holder_bound", number(sol.holder_bound())},
                       {"bound", number(sol.bound())},
                       {"holder_bound_holds", sol.holder_bound_holds()},
                       {"u_at_origin", number(u0)},
                       {"u_at_origin_is_zero", u0 == 0.0}};
    ok = ok && sol.holder_bound_holds() && u0 == 0.0;

    if (ns.sup_grid_points > 0) {
      auto pts = detail::random_ball_points(n, ns.sup_grid_points, ns.sup_grid_radius,
                                            derive_seed(rc.seed, stream::sup_grid, 0));
      const auto vals = parallel_map<PotentialResult>(pts.size(), opt.threads, [&](std::size_t i) { return sol.evaluate(pts[i]); });
      double sup = 0.0;
      for (const auto& v : vals) sup = std::max(sup, std::abs(v.u - sol.c()));
      const bool sup_ok = sup <= sol.bound();
      normalized["sup_grid"] = {{"points", pts.size()},
                                {"radius", ns.sup_grid_radius},
                                {"sup_abs_u", number(sup)},
                                {"within_bound", sup_ok}};
      ok = ok && sup_ok;

      if (ns.compare_midfield_samples > 0) {
        QuadratureConfig alt = cfg;
        alt.midfield_samples = ns.compare_midfield_samples;
        alt.seed = derive_seed(cfg.seed, stream::compare, 0);
        const NormalizedSolution other(f, n, alt);
        const auto ovals =
            parallel_map<PotentialResult>(pts.size(), opt.threads, [&](std::size_t i) { return other.evaluate(pts[i]); });
        const double cb = cr.u_error_budget(cfg.rel_tolerance) + other.c_result().u_error_budget(alt.rel_tolerance);
        double worst = 0.0;  // largest |difference| / combined budget
        double max_diff = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const double d = std::abs((vals[i].u - sol.c()) - (ovals[i].u - other.c()));
          const double budget = vals[i].u_error_budget(cfg.rel_tolerance) + ovals[i].u_error_budget(alt.rel_tolerance) + cb;
          worst = std::max(worst, d / budget);
          max_diff = std::max(max_diff, d);
        }
        normalized["uniqueness"] = {{"midfield_samples", alt.midfield_samples},
                                    {"seed", alt.seed},
                                    {"max_difference", number(max_diff)},
                                    {"worst_budget_ratio", number(worst)},
                                    {"agree", worst <= 1.0}};
        ok = ok && worst <= 1.0;
      }
    }

    json j = {{"schema_version", schema_version},
              {"command", "norms"},
              {"config", to_json(rc)},
              {"source", source_json(f)},
              {"dimension", n},
              {"weak_norm_constant", cn},
              {"kernel_weak_norm", kernel_weak_norm(n)},
              {"level_sets", levels},
              {"source_norms", norms},
              {"normalized_solution", normalized},
              {"passed", ok},
              {"status", ok ? "ok" : "verification_failure"}};
    out.write_json("norms.json", j);
    if (wants_csv(rc.format)) {
      std::string csv = detail::csv_join({"p", "q", "lambda", "measure"});
      for (const auto& r : norms)
        for (const auto& s : r["distribution_samples"])
          csv += detail::csv_join({format_double(r["p"].get<double>()),
                                   r["q"].is_string() ? std::string("inf") : format_double(r["q"].get<double>()),
                                   format_double(s[0].get<double>()), format_double(s[1].get<double>())});
      out.write("distribution.csv", csv);
    }
  } catch (const domain_error& e) {
    throw config_error("/norms", e.what());
  }
  if (!ok) *opt.log << "norms: a bound or normalization check failed\n";
  res.exit_code = ok ? exit_code::ok : exit_code::verification;
  return res;
}

// ---------------------------------------------------------------------------
// convergence

inline CommandResult cmd_convergence(const RunConfig& rc, const RunOptions& opt = {}) {
  const int n = rc.dimension;
  const SourceFunction f = rc.source();
  const QuadratureConfig base = detail::run_quadrature(rc, opt);
  const auto& cs = rc.convergence;
  const std::vector<double>& x = cs.point;

  ConditionOptions copts;
  copts.seed = base.seed;
  const auto cond = check_conditions(f, n, copts);
  if (!cond.f_condition_finite)
    return admissibility_failure("convergence", rc, f, cond, "int |f|/(1+|y|^{n-2}) diverges for " + f.name, opt);

  struct Run {
    std::string sweep;
    QuadratureConfig cfg;
  };
  std::vector<Run> runs;
  for (int k : cs.radial_nodes) {
    Run r{"radial_nodes", base};
    r.cfg.radial_nodes = k;
    runs.push_back(r);
  }
  for (auto m : cs.midfield_samples) {
    Run r{"midfield_samples", base};
    r.cfg.midfield_samples = m;
    runs.push_back(r);
  }
  for (const auto& r : runs) {
    try {
      r.cfg.validate(n);
    } catch (const precondition_error& e) {
      throw config_error("/convergence", e.what());
    }
  }
  const auto results = parallel_map<PotentialResult>(runs.size(), opt.threads, [&](std::size_t i) {
    return NewtonianPotential(f, n, runs[i].cfg, copts).potential(x);
  });

  const bool radial = f.is_radial;
  const std::string kind = radial ? "radial_oracle" : "self-referential (Richardson)";
  const std::size_t nr = cs.radial_nodes.size();
  double near_ref = 0.0, u_ref = 0.0;
  if (radial) {
    near_ref = near_zone_reference(f, n, norm(x), base.split_radius);
    u_ref = radial_green_potential(f, n, norm(x));
  } else {
    // Richardson on the two finest radial rules (nominal second order), finest sample run for u
    if (nr >= 2) near_ref = results[nr - 1].u_near + (results[nr - 1].u_near - results[nr - 2].u_near) / 3.0;
    else if (nr == 1) near_ref = results[0].u_near;
    u_ref = results.size() > nr ? results.back().u : results[nr - 1].u;
  }

  CommandResult res;
  OutputSet out(rc.output_directory, res);
  std::vector<std::string> cols{"sweep", "radial_nodes", "angular_nodes", "midfield_samples", "nodes_used", "u",
                                "u_near", "near_zone_reference", "near_zone_error", "u_reference", "total_error",
                                "statistical_error", "tail_bound", "reference_kind"};
  std::string csv = detail::csv_join(cols);
  json rows = json::array();
  std::vector<double> nodes, near_err, stat_err;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = results[i];
    const auto& c = runs[i].cfg;
    const double ne = std::abs(r.u_near - near_ref), te = std::abs(r.u - u_ref);
    csv += detail::csv_join({runs[i].sweep, std::to_string(c.radial_nodes), std::to_string(c.angular_nodes),
                             std::to_string(c.midfield_samples), std::to_string(r.nodes_used), format_double(r.u),
                             format_double(r.u_near), format_double(near_ref), format_double(ne), format_double(u_ref),
                             format_double(te), format_double(r.statistical_error), format_double(r.tail_bound),
                             "\"" + kind + "\""});
    rows.push_back({{"sweep", runs[i].sweep},
                    {"radial_nodes", c.radial_nodes},
                    {"midfield_samples", c.midfield_samples},
                    {"nodes_used", r.nodes_used},
                    {"u", number(r.u)},
                    {"near_zone_error", number(ne)},
                    {"total_error", number(te)},
                    {"statistical_error", number(r.statistical_error)}});
    if (runs[i].sweep == "radial_nodes") {
      nodes.push_back(c.radial_nodes);
      near_err.push_back(ne);
    } else {
      stat_err.push_back(r.statistical_error);
    }
  }
  json ratios = json::array();
  for (std::size_t k = 1; k < stat_err.size(); ++k) ratios.push_back(number(stat_err[k] / stat_err[k - 1]));
  bool monotone = true;
  for (std::size_t k = 1; k < near_err.size(); ++k) monotone = monotone && near_err[k] < near_err[k - 1];
  if (wants_csv(rc.format)) out.write("convergence.csv", csv);
  out.write_json("convergence.json", {{"schema_version", schema_version},
                                      {"command", "convergence"},
                                      {"config", to_json(rc)},
                                      {"source", source_json(f)},
                                      {"point", detail::vec(x)},
                                      {"reference_kind", kind},
                                      {"near_zone_reference", number(near_ref)},
                                      {"u_reference", number(u_ref)},
                                      {"near_zone_slope", number(log_log_slope(nodes, near_err))},
                                      {"near_zone_monotone", monotone},
                                      {"statistical_error_ratios", ratios},
                                      {"rows", rows}});
  return res;
}

// ---------------------------------------------------------------------------
// sources

inline std::string sources_table() {
  std::ostringstream os;
  for (const auto& e : corpus()) {
    os << e.name << "  " << e.description << "\n    defaults:";
    for (const auto& [k, v] : e.defaults) os << " " << k << "=" << v;
    os << "\n";
  }
  return os.str();
}

inline json sources_json() {
  json a = json::array();
  for (const auto& e : corpus()) {
    json d = json::object();
    for (const auto& [k, v] : e.defaults) d[k] = v;
    a.push_back({{"name", e.name}, {"description", e.description}, {"defaults", d}});
  }
  return a;
}

// ---------------------------------------------------------------------------
// Dispatch

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<OutputFormat> format;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parses the config text, applies flag overrides, runs one subcommand and maps
/// failures to exit codes with a diagnostic on opt.log.
inline int run_command(const std::string& command, const std::string& config_text, const Overrides& ov,
                       const RunOptions& opt) {
  std::ostream& log = *opt.log;
  try {
    RunConfig rc = parse_run_config(config_text);
    if (ov.out) rc.output_directory = *ov.out;
    if (ov.seed) rc.seed = rc.quadrature.seed = *ov.seed;
    if (ov.format) rc.format = *ov.format;
    CommandResult r;
    if (command == "solve") r = cmd_solve(rc, opt);
    else if (command == "verify") r = cmd_verify(rc, opt);
    else if (command == "norms") r = cmd_norms(rc, opt);
    else if (command == "convergence") r = cmd_convergence(rc, opt);
    else throw config_error("", "unknown command '" + command + "'");
    for (const auto& fpath : r.files) log << "wrote " << fpath << "\n";
    return r.exit_code;
  } catch (const config_error& e) {
    log << "error: " << e.diagnostic() << "\n";
    return exit_code::config;
  } catch (const precondition_error& e) {
    log << "error: precondition: " << e.what() << "\n";
    return exit_code::config;
  } catch (const newtpot::domain_error& e) {
    log << "error: domain: " << e.what() << "\n";
    return exit_code::config;
  } catch (const admissibility_error& e) {
    log << "error: admissibility: " << e.what() << "\n";
    return exit_code::admissibility;
  } catch (const evaluation_error& e) {
    log << "error: source evaluation: " << e.what() << "\n";
    return exit_code::admissibility;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return exit_code::failure;
  }
}

}  // namespace newtpot::cli
