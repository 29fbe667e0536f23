#pragma once

// JSON run configuration for the command-line driver.  Every object rejects
// keys it does not know; errors carry the JSON pointer of the offending field
// and the line it appears on.  Omitted fields take source-aware defaults, and
// `to_json` writes the fully resolved configuration so an echoed config
// reparses to the same run.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "newtpot/errors.hpp"
#include "newtpot/kernel.hpp"
#include "newtpot/quadrature.hpp"
#include "newtpot/random.hpp"
#include "newtpot/sources.hpp"

namespace newtpot::cli {

using nlohmann::json;

inline constexpr int schema_version = 1;

/// Invalid configuration: exit code 2.
class config_error : public std::runtime_error {
 public:
  config_error(std::string field, const std::string& message, int line = 0)
      : std::runtime_error(message), field_(std::move(field)), line_(line) {}
  const std::string& field() const { return field_; }
  int line() const { return line_; }
  void set_line(int l) { line_ = l; }

  /// "config:LINE: /field: message"
  std::string diagnostic() const {
    std::ostringstream os;
    os << "config";
    if (line_ > 0) os << ":" << line_;
    os << ": " << (field_.empty() ? "/" : field_) << ": " << what();
    return os.str();
  }

 private:
  std::string field_;
  int line_;
};

enum class OutputFormat { csv, json, both };

inline const char* to_string(OutputFormat f) {
  return f == OutputFormat::csv ? "csv" : f == OutputFormat::json ? "json" : "both";
}

inline std::optional<OutputFormat> parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  if (s == "both") return OutputFormat::both;
  return std::nullopt;
}

/// Axis-aligned tensor grid: counts[k] points spanning center[k] +- extent[k].
struct GridSpec {
  std::vector<double> center, extent;
  std::vector<int> counts;

  std::vector<std::vector<double>> points() const {
    std::vector<std::vector<double>> out;
    const std::size_t n = center.size();
    std::size_t total = 1;
    for (int c : counts) total *= static_cast<std::size_t>(c);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::vector<double> p(n);
      std::size_t rem = idx;
      // last axis varies fastest
      for (std::size_t k = n; k-- > 0;) {
        const std::size_t i = rem % counts[k];
        rem /= counts[k];
        p[k] = counts[k] == 1 ? center[k] : center[k] - extent[k] + 2.0 * extent[k] * i / (counts[k] - 1);
      }
      out.push_back(std::move(p));
    }
    return out;
  }
};

struct SolveSection {
  std::vector<std::string> components;  // subset of {u, grad, hess}
  unsigned mask() const {
    unsigned m = 0;
    for (const auto& c : components)
      m |= c == "u" ? component::value : c == "grad" ? component::gradient : component::hessian;
    return m;
  }
};

struct ResidualSection {
  std::vector<std::vector<double>> points;  // explicit points; otherwise random ones
  int random_points = 5;
  double random_radius = 1.5;
  std::vector<double> h_values{0.2, 0.1, 0.05, 0.025};
  int replicates = 3;
  double rel_tolerance = 5e-3;
  double min_slope = 1.8;
  bool with_hessian = true;
};

struct MeanValueSection {
  std::vector<double> center;  // default (support_radius + 2) e_1
  std::vector<double> radii{0.4, 0.2, 0.1};
  int theta_nodes = 8;
  int mc_directions = 512;
  int radial_nodes = 6;
  double tolerance_factor = 2.0;
  std::vector<double> scaling_center;  // optional interior O(r^2) trend check
};

struct HarnessSection {
  std::size_t trials = 100000;
  std::vector<int> dimensions{3, 4, 5, 6, 7, 8};
};

struct VerifySection {
  std::vector<std::string> suites;  // subset of {residual, mean_value, harness}
  ResidualSection residual;
  MeanValueSection mean_value;
  HarnessSection harness;
};

struct NormsSection {
  std::vector<std::pair<double, double>> params;  // (p, q), q = inf for the weak norm
  std::string method = "automatic";
  std::vector<double> level_set_lambdas{0.01, 0.1, 1.0};
  std::size_t level_set_samples = 200000;
  int sup_grid_points = 0;     // random points in B(0, sup_grid_radius); 0 disables
  double sup_grid_radius = 10.0;
  std::size_t compare_midfield_samples = 0;  // second config for the uniqueness check; 0 disables
};

struct ConvergenceSection {
  std::vector<double> point;  // default 0.6 e_1
  std::vector<int> radial_nodes{8, 16, 32, 64};
  std::vector<std::size_t> midfield_samples{25000, 50000, 100000, 200000};
};

struct RunConfig {
  int schema = schema_version;
  int dimension = 3;
  std::string source_name;
  ParameterMap source_params;  // as given; defaults are filled by the corpus
  QuadratureConfig quadrature;
  std::vector<std::vector<double>> explicit_points;
  std::optional<GridSpec> grid;
  std::string output_directory = "out";
  OutputFormat format = OutputFormat::both;
  std::uint64_t seed = 0;
  SolveSection solve;
  VerifySection verify;
  NormsSection norms;
  ConvergenceSection convergence;

  SourceFunction source() const { return make_source(source_name, source_params, dimension); }

  std::vector<std::vector<double>> evaluation_points() const { return grid ? grid->points() : explicit_points; }
};

namespace detail {

/// 1-based line of the byte offset in text.
inline int line_at(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

/// Best-effort line of a JSON pointer: finds each object key in turn.
inline int locate(const std::string& text, const std::string& pointer) {
  std::size_t pos = 0;
  bool found = false;
  std::stringstream ss(pointer);
  std::string seg;
  while (std::getline(ss, seg, '/')) {
    if (seg.empty() || seg.find_first_not_of("0123456789") == std::string::npos) continue;
    const auto at = text.find("\"" + seg + "\"", pos);
    if (at == std::string::npos) break;
    pos = at;
    found = true;
  }
  return found ? line_at(text, pos) : 0;
}

/// Strict reader over one JSON object: typed getters, then finish() rejects leftovers.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw config_error(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_ + "/" + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json* raw(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  bool get(const std::string& key, T& out) {
    const json* v = raw(key);
    if (!v) return false;
    out = convert<T>(*v, at(key));
    return true;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.contains(it.key())) throw config_error(at(it.key()), "unknown key '" + it.key() + "'");
  }

  template <class T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw config_error(where, "expected true or false");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw config_error(where, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw config_error(where, "expected a number");
      const double d = v.get<double>();
      if (!std::isfinite(d)) throw config_error(where, "expected a finite number");
      return d;
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw config_error(where, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned()) throw config_error(where, "expected a non-negative integer");
        return v.get<T>();
      } else {
        const auto w = v.get<std::int64_t>();
        if (w < std::numeric_limits<T>::min() || w > std::numeric_limits<T>::max())
          throw config_error(where, "integer out of range");
        return static_cast<T>(w);
      }
    } else {
      // std::vector<...>
      if (!v.is_array()) throw config_error(where, "expected an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(convert<typename T::value_type>(v[i], where + "/" + std::to_string(i)));
      return out;
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

inline void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw config_error(field, message);
}

inline void require_dim(const std::vector<double>& p, int n, const std::string& field) {
  require(static_cast<int>(p.size()) == n, field,
          "expected " + std::to_string(n) + " coordinates, got " + std::to_string(p.size()));
}

inline std::optional<AngularRule> parse_angular(const std::string& s) {
  if (s == "product_gauss") return AngularRule::product_gauss;
  if (s == "monte_carlo") return AngularRule::monte_carlo;
  return std::nullopt;
}

inline std::optional<ZoneSharing> parse_sharing(const std::string& s) {
  if (s == "automatic") return ZoneSharing::automatic;
  if (s == "partition") return ZoneSharing::partition;
  if (s == "balance") return ZoneSharing::balance;
  return std::nullopt;
}

inline json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : v > 0 ? "inf" : "-inf";
}

inline void parse_quadrature(const json& j, RunConfig& rc) {
  Fields q(j, "/quadrature");
  auto& c = rc.quadrature;
  q.get("split_radius", c.split_radius);
  q.get("truncation_radius", c.truncation_radius);
  q.get("radial_nodes", c.radial_nodes);
  std::string s;
  if (q.get("angular_rule", s)) {
    auto r = parse_angular(s);
    require(r.has_value(), q.at("angular_rule"), "expected 'product_gauss' or 'monte_carlo', got '" + s + "'");
    c.angular_rule = *r;
    // a rule switch without an explicit node count picks that rule's default budget
    if (!q.has("angular_nodes")) c.angular_nodes = *r == AngularRule::product_gauss ? 32 : 4096;
  }
  q.get("angular_nodes", c.angular_nodes);
  q.get("midfield_samples", c.midfield_samples);
  q.get("inner_radius", c.inner_radius);
  if (q.get("zone_sharing", s)) {
    auto z = parse_sharing(s);
    require(z.has_value(), q.at("zone_sharing"), "expected 'automatic', 'partition' or 'balance', got '" + s + "'");
    c.zone_sharing = *z;
  }
  q.get("rel_tolerance", c.rel_tolerance);
  if (q.has("seed")) throw config_error(q.at("seed"), "the seed is set once, at the top level");
  q.finish();
}

inline void parse_points(const json& j, RunConfig& rc) {
  Fields e(j, "/evaluation_points");
  const int n = rc.dimension;
  const bool has_points = e.has("points"), has_grid = e.has("grid");
  require(!(has_points && has_grid), "/evaluation_points", "give either 'points' or 'grid', not both");
  require(has_points || has_grid, "/evaluation_points", "needs 'points' or 'grid'");
  if (has_points) {
    e.get("points", rc.explicit_points);
    for (std::size_t i = 0; i < rc.explicit_points.size(); ++i)
      require_dim(rc.explicit_points[i], n, "/evaluation_points/points/" + std::to_string(i));
  } else {
    Fields g(*e.raw("grid"), "/evaluation_points/grid");
    GridSpec grid;
    grid.center.assign(n, 0.0);
    grid.extent.assign(n, 0.0);
    g.get("center", grid.center);
    require_dim(grid.center, n, g.at("center"));
    if (g.has("extent") && g.raw("extent")->is_number()) {
      double ext = 0.0;
      g.get("extent", ext);
      grid.extent.assign(n, ext);
    } else {
      g.get("extent", grid.extent);
    }
    require_dim(grid.extent, n, g.at("extent"));
    for (double x : grid.extent) require(x >= 0.0, g.at("extent"), "extents must be non-negative");
    require(g.get("counts", grid.counts), g.at("counts"), "missing 'counts'");
    require(static_cast<int>(grid.counts.size()) == n, g.at("counts"), "expected one count per axis");
    for (int c : grid.counts) require(c >= 0, g.at("counts"), "counts must be non-negative");
    g.finish();
    rc.grid = grid;
  }
  e.finish();
}

inline void parse_solve(const json& j, RunConfig& rc) {
  Fields s(j, "/solve");
  s.get("components", rc.solve.components);
  for (std::size_t i = 0; i < rc.solve.components.size(); ++i) {
    const auto& c = rc.solve.components[i];
    require(c == "u" || c == "grad" || c == "hess", s.at("components") + "/" + std::to_string(i),
            "unknown component '" + c + "' (expected u, grad or hess)");
  }
  require(!rc.solve.components.empty(), s.at("components"), "needs at least one component");
  s.finish();
}

inline void parse_verify(const json& j, RunConfig& rc) {
  Fields v(j, "/verify");
  auto& out = rc.verify;
  const int n = rc.dimension;
  if (v.get("suites", out.suites)) {
    for (std::size_t i = 0; i < out.suites.size(); ++i) {
      const auto& s = out.suites[i];
      require(s == "residual" || s == "mean_value" || s == "harness", v.at("suites") + "/" + std::to_string(i),
              "unknown suite '" + s + "' (expected residual, mean_value or harness)");
    }
    require(!out.suites.empty(), v.at("suites"), "needs at least one suite");
  }
  if (const json* r = v.raw("residual")) {
    Fields f(*r, "/verify/residual");
    auto& o = out.residual;
    f.get("points", o.points);
    for (std::size_t i = 0; i < o.points.size(); ++i) require_dim(o.points[i], n, f.at("points") + "/" + std::to_string(i));
    f.get("random_points", o.random_points);
    require(o.random_points >= 0, f.at("random_points"), "must be non-negative");
    f.get("random_radius", o.random_radius);
    require(o.random_radius > 0.0, f.at("random_radius"), "must be positive");
    f.get("h_values", o.h_values);
    require(o.h_values.size() >= 3, f.at("h_values"), "needs at least three step sizes");
    for (double h : o.h_values) require(h > 0.0, f.at("h_values"), "step sizes must be positive");
    f.get("replicates", o.replicates);
    require(o.replicates >= 1, f.at("replicates"), "must be >= 1");
    f.get("rel_tolerance", o.rel_tolerance);
    require(o.rel_tolerance > 0.0, f.at("rel_tolerance"), "must be positive");
    f.get("min_slope", o.min_slope);
    f.get("with_hessian", o.with_hessian);
    f.finish();
  }
  if (const json* m = v.raw("mean_value")) {
    Fields f(*m, "/verify/mean_value");
    auto& o = out.mean_value;
    if (f.get("center", o.center)) require_dim(o.center, n, f.at("center"));
    f.get("radii", o.radii);
    require(!o.radii.empty(), f.at("radii"), "needs at least one radius");
    for (double r : o.radii) require(r > 0.0, f.at("radii"), "radii must be positive");
    f.get("theta_nodes", o.theta_nodes);
    require(o.theta_nodes >= 1, f.at("theta_nodes"), "must be >= 1");
    f.get("mc_directions", o.mc_directions);
    require(o.mc_directions >= 2, f.at("mc_directions"), "must be >= 2");
    f.get("radial_nodes", o.radial_nodes);
    require(o.radial_nodes >= 1, f.at("radial_nodes"), "must be >= 1");
    f.get("tolerance_factor", o.tolerance_factor);
    require(o.tolerance_factor > 0.0, f.at("tolerance_factor"), "must be positive");
    if (f.get("scaling_center", o.scaling_center) && !o.scaling_center.empty())
      require_dim(o.scaling_center, n, f.at("scaling_center"));
    f.finish();
  }
  if (const json* h = v.raw("harness")) {
    Fields f(*h, "/verify/harness");
    f.get("trials", out.harness.trials);
    require(out.harness.trials >= 1, f.at("trials"), "must be >= 1");
    f.get("dimensions", out.harness.dimensions);
    require(!out.harness.dimensions.empty(), f.at("dimensions"), "needs at least one dimension");
    for (int d : out.harness.dimensions) require(d >= 3, f.at("dimensions"), "dimensions must be >= 3");
    f.finish();
  }
  v.finish();
}

inline void parse_norms(const json& j, RunConfig& rc) {
  Fields v(j, "/norms");
  auto& o = rc.norms;
  if (const json* p = v.raw("params")) {
    require(p->is_array() && !p->empty(), v.at("params"), "expected a non-empty array of {p, q}");
    o.params.clear();
    for (std::size_t i = 0; i < p->size(); ++i) {
      const std::string where = v.at("params") + "/" + std::to_string(i);
      Fields f((*p)[i], where);
      double pp = 0.0, qq = 1.0;
      require(f.get("p", pp), where, "missing 'p'");
      require(pp > 1.0, f.at("p"), "p must exceed 1");
      if (const json* q = f.raw("q")) {
        if (q->is_string()) {
          require(q->get<std::string>() == "inf", f.at("q"), "q must be 1 or \"inf\"");
          qq = infinity;
        } else {
          qq = Fields::convert<double>(*q, f.at("q"));
          require(qq == 1.0, f.at("q"), "q must be 1 or \"inf\"");
        }
      }
      f.finish();
      o.params.emplace_back(pp, qq);
    }
  }
  if (v.get("method", o.method))
    require(o.method == "automatic" || o.method == "analytic_radial" || o.method == "monte_carlo", v.at("method"),
            "expected 'automatic', 'analytic_radial' or 'monte_carlo'");
  v.get("level_set_lambdas", o.level_set_lambdas);
  for (double l : o.level_set_lambdas) require(l > 0.0, v.at("level_set_lambdas"), "levels must be positive");
  v.get("level_set_samples", o.level_set_samples);
  require(o.level_set_samples >= 2, v.at("level_set_samples"), "must be >= 2");
  v.get("sup_grid_points", o.sup_grid_points);
  require(o.sup_grid_points >= 0, v.at("sup_grid_points"), "must be non-negative");
  v.get("sup_grid_radius", o.sup_grid_radius);
  require(o.sup_grid_radius > 0.0, v.at("sup_grid_radius"), "must be positive");
  v.get("compare_midfield_samples", o.compare_midfield_samples);
  v.finish();
}

inline void parse_convergence(const json& j, RunConfig& rc) {
  Fields v(j, "/convergence");
  auto& o = rc.convergence;
  if (v.get("point", o.point)) require_dim(o.point, rc.dimension, v.at("point"));
  v.get("radial_nodes", o.radial_nodes);
  for (int k : o.radial_nodes) require(k >= 2, v.at("radial_nodes"), "node counts must be >= 2");
  v.get("midfield_samples", o.midfield_samples);
  for (auto k : o.midfield_samples) require(k >= 4, v.at("midfield_samples"), "sample counts must be >= 4");
  require(!o.radial_nodes.empty() || !o.midfield_samples.empty(), "/convergence", "nothing to sweep");
  v.finish();
}

/// Library preconditions, restated so they surface as field errors.
inline void validate(RunConfig& rc, const SourceFunction& f) {
  try {
    rc.quadrature.validate(rc.dimension);
  } catch (const precondition_error& e) {
    std::string msg = e.what();
    std::string field = "/quadrature";
    for (const char* k : {"split_radius", "truncation_radius", "radial_nodes", "angular_nodes", "angular_rule",
                          "midfield_samples", "inner_radius", "rel_tolerance"})
      if (msg.find(k) != std::string::npos) {
        field += std::string("/") + k;
        break;
      }
    throw config_error(field, msg);
  }
  const double half_R = 0.5 * rc.quadrature.truncation_radius;
  const auto pts = rc.evaluation_points();
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (!(norm(pts[i]) < half_R)) {
      std::ostringstream os;
      os << "point " << i << " has |x| = " << norm(pts[i]) << ", must be < truncation_radius/2 = " << half_R;
      throw config_error(rc.grid ? "/evaluation_points/grid" : "/evaluation_points/points/" + std::to_string(i),
                         os.str());
    }
  if (rc.solve.components.empty()) {
    rc.solve.components = {"u", "grad"};
    if (f.is_c1) rc.solve.components.push_back("hess");
  }
  if (rc.verify.suites.empty()) {
    if (f.is_c1) rc.verify.suites.push_back("residual");
    if (f.compactly_supported()) rc.verify.suites.push_back("mean_value");
    rc.verify.suites.push_back("harness");
  }
  if (rc.verify.mean_value.center.empty() && f.compactly_supported()) {
    rc.verify.mean_value.center.assign(rc.dimension, 0.0);
    rc.verify.mean_value.center[0] = f.support_radius + 2.0;
  }
  if (rc.norms.params.empty()) rc.norms.params = {{rc.dimension / 2.0, 1.0}, {rc.dimension / (rc.dimension - 2.0), infinity}};
  if (rc.convergence.point.empty()) {
    rc.convergence.point.assign(rc.dimension, 0.0);
    rc.convergence.point[0] = 0.6;
  }
  if (!(norm(rc.convergence.point) < half_R))
    throw config_error("/convergence/point", "must satisfy |x| < truncation_radius/2");
}

}  // namespace detail

/// Parses and validates a run configuration.  Throws config_error.
inline RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error("", std::string("malformed JSON: ") + e.what(), detail::line_at(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  try {
    detail::Fields top(j, "");
    RunConfig rc;
    if (top.get("schema_version", rc.schema))
      detail::require(rc.schema == schema_version, "/schema_version",
                      "unsupported schema version " + std::to_string(rc.schema) + " (this build reads " +
                          std::to_string(schema_version) + ")");
    top.get("dimension", rc.dimension);
    detail::require(rc.dimension >= 3, "/dimension", "dimension must be >= 3");
    top.get("seed", rc.seed);

    const json* src = top.raw("source");
    detail::require(src != nullptr, "/source", "missing 'source'");
    detail::Fields s(*src, "/source");
    detail::require(s.get("name", rc.source_name), "/source/name", "missing source name");
    if (const json* p = s.raw("params")) {
      detail::Fields pf(*p, "/source/params");
      for (auto it = p->begin(); it != p->end(); ++it) {
        double v = 0.0;
        pf.get(it.key(), v);
        rc.source_params[it.key()] = v;
      }
    }
    s.finish();
    SourceFunction f;
    try {
      f = rc.source();
    } catch (const domain_error& e) {
      const std::string msg = e.what();
      throw config_error(msg.find("unknown source") != std::string::npos ? "/source/name" : "/source/params", msg);
    }

    rc.quadrature = QuadratureConfig::defaults_for(f, rc.dimension);
    if (const json* q = top.raw("quadrature")) detail::parse_quadrature(*q, rc);
    rc.quadrature.seed = rc.seed;

    if (const json* e = top.raw("evaluation_points")) detail::parse_points(*e, rc);
    if (const json* o = top.raw("outputs")) {
      detail::Fields of(*o, "/outputs");
      of.get("directory", rc.output_directory);
      detail::require(!rc.output_directory.empty(), "/outputs/directory", "must not be empty");
      std::string fmt;
      if (of.get("format", fmt)) {
        auto pf = parse_format(fmt);
        detail::require(pf.has_value(), "/outputs/format", "expected 'csv', 'json' or 'both'");
        rc.format = *pf;
      }
      of.finish();
    }
    if (const json* x = top.raw("solve")) detail::parse_solve(*x, rc);
    if (const json* x = top.raw("verify")) detail::parse_verify(*x, rc);
    if (const json* x = top.raw("norms")) detail::parse_norms(*x, rc);
    if (const json* x = top.raw("convergence")) detail::parse_convergence(*x, rc);
    top.finish();
    detail::validate(rc, f);
    return rc;
  } catch (config_error& e) {
    if (e.line() == 0) e.set_line(detail::locate(text, e.field()));
    throw;
  }
}

/// Fully resolved configuration; parse_run_config(to_json(rc).dump()) reproduces rc.
inline json to_json(const RunConfig& rc) {
  const auto& q = rc.quadrature;
  json j;
  j["schema_version"] = rc.schema;
  j["dimension"] = rc.dimension;
  j["seed"] = rc.seed;
  json params = json::object();
  for (const auto& [k, v] : rc.source_params) params[k] = v;
  j["source"] = {{"name", rc.source_name}, {"params", params}};
  j["quadrature"] = {{"split_radius", q.split_radius},
                     {"truncation_radius", q.truncation_radius},
                     {"radial_nodes", q.radial_nodes},
                     {"angular_rule", to_string(q.angular_rule)},
                     {"angular_nodes", q.angular_nodes},
                     {"midfield_samples", q.midfield_samples},
                     {"inner_radius", q.inner_radius},
                     {"zone_sharing", to_string(q.zone_sharing)},
                     {"rel_tolerance", q.rel_tolerance}};
  if (rc.grid)
    j["evaluation_points"] = {{"grid", {{"center", rc.grid->center}, {"extent", rc.grid->extent}, {"counts", rc.grid->counts}}}};
  else
    j["evaluation_points"] = {{"points", rc.explicit_points}};
  j["outputs"] = {{"directory", rc.output_directory}, {"format", to_string(rc.format)}};
  j["solve"] = {{"components", rc.solve.components}};
  const auto& r = rc.verify.residual;
  const auto& m = rc.verify.mean_value;
  json mv = {{"radii", m.radii},
             {"theta_nodes", m.theta_nodes},
             {"mc_directions", m.mc_directions},
             {"radial_nodes", m.radial_nodes},
             {"tolerance_factor", m.tolerance_factor},
             {"scaling_center", m.scaling_center}};
  if (!m.center.empty()) mv["center"] = m.center;
  j["verify"] = {{"suites", rc.verify.suites},
                 {"residual",
                  {{"points", r.points},
                   {"random_points", r.random_points},
                   {"random_radius", r.random_radius},
                   {"h_values", r.h_values},
                   {"replicates", r.replicates},
                   {"rel_tolerance", r.rel_tolerance},
                   {"min_slope", r.min_slope},
                   {"with_hessian", r.with_hessian}}},
                 {"mean_value", mv},
                 {"harness", {{"trials", rc.verify.harness.trials}, {"dimensions", rc.verify.harness.dimensions}}}};
  json np = json::array();
  for (const auto& [p, qq] : rc.norms.params) np.push_back({{"p", p}, {"q", std::isinf(qq) ? json("inf") : json(qq)}});
  j["norms"] = {{"params", np},
                {"method", rc.norms.method},
                {"level_set_lambdas", rc.norms.level_set_lambdas},
                {"level_set_samples", rc.norms.level_set_samples},
                {"sup_grid_points", rc.norms.sup_grid_points},
                {"sup_grid_radius", rc.norms.sup_grid_radius},
                {"compare_midfield_samples", rc.norms.compare_midfield_samples}};
  j["convergence"] = {{"point", rc.convergence.point},
                      {"radial_nodes", rc.convergence.radial_nodes},
                      {"midfield_samples", rc.convergence.midfield_samples}};
  return j;
}

/// Configurations are equal when they resolve to the same document.
inline bool equivalent(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

}  // namespace newtpot::cli
