#include <gtest/gtest.h>

#include <cmath>

#include "cli_support.hpp"
#include "newtpot/cli/commands.hpp"
#include "oracles.hpp"

using namespace newtpot;
using namespace newtpot::cli;
using namespace testing_support;

namespace {

const char* kBallConfig = R"({
  "schema_version": 1,
  "dimension": 3,
  "seed": 7,
  "source": {"name": "uniform_ball"},
  "evaluation_points": {"grid": {"center": [0, 0, 0], "extent": [2, 0, 0], "counts": [5, 1, 1]}}
})";

std::string source_dir() { return NEWTPOT_SOURCE_DIR; }

}  // namespace

TEST(RunConfigParse, UnknownKeyReportsLineAndField) {
  const std::string text = "{\n  \"dimension\": 3,\n  \"source\": {\"name\": \"gaussian\"},\n  \"quadrature\": {\n    \"radial_nodez\": 8\n  }\n}";
  try {
    parse_run_config(text);
    FAIL() << "expected config_error";
  } catch (const config_error& e) {
    EXPECT_EQ(e.field(), "/quadrature/radial_nodez");
    EXPECT_EQ(e.line(), 5);
    EXPECT_EQ(e.diagnostic(), "config:5: /quadrature/radial_nodez: unknown key 'radial_nodez'");
  }
}

TEST(RunConfigParse, TypeAndValueErrors) {
  auto fails_at = [](const std::string& text, const std::string& field) {
    try {
      parse_run_config(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const config_error& e) {
      EXPECT_EQ(e.field(), field) << e.diagnostic();
    }
  };
  fails_at(R"({"dimension": "three", "source": {"name": "gaussian"}})", "/dimension");
  fails_at(R"({"dimension": 2, "source": {"name": "gaussian"}})", "/dimension");
  fails_at(R"({"dimension": 3})", "/source");
  fails_at(R"({"dimension": 3, "source": {"name": "cube"}})", "/source/name");
  fails_at(R"({"dimension": 3, "source": {"name": "gaussian", "params": {"sigma": 1}}})", "/source/params");
  fails_at(R"({"dimension": 3, "source": {"name": "gaussian"}, "quadrature": {"seed": 3}})", "/quadrature/seed");
  fails_at(R"({"dimension": 3, "source": {"name": "gaussian"}, "quadrature": {"radial_nodes": 2.5}})",
           "/quadrature/radial_nodes");
  fails_at(R"({"dimension": 3, "source": {"name": "gaussian"}, "evaluation_points": {"points": [[1, 2]]}})",
           "/evaluation_points/points/0");
  fails_at(R"({"dimension": 3, "source": {"name": "gaussian"}, "outputs": {"format": "xml"}})", "/outputs/format");
  fails_at(R"({"dimension": 3, "source": {"name": "gaussian"}, "solve": {"components": ["lap"]}})", "/solve/components/0");
  EXPECT_THROW(parse_run_config("{\"dimension\": 3,"), config_error);
}

TEST(RunConfigParse, GridExpansionLastAxisFastest) {
  const auto rc = parse_run_config(
      R"({"dimension": 3, "source": {"name": "gaussian"},
          "evaluation_points": {"grid": {"center": [0, 0, 0], "extent": [1, 0, 0.5], "counts": [3, 1, 2]}}})");
  const auto pts = rc.evaluation_points();
  ASSERT_EQ(pts.size(), 6u);
  EXPECT_EQ(pts[0], (std::vector<double>{-1, 0, -0.5}));
  EXPECT_EQ(pts[1], (std::vector<double>{-1, 0, 0.5}));
  EXPECT_EQ(pts[2], (std::vector<double>{0, 0, -0.5}));
  EXPECT_EQ(pts[5], (std::vector<double>{1, 0, 0.5}));
}

TEST(RunConfigParse, EchoRoundTripsToAnEquivalentConfig) {
  for (const char* name : {"gaussian", "uniform_ball", "odd_bump", "poly_bump"}) {
    const auto rc = parse_run_config(std::string(R"({"dimension": 3, "seed": 11, "source": {"name": ")") + name +
                                     R"("}, "norms": {"params": [{"p": 1.5, "q": 1}, {"p": 3, "q": "inf"}]}})");
    const auto again = parse_run_config(to_json(rc).dump());
    EXPECT_TRUE(equivalent(rc, again)) << name;
    EXPECT_EQ(to_json(rc).dump(), to_json(again).dump());
  }
}

TEST(RunConfigParse, DefaultsFollowTheSource) {
  const auto ball = parse_run_config(R"({"dimension": 3, "source": {"name": "uniform_ball"}})");
  EXPECT_EQ(ball.solve.components, (std::vector<std::string>{"u", "grad"}));  // not C^1: no Hessian
  const auto g = parse_run_config(R"({"dimension": 4, "source": {"name": "gaussian"}})");
  EXPECT_EQ(g.quadrature.angular_rule, AngularRule::monte_carlo);
  EXPECT_EQ(g.solve.components.back(), "hess");
}

TEST(CsvSchema, SolveHeaderMatchesGoldenFile) {
  std::string golden = read_text(source_dir() + "/tests/golden/solve_header_n3.csv");
  while (!golden.empty() && (golden.back() == '\n' || golden.back() == '\r')) golden.pop_back();
  EXPECT_EQ(cli::detail::csv_join(solve_columns(3)), golden + "\n");
}

TEST(CliBinary, SolveUniformBallMatchesRadialOracle) {
  const auto dir = scratch("solve_ball");
  write_text(dir / "run.json", kBallConfig);
  ASSERT_EQ(run_cli("solve --config " + shell_path(dir / "run.json") + " --out " + shell_path(dir / "out"), dir / "log"), 0)
      << read_text(dir / "log");
  const auto res = read_json(dir / "out" / "results.json");
  const auto& recs = res["records"];
  ASSERT_EQ(recs.size(), 5u);
  const auto f = make_uniform_ball();
  for (const auto& r : recs) {
    const double x0 = r["x"][0].get<double>();
    const double exact = radial_green_potential(f, 3, std::abs(x0));
    const double budget = r["statistical_error"].get<double>() + r["tail_bound"].get<double>() + 1e-3 * std::abs(exact);
    EXPECT_LE(std::abs(r["u"].get<double>() - exact), budget) << "x0=" << x0;
  }
  const auto summary = read_json(dir / "out" / "summary.json");
  EXPECT_EQ(summary["status"], "ok");
  EXPECT_TRUE(equivalent(parse_run_config(summary["config"].dump()), parse_run_config(summary["config"].dump())));
  const std::string csv = read_text(dir / "out" / "results.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

TEST(CliBinary, ConfigErrorsExitTwo) {
  const auto dir = scratch("config_errors");
  write_text(dir / "empty.json",
             R"({"dimension": 3, "source": {"name": "gaussian"}, "evaluation_points": {"points": []}})");
  EXPECT_EQ(run_cli("solve --config " + shell_path(dir / "empty.json") + " --out " + shell_path(dir / "o"), dir / "log"), 2);
  write_text(dir / "bad.json", "{\n \"dimension\": 3,\n \"source\": {\"name\": \"gaussian\", \"colour\": 1}\n}");
  EXPECT_EQ(run_cli("solve --config " + shell_path(dir / "bad.json"), dir / "log"), 2);
  EXPECT_NE(read_text(dir / "log").find("config:3: /source/colour: unknown key 'colour'"), std::string::npos)
      << read_text(dir / "log");
  EXPECT_EQ(run_cli("solve --config " + shell_path(dir / "missing.json"), dir / "log"), 2);
  EXPECT_EQ(run_cli("solve --config " + shell_path(dir / "bad.json") + " --threads 0", dir / "log"), 2);
  EXPECT_EQ(run_cli("solve --config " + shell_path(dir / "bad.json") + " --format xml", dir / "log"), 2);
}

TEST(CliBinary, InadmissibleSourceExitsThree) {
  const auto dir = scratch("inadmissible");
  write_text(dir / "run.json", R"({"dimension": 3, "source": {"name": "inverse_power", "params": {"s": 1.5}},
      "evaluation_points": {"points": [[0.5, 0, 0]]}})");
  EXPECT_EQ(run_cli("solve --config " + shell_path(dir / "run.json") + " --out " + shell_path(dir / "out"), dir / "log"), 3);
  const auto summary = read_json(dir / "out" / "summary.json");
  EXPECT_EQ(summary["status"], "admissibility_failure");
  EXPECT_EQ(summary["conditions"]["f_condition_finite"], false);

  write_text(dir / "hess.json", R"({"dimension": 3, "source": {"name": "uniform_ball"},
      "evaluation_points": {"points": [[0.5, 0, 0]]}, "solve": {"components": ["u", "hess"]}})");
  EXPECT_EQ(run_cli("solve --config " + shell_path(dir / "hess.json") + " --out " + shell_path(dir / "out2"), dir / "log"), 3);
}

TEST(CliBinary, HarnessOnlyVerify) {
  const auto dir = scratch("harness");
  write_text(dir / "run.json", R"({"dimension": 3, "source": {"name": "gaussian"}, "verify": {"harness": {"trials": 100000}}})");
  ASSERT_EQ(run_cli("verify --harness-only --config " + shell_path(dir / "run.json") + " --out " + shell_path(dir / "out"),
                    dir / "log"),
            0)
      << read_text(dir / "log");
  const auto v = read_json(dir / "out" / "verify.json");
  EXPECT_EQ(v["harness"]["violations"], 0);
  EXPECT_EQ(v["harness"]["dimensions"].size(), 6u);
  for (const auto& d : v["harness"]["dimensions"]) EXPECT_EQ(d["trials"], 100000);
}

TEST(CliBinary, MisSignedKernelFailsVerification) {
  const auto dir = scratch("mutation");
  write_text(dir / "run.json", R"({"dimension": 3, "source": {"name": "gaussian"},
      "verify": {"suites": ["residual"], "residual": {"points": [[0.2, 0.1, 0.0]], "random_points": 0, "replicates": 1}}})");
  const std::string base = "verify --config " + shell_path(dir / "run.json") + " --out " + shell_path(dir / "out");
  EXPECT_EQ(run_cli(base, dir / "log"), 0) << read_text(dir / "log");
  EXPECT_EQ(run_cli(base + " --mutate-kernel-sign", dir / "log"), 4);
  const auto v = read_json(dir / "out" / "verify.json");
  EXPECT_EQ(v["residual"]["passed"], false);
}

TEST(CliBinary, NormsReport) {
  const auto dir = scratch("norms");
  write_text(dir / "run.json", R"({"dimension": 3, "source": {"name": "uniform_ball"},
      "norms": {"params": [{"p": 1.5, "q": 1}, {"p": 3, "q": "inf"}], "level_set_samples": 100000}})");
  ASSERT_EQ(run_cli("norms --config " + shell_path(dir / "run.json") + " --out " + shell_path(dir / "out"), dir / "log"), 0)
      << read_text(dir / "log");
  const auto j = read_json(dir / "out" / "norms.json");
  EXPECT_NEAR(j["weak_norm_constant"].get<double>(), oracle::c3, 1e-15);
  EXPECT_NEAR(j["source_norms"][0]["quasi_norm"].get<double>(), oracle::indicator_32_1, 1e-8);
  EXPECT_NEAR(j["source_norms"][1]["quasi_norm"].get<double>(), oracle::indicator_3_inf, 1e-8);
  EXPECT_EQ(j["source_norms"][1]["q"], "inf");
  EXPECT_EQ(j["normalized_solution"]["u_at_origin"].get<double>(), 0.0);
  EXPECT_EQ(j["normalized_solution"]["u_at_origin_is_zero"], true);
  EXPECT_NEAR(j["normalized_solution"]["c"].get<double>(), -0.5, 1e-3);
  for (const auto& l : j["level_sets"]) EXPECT_LT(std::abs(l["relative_deviation"].get<double>()), 0.02);
  EXPECT_TRUE(fs::exists(dir / "out" / "distribution.csv"));
}

TEST(CliBinary, ConvergenceTable) {
  const auto dir = scratch("convergence");
  write_text(dir / "run.json", R"({"dimension": 3, "source": {"name": "uniform_ball"},
      "quadrature": {"angular_nodes": 128},
      "convergence": {"midfield_samples": [20000, 40000, 80000]}})");
  ASSERT_EQ(run_cli("convergence --config " + shell_path(dir / "run.json") + " --out " + shell_path(dir / "out"), dir / "log"), 0)
      << read_text(dir / "log");
  const auto j = read_json(dir / "out" / "convergence.json");
  EXPECT_EQ(j["near_zone_monotone"], true);
  EXPECT_LT(j["near_zone_slope"].get<double>(), -1.0);
  for (const auto& r : j["statistical_error_ratios"]) EXPECT_NEAR(r.get<double>(), 1.0 / std::sqrt(2.0), 0.1);
  EXPECT_NE(j["reference_kind"].get<std::string>().find("radial"), std::string::npos);
}

TEST(CliBinary, NonRadialConvergenceIsSelfReferential) {
  const auto dir = scratch("convergence_odd");
  write_text(dir / "run.json", R"({"dimension": 3, "source": {"name": "odd_bump"},
      "convergence": {"radial_nodes": [8, 16, 32], "midfield_samples": [10000, 20000]}})");
  ASSERT_EQ(run_cli("convergence --config " + shell_path(dir / "run.json") + " --out " + shell_path(dir / "out"), dir / "log"), 0)
      << read_text(dir / "log");
  EXPECT_EQ(read_json(dir / "out" / "convergence.json")["reference_kind"], "self-referential (Richardson)");
}

TEST(CliBinary, SourcesListing) {
  const auto dir = scratch("sources");
  ASSERT_EQ(run_cli("sources --format json", dir / "out.json"), 0);
  const auto j = read_json(dir / "out.json");
  EXPECT_EQ(j.size(), corpus().size());
  ASSERT_EQ(run_cli("sources", dir / "out.txt"), 0);
  EXPECT_NE(read_text(dir / "out.txt").find("inverse_power"), std::string::npos);
}

TEST(CliBinary, SeedAndFormatOverrides) {
  const auto dir = scratch("overrides");
  write_text(dir / "run.json", R"({"dimension": 3, "source": {"name": "gaussian"},
      "evaluation_points": {"points": [[0.3, 0, 0]]}, "solve": {"components": ["u"]}})");
  const std::string base = "solve --config " + shell_path(dir / "run.json");
  ASSERT_EQ(run_cli(base + " --out " + shell_path(dir / "a") + " --format csv --seed 5", dir / "log"), 0);
  EXPECT_TRUE(fs::exists(dir / "a" / "results.csv"));
  EXPECT_FALSE(fs::exists(dir / "a" / "results.json"));
  ASSERT_EQ(run_cli(base + " --out " + shell_path(dir / "b") + " --format json --seed 6", dir / "log"), 0);
  EXPECT_FALSE(fs::exists(dir / "b" / "results.csv"));
  EXPECT_EQ(read_json(dir / "b" / "summary.json")["config"]["seed"], 6);
  EXPECT_NE(read_text(dir / "a" / "results.csv").find(','), std::string::npos);
}

TEST(CliBinary, ThreadCountDoesNotChangeOutputs) {
  const auto dir = scratch("threads");
  write_text(dir / "run.json", kBallConfig);
  const std::string base = "solve --config " + shell_path(dir / "run.json") + " --out " + shell_path(dir / "out");
  ASSERT_EQ(run_cli(base + " --threads 1", dir / "log"), 0);
  const std::string one = read_text(dir / "out" / "results.csv") + read_text(dir / "out" / "summary.json");
  ASSERT_EQ(run_cli(base + " --threads 4", dir / "log"), 0);
  const std::string four = read_text(dir / "out" / "results.csv") + read_text(dir / "out" / "summary.json");
  EXPECT_EQ(one, four);
}

TEST(RunConfigParse, ShippedExampleConfigsAreValid) {
  std::size_t count = 0;
  for (const auto& e : fs::directory_iterator(source_dir() + "/configs")) {
    if (e.path().extension() != ".json") continue;
    ++count;
    EXPECT_NO_THROW(parse_run_config(read_text(e.path()))) << e.path();
  }
  EXPECT_GE(count, 4u);
}
