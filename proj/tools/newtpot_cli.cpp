// newtpot: free-space Poisson solver driver.
//
//   newtpot solve       --config run.json [--out DIR] [--seed N] [--threads N] [--format csv|json|both]
//   newtpot verify      --config run.json [--harness-only] ...
//   newtpot norms       --config run.json ...
//   newtpot convergence --config run.json ...
//   newtpot sources     [--format json]

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "newtpot/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace newtpot::cli;
  CLI::App app{"Free-space Poisson solver: Newtonian potential, derivatives, checks and norms"};
  app.require_subcommand(1);

  struct Flags {
    std::string config, out, format;
    std::uint64_t seed = 0;
    int threads = 1;
    bool harness_only = false, mutate = false;
  };
  std::map<std::string, Flags> flags;
  const std::map<std::string, std::string> help = {
      {"solve", "Evaluate u, grad u and Hess u at the configured points"},
      {"verify", "Run residual, mean-value and inequality-harness checks"},
      {"norms", "Lorentz norms, weak-norm constant and the normalized bounded solution"},
      {"convergence", "Error-versus-cost tables over radial nodes and midfield samples"}};
  std::map<std::string, CLI::Option*> seed_opt;
  for (const auto& [name, text] : help) {
    auto* sub = app.add_subcommand(name, text);
    auto& fl = flags[name];
    sub->add_option("--config", fl.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", fl.out, "Output directory (overrides outputs.directory)");
    seed_opt[name] = sub->add_option("--seed", fl.seed, "Random seed (overrides the config)");
    sub->add_option("--threads", fl.threads, "Worker threads; results do not depend on it")
        ->check(CLI::Range(1, 1024));
    sub->add_option("--format", fl.format, "Output format")->check(CLI::IsMember({"csv", "json", "both"}));
    if (name == "verify") sub->add_flag("--harness-only", fl.harness_only, "Run only the inequality harness");
    // mutation-testing hook, deliberately undocumented in --help
    sub->add_flag("--mutate-kernel-sign", fl.mutate)->group("");
  }
  std::string sources_format = "text";
  auto* src = app.add_subcommand("sources", "List the named source corpus");
  src->add_option("--format", sources_format, "text or json")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code::config;
  }

  if (src->parsed()) {
    if (sources_format == "json") std::cout << sources_json().dump(2) << "\n";
    else std::cout << sources_table();
    return exit_code::ok;
  }
  for (auto& [name, fl] : flags) {
    if (!app.got_subcommand(name)) continue;
    Overrides ov;
    if (!fl.out.empty()) ov.out = fl.out;
    if (seed_opt[name]->count()) ov.seed = fl.seed;
    if (!fl.format.empty()) ov.format = parse_format(fl.format);
    RunOptions opt;
    opt.threads = fl.threads;
    opt.harness_only = fl.harness_only;
    opt.mutate_kernel_sign = fl.mutate;
    std::string text;
    try {
      text = read_file(fl.config);
    } catch (const config_error& e) {
      std::cerr << "error: " << e.diagnostic() << "\n";
      return exit_code::config;
    }
    return run_command(name, text, ov, opt);
  }
  return exit_code::failure;
}
