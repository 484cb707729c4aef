// optexec: run, compare, calibrate and policy-dump on a scenario file.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "optexec/error.hpp"
#include "optexec/scenario.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<std::string> out;
};

void add_overrides(CLI::App* cmd, std::string& config, Overrides& o) {
  cmd->add_option("config", config, "scenario JSON file")->required();
  cmd->add_option("--seed", o.seed, "override the scenario seed");
  cmd->add_option("--paths", o.paths, "override the number of paths")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "override the output directory");
}

optexec::ScenarioConfig load(const std::string& config, const Overrides& o) {
  optexec::ScenarioConfig cfg = optexec::load_scenario(config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.paths) cfg.n_paths = *o.paths;
  if (o.out) cfg.output_dir = *o.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal execution with price signals"};
  app.require_subcommand(1);

  std::string config;
  Overrides ov;
  std::vector<std::string> names;

  auto* run = app.add_subcommand("run", "simulate each configured scheduler");
  add_overrides(run, config, ov);
  auto* compare = app.add_subcommand("compare", "compare schedulers on shared paths");
  add_overrides(compare, config, ov);
  compare->add_option("--schedulers", names, "schedulers to compare (default: the scenario's)");
  auto* calibrate = app.add_subcommand("calibrate", "fit the kappa regression");
  add_overrides(calibrate, config, ov);
  auto* dump = app.add_subcommand("policy-dump", "write LQR, continuous and dark policies");
  add_overrides(dump, config, ov);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    const optexec::ScenarioConfig cfg = load(config, ov);
    if (*run) {
      optexec::run_scenario(cfg, std::cout);
    } else if (*compare) {
      (void)optexec::compare_schedulers(cfg, names.empty() ? cfg.schedulers : names, std::cout);
    } else if (*calibrate) {
      (void)optexec::calibrate_scenario(cfg, std::cout);
    } else if (*dump) {
      optexec::dump_policies(cfg, std::cout);
    }
  } catch (const optexec::Error& e) {
    std::cerr << "error [" << e.module() << "/" << optexec::to_string(e.code()) << "]: " << e.what();
    if (e.index()) std::cerr << " (index " << *e.index() << ")";
    std::cerr << '\n';
    return e.code() == optexec::ErrorCode::ConfigError ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
