// stewsim: command-line driver for the equilibrium, policy, stewarding and platform
// experiments. Exit codes: 0 ok, 2 configuration error, 3 solver error.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "stew/errors.hpp"
#include "stew/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f, const std::string& default_out) {
  f.out = default_out;
  cmd->add_option("--config", f.config, "INI configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "override run.seed");
  cmd->add_option("--threads", f.threads, "override run.threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
}

stew::ExperimentConfig resolve(const CommonFlags& f) {
  stew::ExperimentConfig cfg = f.config.empty() ? stew::ExperimentConfig{} : stew::load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.threads) cfg.threads = *f.threads;
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"Rational-silence simulation toolkit"};
  app.require_subcommand(1);

  CommonFlags eq_flags, pol_flags, stew_flags, plat_flags;
  bool check_theorem = false;

  auto* eq = app.add_subcommand("equilibrium", "best-response curves and symmetric equilibria");
  add_common(eq, eq_flags, "out/equilibrium");
  eq->add_flag("--check-theorem", check_theorem, "also run the randomized silence-iff battery");

  auto* pol = app.add_subcommand("policy", "solve the signaling MDPs, write policies and heatmaps");
  add_common(pol, pol_flags, "out/policy");

  auto* st = app.add_subcommand("steward", "single-organization stewarding runs");
  add_common(st, stew_flags, "out/steward");

  auto* pl = app.add_subcommand("platform", "recommender platform runs and community statistics");
  add_common(pl, plat_flags, "out/platform");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (eq->parsed()) {
    const auto cfg = resolve(eq_flags);
    const auto report = stew::run_equilibrium(cfg, check_theorem);
    stew::write_equilibrium(report, cfg, eq_flags.out);
    fmt::print("equilibrium: {} v_bar points written to {}\n", cfg.equilibrium.v_steps, eq_flags.out);
    if (report.theorem) {
      fmt::print("silence-iff battery: {} trials, {} failures\n", cfg.equilibrium.check_trials,
                 report.theorem_failures);
    }
  } else if (pol->parsed()) {
    const auto cfg = resolve(pol_flags);
    const auto report = stew::run_policy(cfg);
    stew::write_policy(report, cfg, pol_flags.out);
    std::cout << report.summary.str();
  } else if (st->parsed()) {
    const auto cfg = resolve(stew_flags);
    const auto report = stew::run_steward(cfg);
    stew::write_steward(report, cfg, stew_flags.out);
    std::cout << report.orderings.str();
  } else if (pl->parsed()) {
    const auto cfg = resolve(plat_flags);
    const auto report = stew::run_platform_experiment(cfg);
    stew::write_platform(report, cfg, plat_flags.out);
    std::cout << report.summary.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const stew::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const stew::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
