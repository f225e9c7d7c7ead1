#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <string>

#include "ratelqr/experiments.hpp"

namespace {

struct CliArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::uint64_t replications = 0;
  unsigned threads = 1;
  bool seed_set = false;
  bool replications_set = false;
  bool out_set = false;
};

void add_common_options(CLI::App& sub, CliArgs& args) {
  sub.add_option("--config", args.config, "experiment config (JSON)")
      ->required();
  sub.add_option("--out", args.out, "output directory (overrides the config)")
      ->each([&](const std::string&) { args.out_set = true; });
  sub.add_option("--seed", args.seed, "master seed (overrides the config)")
      ->each([&](const std::string&) { args.seed_set = true; });
  sub.add_option("--replications", args.replications,
                 "Monte Carlo replications (overrides the config)")
      ->each([&](const std::string&) { args.replications_set = true; });
  sub.add_option("--threads", args.threads,
                 "worker threads; results do not depend on this")
      ->check(CLI::Range(1u, 256u));
}

ratelqr::RunOverrides to_overrides(const CliArgs& args) {
  ratelqr::RunOverrides overrides;
  if (args.seed_set) overrides.master_seed = args.seed;
  if (args.replications_set)
    overrides.replications = static_cast<std::size_t>(args.replications);
  if (args.out_set) overrides.output_dir = args.out;
  overrides.threads = args.threads;
  return overrides;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rate allocation for quantized scalar LQR loops"};
  app.set_version_flag("--version",
                       std::string("ratelqr ") + ratelqr::kToolVersion);
  app.require_subcommand(1);

  CliArgs args;
  CLI::App* cost_sweep = app.add_subcommand(
      "cost-sweep", "sweep the dynamics parameter and compare allocations");
  CLI::App* rate_profile = app.add_subcommand(
      "rate-profile", "emit closed-form per-stage rates");
  CLI::App* time_variant = app.add_subcommand(
      "time-variant", "closed form vs grid search on a dynamics jump");
  CLI::App* validate = app.add_subcommand(
      "validate", "run pipeline self-checks and write a report");
  for (CLI::App* sub : {cost_sweep, rate_profile, time_variant, validate})
    add_common_options(*sub, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // CLI11 returns 0 for --help/--version; anything else is bad usage.
    return code == 0 ? 0 : 2;
  }

  try {
    const ratelqr::ExperimentConfig cfg = ratelqr::load_config(args.config);
    const ratelqr::RunOverrides overrides = to_overrides(args);
    if (cost_sweep->parsed()) {
      std::cout << ratelqr::run_invariant_cost_sweep(cfg, overrides).string()
                << '\n';
    } else if (rate_profile->parsed()) {
      std::cout << ratelqr::run_rate_profile(cfg, overrides).string() << '\n';
    } else if (time_variant->parsed()) {
      std::cout << ratelqr::run_time_variant(cfg, overrides).string() << '\n';
    } else if (validate->parsed()) {
      const bool ok = ratelqr::run_validation(cfg, overrides);
      std::cout << "validation " << (ok ? "passed" : "FAILED") << '\n';
      if (!ok) return 1;
    }
  } catch (const ratelqr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ratelqr::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
