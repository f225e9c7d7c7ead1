#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>

#include "ratelqr/config.hpp"

namespace ratelqr {

inline constexpr const char* kToolVersion = "0.1.0";

// A run whose own consistency checks fail throws this; bad inputs throw
// ConfigError instead.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Command-line knobs layered over the loaded config.
struct RunOverrides {
  std::optional<std::uint64_t> master_seed;
  std::optional<std::size_t> replications;
  std::optional<std::filesystem::path> output_dir;
  unsigned threads = 1;
};

// Test hook: plants a violated gain invariant so the failure path of the
// validation report stays exercised.
struct ValidationInjection {
  bool corrupt_terminal_gain = false;
};

// Each run writes <out>/<name>.csv plus <out>/manifest.txt and returns the
// CSV path. Outputs are byte-identical across reruns with the same config
// and overrides.

// Sweeps the dynamics parameter, comparing closed-form and uniform
// allocations under common random numbers.
std::filesystem::path run_invariant_cost_sweep(
    const ExperimentConfig& cfg, const RunOverrides& overrides = {});

// Emits the closed-form per-stage rates for each swept dynamics value.
std::filesystem::path run_rate_profile(const ExperimentConfig& cfg,
                                       const RunOverrides& overrides = {});

// Jump system: closed-form rates next to the grid-search optimum.
std::filesystem::path run_time_variant(const ExperimentConfig& cfg,
                                       const RunOverrides& overrides = {});

// Cross-checks the analytic pipeline against independent recomputation and
// simulation. Returns true when every check passes; the report is written
// either way.
bool run_validation(const ExperimentConfig& cfg,
                    const RunOverrides& overrides = {},
                    const ValidationInjection& injection = {});

}  // namespace ratelqr
