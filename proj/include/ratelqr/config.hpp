#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ratelqr/lqr.hpp"

namespace ratelqr {

inline constexpr std::uint64_t kSchemaVersion = 1;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class AllocationMode { optimal, uniform, exhaustive };

const char* mode_name(AllocationMode mode);

struct SweepSpec {
  std::string parameter;  // only "A" is supported
  double from = 0.0;
  double to = 0.0;
  double step = 1.0;
};

std::vector<double> sweep_values(const SweepSpec& sweep);

// A_t = a1 for t < t_jump, a2 from t_jump on.
struct JumpSpec {
  std::size_t t_jump = 0;
  double a1 = 0.0;
  double a2 = 0.0;
};

struct McSpec {
  std::size_t replications = 1;
  std::uint64_t master_seed = 0;
};

struct ExperimentConfig {
  SystemSpec system;
  std::optional<JumpSpec> jump;  // present when the system used the jump form
  double budget = 0.0;
  std::vector<AllocationMode> modes;
  std::optional<SweepSpec> sweep;
  McSpec mc;
  double grid_step = 0.05;
  std::uint64_t enumeration_cap = 100'000'000;
  std::size_t exhaustive_horizon_cap = 6;
  std::filesystem::path output_dir = "out";

  // Provenance recorded in the manifest; zero/empty when built in code.
  std::uint64_t config_hash = 0;
  std::filesystem::path source_path;
};

bool has_mode(const ExperimentConfig& cfg, AllocationMode mode);

std::uint64_t fnv1a64(std::string_view bytes);

// Both throw ConfigError on malformed input; unknown keys are rejected at
// every level.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace ratelqr
