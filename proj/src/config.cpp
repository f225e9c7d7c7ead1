#include "ratelqr/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace ratelqr {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void require_keys(const json& obj, const char* where,
                  std::initializer_list<std::string_view> allowed) {
  for (const auto& item : obj.items()) {
    const bool known =
        std::any_of(allowed.begin(), allowed.end(),
                    [&](std::string_view k) { return k == item.key(); });
    if (!known)
      fail("unknown key '" + item.key() + "' in " + where);
  }
}

const json& member(const json& obj, const char* where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end())
    fail(std::string(where) + ": missing key '" + key + "'");
  return *it;
}

double number(const json& obj, const char* where, const char* key) {
  const json& v = member(obj, where, key);
  if (!v.is_number())
    fail(std::string(where) + ": '" + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t unsigned_number(const json& obj, const char* where,
                              const char* key) {
  const json& v = member(obj, where, key);
  if (!v.is_number_unsigned())
    fail(std::string(where) + ": '" + key +
         "' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

void parse_system(const json& sys, ExperimentConfig& cfg) {
  require_keys(sys, "system",
               {"a", "a_seq", "jump", "b", "q", "d", "x0", "horizon",
                "sigma_z2", "c2", "terminal_weight"});
  SystemSpec spec;
  spec.horizon =
      static_cast<std::size_t>(unsigned_number(sys, "system", "horizon"));
  if (spec.horizon < 1) fail("system: horizon must be >= 1");

  const int forms = static_cast<int>(sys.contains("a")) +
                    static_cast<int>(sys.contains("a_seq")) +
                    static_cast<int>(sys.contains("jump"));
  if (forms != 1) fail("system: provide exactly one of 'a', 'a_seq', 'jump'");

  if (sys.contains("a")) {
    spec.a_seq.assign(spec.horizon, number(sys, "system", "a"));
  } else if (sys.contains("a_seq")) {
    const json& arr = sys.at("a_seq");
    if (!arr.is_array()) fail("system: 'a_seq' must be an array");
    for (const json& v : arr) {
      if (!v.is_number()) fail("system: 'a_seq' entries must be numbers");
      spec.a_seq.push_back(v.get<double>());
    }
    if (spec.a_seq.size() != spec.horizon)
      fail("system: 'a_seq' length must equal horizon");
  } else {
    const json& j = sys.at("jump");
    if (!j.is_object()) fail("system: 'jump' must be an object");
    require_keys(j, "system.jump", {"t_jump", "a1", "a2"});
    JumpSpec jump;
    jump.t_jump = static_cast<std::size_t>(
        unsigned_number(j, "system.jump", "t_jump"));
    jump.a1 = number(j, "system.jump", "a1");
    jump.a2 = number(j, "system.jump", "a2");
    if (jump.t_jump >= spec.horizon)
      fail("system.jump: t_jump must be < horizon");
    spec.a_seq.assign(spec.horizon, jump.a1);
    for (std::size_t t = jump.t_jump; t < spec.horizon; ++t)
      spec.a_seq[t] = jump.a2;
    cfg.jump = jump;
  }

  spec.b = number(sys, "system", "b");
  spec.q = number(sys, "system", "q");
  spec.d = number(sys, "system", "d");
  spec.x0 = number(sys, "system", "x0");
  spec.sigma_z2 = number(sys, "system", "sigma_z2");
  spec.c2 = number(sys, "system", "c2");
  spec.terminal_weight = sys.contains("terminal_weight")
                             ? number(sys, "system", "terminal_weight")
                             : spec.q;
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  cfg.system = std::move(spec);
}

void parse_modes(const json& arr, ExperimentConfig& cfg) {
  if (!arr.is_array() || arr.empty())
    fail("allocation_modes must be a non-empty array");
  for (const json& v : arr) {
    if (!v.is_string()) fail("allocation_modes entries must be strings");
    const std::string s = v.get<std::string>();
    AllocationMode mode;
    if (s == "optimal")
      mode = AllocationMode::optimal;
    else if (s == "uniform")
      mode = AllocationMode::uniform;
    else if (s == "exhaustive")
      mode = AllocationMode::exhaustive;
    else
      fail("allocation_modes: unknown mode '" + s + "'");
    if (std::find(cfg.modes.begin(), cfg.modes.end(), mode) != cfg.modes.end())
      fail("allocation_modes: duplicate mode '" + s + "'");
    cfg.modes.push_back(mode);
  }
}

void parse_sweep(const json& obj, ExperimentConfig& cfg) {
  if (!obj.is_object()) fail("sweep must be an object");
  require_keys(obj, "sweep", {"parameter", "from", "to", "step"});
  const json& p = member(obj, "sweep", "parameter");
  if (!p.is_string() || p.get<std::string>() != "A")
    fail("sweep: only parameter \"A\" is supported");
  SweepSpec sweep;
  sweep.parameter = "A";
  sweep.from = number(obj, "sweep", "from");
  sweep.to = number(obj, "sweep", "to");
  sweep.step = number(obj, "sweep", "step");
  if (!(sweep.step > 0.0)) fail("sweep: step must be > 0");
  if (!(sweep.from <= sweep.to)) fail("sweep: from must be <= to");
  cfg.sweep = sweep;
}

}  // namespace

const char* mode_name(AllocationMode mode) {
  switch (mode) {
    case AllocationMode::optimal: return "optimal";
    case AllocationMode::uniform: return "uniform";
    case AllocationMode::exhaustive: return "exhaustive";
  }
  return "unknown";
}

std::vector<double> sweep_values(const SweepSpec& sweep) {
  std::vector<double> values;
  const double slack = sweep.step * 1e-9;
  for (std::size_t k = 0;; ++k) {
    const double v = sweep.from + sweep.step * static_cast<double>(k);
    if (v > sweep.to + slack) break;
    values.push_back(std::min(v, sweep.to));
  }
  return values;
}

bool has_mode(const ExperimentConfig& cfg, AllocationMode mode) {
  return std::find(cfg.modes.begin(), cfg.modes.end(), mode) !=
         cfg.modes.end();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("top-level config must be an object");
  require_keys(root, "config",
               {"schema_version", "system", "budget", "allocation_modes",
                "sweep", "mc", "grid_step", "enumeration_cap",
                "exhaustive_horizon_cap", "output_dir"});

  const std::uint64_t version =
      unsigned_number(root, "config", "schema_version");
  if (version != kSchemaVersion)
    fail("unsupported schema_version " + std::to_string(version));

  ExperimentConfig cfg;
  const json& sys = member(root, "config", "system");
  if (!sys.is_object()) fail("system must be an object");
  parse_system(sys, cfg);

  cfg.budget = number(root, "config", "budget");
  if (!(cfg.budget >= 0.0)) fail("budget must be >= 0");

  parse_modes(member(root, "config", "allocation_modes"), cfg);
  if (root.contains("sweep")) parse_sweep(root.at("sweep"), cfg);

  const json& mc = member(root, "config", "mc");
  if (!mc.is_object()) fail("mc must be an object");
  require_keys(mc, "mc", {"replications", "master_seed"});
  cfg.mc.replications =
      static_cast<std::size_t>(unsigned_number(mc, "mc", "replications"));
  if (cfg.mc.replications < 1) fail("mc: replications must be >= 1");
  cfg.mc.master_seed = unsigned_number(mc, "mc", "master_seed");

  if (root.contains("grid_step")) {
    cfg.grid_step = number(root, "config", "grid_step");
    if (!(cfg.grid_step > 0.0)) fail("grid_step must be > 0");
  }
  if (root.contains("enumeration_cap")) {
    cfg.enumeration_cap = unsigned_number(root, "config", "enumeration_cap");
    if (cfg.enumeration_cap < 1) fail("enumeration_cap must be >= 1");
  }
  if (root.contains("exhaustive_horizon_cap")) {
    cfg.exhaustive_horizon_cap = static_cast<std::size_t>(
        unsigned_number(root, "config", "exhaustive_horizon_cap"));
    if (cfg.exhaustive_horizon_cap < 1)
      fail("exhaustive_horizon_cap must be >= 1");
  }
  if (root.contains("output_dir")) {
    const json& v = root.at("output_dir");
    if (!v.is_string()) fail("output_dir must be a string");
    cfg.output_dir = v.get<std::string>();
  }

  if (has_mode(cfg, AllocationMode::exhaustive) &&
      cfg.system.horizon > cfg.exhaustive_horizon_cap)
    fail("exhaustive mode requires horizon <= exhaustive_horizon_cap (" +
         std::to_string(cfg.exhaustive_horizon_cap) + ")");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  ExperimentConfig cfg = parse_config(text);
  cfg.config_hash = fnv1a64(text);
  cfg.source_path = path;
  return cfg;
}

}  // namespace ratelqr
