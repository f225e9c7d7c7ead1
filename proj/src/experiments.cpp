#include "ratelqr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <vector>

#include "ratelqr/allocate.hpp"
#include "ratelqr/csv.hpp"
#include "ratelqr/mc.hpp"
#include "ratelqr/noise.hpp"
#include "ratelqr/summation.hpp"

namespace ratelqr {

namespace {

struct Effective {
  std::size_t replications;
  std::uint64_t master_seed;
  std::filesystem::path out_dir;
  unsigned threads;
};

Effective effective(const ExperimentConfig& cfg, const RunOverrides& o) {
  Effective e;
  e.replications = o.replications.value_or(cfg.mc.replications);
  e.master_seed = o.master_seed.value_or(cfg.mc.master_seed);
  e.out_dir = o.output_dir.value_or(cfg.output_dir);
  e.threads = std::max(o.threads, 1u);
  if (e.replications < 1) throw ConfigError("replications must be >= 1");
  return e;
}

void write_manifest(const ExperimentConfig& cfg, const Effective& e,
                    const char* subcommand) {
  std::ofstream out(e.out_dir / "manifest.txt", std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " +
                             (e.out_dir / "manifest.txt").string());
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(cfg.config_hash));
  out << "tool: ratelqr " << kToolVersion << '\n'
      << "schema_version: " << kSchemaVersion << '\n'
      << "subcommand: " << subcommand << '\n'
      << "config: "
      << (cfg.source_path.empty() ? "(inline)" : cfg.source_path.string())
      << '\n'
      << "config_fnv1a64: " << hash << '\n'
      << "master_seed: " << e.master_seed << '\n'
      << "replications: " << e.replications << '\n'
      << "threads: " << e.threads << '\n';
}

void require_modes(const ExperimentConfig& cfg,
                   std::initializer_list<AllocationMode> needed,
                   const char* subcommand) {
  for (AllocationMode mode : needed)
    if (!has_mode(cfg, mode))
      throw ConfigError(std::string(subcommand) +
                        " requires allocation mode '" + mode_name(mode) + "'");
}

SystemSpec with_constant_a(const SystemSpec& base, double a) {
  SystemSpec spec = base;
  spec.a_seq.assign(spec.horizon, a);
  return spec;
}

// Dynamics values a run covers: the sweep if present, otherwise the single
// constant of the configured system.
std::vector<double> dynamics_values(const ExperimentConfig& cfg,
                                    const char* subcommand) {
  if (cfg.sweep) return sweep_values(*cfg.sweep);
  const std::vector<double>& a_seq = cfg.system.a_seq;
  const bool constant =
      std::all_of(a_seq.begin(), a_seq.end(),
                  [&](double a) { return a == a_seq.front(); });
  if (!constant)
    throw ConfigError(std::string(subcommand) +
                      " requires a sweep block or a constant-a system");
  return {a_seq.front()};
}

long double composition_count(std::uint64_t units, std::size_t k) {
  if (k == 0) return 1.0L;
  long double count = 1.0L;
  for (std::size_t j = 1; j < k; ++j)
    count = count * static_cast<long double>(units + j) /
            static_cast<long double>(j);
  return count;
}

}  // namespace

std::filesystem::path run_invariant_cost_sweep(const ExperimentConfig& cfg,
                                               const RunOverrides& overrides) {
  if (!cfg.sweep) throw ConfigError("cost-sweep requires a sweep block");
  require_modes(cfg, {AllocationMode::optimal, AllocationMode::uniform},
                "cost-sweep");
  const Effective e = effective(cfg, overrides);
  std::filesystem::create_directories(e.out_dir);
  const std::filesystem::path csv_path = e.out_dir / "cost-sweep.csv";
  CsvWriter csv(csv_path);
  csv.comment("per-stage-averaged Monte Carlo costs under common random numbers");
  csv.comment("opt = closed-form rate allocation, unif = budget/T at every stage");
  csv.row({"a", "budget", "replications",
           "j_p", "j_p_se",
           "j_c_opt", "j_c_opt_se", "j_gap_opt", "j_gap_opt_se",
           "j_rcost_opt", "j_rcost_opt_se", "analytic_gap_opt",
           "j_c_unif", "j_c_unif_se", "j_gap_unif", "j_gap_unif_se",
           "j_rcost_unif", "j_rcost_unif_se", "analytic_gap_unif"});
  csv.flush();

  for (double a : sweep_values(*cfg.sweep)) {
    const SystemSpec spec = with_constant_a(cfg.system, a);
    const GainSchedule gains = synthesize_gains(spec);
    const CostCoefficients coeffs =
        cost_coefficients(spec, gains, deviation_gains(spec, gains));
    const RateAllocation opt = closed_form_allocation(coeffs, cfg.budget);
    const RateAllocation unif = uniform_allocation(cfg.budget, spec.horizon);
    const CostReport rep_opt =
        estimate_costs(spec, gains, opt, e.replications, e.master_seed,
                       e.threads);
    const CostReport rep_unif =
        estimate_costs(spec, gains, unif, e.replications, e.master_seed,
                       e.threads);
    csv.row({csv_double(a), csv_double(cfg.budget),
             csv_unsigned(e.replications),
             csv_double(rep_opt.j_p), csv_double(rep_opt.j_p_se),
             csv_double(rep_opt.j_c), csv_double(rep_opt.j_c_se),
             csv_double(rep_opt.j_gap), csv_double(rep_opt.j_gap_se),
             csv_double(rep_opt.j_rcost), csv_double(rep_opt.j_rcost_se),
             csv_double(rep_opt.analytic_gap),
             csv_double(rep_unif.j_c), csv_double(rep_unif.j_c_se),
             csv_double(rep_unif.j_gap), csv_double(rep_unif.j_gap_se),
             csv_double(rep_unif.j_rcost), csv_double(rep_unif.j_rcost_se),
             csv_double(rep_unif.analytic_gap)});
    csv.flush();
  }
  write_manifest(cfg, e, "cost-sweep");
  return csv_path;
}

std::filesystem::path run_rate_profile(const ExperimentConfig& cfg,
                                       const RunOverrides& overrides) {
  require_modes(cfg, {AllocationMode::optimal}, "rate-profile");
  const Effective e = effective(cfg, overrides);
  std::filesystem::create_directories(e.out_dir);
  const std::filesystem::path csv_path = e.out_dir / "rate-profile.csv";
  CsvWriter csv(csv_path);
  csv.comment("closed-form rate allocation per stage");
  csv.row({"a", "b", "t", "rate"});
  csv.flush();

  for (double a : dynamics_values(cfg, "rate-profile")) {
    const SystemSpec spec = with_constant_a(cfg.system, a);
    const GainSchedule gains = synthesize_gains(spec);
    const CostCoefficients coeffs =
        cost_coefficients(spec, gains, deviation_gains(spec, gains));
    const RateAllocation alloc = closed_form_allocation(coeffs, cfg.budget);
    for (std::size_t t = 0; t < spec.horizon; ++t)
      csv.row({csv_double(a), csv_double(spec.b), csv_unsigned(t),
               csv_double(alloc.r[t])});
    csv.flush();
  }
  write_manifest(cfg, e, "rate-profile");
  return csv_path;
}

std::filesystem::path run_time_variant(const ExperimentConfig& cfg,
                                       const RunOverrides& overrides) {
  if (!cfg.jump)
    throw ConfigError("time-variant requires the jump system form");
  require_modes(cfg, {AllocationMode::optimal, AllocationMode::exhaustive},
                "time-variant");
  const Effective e = effective(cfg, overrides);
  std::filesystem::create_directories(e.out_dir);

  const SystemSpec& spec = cfg.system;
  const GainSchedule gains = synthesize_gains(spec);
  const CostCoefficients coeffs =
      cost_coefficients(spec, gains, deviation_gains(spec, gains));
  const RateAllocation opt = closed_form_allocation(coeffs, cfg.budget);
  const RateAllocation ex = exhaustive_allocation(
      coeffs, cfg.budget, cfg.grid_step, cfg.enumeration_cap);
  const double gap_opt = expected_gap(coeffs, opt);
  const double gap_ex = expected_gap(coeffs, ex);
  const double bound = grid_resolution_bound(coeffs, cfg.grid_step);
  if (gap_opt > gap_ex + bound + 1e-12)
    throw ValidationError(
        "time-variant: closed-form gap exceeds the grid optimum plus the "
        "resolution bound");

  const std::filesystem::path csv_path = e.out_dir / "time-variant.csv";
  CsvWriter csv(csv_path);
  csv.comment("closed-form vs grid-search rates for a dynamics jump");
  csv.row({"a1", "a2", "t_jump", "budget", "t", "rate_optimal",
           "rate_exhaustive", "gap_optimal", "gap_exhaustive", "grid_bound"});
  for (std::size_t t = 0; t < spec.horizon; ++t)
    csv.row({csv_double(cfg.jump->a1), csv_double(cfg.jump->a2),
             csv_unsigned(cfg.jump->t_jump), csv_double(cfg.budget),
             csv_unsigned(t), csv_double(opt.r[t]), csv_double(ex.r[t]),
             csv_double(gap_opt), csv_double(gap_ex), csv_double(bound)});
  csv.flush();
  write_manifest(cfg, e, "time-variant");
  return csv_path;
}

bool run_validation(const ExperimentConfig& cfg, const RunOverrides& overrides,
                    const ValidationInjection& injection) {
  const Effective e = effective(cfg, overrides);
  std::filesystem::create_directories(e.out_dir);
  CsvWriter csv(e.out_dir / "validate.csv");
  csv.comment("pipeline self-checks; measured must stay within tolerance");
  csv.row({"check", "measured", "tolerance", "status"});

  bool all_pass = true;
  const auto record = [&](const char* name, double measured,
                          double tolerance) {
    const bool pass = measured <= tolerance;
    all_pass = all_pass && pass;
    csv.row({name, csv_double(measured), csv_double(tolerance),
             pass ? "pass" : "fail"});
    csv.flush();
  };

  const SystemSpec& spec = cfg.system;
  GainSchedule gains = synthesize_gains(spec);
  if (injection.corrupt_terminal_gain) gains.f_seq[spec.horizon] = 0.25;

  record("terminal_gain_zero", std::abs(gains.f_seq[spec.horizon]), 0.0);

  // Riccati values never drop below the state weight before the terminal
  // stage, and the seed itself stays nonnegative.
  {
    const std::vector<double> p = riccati_sequence(spec);
    double violation = std::max(0.0, -p[spec.horizon]);
    for (std::size_t t = 0; t < spec.horizon; ++t)
      violation = std::max(violation, spec.q - p[t]);
    record("riccati_floor", violation, 1e-12);
  }

  const DeviationGainTable table = deviation_gains(spec, gains);

  // Recurrence-built table against the direct closed-loop product.
  {
    double worst = 0.0;
    for (std::size_t m = 0; m < spec.horizon; ++m) {
      double g = spec.b * gains.f_seq[m];
      for (std::size_t state = m + 1; state <= spec.horizon; ++state) {
        if (state > m + 1)
          g *= spec.a_seq[state - 1] + spec.b * gains.f_seq[state - 1];
        worst = std::max(worst, std::abs(table.at(state, m) - g) /
                                    (1.0 + std::abs(g)));
      }
    }
    record("deviation_gain_product", worst, 1e-12);
  }

  const CostCoefficients coeffs = cost_coefficients(spec, gains, table);
  const RateAllocation opt = closed_form_allocation(coeffs, cfg.budget);

  // Simulated trajectory deviations against the table-predicted ones.
  {
    double worst = 0.0;
    for (std::uint64_t r = 0; r < 32; ++r) {
      const TrajectoryPair traj = simulate_pair(
          spec, gains, opt, ReplicationStream(e.master_seed, r));
      for (std::size_t t = 1; t <= spec.horizon; ++t) {
        KahanSum predicted;
        for (std::size_t m = 0; m < t; ++m)
          predicted.add(table.at(t, m) * traj.n_c[m]);
        const double actual = traj.x_c[t] - traj.x_p[t];
        worst = std::max(worst, std::abs(actual - predicted.value()) /
                                    (1.0 + std::abs(traj.x_c[t])));
      }
    }
    record("path_deviation_identity", worst, 1e-9);
  }

  // Active rates exhaust the budget.
  {
    KahanSum total;
    bool any_active = false;
    for (double r : opt.r) total.add(r);
    for (double a : coeffs.a) any_active = any_active || a > 0.0;
    const double measured =
        any_active ? std::abs(total.value() - cfg.budget) : 0.0;
    record("rate_budget", measured, 1e-9);
  }

  // Marginal gap contributions a_t 2^(-2 R_t) equalize across stages with
  // positive rates.
  {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t t = 0; t < opt.r.size(); ++t) {
      if (opt.r[t] > 0.0) {
        const double level = coeffs.a[t] * std::exp2(-2.0 * opt.r[t]);
        lo = std::min(lo, level);
        hi = std::max(hi, level);
      }
    }
    record("kkt_equalization", hi > 0.0 ? (hi - lo) / hi : 0.0, 1e-9);
  }

  // Closed form dominates the grid search up to the resolution bound. The
  // step doubles until the enumeration is small enough to run everywhere.
  {
    std::size_t k = 0;
    for (double a : coeffs.a) k += a > 0.0;
    double step = cfg.grid_step;
    auto units = [&](double s) {
      return static_cast<std::uint64_t>(std::floor(cfg.budget / s + 1e-9));
    };
    while (composition_count(units(step), k) > 2e6L) step *= 2.0;
    const RateAllocation ex =
        exhaustive_allocation(coeffs, cfg.budget, step, cfg.enumeration_cap);
    const double excess = expected_gap(coeffs, opt) -
                          expected_gap(coeffs, ex) -
                          grid_resolution_bound(coeffs, step);
    record("grid_step_used", step, step);
    record("grid_dominance", std::max(0.0, excess), 1e-9);
  }

  // Monte Carlo total-cost gap against the analytic prediction.
  {
    const CostReport rep = estimate_costs(spec, gains, opt, e.replications,
                                          e.master_seed, e.threads);
    const double diff = std::abs(rep.j_gap - rep.analytic_gap);
    const double z =
        rep.j_gap_se > 0.0
            ? diff / rep.j_gap_se
            : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    record("mc_gap_match", z, 5.0);
  }

  write_manifest(cfg, e, "validate");
  return all_pass;
}

}  // namespace ratelqr
