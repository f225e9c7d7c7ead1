#include "ratelqr/mc.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "ratelqr/noise.hpp"
#include "ratelqr/summation.hpp"

namespace ratelqr {

TrajectoryPair simulate_pair(const SystemSpec& spec, const GainSchedule& gains,
                             const RateAllocation& alloc,
                             const ReplicationStream& stream) {
  validate(spec);
  const std::size_t t_end = spec.horizon;
  if (gains.f_seq.size() != t_end + 1)
    throw std::invalid_argument("simulate_pair: gain schedule length mismatch");
  if (alloc.r.size() < t_end)
    throw std::invalid_argument("simulate_pair: allocation shorter than horizon");

  const double sigma_z = std::sqrt(spec.sigma_z2);
  TrajectoryPair traj;
  traj.x_p.assign(t_end + 1, 0.0);
  traj.x_c.assign(t_end + 1, 0.0);
  traj.u_p.assign(t_end, 0.0);
  traj.u_c.assign(t_end, 0.0);
  traj.n_c.assign(t_end, 0.0);
  traj.z.assign(t_end, 0.0);
  traj.x_p[0] = spec.x0;
  traj.x_c[0] = spec.x0;

  for (std::size_t t = 0; t < t_end; ++t) {
    double n = 0.0;
    if (spec.c2 > 0.0) {
      SplitMix64 rng = stream.compression_noise(t);
      n = sample_compression_noise(alloc.r[t], spec.c2, rng);
    }
    double z = 0.0;
    if (sigma_z > 0.0) {
      SplitMix64 rng = stream.process_noise(t);
      z = sigma_z * standard_normal(rng);
    }
    const double f = gains.f_seq[t];
    traj.n_c[t] = n;
    traj.z[t] = z;
    traj.u_p[t] = f * traj.x_p[t];
    traj.u_c[t] = f * (traj.x_c[t] + n);
    traj.x_p[t + 1] = spec.a_seq[t] * traj.x_p[t] + spec.b * traj.u_p[t] + z;
    traj.x_c[t + 1] = spec.a_seq[t] * traj.x_c[t] + spec.b * traj.u_c[t] + z;
  }
  return traj;
}

namespace {

// Sample covariance with the means already known; n >= 2.
double covariance(const std::vector<double>& a, double mean_a,
                  const std::vector<double>& b, double mean_b) {
  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    prod[i] = (a[i] - mean_a) * (b[i] - mean_b);
  return pairwise_sum(prod) / static_cast<double>(a.size() - 1);
}

}  // namespace

CostReport estimate_costs(const SystemSpec& spec, const GainSchedule& gains,
                          const RateAllocation& alloc,
                          std::size_t replications, std::uint64_t master_seed,
                          unsigned threads) {
  if (replications < 1)
    throw std::invalid_argument("estimate_costs: replications must be >= 1");
  if (threads < 1) threads = 1;
  validate(spec);

  const std::size_t t_end = spec.horizon;
  std::vector<double> jp(replications);
  std::vector<double> jc(replications);

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const TrajectoryPair traj =
          simulate_pair(spec, gains, alloc, ReplicationStream(master_seed, r));
      double sum_p = 0.0;
      double sum_c = 0.0;
      for (std::size_t t = 0; t < t_end; ++t) {
        sum_p += stage_cost(traj.x_p[t], traj.u_p[t], spec);
        sum_c += stage_cost(traj.x_c[t], traj.u_c[t], spec);
      }
      jp[r] = sum_p / static_cast<double>(t_end);
      jc[r] = sum_c / static_cast<double>(t_end);
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(threads, replications);
  if (workers <= 1) {
    run_range(0, replications);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (replications + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(begin + chunk, replications);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (std::thread& t : pool) t.join();
  }

  const auto n = static_cast<double>(replications);
  CostReport report;
  report.replications = replications;
  report.master_seed = master_seed;
  report.j_p = pairwise_sum(jp) / n;
  report.j_c = pairwise_sum(jc) / n;

  std::vector<double> gap(replications);
  for (std::size_t r = 0; r < replications; ++r) gap[r] = jc[r] - jp[r];
  report.j_gap = pairwise_sum(gap) / n;

  if (replications >= 2) {
    const double var_p = covariance(jp, report.j_p, jp, report.j_p);
    const double var_c = covariance(jc, report.j_c, jc, report.j_c);
    const double var_g = covariance(gap, report.j_gap, gap, report.j_gap);
    const double cov_gp = covariance(gap, report.j_gap, jp, report.j_p);
    report.j_p_se = std::sqrt(var_p / n);
    report.j_c_se = std::sqrt(var_c / n);
    report.j_gap_se = std::sqrt(var_g / n);
    if (report.j_p != 0.0) {
      const double ratio = report.j_gap / report.j_p;
      const double var_ratio =
          (var_g - 2.0 * ratio * cov_gp + ratio * ratio * var_p) /
          (report.j_p * report.j_p * n);
      report.j_rcost = ratio;
      report.j_rcost_se = std::sqrt(std::max(var_ratio, 0.0));
    }
  } else if (report.j_p != 0.0) {
    report.j_rcost = report.j_gap / report.j_p;
  }

  report.analytic_gap =
      expected_gap(cost_coefficients(spec, gains, deviation_gains(spec, gains)),
                   alloc) /
      static_cast<double>(t_end);
  return report;
}

}  // namespace ratelqr
