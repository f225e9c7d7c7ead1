#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ratelqr/allocate.hpp"
#include "ratelqr/lqr.hpp"
#include "ratelqr/rng.hpp"

namespace ratelqr {

// One replication of the coupled loops: the perfect-information trajectory
// (x_p, u_p) and the quantized one (x_c, u_c) driven by the same process
// noise z. States have length T+1, the per-stage series length T.
struct TrajectoryPair {
  std::vector<double> x_p;
  std::vector<double> u_p;
  std::vector<double> x_c;
  std::vector<double> u_c;
  std::vector<double> n_c;  // quantization noise seen by the controller
  std::vector<double> z;    // shared process noise
};

TrajectoryPair simulate_pair(const SystemSpec& spec, const GainSchedule& gains,
                             const RateAllocation& alloc,
                             const ReplicationStream& stream);

// Per-stage-averaged cost estimates. j_gap is the paired mean of
// (j_c - j_p) per replication; j_rcost = j_gap / j_p with a delta-method
// standard error. analytic_gap is the predicted per-stage gap for the same
// allocation.
struct CostReport {
  double j_p = 0.0;
  double j_p_se = 0.0;
  double j_c = 0.0;
  double j_c_se = 0.0;
  double j_gap = 0.0;
  double j_gap_se = 0.0;
  double j_rcost = 0.0;
  double j_rcost_se = 0.0;
  double analytic_gap = 0.0;
  std::size_t replications = 0;
  std::uint64_t master_seed = 0;
};

// Runs paired replications r = 0..replications-1 seeded from master_seed.
// Thread count affects wall time only: replication r always consumes the
// streams keyed (master_seed, r) and reductions are pairwise over the
// index-ordered results, so the report is bit-identical for any threads.
CostReport estimate_costs(const SystemSpec& spec, const GainSchedule& gains,
                          const RateAllocation& alloc,
                          std::size_t replications, std::uint64_t master_seed,
                          unsigned threads = 1);

}  // namespace ratelqr
