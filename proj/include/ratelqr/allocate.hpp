#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ratelqr/noise.hpp"

namespace ratelqr {

// Weights of the excess-cost objective sum_t a[t] * 2^(-2 R_t). a has length
// T+1 with a[T] == 0; each a[t] >= 0.
struct CostCoefficients {
  std::vector<double> a;
};

// Bits per stage. r has length T+1 with r[T] == 0, every entry >= 0, and
// sum(r) <= budget + 1e-9.
struct RateAllocation {
  std::vector<double> r;
  double budget = 0.0;
};

void validate(const RateAllocation& alloc);

// a[m] = c2 * (F_m^2 D + sum_{t=m+1}^{T-1} (Q + F_t^2 D) at(t, m)^2).
// The sum runs over exactly the stages that carry cost, so
// sum_t a[t] 2^(-2 R_t) equals the expected total-cost gap between the
// quantized and noise-free loops for any gain schedule.
CostCoefficients cost_coefficients(const SystemSpec& spec,
                                   const GainSchedule& gains,
                                   const DeviationGainTable& table);

double expected_gap(const CostCoefficients& coeffs,
                    std::span<const double> rates);
double expected_gap(const CostCoefficients& coeffs,
                    const RateAllocation& alloc);

// Single-pass reverse water-filling solution on the support {t : a[t] > 0};
// entries may be negative. Stages outside the support get rate 0.
RateAllocation unconstrained_allocation(const CostCoefficients& coeffs,
                                        double budget);

// Water-filling with iterative removal of nonpositive rates. Active rates
// exhaust the budget and equalize a[t] * 2^(-2 R_t).
RateAllocation closed_form_allocation(const CostCoefficients& coeffs,
                                      double budget);

// Minimizes the gap over all grid_step-quantized allocations of the budget
// across the support. Ties break toward loading earlier stages. Throws
// std::length_error when the candidate count exceeds candidate_cap.
RateAllocation exhaustive_allocation(const CostCoefficients& coeffs,
                                     double budget, double grid_step,
                                     std::uint64_t candidate_cap = 100'000'000);

// budget / horizon at every stage 0..T-1.
RateAllocation uniform_allocation(double budget, std::size_t horizon);

// Worst-case gap excess of the best grid point over the continuous optimum:
// max_t a[t] * (1 - 2^(-2 grid_step)).
double grid_resolution_bound(const CostCoefficients& coeffs, double grid_step);

inline DeviationVariances accumulated_variance(const DeviationGainTable& table,
                                               const RateAllocation& alloc,
                                               double c2) {
  return accumulated_variance(table, std::span<const double>(alloc.r), c2);
}

}  // namespace ratelqr
