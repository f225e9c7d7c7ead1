#include "ratelqr/allocate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ratelqr/summation.hpp"

namespace ratelqr {

namespace {

void check_coefficients(const CostCoefficients& coeffs, const char* where) {
  if (coeffs.a.empty())
    throw std::invalid_argument(std::string(where) + ": empty coefficients");
  for (double a : coeffs.a)
    if (!(a >= 0.0))
      throw std::invalid_argument(std::string(where) +
                                  ": coefficients must be >= 0");
  if (coeffs.a.back() != 0.0)
    throw std::invalid_argument(std::string(where) +
                                ": trailing coefficient must be 0");
}

void check_budget(double budget, const char* where) {
  if (!(budget >= 0.0))
    throw std::invalid_argument(std::string(where) + ": budget must be >= 0");
}

std::vector<std::size_t> support(const CostCoefficients& coeffs) {
  std::vector<std::size_t> active;
  for (std::size_t t = 0; t < coeffs.a.size(); ++t)
    if (coeffs.a[t] > 0.0) active.push_back(t);
  return active;
}

// Stationary point of sum a[i] 2^(-2 r_i) subject to sum r_i = budget over
// the given index set: r_i = 0.5 (log2 a[i] - mean log2 a) + budget / |set|.
void solve_on(const std::vector<std::size_t>& active,
              const std::vector<double>& a, double budget,
              std::vector<double>& r) {
  KahanSum acc;
  for (std::size_t i : active) acc.add(std::log2(a[i]));
  const double mean_log = acc.value() / static_cast<double>(active.size());
  const double share = budget / static_cast<double>(active.size());
  for (std::size_t i : active)
    r[i] = 0.5 * (std::log2(a[i]) - mean_log) + share;
}

}  // namespace

void validate(const RateAllocation& alloc) {
  if (alloc.r.empty())
    throw std::invalid_argument("RateAllocation: empty rate vector");
  if (!(alloc.budget >= 0.0))
    throw std::invalid_argument("RateAllocation: budget must be >= 0");
  KahanSum total;
  for (double r : alloc.r) {
    if (!(r >= 0.0))
      throw std::invalid_argument("RateAllocation: rates must be >= 0");
    total.add(r);
  }
  if (alloc.r.back() != 0.0)
    throw std::invalid_argument("RateAllocation: terminal rate must be 0");
  if (total.value() > alloc.budget + 1e-9)
    throw std::invalid_argument("RateAllocation: rates exceed budget");
}

CostCoefficients cost_coefficients(const SystemSpec& spec,
                                   const GainSchedule& gains,
                                   const DeviationGainTable& table) {
  validate(spec);
  if (gains.f_seq.size() != spec.horizon + 1)
    throw std::invalid_argument(
        "cost_coefficients: gain schedule length mismatch");
  if (table.horizon() != spec.horizon)
    throw std::invalid_argument("cost_coefficients: table horizon mismatch");
  CostCoefficients coeffs;
  coeffs.a.assign(spec.horizon + 1, 0.0);
  for (std::size_t m = 0; m < spec.horizon; ++m) {
    KahanSum acc;
    const double f_m = gains.f_seq[m];
    acc.add(f_m * f_m * spec.d);
    for (std::size_t t = m + 1; t < spec.horizon; ++t) {
      const double f_t = gains.f_seq[t];
      const double g = table.at(t, m);
      acc.add((spec.q + f_t * f_t * spec.d) * g * g);
    }
    coeffs.a[m] = spec.c2 * acc.value();
  }
  return coeffs;
}

double expected_gap(const CostCoefficients& coeffs,
                    std::span<const double> rates) {
  check_coefficients(coeffs, "expected_gap");
  if (rates.size() + 1 < coeffs.a.size())
    throw std::invalid_argument("expected_gap: rates shorter than horizon");
  KahanSum acc;
  for (std::size_t t = 0; t + 1 < coeffs.a.size(); ++t)
    acc.add(coeffs.a[t] * std::exp2(-2.0 * rates[t]));
  return acc.value();
}

double expected_gap(const CostCoefficients& coeffs,
                    const RateAllocation& alloc) {
  return expected_gap(coeffs, std::span<const double>(alloc.r));
}

RateAllocation unconstrained_allocation(const CostCoefficients& coeffs,
                                        double budget) {
  check_coefficients(coeffs, "unconstrained_allocation");
  check_budget(budget, "unconstrained_allocation");
  RateAllocation alloc;
  alloc.r.assign(coeffs.a.size(), 0.0);
  alloc.budget = budget;
  const std::vector<std::size_t> active = support(coeffs);
  if (!active.empty()) solve_on(active, coeffs.a, budget, alloc.r);
  return alloc;
}

RateAllocation closed_form_allocation(const CostCoefficients& coeffs,
                                      double budget) {
  check_coefficients(coeffs, "closed_form_allocation");
  check_budget(budget, "closed_form_allocation");
  RateAllocation alloc;
  alloc.r.assign(coeffs.a.size(), 0.0);
  alloc.budget = budget;
  std::vector<std::size_t> active = support(coeffs);
  // Each pass solves on the current active set; stages pinned at the
  // nonnegativity boundary drop out and the rest re-solve. The active set
  // shrinks strictly, so this ends within |support| passes.
  while (!active.empty()) {
    solve_on(active, coeffs.a, budget, alloc.r);
    bool any_negative = false;
    std::vector<std::size_t> keep;
    for (std::size_t i : active) {
      if (alloc.r[i] < 0.0) any_negative = true;
      if (alloc.r[i] > 0.0) keep.push_back(i);
    }
    if (!any_negative) break;
    for (std::size_t i : active)
      if (alloc.r[i] <= 0.0) alloc.r[i] = 0.0;
    active = std::move(keep);
  }
  validate(alloc);
  return alloc;
}

RateAllocation exhaustive_allocation(const CostCoefficients& coeffs,
                                     double budget, double grid_step,
                                     std::uint64_t candidate_cap) {
  check_coefficients(coeffs, "exhaustive_allocation");
  check_budget(budget, "exhaustive_allocation");
  if (!(grid_step > 0.0))
    throw std::invalid_argument("exhaustive_allocation: grid_step must be > 0");
  if (candidate_cap < 1)
    throw std::invalid_argument(
        "exhaustive_allocation: candidate_cap must be >= 1");

  RateAllocation alloc;
  alloc.r.assign(coeffs.a.size(), 0.0);
  alloc.budget = budget;
  const std::vector<std::size_t> active = support(coeffs);
  if (active.empty()) return alloc;

  const std::size_t k = active.size();
  const auto units =
      static_cast<std::uint64_t>(std::floor(budget / grid_step + 1e-9));

  // C(units + k - 1, k - 1) compositions of the unit budget over k stages.
  long double count = 1.0L;
  for (std::size_t j = 1; j < k; ++j)
    count = count * static_cast<long double>(units + j) /
            static_cast<long double>(j);
  if (count > static_cast<long double>(candidate_cap))
    throw std::length_error(
        "exhaustive_allocation: candidate count exceeds candidate_cap");

  std::vector<double> pow2(units + 1);
  for (std::uint64_t j = 0; j <= units; ++j)
    pow2[j] = std::exp2(-2.0 * grid_step * static_cast<double>(j));

  std::vector<double> suffix(k + 1, 0.0);
  for (std::size_t i = k; i-- > 0;)
    suffix[i] = suffix[i + 1] + coeffs.a[active[i]];

  std::vector<std::uint64_t> assign(k, 0);
  std::vector<std::uint64_t> best_assign(k, 0);
  double best = std::numeric_limits<double>::infinity();

  // Depth-first over unit counts in descending order, so candidates appear
  // lexicographically decreasing and the first optimum found is the
  // earliest-stage-heavy one. Keeping only strict improvements preserves
  // that tie-break.
  auto search = [&](auto&& self, std::size_t i, std::uint64_t remaining,
                    double partial) -> void {
    if (i + 1 == k) {
      assign[i] = remaining;
      const double total = partial + coeffs.a[active[i]] * pow2[remaining];
      if (total < best) {
        best = total;
        best_assign = assign;
      }
      return;
    }
    // No completion can beat pricing every later stage at the full remainder.
    if (partial + suffix[i] * pow2[remaining] >= best) return;
    for (std::uint64_t give = remaining + 1; give-- > 0;) {
      assign[i] = give;
      self(self, i + 1, remaining - give,
           partial + coeffs.a[active[i]] * pow2[give]);
    }
  };
  search(search, 0, units, 0.0);

  for (std::size_t i = 0; i < k; ++i)
    alloc.r[active[i]] = grid_step * static_cast<double>(best_assign[i]);
  validate(alloc);
  return alloc;
}

RateAllocation uniform_allocation(double budget, std::size_t horizon) {
  if (horizon < 1)
    throw std::invalid_argument("uniform_allocation: horizon must be >= 1");
  check_budget(budget, "uniform_allocation");
  RateAllocation alloc;
  alloc.r.assign(horizon + 1, budget / static_cast<double>(horizon));
  alloc.r[horizon] = 0.0;
  alloc.budget = budget;
  return alloc;
}

double grid_resolution_bound(const CostCoefficients& coeffs,
                             double grid_step) {
  check_coefficients(coeffs, "grid_resolution_bound");
  if (!(grid_step > 0.0))
    throw std::invalid_argument("grid_resolution_bound: grid_step must be > 0");
  const double a_max = *std::max_element(coeffs.a.begin(), coeffs.a.end());
  return a_max * (1.0 - std::exp2(-2.0 * grid_step));
}

}  // namespace ratelqr
