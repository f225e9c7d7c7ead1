#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ratelqr/lqr.hpp"
#include "ratelqr/rng.hpp"

namespace ratelqr {

// Multipliers through which quantization noise injected at stage m reaches
// later states: x_c[t] - x_p[t] = sum_{m<t} at(t, m) * n_m. Lower-triangular,
// rows indexed by the state time 1..T, columns by the injection stage.
class DeviationGainTable {
 public:
  DeviationGainTable(const SystemSpec& spec, const GainSchedule& gains);

  // at(state, stage) requires 1 <= state <= horizon and stage < state.
  double at(std::size_t state, std::size_t stage) const;

  std::size_t horizon() const noexcept { return horizon_; }

 private:
  std::size_t horizon_;
  std::vector<std::vector<double>> rows_;  // rows_[t] holds at(t+1, 0..t)
};

DeviationGainTable deviation_gains(const SystemSpec& spec,
                                   const GainSchedule& gains);

// Var[x_c[t] - x_p[t]] for t = 0..T; sigma2[0] == 0.
struct DeviationVariances {
  std::vector<double> sigma2;
};

// rates must cover stages 0..horizon-1; entries past that are ignored.
DeviationVariances accumulated_variance(const DeviationGainTable& table,
                                        std::span<const double> rates,
                                        double c2);

double compression_noise_stddev(double rate, double c2);

// Draws n_t ~ N(0, c2 * 2^(-2 rate)). Zero variance consumes no randomness.
double sample_compression_noise(double rate, double c2, SplitMix64& rng);

}  // namespace ratelqr
