#include "ratelqr/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "ratelqr/summation.hpp"

namespace ratelqr {

DeviationGainTable::DeviationGainTable(const SystemSpec& spec,
                                       const GainSchedule& gains)
    : horizon_(spec.horizon) {
  validate(spec);
  if (gains.f_seq.size() != spec.horizon + 1)
    throw std::invalid_argument(
        "DeviationGainTable: gain schedule length mismatch");
  rows_.resize(spec.horizon);
  for (std::size_t t = 0; t < spec.horizon; ++t) {
    rows_[t].resize(t + 1);
    const double bf = spec.b * gains.f_seq[t];
    // Noise injected at stage t enters the next state through B F_t alone;
    // older contributions propagate through the closed loop A_t + B F_t.
    rows_[t][t] = bf;
    const double closed_loop = spec.a_seq[t] + bf;
    for (std::size_t m = 0; m < t; ++m) rows_[t][m] = closed_loop * rows_[t - 1][m];
  }
}

double DeviationGainTable::at(std::size_t state, std::size_t stage) const {
  if (state < 1 || state > horizon_ || stage >= state)
    throw std::out_of_range("DeviationGainTable::at: index outside triangle");
  return rows_[state - 1][stage];
}

DeviationGainTable deviation_gains(const SystemSpec& spec,
                                   const GainSchedule& gains) {
  return DeviationGainTable(spec, gains);
}

DeviationVariances accumulated_variance(const DeviationGainTable& table,
                                        std::span<const double> rates,
                                        double c2) {
  if (!(c2 >= 0.0))
    throw std::invalid_argument("accumulated_variance: c2 must be >= 0");
  if (rates.size() < table.horizon())
    throw std::invalid_argument(
        "accumulated_variance: rates shorter than horizon");
  DeviationVariances out;
  out.sigma2.assign(table.horizon() + 1, 0.0);
  for (std::size_t state = 1; state <= table.horizon(); ++state) {
    KahanSum acc;
    for (std::size_t m = 0; m < state; ++m) {
      const double g = table.at(state, m);
      acc.add(g * g * std::exp2(-2.0 * rates[m]));
    }
    out.sigma2[state] = c2 * acc.value();
  }
  return out;
}

double compression_noise_stddev(double rate, double c2) {
  if (!(rate >= 0.0))
    throw std::invalid_argument("compression_noise_stddev: rate must be >= 0");
  if (!(c2 >= 0.0))
    throw std::invalid_argument("compression_noise_stddev: c2 must be >= 0");
  return std::sqrt(c2) * std::exp2(-rate);
}

double sample_compression_noise(double rate, double c2, SplitMix64& rng) {
  const double stddev = compression_noise_stddev(rate, c2);
  if (stddev == 0.0) return 0.0;
  return stddev * standard_normal(rng);
}

}  // namespace ratelqr
