#include "ratelqr/lqr.hpp"

#include <stdexcept>

namespace ratelqr {

SystemSpec constant_system(double a, double b, double q, double d,
                           std::size_t horizon, double x0, double sigma_z2,
                           double c2, double terminal_weight) {
  SystemSpec spec;
  spec.a_seq.assign(horizon, a);
  spec.b = b;
  spec.q = q;
  spec.d = d;
  spec.horizon = horizon;
  spec.x0 = x0;
  spec.sigma_z2 = sigma_z2;
  spec.c2 = c2;
  spec.terminal_weight = terminal_weight;
  validate(spec);
  return spec;
}

void validate(const SystemSpec& spec) {
  // Negated comparisons so NaN fails every check.
  if (!(spec.q > 0.0)) throw std::invalid_argument("SystemSpec: q must be > 0");
  if (!(spec.d > 0.0)) throw std::invalid_argument("SystemSpec: d must be > 0");
  if (spec.horizon < 1)
    throw std::invalid_argument("SystemSpec: horizon must be >= 1");
  if (spec.a_seq.size() != spec.horizon)
    throw std::invalid_argument("SystemSpec: a_seq length must equal horizon");
  for (double a : spec.a_seq)
    if (!(a == a))
      throw std::invalid_argument("SystemSpec: a_seq must be finite");
  if (!(spec.b == spec.b))
    throw std::invalid_argument("SystemSpec: b must be finite");
  if (!(spec.x0 == spec.x0))
    throw std::invalid_argument("SystemSpec: x0 must be finite");
  if (!(spec.sigma_z2 >= 0.0))
    throw std::invalid_argument("SystemSpec: sigma_z2 must be >= 0");
  if (!(spec.c2 >= 0.0))
    throw std::invalid_argument("SystemSpec: c2 must be >= 0");
  if (!(spec.terminal_weight >= 0.0))
    throw std::invalid_argument("SystemSpec: terminal_weight must be >= 0");
}

GainSchedule constant_gains(double f, std::size_t horizon) {
  if (horizon < 1)
    throw std::invalid_argument("constant_gains: horizon must be >= 1");
  GainSchedule gains;
  gains.f_seq.assign(horizon + 1, f);
  gains.f_seq[horizon] = 0.0;
  return gains;
}

std::vector<double> riccati_sequence(const SystemSpec& spec) {
  validate(spec);
  std::vector<double> p(spec.horizon + 1, 0.0);
  p[spec.horizon] = spec.terminal_weight;
  for (std::size_t t = spec.horizon; t-- > 0;) {
    const double a = spec.a_seq[t];
    const double denom = spec.d + spec.b * spec.b * p[t + 1];
    const double cross = a * spec.b * p[t + 1];
    p[t] = spec.q + a * a * p[t + 1] - cross * cross / denom;
  }
  return p;
}

GainSchedule synthesize_gains(const SystemSpec& spec) {
  const std::vector<double> p = riccati_sequence(spec);
  GainSchedule gains;
  gains.f_seq.assign(spec.horizon + 1, 0.0);
  for (std::size_t t = 0; t < spec.horizon; ++t) {
    const double denom = spec.d + spec.b * spec.b * p[t + 1];
    gains.f_seq[t] = -(spec.a_seq[t] * spec.b * p[t + 1]) / denom;
  }
  return gains;
}

double stage_cost(double x, double u, const SystemSpec& spec) {
  return spec.q * x * x + spec.d * u * u;
}

StepResult step_perfect(double x, std::size_t t, double z,
                        const SystemSpec& spec, const GainSchedule& gains) {
  if (t >= spec.horizon)
    throw std::out_of_range("step_perfect: stage index past horizon");
  if (gains.f_seq.size() != spec.horizon + 1)
    throw std::invalid_argument("step_perfect: gain schedule length mismatch");
  const double u = gains.f_seq[t] * x;
  return {spec.a_seq[t] * x + spec.b * u + z, u};
}

}  // namespace ratelqr
