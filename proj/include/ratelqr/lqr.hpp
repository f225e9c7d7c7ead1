#pragma once

#include <cstddef>
#include <vector>

namespace ratelqr {

// Scalar plant x_{t+1} = A_t x_t + B u_t + z_t controlled over t = 0..T-1
// with stage cost Q x_t^2 + D u_t^2. The controller acts on a state estimate
// corrupted by quantization noise of variance c2 * 2^(-2 R_t).
struct SystemSpec {
  std::vector<double> a_seq;      // A_t for t = 0..T-1
  double b = 1.0;
  double q = 1.0;
  double d = 1.0;
  std::size_t horizon = 1;        // T
  double x0 = 0.0;
  double sigma_z2 = 0.0;          // process noise variance
  double c2 = 0.0;                // quantizer constant, Var[n_t] = c2 * 2^(-2 R_t)
  double terminal_weight = 0.0;   // Riccati seed P_T
};

SystemSpec constant_system(double a, double b, double q, double d,
                           std::size_t horizon, double x0, double sigma_z2,
                           double c2, double terminal_weight);

// Throws std::invalid_argument on the first violated invariant.
void validate(const SystemSpec& spec);

// Certainty-equivalent feedback u_t = F_t x_t. f_seq has length T+1 and
// f_seq[T] == 0; the sign is absorbed into the gain.
struct GainSchedule {
  std::vector<double> f_seq;
};

GainSchedule constant_gains(double f, std::size_t horizon);

// P_0..P_T from the backward Riccati recursion seeded with terminal_weight.
std::vector<double> riccati_sequence(const SystemSpec& spec);

GainSchedule synthesize_gains(const SystemSpec& spec);

double stage_cost(double x, double u, const SystemSpec& spec);

struct StepResult {
  double x_next;
  double u;
};

// One step of the noise-free feedback loop.
StepResult step_perfect(double x, std::size_t t, double z,
                        const SystemSpec& spec, const GainSchedule& gains);

}  // namespace ratelqr
