#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "ratelqr/lqr.hpp"

using namespace ratelqr;

namespace {

// A = 1, B = 1, Q = 2, D = 5 over two stages, terminal weight Q. All
// expected values below were derived by hand from the backward recursion.
SystemSpec two_stage() {
  return constant_system(1.0, 1.0, 2.0, 5.0, 2, 100.0, 0.0, 1.0, 2.0);
}

}  // namespace

TEST_CASE("riccati recursion reproduces the hand-computed sequence") {
  const std::vector<double> p = riccati_sequence(two_stage());
  REQUIRE(p.size() == 3);
  CHECK(p[2] == 2.0);
  CHECK(p[1] == doctest::Approx(24.0 / 7.0).epsilon(1e-15));
  CHECK(p[0] == doctest::Approx(2.0 + 840.0 / 413.0).epsilon(1e-15));
}

TEST_CASE("gain synthesis reproduces the hand-computed gains") {
  const GainSchedule gains = synthesize_gains(two_stage());
  REQUIRE(gains.f_seq.size() == 3);
  CHECK(gains.f_seq[2] == 0.0);
  CHECK(gains.f_seq[1] == doctest::Approx(-2.0 / 7.0).epsilon(1e-15));
  CHECK(gains.f_seq[0] == doctest::Approx(-24.0 / 59.0).epsilon(1e-15));
}

TEST_CASE("zero terminal weight leaves the last stage uncontrolled") {
  SystemSpec spec = two_stage();
  spec.terminal_weight = 0.0;
  const std::vector<double> p = riccati_sequence(spec);
  const GainSchedule gains = synthesize_gains(spec);
  CHECK(p[2] == 0.0);
  CHECK(p[1] == 2.0);
  CHECK(gains.f_seq[1] == 0.0);
  CHECK(gains.f_seq[0] == doctest::Approx(-2.0 / 7.0).epsilon(1e-15));
}

TEST_CASE("noise-free step applies the scheduled gain") {
  const SystemSpec spec = two_stage();
  const GainSchedule gains = synthesize_gains(spec);
  const StepResult step = step_perfect(100.0, 0, 0.0, spec, gains);
  CHECK(step.u == doctest::Approx(-2400.0 / 59.0).epsilon(1e-15));
  CHECK(step.x_next == doctest::Approx(3500.0 / 59.0).epsilon(1e-15));
  const double expected_cost =
      2.0 * 1e4 + 5.0 * (2400.0 / 59.0) * (2400.0 / 59.0);
  CHECK(stage_cost(100.0, step.u, spec) ==
        doctest::Approx(expected_cost).epsilon(1e-15));
  CHECK(step_perfect(50.0, 0, 3.0, spec, gains).x_next ==
        doctest::Approx(3.0 + 3500.0 / 59.0 / 2.0).epsilon(1e-15));
}

TEST_CASE("riccati values floor at the state weight, gains contract") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> a_dist(-3.0, 3.0);
  std::uniform_real_distribution<double> b_dist(0.25, 2.0);
  std::uniform_real_distribution<double> q_dist(0.25, 4.0);
  std::uniform_real_distribution<double> d_dist(0.25, 6.0);
  std::uniform_real_distribution<double> w_dist(0.0, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    SystemSpec spec;
    spec.horizon = 1 + static_cast<std::size_t>(rng() % 12);
    for (std::size_t t = 0; t < spec.horizon; ++t)
      spec.a_seq.push_back(a_dist(rng));
    spec.b = b_dist(rng);
    spec.q = q_dist(rng);
    spec.d = d_dist(rng);
    spec.terminal_weight = w_dist(rng);
    const std::vector<double> p = riccati_sequence(spec);
    const GainSchedule gains = synthesize_gains(spec);
    REQUIRE(gains.f_seq.back() == 0.0);
    for (std::size_t t = 0; t < spec.horizon; ++t) {
      CHECK(p[t] >= spec.q - 1e-12);
      // The closed loop never amplifies beyond the open loop.
      const double closed = spec.a_seq[t] + spec.b * gains.f_seq[t];
      CHECK(std::abs(closed) <= std::abs(spec.a_seq[t]) + 1e-12);
    }
  }
}

TEST_CASE("time-varying dynamics feed the recursion stage by stage") {
  SystemSpec spec;
  spec.a_seq = {0.5, 2.0};
  spec.b = 1.0;
  spec.q = 2.0;
  spec.d = 5.0;
  spec.horizon = 2;
  spec.terminal_weight = 2.0;
  const std::vector<double> p = riccati_sequence(spec);
  const GainSchedule gains = synthesize_gains(spec);
  // Backward: P_1 = 2 + 4*2 - (2*2)^2/(5+2) = 10 - 16/7 = 54/7.
  CHECK(p[1] == doctest::Approx(54.0 / 7.0).epsilon(1e-15));
  CHECK(gains.f_seq[1] == doctest::Approx(-4.0 / 7.0).epsilon(1e-15));
  // F_0 = -(0.5 * 54/7) / (5 + 54/7) = -27/89.
  CHECK(gains.f_seq[0] == doctest::Approx(-27.0 / 89.0).epsilon(1e-15));
}

TEST_CASE("spec validation rejects malformed systems") {
  SystemSpec spec = two_stage();
  spec.q = 0.0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec = two_stage();
  spec.d = -1.0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec = two_stage();
  spec.a_seq.pop_back();
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec = two_stage();
  spec.sigma_z2 = -0.5;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec = two_stage();
  spec.c2 = std::nan("");
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec = two_stage();
  spec.terminal_weight = -1.0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  CHECK_THROWS_AS(constant_system(1.0, 1.0, 2.0, 5.0, 0, 0.0, 0.0, 0.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("stepping past the horizon is rejected") {
  const SystemSpec spec = two_stage();
  const GainSchedule gains = synthesize_gains(spec);
  CHECK_THROWS_AS(step_perfect(0.0, 2, 0.0, spec, gains), std::out_of_range);
  GainSchedule short_gains;
  short_gains.f_seq = {0.0, 0.0};
  CHECK_THROWS_AS(step_perfect(0.0, 0, 0.0, spec, short_gains),
                  std::invalid_argument);
}

TEST_CASE("constant_gains pins the terminal entry") {
  const GainSchedule gains = constant_gains(-0.4, 5);
  REQUIRE(gains.f_seq.size() == 6);
  for (std::size_t t = 0; t < 5; ++t) CHECK(gains.f_seq[t] == -0.4);
  CHECK(gains.f_seq[5] == 0.0);
}
