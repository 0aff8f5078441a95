#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gaitforge/curriculum.hpp"

using namespace gaitforge::curriculum;

TEST_CASE("progressive triangle hits the construction endpoints exactly") {
  SpeedRange range;
  CHECK(progressive_speed(0, range, 40) == 0.65);
  CHECK(progressive_speed(20, range, 40) == 1.85);
  CHECK(progressive_speed(40, range, 40) == 0.65);
  CHECK(progressive_speed(200, range, 40) == 0.65);
}

TEST_CASE("progressive triangle interpolates linearly") {
  SpeedRange range;
  CHECK(progressive_speed(10, range, 40) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(progressive_speed(30, range, 40) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(progressive_speed(5, range, 40) == doctest::Approx(0.65 + 1.2 * 0.25).epsilon(1e-15));
}

TEST_CASE("progressive triangle is continuous, piecewise linear, and bounded") {
  SpeedRange range;
  double prev = progressive_speed(0, range, 40);
  for (long e = 1; e <= 400; ++e) {
    const double v = progressive_speed(e, range, 40);
    CHECK(v >= range.v_min);
    CHECK(v <= range.v_max);
    CHECK(std::abs(v - prev) == doctest::Approx(1.2 / 20.0).epsilon(1e-12));
    prev = v;
  }
}

TEST_CASE("progressive rejects bad periods") {
  SpeedRange range;
  CHECK_THROWS_AS(progressive_speed(0, range, 0), BadPeriod);
  CHECK_THROWS_AS(progressive_speed(0, range, 7), BadPeriod);
}

TEST_CASE("random_speed is uniform on the range") {
  SpeedRange range;
  std::mt19937_64 rng(314);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = random_speed(range, rng);
    REQUIRE(v >= range.v_min);
    REQUIRE(v <= range.v_max);
    sum += v;
  }
  CHECK(sum / n == doctest::Approx(1.25).epsilon(0.008));
}

TEST_CASE("random_speed is reproducible under a fixed seed") {
  SpeedRange range;
  std::mt19937_64 a(9), b(9);
  for (int i = 0; i < 32; ++i) CHECK(random_speed(range, a) == random_speed(range, b));
}

TEST_CASE("chirp starts at the center") {
  ChirpSpec spec;
  CHECK(chirp_speed(0.0, spec) == doctest::Approx(spec.center_mps));
}

TEST_CASE("chirp midpoint phase arithmetic") {
  ChirpSpec spec;  // f0 0.01, f1 0.05, duration 50
  // Phase argument at t=25 is 2*pi*(0.25 + 0.25) = pi, so the value is the center.
  CHECK(chirp_speed(25.0, spec) == doctest::Approx(spec.center_mps).epsilon(1e-12));
}

TEST_CASE("chirp instantaneous frequency endpoints") {
  ChirpSpec spec;
  auto phase = [&](double t) {
    return spec.f0_hz * t + (spec.f1_hz - spec.f0_hz) * t * t / (2.0 * spec.duration_s);
  };
  const double h = 1e-6;
  CHECK((phase(h) - phase(0.0)) / h == doctest::Approx(0.01).epsilon(1e-4));
  CHECK((phase(spec.duration_s) - phase(spec.duration_s - h)) / h ==
        doctest::Approx(0.05).epsilon(1e-4));
}

TEST_CASE("chirp is bounded and successive cycles shorten monotonically") {
  ChirpSpec spec;
  spec.f0_hz = 0.1;   // denser sweep so several full cycles fit the window
  spec.f1_hz = 0.5;
  const double dt = 0.001;
  std::vector<double> upward_crossings;
  double prev = chirp_speed(0.0, spec) - spec.center_mps;
  for (int k = 1; k * dt <= spec.duration_s; ++k) {
    const double t = k * dt;
    const double v = chirp_speed(t, spec);
    CHECK(v >= spec.center_mps - spec.amplitude_mps - 1e-12);
    CHECK(v <= spec.center_mps + spec.amplitude_mps + 1e-12);
    const double cur = v - spec.center_mps;
    if (prev < 0.0 && cur >= 0.0) upward_crossings.push_back(t);
    prev = cur;
  }
  // The sampled period between upward zero crossings must shrink every cycle.
  REQUIRE(upward_crossings.size() >= 2);
  for (size_t i = 2; i < upward_crossings.size(); ++i) {
    const double period_prev = upward_crossings[i - 1] - upward_crossings[i - 2];
    const double period_cur = upward_crossings[i] - upward_crossings[i - 1];
    CHECK(period_cur < period_prev);
  }
}

TEST_CASE("chirp rejects out-of-range times") {
  ChirpSpec spec;
  CHECK_THROWS_AS(chirp_speed(-0.1, spec), TimeOutOfRange);
  CHECK_THROWS_AS(chirp_speed(50.1, spec), TimeOutOfRange);
}

TEST_CASE("scheduler dispatches by kind") {
  Scheduler prog(Kind::kProgressive, SpeedRange{}, 40, 1);
  CHECK(prog.target_for_epoch(0) == 0.65);
  CHECK(prog.target_for_epoch(20) == 1.85);

  Scheduler rand_a(Kind::kRandom, SpeedRange{}, 40, 5);
  Scheduler rand_b(Kind::kRandom, SpeedRange{}, 40, 5);
  CHECK(rand_a.target_for_epoch(0) == rand_b.target_for_epoch(0));
  CHECK(kind_from_string("progressive") == Kind::kProgressive);
  CHECK(kind_from_string("random") == Kind::kRandom);
  CHECK_THROWS_AS(kind_from_string("adaptive"), std::invalid_argument);
}
