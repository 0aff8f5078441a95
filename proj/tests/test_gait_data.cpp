#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gaitforge/gait_data.hpp"

using namespace gaitforge;

namespace {

std::string serialize_profiles(const std::vector<gait::MeanGaitProfile>& profiles) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& p : profiles) {
    out << p.speed_mps << '|';
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < p.n_points(); ++k) out << p.angles_deg(j, k) << ',';
    }
  }
  return out.str();
}

}  // namespace

TEST_CASE("parse_gait_csv accepts a minimal well-formed table") {
  const std::string csv =
      "subject_id,speed,cycle_id,phase,hip_deg,knee_deg,ankle_deg\n"
      "S1,1.0,1,0.0,10,20,5\n"
      "S1,1.0,1,1.0,11,21,6\n";
  const gait::GaitTable table = gait::parse_gait_csv(csv);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].subject_id == "S1");
  CHECK(table.rows[0].speed_mps == 1.0);
  CHECK(table.rows[1].knee_deg == 21.0);
  CHECK_FALSE(table.time_indexed);
}

TEST_CASE("parse_gait_csv handles CRLF and a time column") {
  const std::string csv =
      "subject_id,speed,cycle_id,time,hip_deg,knee_deg,ankle_deg\r\n"
      "S1,1.0,1,0.00,1,2,3\r\n"
      "S1,1.0,1,1.10,4,5,6\r\n";
  const gait::GaitTable table = gait::parse_gait_csv(csv);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.time_indexed);
  CHECK(table.rows[1].phase_or_time == doctest::Approx(1.10));
}

TEST_CASE("parse_gait_csv reports a missing required column") {
  const std::string csv =
      "subject_id,speed,cycle_id,phase,hip_deg,ankle_deg\n"
      "S1,1.0,1,0.0,10,5\n";
  CHECK_THROWS_AS(gait::parse_gait_csv(csv), gait::MissingColumn);
  try {
    gait::parse_gait_csv(csv);
  } catch (const gait::MissingColumn& e) {
    CHECK(e.column == "knee_deg");
  }
}

TEST_CASE("parse_gait_csv reports malformed numbers with the row index") {
  std::string csv = "subject_id,speed,cycle_id,phase,hip_deg,knee_deg,ankle_deg\n";
  for (int i = 1; i <= 4; ++i) {
    csv += "S1,1.0,1,0." + std::to_string(i) + ",1,2,3\n";
  }
  csv += "S1,1.2x,1,0.5,1,2,3\n";  // data row 5
  try {
    gait::parse_gait_csv(csv);
    FAIL("expected MalformedNumber");
  } catch (const gait::MalformedNumber& e) {
    CHECK(e.row == 5);
    CHECK(e.column == "speed");
    CHECK(e.cell == "1.2x");
  }
}

TEST_CASE("parse_gait_csv rejects empty tables") {
  CHECK_THROWS_AS(gait::parse_gait_csv("subject_id,speed,cycle_id,phase,hip_deg,knee_deg,ankle_deg\n"),
                  gait::EmptyTable);
  CHECK_THROWS_AS(gait::parse_gait_csv(""), gait::EmptyTable);
}

TEST_CASE("resample_phase is the identity on grid-aligned input") {
  // One full cycle sampled at the 21-point grid plus the closing wrap sample.
  const int n = 21;
  std::vector<double> phase(n + 1);
  gait::AngleGrid samples(3, n + 1);
  for (int i = 0; i <= n; ++i) {
    phase[i] = double(i) / n;
    for (int j = 0; j < 3; ++j) {
      samples(j, i) = std::sin(2.0 * M_PI * (double(i % n) / n) + j);
    }
  }
  const gait::PhaseCycle cycle = gait::resample_phase(phase, samples, n, 1.0);
  REQUIRE(cycle.n_points() == n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(cycle.angles_deg(j, i) == samples(j, i));
  }
}

TEST_CASE("resample_phase is exact on a linear ramp") {
  std::vector<double> phase = {0.0, 1.0};
  gait::AngleGrid samples(3, 2);
  samples << 0, 10, 0, 10, 0, 10;
  const gait::PhaseCycle cycle = gait::resample_phase(phase, samples, 21, 1.0);
  for (int i = 0; i < 21; ++i) {
    const double expected = 10.0 * (double(i) / 21.0);
    for (int j = 0; j < 3; ++j) CHECK(cycle.angles_deg(j, i) == doctest::Approx(expected).epsilon(1e-15));
  }
}

TEST_CASE("resample_phase approximates a sine from irregular samples") {
  // 200 jittered samples; linear interpolation error stays under 1e-3 for
  // a unit-amplitude sine.
  const int n_in = 200;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  std::vector<double> phase(n_in + 1);
  phase[0] = 0.0;
  phase[n_in] = 1.0;
  for (int i = 1; i < n_in; ++i) phase[i] = (i + jitter(rng)) / double(n_in);
  std::sort(phase.begin(), phase.end());
  gait::AngleGrid samples(3, n_in + 1);
  for (int i = 0; i <= n_in; ++i) {
    for (int j = 0; j < 3; ++j) samples(j, i) = std::sin(2.0 * M_PI * phase[i]);
  }
  const gait::PhaseCycle cycle = gait::resample_phase(phase, samples, 21, 1.0);
  double max_err = 0.0;
  for (int i = 0; i < 21; ++i) {
    const double analytic = std::sin(2.0 * M_PI * (double(i) / 21.0));
    max_err = std::max(max_err, std::abs(cycle.angles_deg(0, i) - analytic));
  }
  CHECK(max_err < 1e-3);
}

TEST_CASE("resample_phase rejects too few samples") {
  std::vector<double> phase = {0.0};
  gait::AngleGrid samples(3, 1);
  samples.setZero();
  CHECK_THROWS_AS(gait::resample_phase(phase, samples, 21, 1.0), gait::TooFewSamples);
}

TEST_CASE("aggregate_mean of identical cycles reproduces the cycle") {
  gait::PhaseCycle a;
  a.speed_mps = 1.0;
  a.angles_deg.resize(3, 5);
  a.angles_deg << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15;
  const auto profiles = gait::aggregate_mean({a, a}, 0.024);
  REQUIRE(profiles.size() == 1);
  CHECK((profiles[0].angles_deg - a.angles_deg).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("aggregate_mean averages symmetric cycles to zero") {
  gait::PhaseCycle plus, minus;
  plus.speed_mps = minus.speed_mps = 1.0;
  plus.angles_deg = gait::AngleGrid::Constant(3, 7, 5.0);
  minus.angles_deg = gait::AngleGrid::Constant(3, 7, -5.0);
  const auto profiles = gait::aggregate_mean({plus, minus}, 0.024);
  REQUIRE(profiles.size() == 1);
  CHECK(profiles[0].angles_deg.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("aggregate_mean matches the hand-computed mean") {
  std::vector<gait::PhaseCycle> cycles(3);
  const double values[3] = {10.0, 12.0, 17.0};
  for (int i = 0; i < 3; ++i) {
    cycles[i].speed_mps = 1.0;
    cycles[i].angles_deg = gait::AngleGrid::Constant(3, 4, values[i]);
  }
  const auto profiles = gait::aggregate_mean(cycles, 0.024);
  REQUIRE(profiles.size() == 1);
  CHECK(profiles[0].angles_deg(0, 0) == doctest::Approx(13.0).epsilon(1e-15));
}

TEST_CASE("aggregate_mean groups by speed tolerance and sorts ascending") {
  std::vector<gait::PhaseCycle> cycles(4);
  const double speeds[4] = {1.512, 0.75, 1.50, 0.76};
  for (int i = 0; i < 4; ++i) {
    cycles[i].speed_mps = speeds[i];
    cycles[i].angles_deg = gait::AngleGrid::Constant(3, 4, double(i));
  }
  const auto profiles = gait::aggregate_mean(cycles, 0.024);
  REQUIRE(profiles.size() == 2);
  CHECK(profiles[0].speed_mps == doctest::Approx(0.755));
  CHECK(profiles[1].speed_mps == doctest::Approx(1.506));
}

TEST_CASE("aggregate_mean rejects mixed resolutions") {
  gait::PhaseCycle a, b;
  a.speed_mps = b.speed_mps = 1.0;
  a.angles_deg = gait::AngleGrid::Zero(3, 5);
  b.angles_deg = gait::AngleGrid::Zero(3, 6);
  CHECK_THROWS_AS(gait::aggregate_mean({a, b}, 0.024), gait::MixedResolution);
}

TEST_CASE("aggregate_mean commutes with permutation of input cycles") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-20, 20);
  std::vector<gait::PhaseCycle> cycles(8);
  for (int i = 0; i < 8; ++i) {
    cycles[i].speed_mps = 0.7 + 0.2 * (i % 4);
    cycles[i].angles_deg.resize(3, 6);
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 6; ++k) cycles[i].angles_deg(j, k) = u(rng);
    }
  }
  auto shuffled = cycles;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK(serialize_profiles(gait::aggregate_mean(cycles, 0.024)) ==
        serialize_profiles(gait::aggregate_mean(shuffled, 0.024)));
}

TEST_CASE("ingest pipeline is deterministic across runs") {
  std::string csv = "subject_id,speed,cycle_id,phase,hip_deg,knee_deg,ankle_deg\n";
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-30, 30);
  for (int subj = 0; subj < 2; ++subj) {
    for (int k = 0; k <= 20; ++k) {
      csv += "S" + std::to_string(subj) + ",1.1,1," + std::to_string(k / 20.0) + "," +
             std::to_string(u(rng)) + "," + std::to_string(u(rng)) + "," +
             std::to_string(u(rng)) + "\n";
    }
  }
  const auto run = [&] {
    return serialize_profiles(gait::ingest_table(gait::parse_gait_csv(csv), 21, 0.024));
  };
  CHECK(run() == run());
}
