#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gaitforge::fixtures {

// Sinusoid-plus-linear-trend gait surrogate: each joint angle is a fixed
// two-harmonic waveform whose offset and shape drift linearly with walking
// speed around the 1.25 m/s anchor. Not anatomical data; a structured stand-
// in with a known closed form so fits can be checked exactly.
struct SurrogateGait {
  struct Joint {
    double a1, phi1;  // first harmonic
    double a2, phi2;  // second harmonic
    double offset;
    double trend;        // deg per (m/s), constant part
    double trend_a, trend_phi;  // deg per (m/s), phase-dependent part
  };
  Joint hip{10.0, 0.3, 2.0, 1.1, 5.0, 6.0, 3.0, 0.5};
  Joint knee{14.0, 1.9, 4.0, 0.4, 10.0, 8.0, 4.0, 1.3};
  Joint ankle{7.0, 4.0, 2.5, 2.2, -2.0, 4.0, 2.0, 2.9};
  double anchor_speed = 1.25;

  // Exact angle in degrees at cycle phase [0,1) and speed.
  double angle_deg(int joint, double phase, double speed) const;
};

struct FixtureSpec {
  std::vector<double> speeds;  // defaults to 0.65..1.85 step 0.1
  int subjects = 3;
  int cycles_per_subject = 2;
  int samples_per_cycle = 51;  // phase 0..1 inclusive
  double noise_deg = 0.0;      // iid Gaussian per cell
  uint64_t seed = 2024;
};

// CSV in the gait_data ingestion schema.
std::string make_fixture_csv(const SurrogateGait& gait, const FixtureSpec& spec);

}  // namespace gaitforge::fixtures
