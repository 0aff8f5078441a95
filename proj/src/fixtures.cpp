#include "gaitforge/fixtures.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "gaitforge/csv.hpp"

namespace gaitforge::fixtures {

double SurrogateGait::angle_deg(int joint, double phase, double speed) const {
  const Joint& j = joint == 0 ? hip : (joint == 1 ? knee : ankle);
  const double w = 2.0 * M_PI * phase;
  const double shape = j.a1 * std::sin(w + j.phi1) + j.a2 * std::sin(2.0 * w + j.phi2) + j.offset;
  const double slope = j.trend + j.trend_a * std::sin(w + j.trend_phi);
  return shape + slope * (speed - anchor_speed);
}

std::string make_fixture_csv(const SurrogateGait& gait, const FixtureSpec& spec) {
  std::vector<double> speeds = spec.speeds;
  if (speeds.empty()) {
    for (int i = 0; i <= 12; ++i) speeds.push_back(0.65 + 0.1 * i);
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::ostringstream out;
  out << "subject_id,speed,cycle_id,phase,hip_deg,knee_deg,ankle_deg\n";
  for (double speed : speeds) {
    for (int subj = 0; subj < spec.subjects; ++subj) {
      for (int cyc = 0; cyc < spec.cycles_per_subject; ++cyc) {
        for (int k = 0; k < spec.samples_per_cycle; ++k) {
          const double phase = double(k) / double(spec.samples_per_cycle - 1);
          out << 'S' << (subj + 1) << ',' << csv::format_double(speed) << ',' << (cyc + 1)
              << ',' << csv::format_double(phase);
          for (int j = 0; j < 3; ++j) {
            double v = gait.angle_deg(j, phase, speed);
            if (spec.noise_deg > 0.0) v += spec.noise_deg * noise(rng);
            out << ',' << csv::format_double(v);
          }
          out << '\n';
        }
      }
    }
  }
  return out.str();
}

}  // namespace gaitforge::fixtures
