#include "gaitforge/curriculum.hpp"

#include <cmath>

namespace gaitforge::curriculum {

double progressive_speed(long epoch, const SpeedRange& range, long period) {
  if (period < 2 || period % 2 != 0) throw BadPeriod(period);
  const long phase = ((epoch % period) + period) % period;
  const long half = period / 2;
  const double frac = phase <= half ? double(phase) / double(half)
                                    : double(period - phase) / double(half);
  return range.v_min + (range.v_max - range.v_min) * frac;
}

double random_speed(const SpeedRange& range, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(range.v_min, range.v_max);
  return u(rng);
}

double chirp_speed(double t, const ChirpSpec& spec) {
  if (t < 0.0 || t > spec.duration_s) throw TimeOutOfRange(t, spec.duration_s);
  const double phase =
      spec.f0_hz * t + (spec.f1_hz - spec.f0_hz) * t * t / (2.0 * spec.duration_s);
  return spec.center_mps + spec.amplitude_mps * std::sin(2.0 * M_PI * phase);
}

Kind kind_from_string(const std::string& s) {
  if (s == "progressive") return Kind::kProgressive;
  if (s == "random") return Kind::kRandom;
  throw std::invalid_argument("unknown curriculum kind: " + s);
}

}  // namespace gaitforge::curriculum
