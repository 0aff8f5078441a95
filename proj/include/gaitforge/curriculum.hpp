#pragma once

#include <random>
#include <stdexcept>
#include <string>

namespace gaitforge::curriculum {

struct SpeedRange {
  double v_min = 0.65;
  double v_max = 1.85;
};

struct ChirpSpec {
  double f0_hz = 0.01;
  double f1_hz = 0.05;
  double duration_s = 50.0;
  double center_mps = 1.25;
  double amplitude_mps = 0.6;
};

struct BadPeriod : std::runtime_error {
  explicit BadPeriod(long period)
      : std::runtime_error("curriculum period must be even and >= 2, got " +
                           std::to_string(period)) {}
};

struct TimeOutOfRange : std::runtime_error {
  TimeOutOfRange(double t, double duration)
      : std::runtime_error("chirp time " + std::to_string(t) + " outside [0, " +
                           std::to_string(duration) + "]") {}
};

// Triangle wave over epochs: v_min at 0, v_max at period/2, back to v_min at
// period; endpoints hit exactly.
double progressive_speed(long epoch, const SpeedRange& range, long period);

// Uniform draw on [v_min, v_max].
double random_speed(const SpeedRange& range, std::mt19937_64& rng);

// Linear chirp around `center`: instantaneous frequency sweeps f0 -> f1 over
// the duration.
double chirp_speed(double t, const ChirpSpec& spec);

enum class Kind { kProgressive, kRandom };

Kind kind_from_string(const std::string& s);

// Per-epoch target speed under the configured curriculum.
class Scheduler {
 public:
  Scheduler(Kind kind, SpeedRange range, long period, uint64_t seed)
      : kind_(kind), range_(range), period_(period), rng_(seed) {}

  double target_for_epoch(long epoch) {
    return kind_ == Kind::kProgressive ? progressive_speed(epoch, range_, period_)
                                       : random_speed(range_, rng_);
  }

  const SpeedRange& range() const { return range_; }

 private:
  Kind kind_;
  SpeedRange range_;
  long period_;
  std::mt19937_64 rng_;
};

}  // namespace gaitforge::curriculum
