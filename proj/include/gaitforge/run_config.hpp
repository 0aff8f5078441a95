#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaitforge/biped_env.hpp"
#include "gaitforge/curriculum.hpp"
#include "gaitforge/eval_harness.hpp"
#include "gaitforge/policy_opt.hpp"
#include "gaitforge/vail.hpp"

namespace gaitforge::config {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Whole-run configuration. JSON layout is schema-checked: unknown keys are
// rejected, `seed` is mandatory. GAITFORGE_SEED overrides the file seed.
struct RunConfig {
  uint64_t seed = 1;

  struct Data {
    int n_points = 21;
    double group_tolerance = 0.024;
  } data;

  struct Synth {
    double base_speed = 1.25;
    int base_samples = 168;  // multiple of n_points keeps the grids nested
    double extrapolation_margin = 0.2;
  } synth;

  sim::BipedModel env;
  vail::VailConfig vail;
  rl::TrainConfig trpo;
  curriculum::ChirpSpec chirp;

  struct Eval {
    std::vector<double> speeds;  // empty selects the 13-point default grid
    int episodes_per_speed = 3;
    int trials = 1;
    int max_steps = 1000;
    int steady_discard = 100;
    int min_stride_steps = 60;
    int chirp_episodes = 10;
  } eval;

  struct Io {
    bool plots = false;
  } io;

  static RunConfig defaults();
  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::string& path);
  std::string to_json() const;

  eval::EvalConfig eval_config() const;
};

}  // namespace gaitforge::config
