#pragma once

#include <Eigen/Dense>
#include <random>
#include <stdexcept>
#include <vector>

#include "gaitforge/biped_env.hpp"
#include "gaitforge/nncore.hpp"
#include "gaitforge/synth_model.hpp"

namespace gaitforge::vail {

// Discriminator features: 6 joint angles, 6 joint velocities, target speed.
constexpr int kFeatDim = 13;
using Feature = Eigen::Matrix<double, kFeatDim, 1>;

struct LambdaOutOfRange : std::runtime_error {
  explicit LambdaOutOfRange(double v)
      : std::runtime_error("reward weight lambda must lie in [0, 1], got " + std::to_string(v)) {}
};

struct EmptyBatch : std::runtime_error {
  EmptyBatch() : std::runtime_error("vail update needs non-empty expert and policy batches") {}
};

// State-only features; the synthetic expert carries no torques.
Feature disc_features(const sim::Observation& obs);

// -log(1 - sigmoid(logit)), sigmoid clamped to [1e-7, 1 - 1e-7].
double imitation_reward(double logit);

// exp(-(v_target - v_com)^2), in (0, 1].
double speed_reward(double v_target, double v_com);

// (1 - lambda) * r_disc + lambda * r_speed.
double mixed_reward(double lambda, double r_disc, double r_speed);

struct VailConfig {
  int latent_dim = 32;
  std::vector<int> encoder_hidden = {64, 64};
  std::vector<int> disc_hidden = {64, 64};
  double info_constraint = 0.5;  // i_c, nats
  double dual_step = 1e-5;       // alpha_beta
  double beta0 = 0.1;
  double learning_rate = 3e-4;
  double demo_speed_window = 0.1;  // +-window when sampling expert rows
  uint64_t seed = 0;
};

struct BottleneckState {
  double beta = 0.1;
  double info_constraint = 0.5;
  double dual_step = 1e-5;
};

struct UpdateStats {
  double loss = 0.0;
  double mean_kl = 0.0;
  double accuracy = 0.0;
  double beta_after = 0.0;
};

// Expert feature rows tagged with walking speed.
class DemoBuffer {
 public:
  void add(const Feature& row, double speed);
  // All rows within +-window of the target speed (falls back to the whole
  // buffer if none match).
  std::vector<int> indices_near(double speed, double window) const;
  const Feature& row(int i) const { return rows_[i]; }
  double speed(int i) const { return speeds_[i]; }
  int size() const { return int(rows_.size()); }

  std::string to_csv() const;
  static DemoBuffer from_csv(const std::string& text);

 private:
  std::vector<Feature> rows_;
  std::vector<double> speeds_;
};

// Builds expert rows from a synthetic cycle: left leg at phase p, right leg
// at p + 1/2, matching the environment's observation convention.
void append_demo_rows(DemoBuffer& buffer, const synth::SyntheticCycle& cycle);

class Vail {
 public:
  explicit Vail(const VailConfig& cfg);

  // Deterministic discriminator logit through the encoder mean (used for
  // rollout rewards).
  double logit(const Feature& x) const;

  UpdateStats update(const std::vector<Feature>& expert_batch,
                     const std::vector<Feature>& policy_batch, std::mt19937_64& rng);

  const BottleneckState& bottleneck() const { return bstate_; }
  BottleneckState& bottleneck() { return bstate_; }
  const VailConfig& config() const { return cfg_; }

  nn::Vector encoder_params() const { return encoder_.flat_params(); }
  nn::Vector disc_params() const { return disc_.flat_params(); }
  void set_encoder_params(const nn::Vector& p) { encoder_.set_flat_params(p); }
  void set_disc_params(const nn::Vector& p) { disc_.set_flat_params(p); }
  const std::vector<int>& encoder_layers() const { return encoder_.layer_sizes(); }
  const std::vector<int>& disc_layers() const { return disc_.layer_sizes(); }

 private:
  VailConfig cfg_;
  nn::Mlp encoder_;  // feat -> [mean_z, raw_log_std_z]
  nn::Mlp disc_;     // z -> logit
  BottleneckState bstate_;
  nn::AdamState adam_;
};

}  // namespace gaitforge::vail
