#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gaitforge/biped_env.hpp"
#include "gaitforge/curriculum.hpp"
#include "gaitforge/nncore.hpp"
#include "gaitforge/vail.hpp"

namespace gaitforge::rl {

using nn::Matrix;
using nn::Vector;

struct NonFiniteGradient : std::runtime_error {
  NonFiniteGradient() : std::runtime_error("non-finite policy gradient; update aborted") {}
};

// Gaussian policy: MLP state -> action mean, state-independent log-std.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(std::vector<int> layer_sizes, double log_std0, uint64_t seed);

  int obs_dim() const { return mlp_.input_dim(); }
  int action_dim() const { return mlp_.output_dim(); }

  Vector mean_action(const Vector& obs) const { return mlp_.forward1(obs); }
  Vector sample_action(const Vector& obs, std::mt19937_64& rng, double* logprob) const;
  double logprob(const Vector& obs, const Vector& action) const;

  // Flat parameter vector: MLP params then log-std entries.
  Vector flat_params() const;
  void set_flat_params(const Vector& flat);
  int num_params() const { return mlp_.num_params() + int(log_std_.size()); }
  const std::vector<int>& layer_sizes() const { return mlp_.layer_sizes(); }
  const Vector& log_std() const { return log_std_; }

  const nn::Mlp& mlp() const { return mlp_; }

 private:
  nn::Mlp mlp_;
  Vector log_std_;
};

struct Transition {
  Vector obs;
  Vector action;
  double logprob = 0.0;
  double logit = 0.0;
  double r_disc = 0.0;
  double r_speed = 0.0;
  double r_mixed = 0.0;
  double v_com = 0.0;
  double target_speed = 0.0;
  double value = 0.0;
  bool done = false;
  bool fell = false;
};

struct RolloutBuffer {
  std::vector<Transition> steps;
  Vector bootstrap_obs;  // observation after the last stored step
  bool bootstrap_done = false;

  int size() const { return int(steps.size()); }
  void clear() {
    steps.clear();
    bootstrap_done = false;
  }
};

struct GaeResult {
  Vector advantages;  // raw, un-normalized
  Vector returns;
};

// delta_t = r_t + gamma V_{t+1} (1 - done_t) - V_t, discounted lambda sum.
GaeResult gae_advantages(const Vector& rewards, const std::vector<uint8_t>& dones,
                         const Vector& values, double bootstrap_value, double gamma,
                         double lambda);

// Zero-mean unit-variance per batch; left untouched when variance < 1e-12.
Vector normalize_advantages(const Vector& advantages);

// CG on a symmetric positive definite operator.
Vector conjugate_gradient(const std::function<Vector(const Vector&)>& matvec, const Vector& b,
                          int iters, double tol = 1e-10);

struct TrpoConfig {
  double delta_kl = 0.01;
  int cg_iters = 10;
  double cg_damping = 0.1;
  double backtrack_coeff = 0.8;
  int backtrack_steps = 10;
};

struct TrpoStats {
  double surrogate_improvement = 0.0;
  double kl_after = 0.0;
  bool accepted = false;
};

// One trust-region update on (obs, action, advantage) columns.
TrpoStats trpo_update(GaussianPolicy& policy, const Matrix& obs, const Matrix& actions,
                      const Vector& advantages, const TrpoConfig& cfg);

// Mean KL(pi_old || pi_new) over the batch states, for diagnostics/tests.
double policy_mean_kl(const GaussianPolicy& old_policy, const GaussianPolicy& new_policy,
                      const Matrix& obs);

class ValueFunction {
 public:
  ValueFunction() = default;
  ValueFunction(std::vector<int> layer_sizes, uint64_t seed);

  double value(const Vector& obs) const { return mlp_.forward1(obs)[0]; }
  Vector values(const Matrix& obs) const { return mlp_.forward(obs).transpose(); }

  // Fixed number of full-batch Adam steps on squared error; returns the
  // final loss.
  double update(const Matrix& obs, const Vector& targets, int iters, double lr);

  Vector flat_params() const { return mlp_.flat_params(); }
  void set_flat_params(const Vector& p) { mlp_.set_flat_params(p); }
  const std::vector<int>& layer_sizes() const { return mlp_.layer_sizes(); }

 private:
  nn::Mlp mlp_;
  nn::AdamState adam_;
};

struct TrainConfig {
  long epochs = 200;
  long steps_per_epoch = 2000;
  long policy_update_every = 500;
  long disc_update_every = 1000;
  double lambda = 0.5;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  TrpoConfig trpo;
  std::vector<int> policy_hidden = {64, 64};
  std::vector<int> value_hidden = {64, 64};
  double policy_log_std0 = 0.5;
  long value_iters = 40;
  double value_lr = 1e-3;
  long checkpoint_every = 100;
  long max_episode_steps = 1000;
  int disc_batch = 128;
  curriculum::Kind curriculum_kind = curriculum::Kind::kProgressive;
  long curriculum_period = 40;
  curriculum::SpeedRange speed_range;
  uint64_t seed = 1;

  void validate() const;
};

struct EpochLog {
  long epoch = 0;
  double target_speed = 0.0;
  double mean_r_disc = 0.0;
  double mean_r_speed = 0.0;
  double mean_episode_length = 0.0;
  double beta = 0.0;
  double kl = 0.0;
};

struct TrainResult {
  std::vector<EpochLog> log;
  long policy_updates = 0;
  long disc_updates = 0;
  long env_steps = 0;
  std::string policy_hash;
};

// Full training pipeline on the planar biped with the mixed VAIL reward.
class Trainer {
 public:
  Trainer(const sim::BipedModel& model, const synth::SpeedLinearModel& synth_model,
          const synth::BaseTrajectory& base, const vail::VailConfig& vail_cfg,
          const TrainConfig& cfg);

  // n_steps transitions at the current target speed; resets on falls.
  RolloutBuffer collect_rollout(long n_steps);

  void set_target_speed(double v);
  double target_speed() const { return target_speed_; }

  // Runs the configured schedule; writes train_log.csv and checkpoints
  // under out_dir when non-empty.
  TrainResult train(const std::string& out_dir);

  GaussianPolicy& policy() { return policy_; }
  ValueFunction& value_fn() { return value_; }
  vail::Vail& vail() { return vail_; }
  const vail::DemoBuffer& demos() const { return demos_; }

  void save_checkpoints(const std::string& out_dir) const;

 private:
  void reset_episode();
  void policy_update(RolloutBuffer& pending, TrpoStats& last);
  void disc_update(std::vector<vail::Feature>& pending);

  sim::BipedModel model_;
  synth::SpeedLinearModel synth_model_;
  synth::BaseTrajectory base_;
  TrainConfig cfg_;
  GaussianPolicy policy_;
  ValueFunction value_;
  vail::Vail vail_;
  vail::DemoBuffer demos_;
  curriculum::Scheduler scheduler_;
  std::mt19937_64 env_rng_;
  std::mt19937_64 policy_rng_;
  std::mt19937_64 vail_rng_;

  double target_speed_ = 1.25;
  synth::SyntheticCycle target_cycle_;
  sim::BipedState state_;
  sim::Observation obs_;
  long episode_steps_ = 0;
  std::vector<long> finished_episode_lengths_;
};

std::string train_log_csv(const std::vector<EpochLog>& log);

}  // namespace gaitforge::rl
