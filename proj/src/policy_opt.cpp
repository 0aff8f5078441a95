#include "gaitforge/policy_opt.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "gaitforge/checkpoint.hpp"
#include "gaitforge/csv.hpp"

namespace gaitforge::rl {

GaussianPolicy::GaussianPolicy(std::vector<int> layer_sizes, double log_std0, uint64_t seed)
    : mlp_(std::move(layer_sizes)) {
  mlp_.init(seed, 1.0, 0.01);
  log_std_ = Vector::Constant(mlp_.output_dim(), nn::clamp_log_std(log_std0));
}

Vector GaussianPolicy::sample_action(const Vector& obs, std::mt19937_64& rng,
                                     double* logprob) const {
  nn::DiagGaussian dist(mean_action(obs), log_std_);
  Vector a = nn::gaussian_sample(dist, rng);
  if (logprob) *logprob = nn::gaussian_logprob(dist, a);
  return a;
}

double GaussianPolicy::logprob(const Vector& obs, const Vector& action) const {
  return nn::gaussian_logprob(nn::DiagGaussian(mean_action(obs), log_std_), action);
}

Vector GaussianPolicy::flat_params() const {
  Vector flat(num_params());
  flat << mlp_.flat_params(), log_std_;
  return flat;
}

void GaussianPolicy::set_flat_params(const Vector& flat) {
  if (flat.size() != num_params()) throw nn::ShapeMismatch("policy parameter length mismatch");
  mlp_.set_flat_params(flat.head(mlp_.num_params()));
  log_std_ = flat.tail(log_std_.size());
  for (long i = 0; i < log_std_.size(); ++i) log_std_[i] = nn::clamp_log_std(log_std_[i]);
}

GaeResult gae_advantages(const Vector& rewards, const std::vector<uint8_t>& dones,
                         const Vector& values, double bootstrap_value, double gamma,
                         double lambda) {
  const long n = rewards.size();
  if (long(dones.size()) != n || values.size() != n) {
    throw std::invalid_argument("gae: misaligned inputs");
  }
  GaeResult out;
  out.advantages.resize(n);
  out.returns.resize(n);
  double gae = 0.0;
  for (long t = n - 1; t >= 0; --t) {
    const double not_done = dones[t] ? 0.0 : 1.0;
    const double v_next = (t + 1 < n) ? values[t + 1] : bootstrap_value;
    const double delta = rewards[t] + gamma * v_next * not_done - values[t];
    gae = delta + gamma * lambda * not_done * gae;
    out.advantages[t] = gae;
    out.returns[t] = gae + values[t];
  }
  return out;
}

Vector normalize_advantages(const Vector& advantages) {
  const long n = advantages.size();
  if (n == 0) return advantages;
  const double mean = advantages.mean();
  const double var = (advantages.array() - mean).square().mean();
  if (var < 1e-12) return advantages;
  return ((advantages.array() - mean) / std::sqrt(var)).matrix();
}

Vector conjugate_gradient(const std::function<Vector(const Vector&)>& matvec, const Vector& b,
                          int iters, double tol) {
  Vector x = Vector::Zero(b.size());
  Vector r = b;
  Vector p = b;
  double rs = r.squaredNorm();
  for (int i = 0; i < iters; ++i) {
    if (rs < tol * tol) break;
    const Vector ap = matvec(p);
    const double alpha = rs / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    const double rs_new = r.squaredNorm();
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  return x;
}

namespace {

// Mean KL(old || new) over states for diag-Gaussian policies sharing the
// same architecture; mean_old/mean_new are action-dim x N.
double mean_kl_from_means(const Matrix& mean_old, const Vector& log_std_old,
                          const Matrix& mean_new, const Vector& log_std_new) {
  const long n = mean_old.cols();
  const Eigen::ArrayXd var_old = (2.0 * log_std_old.array()).exp();
  const Eigen::ArrayXd var_new = (2.0 * log_std_new.array()).exp();
  double kl = 0.0;
  for (long j = 0; j < n; ++j) {
    const Eigen::ArrayXd diff = mean_new.col(j).array() - mean_old.col(j).array();
    kl += (log_std_new.array() - log_std_old.array() +
           (var_old + diff.square()) / (2.0 * var_new) - 0.5)
              .sum();
  }
  return kl / double(n);
}

double surrogate(const GaussianPolicy& policy, const Matrix& obs, const Matrix& actions,
                 const Vector& advantages, const Vector& old_logprobs) {
  const long n = obs.cols();
  double total = 0.0;
  for (long j = 0; j < n; ++j) {
    const double lp = policy.logprob(obs.col(j), actions.col(j));
    total += std::exp(lp - old_logprobs[j]) * advantages[j];
  }
  return total / double(n);
}

}  // namespace

double policy_mean_kl(const GaussianPolicy& old_policy, const GaussianPolicy& new_policy,
                      const Matrix& obs) {
  return mean_kl_from_means(old_policy.mlp().forward(obs), old_policy.log_std(),
                            new_policy.mlp().forward(obs), new_policy.log_std());
}

TrpoStats trpo_update(GaussianPolicy& policy, const Matrix& obs, const Matrix& actions,
                      const Vector& advantages, const TrpoConfig& cfg) {
  TrpoStats stats;
  const long n = obs.cols();
  if (n == 0) return stats;
  const int k = policy.action_dim();
  const int n_mlp = policy.mlp().num_params();

  const Vector theta_old = policy.flat_params();
  const Vector log_std = policy.log_std();
  const Eigen::ArrayXd inv_var = (-2.0 * log_std.array()).exp();

  nn::Mlp::Cache cache;
  const Matrix mean_old = policy.mlp().forward(obs, cache);

  Vector old_logprobs(n);
  for (long j = 0; j < n; ++j) {
    old_logprobs[j] =
        nn::gaussian_logprob(nn::DiagGaussian(mean_old.col(j), log_std), actions.col(j));
  }

  // Surrogate gradient at the old parameters (importance ratio is 1 there).
  Matrix upstream(k, n);
  Vector g_logstd = Vector::Zero(k);
  for (long j = 0; j < n; ++j) {
    const Eigen::ArrayXd diff = actions.col(j).array() - mean_old.col(j).array();
    upstream.col(j) = (diff * inv_var * advantages[j] / double(n)).matrix();
    g_logstd += ((diff.square() * inv_var - 1.0) * advantages[j] / double(n)).matrix();
  }
  Vector g(policy.num_params());
  g << policy.mlp().backward(cache, upstream), g_logstd;
  if (!g.allFinite()) throw NonFiniteGradient();
  if (g.cwiseAbs().maxCoeff() < 1e-12) return stats;  // zero direction

  // Damped Fisher-vector product of the mean KL at the old parameters.
  auto fvp = [&](const Vector& v) {
    const Matrix dmean = policy.mlp().jvp_params(obs, v.head(n_mlp));
    Matrix weighted(k, n);
    for (long j = 0; j < n; ++j) {
      weighted.col(j) = (dmean.col(j).array() * inv_var / double(n)).matrix();
    }
    Vector out(policy.num_params());
    out << policy.mlp().backward(cache, weighted), 2.0 * v.tail(k);
    return Vector(out + cfg.cg_damping * v);
  };

  const Vector step_dir = conjugate_gradient(fvp, g, cfg.cg_iters);
  const double shs = step_dir.dot(fvp(step_dir));
  if (!(shs > 0.0) || !step_dir.allFinite()) return stats;
  const double full_step = std::sqrt(2.0 * cfg.delta_kl / shs);

  const double surr_old = surrogate(policy, obs, actions, advantages, old_logprobs);

  double scale = full_step;
  for (int attempt = 0; attempt < cfg.backtrack_steps; ++attempt, scale *= cfg.backtrack_coeff) {
    policy.set_flat_params(theta_old + scale * step_dir);
    const Matrix mean_new = policy.mlp().forward(obs);
    const double kl = mean_kl_from_means(mean_old, log_std, mean_new, policy.log_std());
    const double surr_new = surrogate(policy, obs, actions, advantages, old_logprobs);
    if (std::isfinite(kl) && std::isfinite(surr_new) && kl <= cfg.delta_kl &&
        surr_new > surr_old) {
      stats.accepted = true;
      stats.kl_after = kl;
      stats.surrogate_improvement = surr_new - surr_old;
      return stats;
    }
  }
  policy.set_flat_params(theta_old);
  return stats;
}

ValueFunction::ValueFunction(std::vector<int> layer_sizes, uint64_t seed)
    : mlp_(std::move(layer_sizes)) {
  mlp_.init(seed, 1.0, 1.0);
}

double ValueFunction::update(const Matrix& obs, const Vector& targets, int iters, double lr) {
  const long n = obs.cols();
  nn::AdamConfig cfg;
  cfg.lr = lr;
  double loss = 0.0;
  for (int it = 0; it < iters; ++it) {
    nn::Mlp::Cache cache;
    const Matrix pred = mlp_.forward(obs, cache);
    const Matrix err = pred - targets.transpose();
    loss = err.array().square().mean();
    const Matrix upstream = 2.0 * err / double(n);
    Vector params = mlp_.flat_params();
    nn::adam_step(params, mlp_.backward(cache, upstream), adam_, cfg);
    mlp_.set_flat_params(params);
  }
  return loss;
}

void TrainConfig::validate() const {
  if (epochs <= 0 || steps_per_epoch <= 0) throw std::invalid_argument("epochs/steps must be positive");
  if (policy_update_every <= 0 || disc_update_every <= 0) {
    throw std::invalid_argument("update cadences must be positive");
  }
  if (lambda < 0.0 || lambda > 1.0) throw vail::LambdaOutOfRange(lambda);
  if (gamma <= 0.0 || gamma > 1.0 || gae_lambda < 0.0 || gae_lambda > 1.0) {
    throw std::invalid_argument("gamma/gae_lambda out of range");
  }
  if (curriculum_period < 2 || curriculum_period % 2 != 0) throw curriculum::BadPeriod(curriculum_period);
}

Trainer::Trainer(const sim::BipedModel& model, const synth::SpeedLinearModel& synth_model,
                 const synth::BaseTrajectory& base, const vail::VailConfig& vail_cfg,
                 const TrainConfig& cfg)
    : model_(model),
      synth_model_(synth_model),
      base_(base),
      cfg_(cfg),
      policy_([&] {
        std::vector<int> sizes = {sim::kObsDim};
        sizes.insert(sizes.end(), cfg.policy_hidden.begin(), cfg.policy_hidden.end());
        sizes.push_back(sim::kNumActuated);
        return sizes;
      }(), cfg.policy_log_std0, cfg.seed ^ 0xa076bc2f013cull),
      value_([&] {
        std::vector<int> sizes = {sim::kObsDim};
        sizes.insert(sizes.end(), cfg.value_hidden.begin(), cfg.value_hidden.end());
        sizes.push_back(1);
        return sizes;
      }(), cfg.seed ^ 0x51f3ab9d02ull),
      vail_([&] {
        vail::VailConfig vc = vail_cfg;
        vc.seed = cfg.seed ^ 0x7c9d8e31ull;
        return vc;
      }()),
      scheduler_(cfg.curriculum_kind, cfg.speed_range, cfg.curriculum_period,
                 cfg.seed ^ 0x3d91ull),
      env_rng_(cfg.seed ^ 0x11aaull),
      policy_rng_(cfg.seed ^ 0x22bbull),
      vail_rng_(cfg.seed ^ 0x33ccull) {
  cfg_.validate();
  // Expert rows over the evaluation grid of the curriculum range.
  for (double v = cfg_.speed_range.v_min; v <= cfg_.speed_range.v_max + 1e-9; v += 0.1) {
    vail::append_demo_rows(demos_, synth::generate_kinematics(synth_model_, base_, v));
  }
  set_target_speed(base_.base_speed_mps);
}

void Trainer::set_target_speed(double v) {
  target_speed_ = v;
  target_cycle_ = synth::generate_kinematics(synth_model_, base_, v);
  reset_episode();
}

void Trainer::reset_episode() {
  state_ = sim::reset_state(model_, target_speed_, target_cycle_, env_rng_);
  obs_ = sim::observe(model_, state_, target_speed_);
  episode_steps_ = 0;
}

RolloutBuffer Trainer::collect_rollout(long n_steps) {
  RolloutBuffer buf;
  buf.steps.reserve(size_t(n_steps));
  for (long i = 0; i < n_steps; ++i) {
    Transition tr;
    tr.obs = obs_;
    tr.target_speed = target_speed_;
    tr.action = policy_.sample_action(obs_, policy_rng_, &tr.logprob);

    const sim::StepResult res =
        sim::step(model_, state_, tr.action, target_speed_, model_.n_substeps);
    tr.v_com = sim::com_velocity(model_, res.state);
    tr.logit = vail_.logit(vail::disc_features(sim::Observation(tr.obs)));
    tr.r_disc = vail::imitation_reward(tr.logit);
    tr.r_speed = vail::speed_reward(target_speed_, tr.v_com);
    tr.r_mixed = vail::mixed_reward(cfg_.lambda, tr.r_disc, tr.r_speed);
    tr.fell = res.fell;

    state_ = res.state;
    obs_ = res.obs;
    ++episode_steps_;

    const bool episode_over = res.fell || episode_steps_ >= cfg_.max_episode_steps;
    tr.done = episode_over;
    buf.steps.push_back(std::move(tr));
    if (episode_over) {
      finished_episode_lengths_.push_back(episode_steps_);
      reset_episode();
    }
  }
  buf.bootstrap_obs = obs_;
  buf.bootstrap_done = !buf.steps.empty() && buf.steps.back().done;
  return buf;
}

void Trainer::policy_update(RolloutBuffer& pending, TrpoStats& last) {
  const long n = pending.size();
  if (n == 0) return;
  Matrix obs(sim::kObsDim, n);
  Matrix actions(sim::kNumActuated, n);
  Vector rewards(n);
  std::vector<uint8_t> dones(static_cast<size_t>(n), 0);
  for (long j = 0; j < n; ++j) {
    const Transition& tr = pending.steps[j];
    obs.col(j) = tr.obs;
    actions.col(j) = tr.action;
    rewards[j] = tr.r_mixed;
    dones[j] = tr.done ? 1 : 0;
  }
  Vector values = value_.values(obs);
  for (long j = 0; j < n; ++j) pending.steps[j].value = values[j];
  const double bootstrap =
      pending.bootstrap_done ? 0.0 : value_.value(pending.bootstrap_obs);

  GaeResult gae = gae_advantages(rewards, dones, values, bootstrap, cfg_.gamma, cfg_.gae_lambda);
  const Vector norm_adv = normalize_advantages(gae.advantages);
  last = trpo_update(policy_, obs, actions, norm_adv, cfg_.trpo);
  value_.update(obs, gae.returns, int(cfg_.value_iters), cfg_.value_lr);
  pending.clear();
}

void Trainer::disc_update(std::vector<vail::Feature>& pending) {
  if (pending.empty() || demos_.size() == 0) return;
  const int batch = std::min<int>(cfg_.disc_batch, int(pending.size()));
  const auto expert_idx = demos_.indices_near(target_speed_, vail_.config().demo_speed_window);

  std::vector<vail::Feature> expert_batch(static_cast<size_t>(batch));
  std::vector<vail::Feature> policy_batch(static_cast<size_t>(batch));
  std::uniform_int_distribution<int> pick_expert(0, int(expert_idx.size()) - 1);
  std::uniform_int_distribution<int> pick_policy(0, int(pending.size()) - 1);
  for (int i = 0; i < batch; ++i) {
    expert_batch[i] = demos_.row(expert_idx[size_t(pick_expert(vail_rng_))]);
    policy_batch[i] = pending[size_t(pick_policy(vail_rng_))];
  }
  vail_.update(expert_batch, policy_batch, vail_rng_);
  pending.clear();
}

TrainResult Trainer::train(const std::string& out_dir) {
  TrainResult result;
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  RolloutBuffer pending_policy;
  std::vector<vail::Feature> pending_disc;
  long global_step = 0;
  TrpoStats last_trpo;

  for (long epoch = 0; epoch < cfg_.epochs; ++epoch) {
    set_target_speed(scheduler_.target_for_epoch(epoch));
    finished_episode_lengths_.clear();

    double sum_r_disc = 0.0, sum_r_speed = 0.0;
    for (long s = 0; s < cfg_.steps_per_epoch; ++s) {
      RolloutBuffer chunk = collect_rollout(1);
      Transition& tr = chunk.steps.front();
      sum_r_disc += tr.r_disc;
      sum_r_speed += tr.r_speed;
      pending_disc.push_back(vail::disc_features(sim::Observation(tr.obs)));
      pending_policy.steps.push_back(std::move(tr));
      pending_policy.bootstrap_obs = chunk.bootstrap_obs;
      pending_policy.bootstrap_done = chunk.bootstrap_done;
      ++global_step;

      if (global_step % cfg_.policy_update_every == 0) {
        policy_update(pending_policy, last_trpo);
        ++result.policy_updates;
      }
      if (global_step % cfg_.disc_update_every == 0) {
        disc_update(pending_disc);
        ++result.disc_updates;
      }
    }
    // The epoch boundary truncates the running episode; GAE must not
    // bootstrap across the reset.
    if (!pending_policy.steps.empty()) {
      pending_policy.steps.back().done = true;
      pending_policy.bootstrap_done = true;
    }

    EpochLog row;
    row.epoch = epoch;
    row.target_speed = target_speed_;
    row.mean_r_disc = sum_r_disc / double(cfg_.steps_per_epoch);
    row.mean_r_speed = sum_r_speed / double(cfg_.steps_per_epoch);
    row.mean_episode_length =
        finished_episode_lengths_.empty()
            ? double(episode_steps_)
            : double(std::accumulate(finished_episode_lengths_.begin(),
                                     finished_episode_lengths_.end(), 0L)) /
                  double(finished_episode_lengths_.size());
    row.beta = vail_.bottleneck().beta;
    row.kl = last_trpo.kl_after;
    result.log.push_back(row);

    if (!out_dir.empty() && cfg_.checkpoint_every > 0 &&
        (epoch + 1) % cfg_.checkpoint_every == 0) {
      save_checkpoints(out_dir);
    }
  }
  result.env_steps = global_step;
  result.policy_hash = nn::params_hash(policy_.flat_params());

  if (!out_dir.empty()) {
    save_checkpoints(out_dir);
    std::ofstream log_file(out_dir + "/train_log.csv", std::ios::binary);
    log_file << train_log_csv(result.log);
  }
  return result;
}

void Trainer::save_checkpoints(const std::string& out_dir) const {
  std::vector<int> policy_layers = policy_.layer_sizes();
  nn::save_checkpoint(out_dir + "/policy", policy_layers, policy_.flat_params(), cfg_.seed);
  nn::save_checkpoint(out_dir + "/value", value_.layer_sizes(), value_.flat_params(), cfg_.seed);
  nn::save_checkpoint(out_dir + "/encoder", vail_.encoder_layers(), vail_.encoder_params(),
                      cfg_.seed);
  nn::save_checkpoint(out_dir + "/discriminator", vail_.disc_layers(), vail_.disc_params(),
                      cfg_.seed);
}

std::string train_log_csv(const std::vector<EpochLog>& log) {
  std::ostringstream out;
  out << "epoch,target_speed,mean_r_disc,mean_r_speed,mean_episode_length,beta,kl\n";
  for (const auto& row : log) {
    out << row.epoch << ',' << csv::format_double(row.target_speed) << ','
        << csv::format_double(row.mean_r_disc) << ',' << csv::format_double(row.mean_r_speed)
        << ',' << csv::format_double(row.mean_episode_length) << ','
        << csv::format_double(row.beta) << ',' << csv::format_double(row.kl) << '\n';
  }
  return out.str();
}

}  // namespace gaitforge::rl
