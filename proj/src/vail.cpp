#include "gaitforge/vail.hpp"

#include <cmath>
#include <sstream>

#include "gaitforge/csv.hpp"

namespace gaitforge::vail {

namespace {

constexpr double kSigmaClamp = 1e-7;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<int> encoder_layer_sizes(const VailConfig& cfg) {
  std::vector<int> sizes = {kFeatDim};
  sizes.insert(sizes.end(), cfg.encoder_hidden.begin(), cfg.encoder_hidden.end());
  sizes.push_back(2 * cfg.latent_dim);
  return sizes;
}

std::vector<int> disc_layer_sizes(const VailConfig& cfg) {
  std::vector<int> sizes = {cfg.latent_dim};
  sizes.insert(sizes.end(), cfg.disc_hidden.begin(), cfg.disc_hidden.end());
  sizes.push_back(1);
  return sizes;
}

}  // namespace

Feature disc_features(const sim::Observation& obs) {
  Feature f;
  f.segment<6>(0) = obs.segment<6>(6);
  f.segment<6>(6) = obs.segment<6>(12);
  f[12] = obs[0];
  return f;
}

double imitation_reward(double logit) {
  double s = sigmoid(logit);
  s = std::min(1.0 - kSigmaClamp, std::max(kSigmaClamp, s));
  return -std::log(1.0 - s);
}

double speed_reward(double v_target, double v_com) {
  const double err = v_target - v_com;
  return std::exp(-err * err);
}

double mixed_reward(double lambda, double r_disc, double r_speed) {
  if (lambda < 0.0 || lambda > 1.0) throw LambdaOutOfRange(lambda);
  return (1.0 - lambda) * r_disc + lambda * r_speed;
}

void DemoBuffer::add(const Feature& row, double speed) {
  rows_.push_back(row);
  speeds_.push_back(speed);
}

std::vector<int> DemoBuffer::indices_near(double speed, double window) const {
  std::vector<int> idx;
  for (int i = 0; i < size(); ++i) {
    if (std::abs(speeds_[i] - speed) <= window) idx.push_back(i);
  }
  if (idx.empty()) {
    idx.resize(size());
    for (int i = 0; i < size(); ++i) idx[i] = i;
  }
  return idx;
}

std::string DemoBuffer::to_csv() const {
  std::ostringstream out;
  for (int j = 0; j < kFeatDim; ++j) out << 'f' << j << ',';
  out << "speed\n";
  for (int i = 0; i < size(); ++i) {
    for (int j = 0; j < kFeatDim; ++j) out << csv::format_double(rows_[i][j]) << ',';
    out << csv::format_double(speeds_[i]) << '\n';
  }
  return out.str();
}

DemoBuffer DemoBuffer::from_csv(const std::string& text) {
  DemoBuffer buf;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      continue;
    }
    if (line.empty()) continue;
    auto cells = csv::split_line(line);
    if (int(cells.size()) != kFeatDim + 1) {
      throw std::runtime_error("demo buffer row has wrong arity");
    }
    Feature row;
    double v = 0.0;
    for (int j = 0; j < kFeatDim; ++j) {
      if (!csv::parse_double(cells[j], row[j])) throw std::runtime_error("bad demo cell");
    }
    if (!csv::parse_double(cells[kFeatDim], v)) throw std::runtime_error("bad demo speed");
    buf.add(row, v);
  }
  return buf;
}

void append_demo_rows(DemoBuffer& buffer, const synth::SyntheticCycle& cycle) {
  const int t = cycle.samples();
  for (int i = 0; i < t; ++i) {
    const double phase = double(i) / double(t);
    Feature row;
    row.segment<3>(0) = cycle.angles_at_phase(phase);
    row.segment<3>(3) = cycle.angles_at_phase(phase + 0.5);
    row.segment<3>(6) = cycle.velocities_at_phase(phase);
    row.segment<3>(9) = cycle.velocities_at_phase(phase + 0.5);
    row[12] = cycle.speed_mps;
    buffer.add(row, cycle.speed_mps);
  }
}

Vail::Vail(const VailConfig& cfg)
    : cfg_(cfg), encoder_(encoder_layer_sizes(cfg)), disc_(disc_layer_sizes(cfg)) {
  encoder_.init(cfg.seed ^ 0x9e3779b97f4a7c15ull, 1.0, 0.01);
  disc_.init(cfg.seed ^ 0xda3e39cb94b95bdbull, 1.0, 0.01);
  bstate_.beta = cfg.beta0;
  bstate_.info_constraint = cfg.info_constraint;
  bstate_.dual_step = cfg.dual_step;
}

double Vail::logit(const Feature& x) const {
  const nn::Vector enc_out = encoder_.forward1(x);
  const nn::Vector mean = enc_out.head(cfg_.latent_dim);
  return disc_.forward1(mean)[0];
}

UpdateStats Vail::update(const std::vector<Feature>& expert_batch,
                         const std::vector<Feature>& policy_batch, std::mt19937_64& rng) {
  const int n_e = int(expert_batch.size());
  const int n_p = int(policy_batch.size());
  if (n_e == 0 || n_p == 0) throw EmptyBatch();
  const int n = n_e + n_p;
  const int k = cfg_.latent_dim;

  nn::Matrix x(kFeatDim, n);
  for (int i = 0; i < n_e; ++i) x.col(i) = expert_batch[i];
  for (int i = 0; i < n_p; ++i) x.col(n_e + i) = policy_batch[i];

  nn::Mlp::Cache enc_cache;
  const nn::Matrix enc_out = encoder_.forward(x, enc_cache);

  // Reparameterized latents; the clamp region carries no log-std gradient.
  nn::Matrix mean = enc_out.topRows(k);
  nn::Matrix raw_log_std = enc_out.bottomRows(k);
  nn::Matrix log_std = raw_log_std;
  nn::Matrix clamp_mask = nn::Matrix::Ones(k, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < k; ++i) {
      const double clamped = nn::clamp_log_std(log_std(i, j));
      if (clamped != log_std(i, j)) clamp_mask(i, j) = 0.0;
      log_std(i, j) = clamped;
    }
  }
  nn::Matrix sigma = log_std.array().exp().matrix();
  nn::Matrix eps(k, n);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < k; ++i) eps(i, j) = normal(rng);
  }
  nn::Matrix z = mean + sigma.cwiseProduct(eps);

  nn::Mlp::Cache disc_cache;
  const nn::Matrix logits = disc_.forward(z, disc_cache);

  UpdateStats stats;
  // Binary cross entropy, expert label 1, policy label 0; group means.
  nn::Matrix dlogit(1, n);
  double bce = 0.0;
  int correct = 0;
  for (int j = 0; j < n; ++j) {
    const double logit_j = logits(0, j);
    const double s = sigmoid(logit_j);
    const bool expert = j < n_e;
    const double weight = expert ? 1.0 / n_e : 1.0 / n_p;
    if (expert) {
      bce += weight * -std::log(std::max(kSigmaClamp, s));
      correct += logit_j > 0.0;
    } else {
      bce += weight * -std::log(std::max(kSigmaClamp, 1.0 - s));
      correct += logit_j < 0.0;
    }
    dlogit(0, j) = weight * (s - (expert ? 1.0 : 0.0));
  }
  stats.accuracy = double(correct) / double(n);

  // KL(E(z|x) || N(0, I)) per sample, and its mean over both batches.
  double kl_sum = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < k; ++i) {
      const double mu = mean(i, j);
      const double s2 = sigma(i, j) * sigma(i, j);
      kl_sum += 0.5 * (mu * mu + s2 - 1.0) - log_std(i, j);
    }
  }
  stats.mean_kl = kl_sum / double(n);
  stats.loss = bce + bstate_.beta * (stats.mean_kl - bstate_.info_constraint);

  // Discriminator backward; its input gradient flows into the latents.
  nn::Matrix dz;
  const nn::Vector disc_grad = disc_.backward(disc_cache, dlogit, &dz);

  // Encoder upstream: reparameterization plus the bottleneck penalty.
  const double kl_w = bstate_.beta / double(n);
  nn::Matrix upstream(2 * k, n);
  upstream.topRows(k) = dz + kl_w * mean;
  upstream.bottomRows(k) =
      (dz.cwiseProduct(eps).cwiseProduct(sigma) +
       kl_w * (sigma.array().square() - 1.0).matrix())
          .cwiseProduct(clamp_mask);
  const nn::Vector enc_grad = encoder_.backward(enc_cache, upstream);

  nn::Vector params(encoder_.num_params() + disc_.num_params());
  params << encoder_.flat_params(), disc_.flat_params();
  nn::Vector grad(params.size());
  grad << enc_grad, disc_grad;
  nn::AdamConfig adam_cfg;
  adam_cfg.lr = cfg_.learning_rate;
  nn::adam_step(params, grad, adam_, adam_cfg);
  encoder_.set_flat_params(params.head(encoder_.num_params()));
  disc_.set_flat_params(params.tail(disc_.num_params()));

  bstate_.beta = std::max(
      0.0, bstate_.beta + bstate_.dual_step * (stats.mean_kl - bstate_.info_constraint));
  stats.beta_after = bstate_.beta;
  return stats;
}

}  // namespace gaitforge::vail
