#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gaitforge/biped_env.hpp"
#include "gaitforge/synth_model.hpp"
#include "gaitforge/vail.hpp"

using namespace gaitforge;

namespace {

synth::SyntheticCycle make_cycle(double speed) {
  synth::SpeedLinearModel model;
  const int n = 21;
  model.slope_deg_per_mps = gait::AngleGrid::Constant(3, n, 4.0);
  model.intercept_deg.resize(3, n);
  for (int p = 0; p < n; ++p) {
    const double w = 2.0 * M_PI * p / n;
    model.intercept_deg(0, p) = 9.0 * std::sin(w + 0.4);
    model.intercept_deg(1, p) = 13.0 * std::sin(w + 2.0);
    model.intercept_deg(2, p) = 5.0 * std::sin(w + 4.1);
  }
  model.fit_speeds = {0.65, 1.85};
  return synth::generate_kinematics(model, synth::base_from_model(model, 1.25, 168), speed);
}

vail::VailConfig toy_config(uint64_t seed) {
  vail::VailConfig cfg;
  cfg.latent_dim = 8;
  cfg.encoder_hidden = {32};
  cfg.disc_hidden = {32};
  cfg.learning_rate = 1e-3;
  cfg.seed = seed;
  return cfg;
}

std::vector<vail::Feature> toy_batch(double center, double spread, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<vail::Feature> batch(n);
  for (int i = 0; i < n; ++i) {
    batch[i].setZero();
    batch[i][0] = center + u(rng);
  }
  return batch;
}

}  // namespace

TEST_CASE("disc_features layout: angles, velocities, target speed") {
  sim::Observation obs = sim::Observation::Zero();
  obs[0] = 1.25;
  const vail::Feature f0 = vail::disc_features(obs);
  CHECK(vail::kFeatDim == 13);
  for (int i = 0; i < 12; ++i) CHECK(f0[i] == 0.0);
  CHECK(f0[12] == 1.25);

  for (int i = 0; i < 6; ++i) {
    obs[6 + i] = 0.1 * (i + 1);   // joint angles
    obs[12 + i] = -0.2 * (i + 1); // joint velocities
  }
  const vail::Feature f = vail::disc_features(obs);
  for (int i = 0; i < 6; ++i) {
    CHECK(f[i] == doctest::Approx(0.1 * (i + 1)));
    CHECK(f[6 + i] == doctest::Approx(-0.2 * (i + 1)));
  }
}

TEST_CASE("expert demo rows match replayed observations") {
  const synth::SyntheticCycle cycle = make_cycle(1.15);
  vail::DemoBuffer buf;
  vail::append_demo_rows(buf, cycle);
  REQUIRE(buf.size() == cycle.samples());

  sim::BipedModel model;
  for (int i : {0, 17, 93}) {
    const double phase = double(i) / cycle.samples();
    sim::BipedState s;
    s.q.segment<3>(3) = cycle.angles_at_phase(phase);
    s.q.segment<3>(6) = cycle.angles_at_phase(phase + 0.5);
    s.qd.segment<3>(3) = cycle.velocities_at_phase(phase);
    s.qd.segment<3>(6) = cycle.velocities_at_phase(phase + 0.5);
    const sim::Observation obs = sim::observe(model, s, cycle.speed_mps);
    CHECK((vail::disc_features(obs) - buf.row(i)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("imitation reward evaluates the adversarial reward closed form") {
  CHECK(vail::imitation_reward(0.0) == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(vail::imitation_reward(2.0) == doctest::Approx(2.126928).epsilon(1e-6));
  // Saturated discriminator: reward collapses to the clamp floor.
  CHECK(vail::imitation_reward(-50.0) == doctest::Approx(1e-7).epsilon(0.01));
  CHECK(vail::imitation_reward(-50.0) > 0.0);
}

TEST_CASE("imitation reward is strictly monotone over the clamp range") {
  double prev = vail::imitation_reward(-14.0);
  for (double logit = -13.0; logit <= 14.0; logit += 0.5) {
    const double cur = vail::imitation_reward(logit);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("speed reward evaluates the exponential error form") {
  CHECK(vail::speed_reward(1.25, 1.25) == 1.0);
  CHECK(vail::speed_reward(1.25, 0.75) == doctest::Approx(0.778801).epsilon(1e-6));
  CHECK(vail::speed_reward(1.85, 0.0) == doctest::Approx(0.0326308).epsilon(1e-5));
}

TEST_CASE("speed reward is symmetric and maximal only at zero error") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 100; ++i) {
    const double t = 1.25, e = u(rng);
    CHECK(vail::speed_reward(t, t + e) == doctest::Approx(vail::speed_reward(t, t - e)));
    if (std::abs(e) > 1e-6) CHECK(vail::speed_reward(t, t + e) < 1.0);
  }
}

TEST_CASE("mixed reward is affine with bit-exact endpoints") {
  const double r_disc = 0.693147, r_speed = 1.0;
  CHECK(vail::mixed_reward(0.0, r_disc, r_speed) == r_disc);
  CHECK(vail::mixed_reward(1.0, r_disc, r_speed) == r_speed);
  CHECK(vail::mixed_reward(0.5, 0.693147, 1.0) == doctest::Approx(0.846574).epsilon(1e-6));
  CHECK_THROWS_AS(vail::mixed_reward(-0.1, 1, 1), vail::LambdaOutOfRange);
  CHECK_THROWS_AS(vail::mixed_reward(1.1, 1, 1), vail::LambdaOutOfRange);
  // Affinity: r(l) - r(0) is proportional to l.
  const double r0 = vail::mixed_reward(0.0, 2.0, 0.5);
  const double r1 = vail::mixed_reward(1.0, 2.0, 0.5);
  for (double l = 0.0; l <= 1.0; l += 0.125) {
    CHECK(vail::mixed_reward(l, 2.0, 0.5) == doctest::Approx(r0 + l * (r1 - r0)).epsilon(1e-12));
  }
}

TEST_CASE("vail update applies the exact dual update to beta") {
  vail::Vail v(toy_config(42));
  std::mt19937_64 rng(43);
  const auto expert = toy_batch(1.0, 0.1, 32, rng);
  const auto policy = toy_batch(-1.0, 0.1, 32, rng);

  const double beta_before = v.bottleneck().beta;
  const double alpha = v.bottleneck().dual_step;
  const double i_c = v.bottleneck().info_constraint;
  const vail::UpdateStats stats = v.update(expert, policy, rng);
  CHECK(stats.beta_after ==
        doctest::Approx(std::max(0.0, beta_before + alpha * (stats.mean_kl - i_c))).epsilon(1e-12));
  if (stats.mean_kl > i_c) CHECK(stats.beta_after > beta_before);
}

TEST_CASE("beta stays pinned at zero when the constraint is slack") {
  vail::VailConfig cfg = toy_config(44);
  cfg.beta0 = 0.0;
  cfg.info_constraint = 1e9;  // never exceeded
  vail::Vail v(cfg);
  std::mt19937_64 rng(45);
  for (int i = 0; i < 5; ++i) {
    const auto expert = toy_batch(1.0, 0.1, 16, rng);
    const auto policy = toy_batch(-1.0, 0.1, 16, rng);
    CHECK(v.update(expert, policy, rng).beta_after == 0.0);
  }
}

TEST_CASE("beta never becomes negative") {
  vail::VailConfig cfg = toy_config(46);
  cfg.beta0 = 1e-9;
  cfg.dual_step = 1.0;  // aggressive dual step to force the projection
  cfg.info_constraint = 1e6;
  vail::Vail v(cfg);
  std::mt19937_64 rng(47);
  const auto expert = toy_batch(1.0, 0.1, 8, rng);
  const auto policy = toy_batch(-1.0, 0.1, 8, rng);
  CHECK(v.update(expert, policy, rng).beta_after == 0.0);
}

TEST_CASE("vail update rejects empty batches") {
  vail::Vail v(toy_config(48));
  std::mt19937_64 rng(49);
  const auto batch = toy_batch(1.0, 0.1, 4, rng);
  CHECK_THROWS_AS(v.update({}, batch, rng), vail::EmptyBatch);
  CHECK_THROWS_AS(v.update(batch, {}, rng), vail::EmptyBatch);
}

TEST_CASE("discriminator separates a linearly separable toy within 500 updates") {
  vail::Vail v(toy_config(50));
  std::mt19937_64 rng(51);
  double accuracy = 0.0;
  for (int it = 0; it < 500; ++it) {
    const auto expert = toy_batch(1.0, 0.1, 64, rng);
    const auto policy = toy_batch(-1.0, 0.1, 64, rng);
    accuracy = v.update(expert, policy, rng).accuracy;
    if (accuracy > 0.95 && it > 20) break;
  }
  CHECK(accuracy > 0.95);
}

TEST_CASE("identical distributions drive the mean logit to chance level") {
  vail::Vail v(toy_config(52));
  std::mt19937_64 rng(53);
  for (int it = 0; it < 400; ++it) {
    const auto expert = toy_batch(0.0, 0.5, 64, rng);
    const auto policy = toy_batch(0.0, 0.5, 64, rng);
    v.update(expert, policy, rng);
  }
  // Mean logit over fresh samples from the shared distribution.
  double mean_logit = 0.0, mean_reward = 0.0;
  const auto probe = toy_batch(0.0, 0.5, 256, rng);
  for (const auto& x : probe) {
    const double logit = v.logit(x);
    mean_logit += logit / 256.0;
    mean_reward += vail::imitation_reward(logit) / 256.0;
  }
  CHECK(std::abs(mean_logit) < 0.15);
  CHECK(std::abs(mean_reward - std::log(2.0)) < 0.15);
}

TEST_CASE("with an inert bottleneck the update reduces to plain adversarial training") {
  // i_c = infinity keeps beta at zero forever; the KL penalty never acts.
  vail::VailConfig cfg = toy_config(54);
  cfg.beta0 = 0.0;
  cfg.info_constraint = std::numeric_limits<double>::infinity();
  vail::Vail v(cfg);
  std::mt19937_64 rng(55);
  for (int i = 0; i < 50; ++i) {
    const auto expert = toy_batch(1.0, 0.1, 32, rng);
    const auto policy = toy_batch(-1.0, 0.1, 32, rng);
    const auto stats = v.update(expert, policy, rng);
    CHECK(stats.beta_after == 0.0);
  }
}

TEST_CASE("demo buffer CSV round-trip and speed-window sampling") {
  vail::DemoBuffer buf;
  std::mt19937_64 rng(56);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    vail::Feature row;
    for (int j = 0; j < vail::kFeatDim; ++j) row[j] = n(rng);
    buf.add(row, 0.7 + 0.05 * i);
  }
  const vail::DemoBuffer back = vail::DemoBuffer::from_csv(buf.to_csv());
  REQUIRE(back.size() == buf.size());
  for (int i = 0; i < buf.size(); ++i) {
    CHECK((back.row(i) - buf.row(i)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.speed(i) == buf.speed(i));
  }

  const auto near = buf.indices_near(1.0, 0.1);
  for (int idx : near) CHECK(std::abs(buf.speed(idx) - 1.0) <= 0.1 + 1e-12);
  CHECK_FALSE(near.empty());
  // Outside any window: falls back to the full buffer.
  CHECK(buf.indices_near(99.0, 0.1).size() == size_t(buf.size()));
}
