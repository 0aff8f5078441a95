#include "gaitforge/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gaitforge/csv.hpp"

namespace gaitforge::config {

using json = nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& section,
                    const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) {
      throw ConfigError("unknown key '" + it.key() + "' in section '" + section + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& dst) {
  if (obj.contains(key)) dst = obj.at(key).get<T>();
}

void apply_profile(rl::TrainConfig& t, const std::string& profile) {
  if (profile == "desk") {
    t.epochs = 200;
    t.steps_per_epoch = 2000;
    t.policy_update_every = 500;
    t.disc_update_every = 1000;
    t.curriculum_period = 40;
  } else if (profile == "paper") {
    t.epochs = 4000;
    t.steps_per_epoch = 5000;
    t.policy_update_every = 1000;
    t.disc_update_every = 3000;
    t.curriculum_period = 200;
  } else {
    throw ConfigError("trpo.profile must be 'desk' or 'paper', got '" + profile + "'");
  }
}

}  // namespace

RunConfig RunConfig::defaults() { return RunConfig{}; }

RunConfig RunConfig::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc, "<root>",
                 {"seed", "data", "synth", "env", "vail", "trpo", "curriculum", "chirp",
                  "eval", "io"});
  if (!doc.contains("seed")) throw ConfigError("config requires a 'seed'");

  RunConfig cfg;
  cfg.seed = doc.at("seed").get<uint64_t>();

  if (doc.contains("data")) {
    const json& d = doc.at("data");
    reject_unknown(d, "data", {"n_points", "group_tolerance"});
    read(d, "n_points", cfg.data.n_points);
    read(d, "group_tolerance", cfg.data.group_tolerance);
    if (cfg.data.n_points < 2) throw ConfigError("data.n_points must be >= 2");
    if (cfg.data.group_tolerance < 0) throw ConfigError("data.group_tolerance must be >= 0");
  }

  if (doc.contains("synth")) {
    const json& s = doc.at("synth");
    reject_unknown(s, "synth", {"base_speed", "base_samples", "extrapolation_margin"});
    read(s, "base_speed", cfg.synth.base_speed);
    read(s, "base_samples", cfg.synth.base_samples);
    read(s, "extrapolation_margin", cfg.synth.extrapolation_margin);
    if (cfg.synth.base_samples < 3) throw ConfigError("synth.base_samples must be >= 3");
  }

  if (doc.contains("env")) {
    const json& e = doc.at("env");
    reject_unknown(e, "env",
                   {"total_mass", "gravity", "contact_stiffness", "contact_damping",
                    "friction_mu", "dt_phys", "n_substeps", "fall_height_ratio",
                    "fall_pitch_rad", "reset_noise_rad"});
    read(e, "total_mass", cfg.env.total_mass);
    read(e, "gravity", cfg.env.gravity);
    read(e, "contact_stiffness", cfg.env.contact_stiffness);
    read(e, "contact_damping", cfg.env.contact_damping);
    read(e, "friction_mu", cfg.env.friction_mu);
    read(e, "dt_phys", cfg.env.dt_phys);
    read(e, "n_substeps", cfg.env.n_substeps);
    read(e, "fall_height_ratio", cfg.env.fall_height_ratio);
    read(e, "fall_pitch_rad", cfg.env.fall_pitch_rad);
    read(e, "reset_noise_rad", cfg.env.reset_noise_rad);
    if (cfg.env.dt_phys <= 0 || cfg.env.n_substeps <= 0) {
      throw ConfigError("env.dt_phys and env.n_substeps must be positive");
    }
  }

  if (doc.contains("vail")) {
    const json& v = doc.at("vail");
    reject_unknown(v, "vail",
                   {"latent_dim", "encoder_hidden", "disc_hidden", "info_constraint",
                    "dual_step", "beta0", "learning_rate", "demo_speed_window"});
    read(v, "latent_dim", cfg.vail.latent_dim);
    read(v, "encoder_hidden", cfg.vail.encoder_hidden);
    read(v, "disc_hidden", cfg.vail.disc_hidden);
    read(v, "info_constraint", cfg.vail.info_constraint);
    read(v, "dual_step", cfg.vail.dual_step);
    read(v, "beta0", cfg.vail.beta0);
    read(v, "learning_rate", cfg.vail.learning_rate);
    read(v, "demo_speed_window", cfg.vail.demo_speed_window);
    if (cfg.vail.beta0 < 0) throw ConfigError("vail.beta0 must be >= 0");
  }

  if (doc.contains("trpo")) {
    const json& t = doc.at("trpo");
    reject_unknown(t, "trpo",
                   {"profile", "epochs", "steps_per_epoch", "policy_update_every",
                    "disc_update_every", "lambda", "gamma", "gae_lambda", "delta_kl",
                    "cg_iters", "cg_damping", "backtrack_coeff", "backtrack_steps",
                    "policy_hidden", "value_hidden", "policy_log_std0", "value_iters",
                    "value_lr", "checkpoint_every", "max_episode_steps", "disc_batch"});
    if (t.contains("profile")) apply_profile(cfg.trpo, t.at("profile").get<std::string>());
    read(t, "epochs", cfg.trpo.epochs);
    read(t, "steps_per_epoch", cfg.trpo.steps_per_epoch);
    read(t, "policy_update_every", cfg.trpo.policy_update_every);
    read(t, "disc_update_every", cfg.trpo.disc_update_every);
    read(t, "lambda", cfg.trpo.lambda);
    read(t, "gamma", cfg.trpo.gamma);
    read(t, "gae_lambda", cfg.trpo.gae_lambda);
    read(t, "delta_kl", cfg.trpo.trpo.delta_kl);
    read(t, "cg_iters", cfg.trpo.trpo.cg_iters);
    read(t, "cg_damping", cfg.trpo.trpo.cg_damping);
    read(t, "backtrack_coeff", cfg.trpo.trpo.backtrack_coeff);
    read(t, "backtrack_steps", cfg.trpo.trpo.backtrack_steps);
    read(t, "policy_hidden", cfg.trpo.policy_hidden);
    read(t, "value_hidden", cfg.trpo.value_hidden);
    read(t, "policy_log_std0", cfg.trpo.policy_log_std0);
    read(t, "value_iters", cfg.trpo.value_iters);
    read(t, "value_lr", cfg.trpo.value_lr);
    read(t, "checkpoint_every", cfg.trpo.checkpoint_every);
    read(t, "max_episode_steps", cfg.trpo.max_episode_steps);
    read(t, "disc_batch", cfg.trpo.disc_batch);
  }

  if (doc.contains("curriculum")) {
    const json& c = doc.at("curriculum");
    reject_unknown(c, "curriculum", {"kind", "period", "v_min", "v_max"});
    if (c.contains("kind")) {
      cfg.trpo.curriculum_kind = curriculum::kind_from_string(c.at("kind").get<std::string>());
    }
    read(c, "period", cfg.trpo.curriculum_period);
    read(c, "v_min", cfg.trpo.speed_range.v_min);
    read(c, "v_max", cfg.trpo.speed_range.v_max);
    if (cfg.trpo.speed_range.v_min <= 0 ||
        cfg.trpo.speed_range.v_min >= cfg.trpo.speed_range.v_max) {
      throw ConfigError("curriculum requires 0 < v_min < v_max");
    }
  }

  if (doc.contains("chirp")) {
    const json& c = doc.at("chirp");
    reject_unknown(c, "chirp", {"f0", "f1", "duration", "center", "amplitude"});
    read(c, "f0", cfg.chirp.f0_hz);
    read(c, "f1", cfg.chirp.f1_hz);
    read(c, "duration", cfg.chirp.duration_s);
    read(c, "center", cfg.chirp.center_mps);
    read(c, "amplitude", cfg.chirp.amplitude_mps);
    if (cfg.chirp.f0_hz <= 0 || cfg.chirp.f1_hz < cfg.chirp.f0_hz) {
      throw ConfigError("chirp requires 0 < f0 <= f1");
    }
  }

  if (doc.contains("eval")) {
    const json& e = doc.at("eval");
    reject_unknown(e, "eval",
                   {"speeds", "episodes_per_speed", "trials", "max_steps", "steady_discard",
                    "min_stride_steps", "chirp_episodes"});
    read(e, "speeds", cfg.eval.speeds);
    read(e, "episodes_per_speed", cfg.eval.episodes_per_speed);
    read(e, "trials", cfg.eval.trials);
    read(e, "max_steps", cfg.eval.max_steps);
    read(e, "steady_discard", cfg.eval.steady_discard);
    read(e, "min_stride_steps", cfg.eval.min_stride_steps);
    read(e, "chirp_episodes", cfg.eval.chirp_episodes);
  }

  if (doc.contains("io")) {
    const json& io = doc.at("io");
    reject_unknown(io, "io", {"plots"});
    read(io, "plots", cfg.io.plots);
  }

  if (const char* env_seed = std::getenv("GAITFORGE_SEED")) {
    cfg.seed = std::strtoull(env_seed, nullptr, 10);
  }
  cfg.trpo.seed = cfg.seed;
  cfg.vail.seed = cfg.seed;
  cfg.trpo.validate();
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string RunConfig::to_json() const {
  json doc;
  doc["seed"] = seed;
  doc["data"] = {{"n_points", data.n_points}, {"group_tolerance", data.group_tolerance}};
  doc["synth"] = {{"base_speed", synth.base_speed},
                  {"base_samples", synth.base_samples},
                  {"extrapolation_margin", synth.extrapolation_margin}};
  doc["env"] = {{"total_mass", env.total_mass},
                {"gravity", env.gravity},
                {"contact_stiffness", env.contact_stiffness},
                {"contact_damping", env.contact_damping},
                {"friction_mu", env.friction_mu},
                {"dt_phys", env.dt_phys},
                {"n_substeps", env.n_substeps},
                {"fall_height_ratio", env.fall_height_ratio},
                {"fall_pitch_rad", env.fall_pitch_rad},
                {"reset_noise_rad", env.reset_noise_rad}};
  doc["vail"] = {{"latent_dim", vail.latent_dim},
                 {"encoder_hidden", vail.encoder_hidden},
                 {"disc_hidden", vail.disc_hidden},
                 {"info_constraint", vail.info_constraint},
                 {"dual_step", vail.dual_step},
                 {"beta0", vail.beta0},
                 {"learning_rate", vail.learning_rate},
                 {"demo_speed_window", vail.demo_speed_window}};
  doc["trpo"] = {{"epochs", trpo.epochs},
                 {"steps_per_epoch", trpo.steps_per_epoch},
                 {"policy_update_every", trpo.policy_update_every},
                 {"disc_update_every", trpo.disc_update_every},
                 {"lambda", trpo.lambda},
                 {"gamma", trpo.gamma},
                 {"gae_lambda", trpo.gae_lambda},
                 {"delta_kl", trpo.trpo.delta_kl},
                 {"cg_iters", trpo.trpo.cg_iters},
                 {"cg_damping", trpo.trpo.cg_damping},
                 {"backtrack_coeff", trpo.trpo.backtrack_coeff},
                 {"backtrack_steps", trpo.trpo.backtrack_steps},
                 {"policy_hidden", trpo.policy_hidden},
                 {"value_hidden", trpo.value_hidden},
                 {"policy_log_std0", trpo.policy_log_std0},
                 {"value_iters", trpo.value_iters},
                 {"value_lr", trpo.value_lr},
                 {"checkpoint_every", trpo.checkpoint_every},
                 {"max_episode_steps", trpo.max_episode_steps},
                 {"disc_batch", trpo.disc_batch}};
  doc["curriculum"] = {
      {"kind", trpo.curriculum_kind == curriculum::Kind::kProgressive ? "progressive" : "random"},
      {"period", trpo.curriculum_period},
      {"v_min", trpo.speed_range.v_min},
      {"v_max", trpo.speed_range.v_max}};
  doc["chirp"] = {{"f0", chirp.f0_hz},
                  {"f1", chirp.f1_hz},
                  {"duration", chirp.duration_s},
                  {"center", chirp.center_mps},
                  {"amplitude", chirp.amplitude_mps}};
  doc["eval"] = {{"speeds", eval.speeds},
                 {"episodes_per_speed", eval.episodes_per_speed},
                 {"trials", eval.trials},
                 {"max_steps", eval.max_steps},
                 {"steady_discard", eval.steady_discard},
                 {"min_stride_steps", eval.min_stride_steps},
                 {"chirp_episodes", eval.chirp_episodes}};
  doc["io"] = {{"plots", io.plots}};
  return doc.dump(2) + "\n";
}

eval::EvalConfig RunConfig::eval_config() const {
  eval::EvalConfig ec;
  ec.speeds = eval.speeds;
  ec.episodes_per_speed = eval.episodes_per_speed;
  ec.trials = eval.trials;
  ec.max_steps = eval.max_steps;
  ec.steady_discard_steps = eval.steady_discard;
  ec.min_stride_steps = eval.min_stride_steps;
  ec.control_dt = env.dt_phys * env.n_substeps;
  ec.seed = seed;
  return ec;
}

}  // namespace gaitforge::config
