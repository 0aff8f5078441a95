#include "gaitforge/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gaitforge/checkpoint.hpp"
#include "gaitforge/csv.hpp"
#include "gaitforge/eval_harness.hpp"
#include "gaitforge/fixtures.hpp"
#include "gaitforge/gait_data.hpp"
#include "gaitforge/policy_opt.hpp"
#include "gaitforge/run_config.hpp"
#include "gaitforge/sha256.hpp"
#include "gaitforge/svg_plot.hpp"
#include "gaitforge/synth_model.hpp"

namespace gaitforge::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

config::RunConfig load_config(const std::string& path) {
  if (path.empty()) {
    config::RunConfig cfg = config::RunConfig::defaults();
    if (const char* env_seed = std::getenv("GAITFORGE_SEED")) {
      cfg.seed = std::strtoull(env_seed, nullptr, 10);
      cfg.trpo.seed = cfg.seed;
      cfg.vail.seed = cfg.seed;
    }
    return cfg;
  }
  if (!fs::exists(path)) throw UsageError("config file not found: " + path);
  return config::RunConfig::from_file(path);
}

std::string read_file_checked(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("input file not found: " + path);
  return csv::read_file(path);
}

void write_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

// Manifest next to an artifact: config echo, seed, content hashes.
void write_manifest(const std::string& dir_or_stem, const config::RunConfig& cfg,
                    const std::map<std::string, std::string>& hashes, bool is_dir) {
  json doc;
  doc["seed"] = cfg.seed;
  doc["config"] = json::parse(cfg.to_json());
  json files = json::object();
  for (const auto& [name, hash] : hashes) files[name] = hash;
  doc["content_sha256"] = files;
  const std::string path =
      is_dir ? dir_or_stem + "/manifest.json" : dir_or_stem + ".manifest.json";
  write_file(path, doc.dump(2) + "\n");
}

std::string hash_file(const std::string& path) { return Sha256::of(csv::read_file(path)); }

json profiles_to_json(const std::vector<gait::MeanGaitProfile>& profiles) {
  json arr = json::array();
  for (const auto& p : profiles) {
    json entry;
    entry["speed"] = p.speed_mps;
    entry["n_points"] = p.n_points();
    if (p.stride_duration_s) entry["stride_duration_s"] = *p.stride_duration_s;
    json rows = json::array();
    for (int j = 0; j < 3; ++j) {
      json row = json::array();
      for (int k = 0; k < p.n_points(); ++k) row.push_back(p.angles_deg(j, k));
      rows.push_back(std::move(row));
    }
    entry["angles_deg"] = rows;
    arr.push_back(std::move(entry));
  }
  return arr;
}

std::vector<gait::MeanGaitProfile> profiles_from_json(const json& arr) {
  std::vector<gait::MeanGaitProfile> profiles;
  for (const auto& entry : arr) {
    gait::MeanGaitProfile p;
    p.speed_mps = entry.at("speed").get<double>();
    const int n = entry.at("n_points").get<int>();
    if (entry.contains("stride_duration_s")) {
      p.stride_duration_s = entry.at("stride_duration_s").get<double>();
    }
    p.angles_deg.resize(3, n);
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < n; ++k) {
        p.angles_deg(j, k) = entry.at("angles_deg").at(j).at(k).get<double>();
      }
    }
    profiles.push_back(std::move(p));
  }
  return profiles;
}

synth::BaseTrajectory make_base(const synth::SpeedLinearModel& model,
                                const config::RunConfig& cfg) {
  return synth::base_from_model(model, cfg.synth.base_speed, cfg.synth.base_samples);
}

int cmd_fixture(const std::string& out, double noise_deg, uint64_t seed) {
  fixtures::FixtureSpec spec;
  spec.noise_deg = noise_deg;
  spec.seed = seed;
  write_file(out, fixtures::make_fixture_csv(fixtures::SurrogateGait{}, spec));
  std::cout << "wrote fixture CSV: " << out << "\n";
  return kExitOk;
}

int cmd_ingest(const std::string& input, const std::string& out, const config::RunConfig& cfg) {
  const std::string bytes = read_file_checked(input);
  const gait::GaitTable table = gait::parse_gait_csv(bytes);
  const auto profiles = gait::ingest_table(table, cfg.data.n_points, cfg.data.group_tolerance);
  write_file(out, profiles_to_json(profiles).dump(2) + "\n");
  write_manifest(out, cfg, {{fs::path(out).filename().string(), hash_file(out)}}, false);
  std::cout << "ingested " << table.rows.size() << " rows into " << profiles.size()
            << " profiles: " << out << "\n";
  return kExitOk;
}

int cmd_fit(const std::string& profiles_path, const std::string& out,
            const config::RunConfig& cfg) {
  const auto profiles = profiles_from_json(json::parse(read_file_checked(profiles_path)));
  const synth::SpeedLinearModel model = synth::fit_speed_model(profiles);
  write_file(out, model.to_json());

  const synth::BaseTrajectory base = make_base(model, cfg);
  const synth::FitQuality q = synth::fit_quality(model, base, profiles);
  json quality = {{"rmse_deg", {q.rmse_deg[0], q.rmse_deg[1], q.rmse_deg[2]}},
                  {"rmse_overall_deg", q.rmse_overall_deg},
                  {"r2", q.r2_overall}};
  const std::string quality_path = out + ".quality.json";
  write_file(quality_path, quality.dump(2) + "\n");
  write_manifest(out, cfg, {{fs::path(out).filename().string(), hash_file(out)}}, false);
  std::cout << "fit " << profiles.size() << " profiles; overall RMSE "
            << csv::format_double(q.rmse_overall_deg) << " deg, R2 "
            << csv::format_double(q.r2_overall) << "\n";
  return kExitOk;
}

int cmd_synth(const std::string& model_path, double speed, const std::string& out,
              const config::RunConfig& cfg) {
  const auto model = synth::SpeedLinearModel::from_json(read_file_checked(model_path));
  const synth::BaseTrajectory base = make_base(model, cfg);
  const synth::SyntheticCycle cycle =
      synth::generate_kinematics(model, base, speed, cfg.synth.extrapolation_margin);
  write_file(out, synth::cycle_to_csv(cycle));
  write_manifest(out, cfg, {{fs::path(out).filename().string(), hash_file(out)}}, false);
  std::cout << "synthesized cycle at " << csv::format_double(speed) << " m/s, "
            << cycle.samples() << " samples, stride "
            << csv::format_double(cycle.stride_duration_s) << " s: " << out << "\n";
  return kExitOk;
}

int cmd_train(const std::string& model_path, const std::string& out_dir,
              const config::RunConfig& cfg) {
  const auto model = synth::SpeedLinearModel::from_json(read_file_checked(model_path));
  const synth::BaseTrajectory base = make_base(model, cfg);
  rl::Trainer trainer(cfg.env, model, base, cfg.vail, cfg.trpo);
  const rl::TrainResult result = trainer.train(out_dir);
  write_file(out_dir + "/demos.csv", trainer.demos().to_csv());

  std::map<std::string, std::string> hashes;
  for (const char* stem : {"policy", "value", "encoder", "discriminator"}) {
    hashes[std::string(stem) + ".f64"] = hash_file(out_dir + "/" + stem + ".f64");
  }
  hashes["train_log.csv"] = hash_file(out_dir + "/train_log.csv");
  hashes["demos.csv"] = hash_file(out_dir + "/demos.csv");
  write_manifest(out_dir, cfg, hashes, true);

  json audit = {{"env_steps", result.env_steps},
                {"policy_updates", result.policy_updates},
                {"disc_updates", result.disc_updates},
                {"policy_hash", result.policy_hash}};
  write_file(out_dir + "/audit.json", audit.dump(2) + "\n");
  std::cout << "trained " << cfg.trpo.epochs << " epochs (" << result.env_steps
            << " env steps); policy hash " << result.policy_hash.substr(0, 12) << "...: "
            << out_dir << "\n";
  return kExitOk;
}

std::unique_ptr<eval::Agent> make_agent(const std::string& policy_arg,
                                        const synth::SpeedLinearModel& model,
                                        const synth::BaseTrajectory& base,
                                        const config::RunConfig& cfg) {
  if (policy_arg == "oracle") {
    return eval::oracle_replay(cfg.env, model, base);
  }
  const nn::Checkpoint ckpt = nn::load_checkpoint(policy_arg + "/policy");
  rl::GaussianPolicy policy(ckpt.layer_sizes, 0.0, 0);
  policy.set_flat_params(ckpt.params);
  return std::make_unique<eval::PolicyAgent>(cfg.env, policy, model, base);
}

void emit_eval_plots(const std::string& dir, const eval::EvalRecord& record,
                     const eval::MetricsSummary& summary,
                     const synth::SpeedLinearModel& model, const synth::BaseTrajectory& base,
                     const config::RunConfig& cfg) {
  fs::create_directories(dir + "/plots");

  svg::Plot track("Target vs measured speed", "target speed (m/s)", "measured speed (m/s)");
  track.line({summary.speed.per_episode_target.front(), summary.speed.per_episode_target.back()},
             {summary.speed.per_episode_target.front(), summary.speed.per_episode_target.back()},
             "#999999", "identity");
  track.scatter(summary.speed.per_episode_target, summary.speed.per_episode_mean, "#c23a3a",
                "episodes");
  track.write(dir + "/plots/speed_tracking.svg");

  // Stride-mean kinematics against the synthetic reference at the median
  // grid speed.
  if (!record.episodes.empty()) {
    const double v = record.episodes[record.episodes.size() / 2].target_speed;
    const synth::SyntheticCycle cycle = synth::generate_kinematics(model, base, v);
    for (const auto& tr : record.episodes) {
      if (std::abs(tr.target_speed - v) > 1e-12) continue;
      const eval::StrideSet strides = eval::segment_strides(
          tr.left_hip_series(), cfg.eval.min_stride_steps, record.control_dt);
      if (strides.size() == 0) continue;
      const char* names[3] = {"hip", "knee", "ankle"};
      const int n = cycle.samples();
      const Eigen::Matrix3Xd agent =
          eval::mean_stride_curve(strides, tr.left_joint_series(), n);
      const Eigen::Matrix3Xd ref = eval::aligned_reference(cycle, n);
      std::vector<double> phase(n);
      for (int i = 0; i < n; ++i) phase[i] = 100.0 * i / n;
      for (int j = 0; j < 3; ++j) {
        svg::Plot pk(std::string(names[j]) + " angle vs phase", "gait cycle (%)", "angle (deg)");
        std::vector<double> ref_deg(n), agent_deg(n);
        for (int i = 0; i < n; ++i) {
          ref_deg[i] = ref(j, i) * synth::kRad2Deg;
          agent_deg[i] = agent(j, i) * synth::kRad2Deg;
        }
        pk.line(phase, ref_deg, "#3366cc", "synthetic");
        pk.line(phase, agent_deg, "#c23a3a", "agent mean stride");
        pk.write(dir + "/plots/kinematics_" + names[j] + ".svg");
      }
      const eval::KineticsCurves kc =
          eval::kinetics_curves(tr, strides, cfg.env, 101);
      std::vector<double> kphase(101);
      for (int i = 0; i < 101; ++i) kphase[i] = 100.0 * i / 101.0;
      for (int j = 0; j < 3; ++j) {
        svg::Plot pt(std::string(names[j]) + " torque/power per mass", "gait cycle (%)",
                     "N m/kg, W/kg");
        std::vector<double> tq(101), pw(101);
        for (int i = 0; i < 101; ++i) {
          tq[i] = kc.torque_per_mass(j, i);
          pw[i] = kc.power_per_mass(j, i);
        }
        pt.line(kphase, tq, "#3366cc", "torque");
        pt.line(kphase, pw, "#c23a3a", "power");
        pt.write(dir + "/plots/kinetics_" + names[j] + ".svg");
      }
      break;
    }
  }
}

int cmd_eval(const std::string& model_path, const std::string& policy_arg,
             const std::string& out_dir, const config::RunConfig& cfg) {
  const auto model = synth::SpeedLinearModel::from_json(read_file_checked(model_path));
  const synth::BaseTrajectory base = make_base(model, cfg);
  auto agent = make_agent(policy_arg, model, base, cfg);

  const eval::EvalConfig ecfg = cfg.eval_config();
  const eval::EvalRecord record = eval::run_eval(*agent, ecfg);
  const eval::MetricsSummary summary = eval::summarize(record, model, base, ecfg);
  eval::write_record(out_dir, record, summary, cfg.env, ecfg);

  if (cfg.io.plots) emit_eval_plots(out_dir, record, summary, model, base, cfg);

  std::map<std::string, std::string> hashes;
  hashes["metrics.json"] = hash_file(out_dir + "/metrics.json");
  hashes["strides.json"] = hash_file(out_dir + "/strides.json");
  write_manifest(out_dir, cfg, hashes, true);
  if (summary.joints.count > 0) {
    std::cout << "eval: joint RMSE " << csv::format_double(summary.joints.rmse_overall_deg)
              << " deg, joint R2 " << csv::format_double(summary.joints.r2_overall);
  } else {
    std::cout << "eval: joint metrics n/a (no strides survived the duration filter)";
  }
  std::cout << ", speed RMSE " << csv::format_double(summary.speed.rmse) << " m/s, speed R2 "
            << csv::format_double(summary.speed.r2) << ": " << out_dir << "\n";
  return kExitOk;
}

int cmd_chirp(const std::string& model_path, const std::string& policy_arg,
              const std::string& out_dir, const config::RunConfig& cfg) {
  const auto model = synth::SpeedLinearModel::from_json(read_file_checked(model_path));
  const synth::BaseTrajectory base = make_base(model, cfg);
  auto agent = make_agent(policy_arg, model, base, cfg);

  const double control_dt = cfg.env.dt_phys * cfg.env.n_substeps;
  const eval::ChirpResult result =
      eval::chirp_tracking(*agent, cfg.chirp, cfg.eval.chirp_episodes, control_dt, cfg.seed);

  fs::create_directories(out_dir);
  {
    csv::Writer w(out_dir + "/chirp.csv");
    w.header({"t", "target", "mean", "sd"});
    for (size_t i = 0; i < result.t.size(); ++i) {
      w.row({result.t[i], result.target[i], result.mean[i], result.sd[i]});
    }
  }
  json metrics = {{"rmse", result.rmse},
                  {"episodes", cfg.eval.chirp_episodes},
                  {"duration_s", cfg.chirp.duration_s}};
  write_file(out_dir + "/chirp_metrics.json", metrics.dump(2) + "\n");

  if (cfg.io.plots) {
    fs::create_directories(out_dir + "/plots");
    svg::Plot p("Chirp tracking", "time (s)", "speed (m/s)");
    std::vector<double> lo(result.t.size()), hi(result.t.size());
    for (size_t i = 0; i < result.t.size(); ++i) {
      lo[i] = result.mean[i] - result.sd[i];
      hi[i] = result.mean[i] + result.sd[i];
    }
    p.band(result.t, lo, hi, "#c23a3a");
    p.line(result.t, result.target, "#3366cc", "target");
    p.line(result.t, result.mean, "#c23a3a", "measured mean");
    p.write(out_dir + "/plots/chirp.svg");
  }

  std::map<std::string, std::string> hashes;
  hashes["chirp.csv"] = hash_file(out_dir + "/chirp.csv");
  hashes["chirp_metrics.json"] = hash_file(out_dir + "/chirp_metrics.json");
  write_manifest(out_dir, cfg, hashes, true);
  std::cout << "chirp RMSE " << csv::format_double(result.rmse) << " m/s over "
            << cfg.eval.chirp_episodes << " episodes: " << out_dir << "\n";
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_dir,
               const config::RunConfig& cfg) {
  if (inputs.empty()) throw UsageError("report needs at least one eval directory");

  struct Run {
    std::string name;
    json metrics;
  };
  std::vector<Run> runs;
  std::set<std::string> schema;
  for (const std::string& dir : inputs) {
    const std::string path = dir + "/metrics.json";
    if (!fs::exists(path)) throw UsageError("not an eval directory (missing metrics.json): " + dir);
    Run run;
    run.name = fs::path(dir).filename().string();
    run.metrics = json::parse(read_file_checked(path));
    std::set<std::string> keys;
    for (auto it = run.metrics.begin(); it != run.metrics.end(); ++it) keys.insert(it.key());
    if (runs.empty()) {
      schema = keys;
    } else if (keys != schema) {
      throw UsageError("mixed metrics schemas; refusing to aggregate: " + dir);
    }
    runs.push_back(std::move(run));
  }

  // Best row per criterion, mirroring the bold markers of the results
  // table; runs without surviving strides carry dashes and never win the
  // kinematic column.
  auto joint_rmse_of = [](const json& m) -> std::optional<double> {
    const json& j = m.at("joint_rmse_deg");
    if (j.is_null()) return std::nullopt;
    return j.at("overall").get<double>();
  };
  size_t best_speed = 0;
  std::optional<size_t> best_joint;
  for (size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].metrics.at("speed_rmse").get<double>() <
        runs[best_speed].metrics.at("speed_rmse").get<double>()) {
      best_speed = i;
    }
    const auto rmse = joint_rmse_of(runs[i].metrics);
    if (rmse && (!best_joint || *rmse < *joint_rmse_of(runs[*best_joint].metrics))) {
      best_joint = i;
    }
  }

  fs::create_directories(out_dir);
  {
    std::ofstream out(out_dir + "/report.csv", std::ios::binary);
    out << "run,speed_rmse_mps,speed_r2,joint_rmse_deg,joint_r2,best_speed,best_kinematics\n";
    for (size_t i = 0; i < runs.size(); ++i) {
      const json& m = runs[i].metrics;
      out << runs[i].name << ',' << csv::format_double(m.at("speed_rmse").get<double>()) << ','
          << csv::format_double(m.at("speed_r2").get<double>()) << ',';
      const auto rmse = joint_rmse_of(m);
      if (rmse) {
        out << csv::format_double(*rmse) << ',' << csv::format_double(m.at("joint_r2").get<double>());
      } else {
        out << "-,-";
      }
      out << ',' << (i == best_speed ? 1 : 0) << ','
          << (best_joint && i == *best_joint ? 1 : 0) << '\n';
    }
  }

  // Paired comparison when exactly two runs share a speed grid; speeds
  // lacking strides on either side are dropped pairwise.
  if (runs.size() == 2) {
    std::vector<double> a, b;
    const json& pa = runs[0].metrics.at("per_speed");
    const json& pb = runs[1].metrics.at("per_speed");
    if (pa.size() == pb.size()) {
      bool aligned = true;
      for (size_t i = 0; i < pa.size(); ++i) {
        if (std::abs(pa[i].at("speed").get<double>() - pb[i].at("speed").get<double>()) > 1e-9) {
          aligned = false;
          break;
        }
        if (pa[i].at("rmse_deg").is_null() || pb[i].at("rmse_deg").is_null()) continue;
        a.push_back(pa[i].at("rmse_deg").get<double>());
        b.push_back(pb[i].at("rmse_deg").get<double>());
      }
      if (aligned && a.size() >= 2) {
        const eval::TTestResult tt = eval::paired_t_test(a, b);
        json doc = {{"metric", "per_speed_joint_rmse_deg"},
                    {"runs", {runs[0].name, runs[1].name}},
                    {"t", tt.t},
                    {"p", tt.p},
                    {"significant_at_0.05", tt.significant}};
        write_file(out_dir + "/ttest.json", doc.dump(2) + "\n");
      }
    }
  }

  std::map<std::string, std::string> hashes;
  hashes["report.csv"] = hash_file(out_dir + "/report.csv");
  write_manifest(out_dir, cfg, hashes, true);
  std::cout << "report over " << runs.size() << " runs: " << out_dir << "/report.csv\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"gaitforge: speed-adaptive walking agent toolkit"};
  app.require_subcommand(1);

  std::string config_path, input, output, model_path, profiles_path, policy_arg = "oracle";
  std::vector<std::string> report_inputs;
  double speed = 1.25;
  double noise_deg = 0.0;
  uint64_t fixture_seed = 2024;
  bool plots = false;

  app.add_option("--config", config_path, "run configuration JSON");
  app.add_flag("--plots", plots, "emit SVG plots where supported");

  auto* fixture = app.add_subcommand("fixture", "generate the surrogate gait dataset CSV");
  fixture->add_option("--out", output, "output CSV path")->required();
  fixture->add_option("--noise-deg", noise_deg, "per-cell Gaussian noise, degrees");
  fixture->add_option("--seed", fixture_seed, "fixture RNG seed");

  auto* ingest = app.add_subcommand("ingest", "CSV -> per-speed mean gait profiles");
  ingest->add_option("--input", input, "gait CSV")->required();
  ingest->add_option("--out", output, "profiles JSON path")->required();

  auto* fit = app.add_subcommand("fit", "profiles -> linear-in-speed model");
  fit->add_option("--profiles", profiles_path, "profiles JSON")->required();
  fit->add_option("--out", output, "model JSON path")->required();

  auto* synth_cmd = app.add_subcommand("synth", "model -> synthetic cycle CSV at a speed");
  synth_cmd->add_option("--model", model_path, "model JSON")->required();
  synth_cmd->add_option("--speed", speed, "target speed m/s")->required();
  synth_cmd->add_option("--out", output, "cycle CSV path")->required();

  auto* train = app.add_subcommand("train", "train the walking policy");
  train->add_option("--model", model_path, "model JSON")->required();
  train->add_option("--out", output, "output directory")->required();

  auto* eval_cmd = app.add_subcommand("eval", "multi-speed evaluation protocol");
  eval_cmd->add_option("--model", model_path, "model JSON")->required();
  eval_cmd->add_option("--policy", policy_arg, "checkpoint directory or 'oracle'");
  eval_cmd->add_option("--out", output, "output directory")->required();

  auto* chirp = app.add_subcommand("chirp", "dynamic speed-tracking test");
  chirp->add_option("--model", model_path, "model JSON")->required();
  chirp->add_option("--policy", policy_arg, "checkpoint directory or 'oracle'");
  chirp->add_option("--out", output, "output directory")->required();

  auto* report = app.add_subcommand("report", "aggregate eval runs into a comparison table");
  report->add_option("--inputs", report_inputs, "eval directories")->required();
  report->add_option("--out", output, "output directory")->required();

  std::vector<const char*> argv_store;
  argv_store.push_back("gaitforge");
  for (const auto& a : args) argv_store.push_back(a.c_str());

  try {
    app.parse(int(argv_store.size()), argv_store.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e);
      return kExitOk;
    }
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    config::RunConfig cfg = load_config(config_path);
    if (plots) cfg.io.plots = true;
    if (fixture->parsed()) return cmd_fixture(output, noise_deg, fixture_seed);
    if (ingest->parsed()) return cmd_ingest(input, output, cfg);
    if (fit->parsed()) return cmd_fit(profiles_path, output, cfg);
    if (synth_cmd->parsed()) return cmd_synth(model_path, speed, output, cfg);
    if (train->parsed()) return cmd_train(model_path, output, cfg);
    if (eval_cmd->parsed()) return cmd_eval(model_path, policy_arg, output, cfg);
    if (chirp->parsed()) return cmd_chirp(model_path, policy_arg, output, cfg);
    if (report->parsed()) return cmd_report(report_inputs, output, cfg);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace gaitforge::cli
