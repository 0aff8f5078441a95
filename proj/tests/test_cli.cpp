#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gaitforge/cli.hpp"
#include "gaitforge/csv.hpp"
#include "gaitforge/run_config.hpp"
#include "gaitforge/synth_model.hpp"

using namespace gaitforge;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

int run_cli(std::initializer_list<std::string> args) {
  return gaitforge::cli::run(std::vector<std::string>(args));
}

}  // namespace

TEST_CASE("missing input file exits with the usage code") {
  TempDir dir("gaitforge_cli_missing");
  CHECK(run_cli({"ingest", "--input", dir / "absent.csv", "--out", dir / "p.json"}) ==
        gaitforge::cli::kExitUsage);
}

TEST_CASE("unknown config keys are rejected") {
  TempDir dir("gaitforge_cli_badcfg");
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"seed": 1, "data": {"n_points": 21, "bogus": 1}})";
  }
  CHECK(run_cli({"--config", dir / "cfg.json", "fixture", "--out", dir / "f.csv"}) ==
        gaitforge::cli::kExitUsage);
  {
    std::ofstream cfg(dir / "noseed.json");
    cfg << R"({"data": {"n_points": 21}})";
  }
  CHECK(run_cli({"--config", dir / "noseed.json", "fixture", "--out", dir / "f.csv"}) ==
        gaitforge::cli::kExitUsage);
}

TEST_CASE("fixture -> ingest -> fit -> synth pipeline") {
  TempDir dir("gaitforge_cli_pipeline");
  REQUIRE(run_cli({"fixture", "--out", dir / "gait.csv"}) == gaitforge::cli::kExitOk);
  REQUIRE(run_cli({"ingest", "--input", dir / "gait.csv", "--out", dir / "profiles.json"}) ==
          gaitforge::cli::kExitOk);

  const json profiles = json::parse(csv::read_file(dir / "profiles.json"));
  CHECK(profiles.size() == 13);  // one per fixture speed
  CHECK(profiles[0].at("n_points") == 21);

  // Determinism: re-running ingest reproduces the bytes.
  const std::string first = csv::read_file(dir / "profiles.json");
  REQUIRE(run_cli({"ingest", "--input", dir / "gait.csv", "--out", dir / "profiles.json"}) ==
          gaitforge::cli::kExitOk);
  CHECK(csv::read_file(dir / "profiles.json") == first);

  REQUIRE(run_cli({"fit", "--profiles", dir / "profiles.json", "--out", dir / "model.json"}) ==
          gaitforge::cli::kExitOk);
  CHECK(fs::exists(dir / "model.json.quality.json"));
  CHECK(fs::exists(dir / "model.json.manifest.json"));

  // Anchor identity: a cycle synthesized at the base speed equals the base.
  REQUIRE(run_cli({"synth", "--model", dir / "model.json", "--speed", "1.25", "--out",
               dir / "cycle.csv"}) == gaitforge::cli::kExitOk);
  const auto model = synth::SpeedLinearModel::from_json(csv::read_file(dir / "model.json"));
  const synth::BaseTrajectory base = synth::base_from_model(model, 1.25, 168);
  const std::string cycle_csv = csv::read_file(dir / "cycle.csv");
  std::istringstream lines(cycle_csv);
  std::string line;
  std::getline(lines, line);  // header
  int idx = 0;
  while (std::getline(lines, line) && idx < base.samples()) {
    const auto cells = csv::split_line(line);
    REQUIRE(cells.size() == 7);
    double hip_deg = 0.0;
    REQUIRE(csv::parse_double(cells[1], hip_deg));
    CHECK(hip_deg == doctest::Approx(base.angles_rad(0, idx) * synth::kRad2Deg).epsilon(1e-9));
    ++idx;
  }
  CHECK(idx == base.samples());
}

TEST_CASE("eval and report: metrics copy through to the comparison table") {
  TempDir dir("gaitforge_cli_evalreport");
  REQUIRE(run_cli({"fixture", "--out", dir / "gait.csv"}) == gaitforge::cli::kExitOk);
  REQUIRE(run_cli({"ingest", "--input", dir / "gait.csv", "--out", dir / "profiles.json"}) ==
          gaitforge::cli::kExitOk);
  REQUIRE(run_cli({"fit", "--profiles", dir / "profiles.json", "--out", dir / "model.json"}) ==
          gaitforge::cli::kExitOk);

  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"seed": 5, "eval": {"speeds": [0.85, 1.25, 1.65], "episodes_per_speed": 1,
               "max_steps": 400}})";
  }
  REQUIRE(run_cli({"--config", dir / "cfg.json", "--plots", "eval", "--model",
               dir / "model.json", "--policy", "oracle", "--out", dir / "eval_a"}) ==
          gaitforge::cli::kExitOk);
  CHECK(fs::exists(dir / "eval_a/plots/speed_tracking.svg"));
  CHECK(fs::exists(dir / "eval_a/plots/kinematics_hip.svg"));
  CHECK(fs::exists(dir / "eval_a/plots/kinetics_knee.svg"));
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"seed": 6, "eval": {"speeds": [0.85, 1.25, 1.65], "episodes_per_speed": 1,
               "max_steps": 400}})";
  }
  REQUIRE(run_cli({"--config", dir / "cfg.json", "eval", "--model", dir / "model.json",
               "--policy", "oracle", "--out", dir / "eval_b"}) == gaitforge::cli::kExitOk);

  CHECK(fs::exists(dir / "eval_a/metrics.json"));
  CHECK(fs::exists(dir / "eval_a/strides.json"));
  CHECK(fs::exists(dir / "eval_a/episode_000.csv"));
  CHECK(fs::exists(dir / "eval_a/manifest.json"));

  REQUIRE(run_cli({"report", "--inputs", dir / "eval_a", dir / "eval_b", "--out",
               dir / "report"}) == gaitforge::cli::kExitOk);
  const std::string report = csv::read_file(dir / "report/report.csv");
  const json metrics_a = json::parse(csv::read_file(dir / "eval_a/metrics.json"));

  // The report's RMSE cells equal the source metrics values.
  std::istringstream lines(report);
  std::string line;
  std::getline(lines, line);  // header
  bool found = false;
  while (std::getline(lines, line)) {
    const auto cells = csv::split_line(line);
    REQUIRE(cells.size() == 7);
    if (cells[0] == "eval_a") {
      double speed_rmse = 0.0, joint_rmse = 0.0;
      REQUIRE(csv::parse_double(cells[1], speed_rmse));
      REQUIRE(csv::parse_double(cells[3], joint_rmse));
      CHECK(speed_rmse == metrics_a.at("speed_rmse").get<double>());
      CHECK(joint_rmse == metrics_a.at("joint_rmse_deg").at("overall").get<double>());
      found = true;
    }
  }
  CHECK(found);
  CHECK(fs::exists(dir / "report/ttest.json"));
}

TEST_CASE("report renders missing stride metrics as dashes") {
  TempDir dir("gaitforge_cli_dashes");
  fs::create_directories(dir / "walked");
  fs::create_directories(dir / "fell");
  {
    std::ofstream a(dir / "walked/metrics.json");
    a << R"({"joint_rmse_deg": {"hip": 1, "knee": 1, "ankle": 1, "overall": 1.5},
             "joint_r2": 0.9, "speed_rmse": 0.1, "speed_r2": 0.9,
             "per_speed": [], "total_mass": 86.62})";
    std::ofstream b(dir / "fell/metrics.json");
    b << R"({"joint_rmse_deg": null, "joint_r2": null, "speed_rmse": 0.5, "speed_r2": -1.0,
             "per_speed": [], "total_mass": 86.62})";
  }
  REQUIRE(run_cli({"report", "--inputs", dir / "walked", dir / "fell", "--out",
                   dir / "report"}) == gaitforge::cli::kExitOk);
  const std::string report = csv::read_file(dir / "report/report.csv");
  CHECK(report.find("fell,0.5,-1,-,-,0,0") != std::string::npos);
  CHECK(report.find("walked,0.1,0.9,1.5,0.9,1,1") != std::string::npos);
}

TEST_CASE("report refuses mixed-schema inputs") {
  TempDir dir("gaitforge_cli_mixed");
  fs::create_directories(dir / "run_a");
  fs::create_directories(dir / "run_b");
  {
    std::ofstream a(dir / "run_a/metrics.json");
    a << R"({"joint_rmse_deg": {"overall": 1.0}, "joint_r2": 0.9, "speed_rmse": 0.1,
             "speed_r2": 0.9, "per_speed": []})";
    std::ofstream b(dir / "run_b/metrics.json");
    b << R"({"different_key": 1})";
  }
  CHECK(run_cli({"report", "--inputs", dir / "run_a", dir / "run_b", "--out", dir / "report"}) ==
        gaitforge::cli::kExitUsage);
}

TEST_CASE("GAITFORGE_SEED overrides the config seed") {
  TempDir dir("gaitforge_cli_seed");
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"seed": 1})";
  }
  setenv("GAITFORGE_SEED", "99", 1);
  const config::RunConfig cfg = config::RunConfig::from_file(dir / "cfg.json");
  unsetenv("GAITFORGE_SEED");
  CHECK(cfg.seed == 99);
  CHECK(cfg.trpo.seed == 99);
}

TEST_CASE("chirp command produces a trace of the configured length") {
  TempDir dir("gaitforge_cli_chirp");
  REQUIRE(run_cli({"fixture", "--out", dir / "gait.csv"}) == gaitforge::cli::kExitOk);
  REQUIRE(run_cli({"ingest", "--input", dir / "gait.csv", "--out", dir / "profiles.json"}) ==
          gaitforge::cli::kExitOk);
  REQUIRE(run_cli({"fit", "--profiles", dir / "profiles.json", "--out", dir / "model.json"}) ==
          gaitforge::cli::kExitOk);
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"seed": 3, "chirp": {"duration": 10.0}, "eval": {"chirp_episodes": 2}})";
  }
  REQUIRE(run_cli({"--config", dir / "cfg.json", "--plots", "chirp", "--model",
               dir / "model.json", "--policy", "oracle", "--out", dir / "chirp"}) ==
          gaitforge::cli::kExitOk);
  const std::string trace = csv::read_file(dir / "chirp/chirp.csv");
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 1001);  // header + 1000 rows
  const json metrics = json::parse(csv::read_file(dir / "chirp/chirp_metrics.json"));
  CHECK(metrics.at("rmse").get<double>() < 0.02);
  CHECK(fs::exists(dir / "chirp/plots/chirp.svg"));
}

TEST_CASE("eval trials multiply the episode count") {
  TempDir dir("gaitforge_cli_trials");
  REQUIRE(run_cli({"fixture", "--out", dir / "gait.csv"}) == gaitforge::cli::kExitOk);
  REQUIRE(run_cli({"ingest", "--input", dir / "gait.csv", "--out", dir / "profiles.json"}) ==
          gaitforge::cli::kExitOk);
  REQUIRE(run_cli({"fit", "--profiles", dir / "profiles.json", "--out", dir / "model.json"}) ==
          gaitforge::cli::kExitOk);
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"seed": 4, "eval": {"speeds": [1.25], "episodes_per_speed": 2, "trials": 3,
               "max_steps": 250}})";
  }
  REQUIRE(run_cli({"--config", dir / "cfg.json", "eval", "--model", dir / "model.json",
               "--policy", "oracle", "--out", dir / "ev"}) == gaitforge::cli::kExitOk);
  const json strides = json::parse(csv::read_file(dir / "ev/strides.json"));
  CHECK(strides.size() == 6);  // 1 speed x 2 episodes x 3 trials
}

TEST_CASE("config round-trip covers the documented schema") {
  const config::RunConfig defaults = config::RunConfig::defaults();
  const config::RunConfig back = config::RunConfig::from_json_text(defaults.to_json());
  CHECK(back.data.n_points == defaults.data.n_points);
  CHECK(back.trpo.epochs == defaults.trpo.epochs);
  CHECK(back.chirp.f1_hz == defaults.chirp.f1_hz);
  CHECK(back.eval.episodes_per_speed == defaults.eval.episodes_per_speed);

  const config::RunConfig desk = config::RunConfig::from_json_text(
      R"({"seed": 1, "trpo": {"profile": "desk"}})");
  CHECK(desk.trpo.epochs == 200);
  CHECK(desk.trpo.steps_per_epoch == 2000);
  const config::RunConfig paper = config::RunConfig::from_json_text(
      R"({"seed": 1, "trpo": {"profile": "paper"}})");
  CHECK(paper.trpo.epochs == 4000);
  CHECK(paper.trpo.steps_per_epoch == 5000);
  CHECK(paper.trpo.policy_update_every == 1000);
  CHECK(paper.trpo.disc_update_every == 3000);
}
