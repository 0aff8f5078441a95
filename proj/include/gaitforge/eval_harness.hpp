#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gaitforge/biped_env.hpp"
#include "gaitforge/curriculum.hpp"
#include "gaitforge/policy_opt.hpp"
#include "gaitforge/synth_model.hpp"

namespace gaitforge::eval {

struct NoStrides : std::runtime_error {
  NoStrides() : std::runtime_error("no strides survived segmentation") {}
};

struct Stride {
  int begin = 0;  // boundary minima sample indices, [begin, end]
  int end = 0;
  double duration_s = 0.0;
};

struct StrideSet {
  std::vector<Stride> strides;
  int size() const { return int(strides.size()); }
};

// Strict local minima with depth-priority peak separation of min_len
// samples; segments between consecutive minima; segments shorter than
// min_len are dropped.
StrideSet segment_strides(const std::vector<double>& hip_angle_rad, int min_len,
                          double control_dt = 0.01);

struct EpisodeTrace {
  double target_speed = 0.0;
  int episode_index = 0;
  std::vector<double> t;
  std::vector<sim::StateVec> q;
  std::vector<sim::StateVec> qd;
  std::vector<sim::Action> torque;
  std::vector<double> com_vx;
  std::vector<double> per_step_target;  // equals target_speed except chirp runs
  bool fell = false;

  int length() const { return int(t.size()); }
  std::vector<double> left_hip_series() const;
  Eigen::Matrix3Xd left_joint_series() const;  // hip/knee/ankle of the left leg
};

struct EvalRecord {
  std::vector<EpisodeTrace> episodes;
  double control_dt = 0.01;
};

// A walking controller under evaluation.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual void begin_episode(double target_speed, uint64_t seed) = 0;
  struct Sample {
    sim::BipedState state;
    sim::Action torque = sim::Action::Zero();
    double com_vx = 0.0;
    bool fell = false;
  };
  // Advance one control period toward `target_speed` (may vary per step).
  virtual Sample step(double target_speed) = 0;
};

// Trained policy driving the dynamics; actions are the policy mean.
class PolicyAgent : public Agent {
 public:
  PolicyAgent(const sim::BipedModel& model, const rl::GaussianPolicy& policy,
              const synth::SpeedLinearModel& synth_model, const synth::BaseTrajectory& base);
  void begin_episode(double target_speed, uint64_t seed) override;
  Sample step(double target_speed) override;

 private:
  sim::BipedModel model_;
  rl::GaussianPolicy policy_;
  synth::SpeedLinearModel synth_model_;
  synth::BaseTrajectory base_;
  sim::BipedState state_;
  sim::Observation obs_;
  std::mt19937_64 rng_;
};

// Kinematic playback of the synthetic cycle, bypassing dynamics; the COM
// advances at the commanded speed. Harness self-test agent.
class ReplayAgent : public Agent {
 public:
  ReplayAgent(const sim::BipedModel& model, const synth::SpeedLinearModel& synth_model,
              const synth::BaseTrajectory& base);
  void begin_episode(double target_speed, uint64_t seed) override;
  Sample step(double target_speed) override;

 private:
  sim::BipedState assemble(double v) const;

  sim::BipedModel model_;
  synth::SpeedLinearModel synth_model_;
  synth::BaseTrajectory base_;
  synth::SyntheticCycle cycle_;
  double phase_ = 0.0;
  double x_ = 0.0;
  double t_ = 0.0;
};

std::unique_ptr<ReplayAgent> oracle_replay(const sim::BipedModel& model,
                                           const synth::SpeedLinearModel& synth_model,
                                           const synth::BaseTrajectory& base);

struct EvalConfig {
  std::vector<double> speeds;  // defaults to 0.65..1.85 step 0.1
  int episodes_per_speed = 3;
  int trials = 1;  // whole-grid repetitions with distinct seeds
  int max_steps = 1000;
  int steady_discard_steps = 100;
  int min_stride_steps = 60;
  double control_dt = 0.01;
  uint64_t seed = 7;

  static std::vector<double> default_speed_grid();
};

EvalRecord run_eval(Agent& agent, const EvalConfig& cfg);

struct JointMetrics {
  Eigen::Vector3d rmse_deg = Eigen::Vector3d::Zero();
  Eigen::Vector3d r2 = Eigen::Vector3d::Zero();
  double rmse_overall_deg = 0.0;
  double r2_overall = 0.0;
  // Pooled sums for cross-speed aggregation (rad^2).
  Eigen::Vector3d sse_joint = Eigen::Vector3d::Zero();
  double sse = 0.0;
  double sst = 0.0;
  long count = 0;
};

// Stride-aligned mean of the segmented strides on an n-point phase grid
// (boundaries refined to sub-sample hip minima).
Eigen::Matrix3Xd mean_stride_curve(const StrideSet& strides, const Eigen::Matrix3Xd& angles_rad,
                                   int n_points);

// The synthetic cycle rotated so phase 0 sits at its own left-hip minimum.
Eigen::Matrix3Xd aligned_reference(const synth::SyntheticCycle& cycle, int n_points);

// Mean stride (resampled to the synthetic cycle's grid) against the
// synthetic reference at the matching speed. Both sides are aligned to
// start at their left-hip minimum.
JointMetrics stride_metrics(const StrideSet& strides, const Eigen::Matrix3Xd& angles_rad,
                            const synth::SyntheticCycle& cycle);

struct SpeedMetrics {
  double rmse = 0.0;
  double r2 = 0.0;
  std::vector<double> per_episode_mean;
  std::vector<double> per_episode_target;
};

SpeedMetrics speed_metrics(const EvalRecord& record, int steady_discard_steps);

struct MetricsSummary {
  JointMetrics joints;     // pooled over speeds
  SpeedMetrics speed;
  struct PerSpeed {
    double speed = 0.0;
    double rmse_deg = 0.0;
    double r2 = 0.0;
    int n_strides = 0;
    int falls = 0;
  };
  std::vector<PerSpeed> per_speed;
};

MetricsSummary summarize(const EvalRecord& record, const synth::SpeedLinearModel& synth_model,
                         const synth::BaseTrajectory& base, const EvalConfig& cfg);

struct ChirpResult {
  std::vector<double> t;
  std::vector<double> target;
  std::vector<double> mean;
  std::vector<double> sd;
  double rmse = 0.0;
  std::vector<EpisodeTrace> episodes;
};

ChirpResult chirp_tracking(Agent& agent, const curriculum::ChirpSpec& spec, int episodes,
                           double control_dt, uint64_t seed);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  bool significant = false;  // at 0.05
};

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Two-sided Student-t survival helper, exposed for tests.
double student_t_two_sided_p(double t, int dof);

struct KineticsCurves {
  Eigen::MatrixXd torque_per_mass;  // 6 x grid
  Eigen::MatrixXd power_per_mass;   // 6 x grid
};

// Stride-aligned mean of per-step mass-normalized torque and power.
KineticsCurves kinetics_curves(const EpisodeTrace& trace, const StrideSet& strides,
                               const sim::BipedModel& model, int grid_points);

// Persistence: per-episode trace CSVs, strides.json, metrics.json.
void write_record(const std::string& dir, const EvalRecord& record,
                  const MetricsSummary& summary, const sim::BipedModel& model,
                  const EvalConfig& cfg);

}  // namespace gaitforge::eval
