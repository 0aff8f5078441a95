#include "gaitforge/eval_harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gaitforge/csv.hpp"

namespace gaitforge::eval {

using json = nlohmann::json;

StrideSet segment_strides(const std::vector<double>& hip_angle_rad, int min_len,
                          double control_dt) {
  StrideSet out;
  const int t = int(hip_angle_rad.size());
  if (t < 3) return out;

  std::vector<int> candidates;
  for (int i = 1; i + 1 < t; ++i) {
    if (hip_angle_rad[i] < hip_angle_rad[i - 1] && hip_angle_rad[i] < hip_angle_rad[i + 1]) {
      candidates.push_back(i);
    }
  }

  // Depth-priority separation: deeper minima win inside the exclusion
  // window, suppressing noise-induced double minima.
  std::vector<int> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double va = hip_angle_rad[candidates[a]];
    const double vb = hip_angle_rad[candidates[b]];
    return va != vb ? va < vb : candidates[a] < candidates[b];
  });
  std::vector<int> accepted;
  for (int oi : order) {
    const int idx = candidates[oi];
    bool blocked = false;
    for (int kept : accepted) {
      if (std::abs(kept - idx) < min_len) {
        blocked = true;
        break;
      }
    }
    if (!blocked) accepted.push_back(idx);
  }
  std::sort(accepted.begin(), accepted.end());

  for (size_t i = 0; i + 1 < accepted.size(); ++i) {
    const int len = accepted[i + 1] - accepted[i];
    if (len < min_len) continue;
    out.strides.push_back({accepted[i], accepted[i + 1], len * control_dt});
  }
  return out;
}

std::vector<double> EpisodeTrace::left_hip_series() const {
  std::vector<double> hip(q.size());
  for (size_t i = 0; i < q.size(); ++i) hip[i] = q[i][3];
  return hip;
}

Eigen::Matrix3Xd EpisodeTrace::left_joint_series() const {
  Eigen::Matrix3Xd angles(3, long(q.size()));
  for (size_t i = 0; i < q.size(); ++i) angles.col(long(i)) = q[i].segment<3>(3);
  return angles;
}

PolicyAgent::PolicyAgent(const sim::BipedModel& model, const rl::GaussianPolicy& policy,
                         const synth::SpeedLinearModel& synth_model,
                         const synth::BaseTrajectory& base)
    : model_(model), policy_(policy), synth_model_(synth_model), base_(base) {}

void PolicyAgent::begin_episode(double target_speed, uint64_t seed) {
  rng_.seed(seed);
  const synth::SyntheticCycle cycle = synth::generate_kinematics(synth_model_, base_, target_speed);
  state_ = sim::reset_state(model_, target_speed, cycle, rng_);
  obs_ = sim::observe(model_, state_, target_speed);
}

Agent::Sample PolicyAgent::step(double target_speed) {
  const rl::Vector mean = policy_.mean_action(obs_);
  sim::Action action = mean;
  const sim::StepResult res = sim::step(model_, state_, action, target_speed, model_.n_substeps);
  state_ = res.state;
  obs_ = res.obs;
  Sample s;
  s.state = state_;
  s.torque = action;
  s.com_vx = sim::com_velocity(model_, state_);
  s.fell = res.fell;
  return s;
}

ReplayAgent::ReplayAgent(const sim::BipedModel& model, const synth::SpeedLinearModel& synth_model,
                         const synth::BaseTrajectory& base)
    : model_(model), synth_model_(synth_model), base_(base) {}

void ReplayAgent::begin_episode(double target_speed, uint64_t /*seed*/) {
  cycle_ = synth::generate_kinematics(synth_model_, base_, target_speed);
  phase_ = 0.0;
  x_ = 0.0;
  t_ = 0.0;
}

sim::BipedState ReplayAgent::assemble(double v) const {
  sim::BipedState s;
  s.t = t_;
  s.q[0] = x_;
  s.q.segment<3>(3) = cycle_.angles_at_phase(phase_);
  s.q.segment<3>(6) = cycle_.angles_at_phase(phase_ + 0.5);
  s.qd[0] = v;
  s.qd.segment<3>(3) = cycle_.velocities_at_phase(phase_);
  s.qd.segment<3>(6) = cycle_.velocities_at_phase(phase_ + 0.5);
  const auto heights = sim::corner_heights(model_, s);
  s.q[1] -= *std::min_element(heights.begin(), heights.end());
  return s;
}

Agent::Sample ReplayAgent::step(double target_speed) {
  const double dt = model_.dt_phys * model_.n_substeps;
  const double duration = synth_model_.stride.duration(target_speed);
  phase_ += dt / duration;
  phase_ -= std::floor(phase_);
  x_ += target_speed * dt;
  t_ += dt;
  Sample s;
  s.state = assemble(target_speed);
  s.com_vx = target_speed;  // playback advances the COM at the commanded speed
  s.fell = false;
  return s;
}

std::unique_ptr<ReplayAgent> oracle_replay(const sim::BipedModel& model,
                                           const synth::SpeedLinearModel& synth_model,
                                           const synth::BaseTrajectory& base) {
  return std::make_unique<ReplayAgent>(model, synth_model, base);
}

std::vector<double> EvalConfig::default_speed_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 12; ++i) grid.push_back(0.65 + 0.1 * i);
  return grid;
}

EvalRecord run_eval(Agent& agent, const EvalConfig& cfg) {
  EvalRecord record;
  record.control_dt = cfg.control_dt;
  const std::vector<double> speeds = cfg.speeds.empty() ? EvalConfig::default_speed_grid() : cfg.speeds;
  const int episodes = cfg.episodes_per_speed * std::max(1, cfg.trials);
  for (size_t si = 0; si < speeds.size(); ++si) {
    for (int ep = 0; ep < episodes; ++ep) {
      const uint64_t seed = cfg.seed + 1000003ull * si + 17ull * uint64_t(ep);
      agent.begin_episode(speeds[si], seed);
      EpisodeTrace trace;
      trace.target_speed = speeds[si];
      trace.episode_index = ep;
      for (int k = 0; k < cfg.max_steps; ++k) {
        const Agent::Sample s = agent.step(speeds[si]);
        trace.t.push_back(s.state.t);
        trace.q.push_back(s.state.q);
        trace.qd.push_back(s.state.qd);
        trace.torque.push_back(s.torque);
        trace.com_vx.push_back(s.com_vx);
        trace.per_step_target.push_back(speeds[si]);
        if (s.fell) {
          trace.fell = true;
          break;
        }
      }
      record.episodes.push_back(std::move(trace));
    }
  }
  return record;
}

namespace {

// Sub-sample minimum location through a three-point parabola; zero offset at
// boundaries or degenerate curvature.
double parabolic_offset(double y_prev, double y0, double y_next) {
  const double denom = y_prev - 2.0 * y0 + y_next;
  if (std::abs(denom) < 1e-300) return 0.0;
  const double delta = 0.5 * (y_prev - y_next) / denom;
  return std::min(0.5, std::max(-0.5, delta));
}

double refined_index(const Eigen::Matrix3Xd& series, int idx) {
  if (idx <= 0 || idx + 1 >= series.cols()) return double(idx);
  return idx + parabolic_offset(series(0, idx - 1), series(0, idx), series(0, idx + 1));
}

// Resamples series over the fractional window [begin, end) onto an n-point
// phase grid, phase 1 excluded.
Eigen::Matrix3Xd resample_stride(const Eigen::Matrix3Xd& series, double begin, double end,
                                 int n) {
  Eigen::Matrix3Xd out(3, n);
  const double span = end - begin;
  const int last = int(series.cols()) - 2;
  for (int j = 0; j < n; ++j) {
    const double x = begin + span * (double(j) / double(n));
    int k = int(std::floor(x));
    k = std::min(last, std::max(0, k));
    const double w = x - k;
    out.col(j) = (1.0 - w) * series.col(k) + w * series.col(k + 1);
  }
  return out;
}

}  // namespace

Eigen::Matrix3Xd mean_stride_curve(const StrideSet& strides, const Eigen::Matrix3Xd& angles_rad,
                                   int n_points) {
  if (strides.size() == 0) throw NoStrides();
  // Stride boundaries land on sampled hip minima; refine both ends to
  // sub-sample positions so the comparison is phase-aligned beyond grid
  // resolution.
  Eigen::Matrix3Xd mean_stride = Eigen::Matrix3Xd::Zero(3, n_points);
  for (const Stride& s : strides.strides) {
    mean_stride += resample_stride(angles_rad, refined_index(angles_rad, s.begin),
                                   refined_index(angles_rad, s.end), n_points);
  }
  return mean_stride / double(strides.size());
}

Eigen::Matrix3Xd aligned_reference(const synth::SyntheticCycle& cycle, int n_points) {
  const int n_cycle = cycle.samples();
  int min_idx = 0;
  cycle.angles_rad.row(0).minCoeff(&min_idx);
  const double delta = parabolic_offset(cycle.angles_rad(0, (min_idx - 1 + n_cycle) % n_cycle),
                                        cycle.angles_rad(0, min_idx),
                                        cycle.angles_rad(0, (min_idx + 1) % n_cycle));
  const double phase0 = (double(min_idx) + delta) / double(n_cycle);
  Eigen::Matrix3Xd ref(3, n_points);
  for (int j = 0; j < n_points; ++j) {
    ref.col(j) = cycle.angles_at_phase(phase0 + double(j) / double(n_points));
  }
  return ref;
}

JointMetrics stride_metrics(const StrideSet& strides, const Eigen::Matrix3Xd& angles_rad,
                            const synth::SyntheticCycle& cycle) {
  const int n = cycle.samples();
  const Eigen::Matrix3Xd mean_stride = mean_stride_curve(strides, angles_rad, n);
  const Eigen::Matrix3Xd ref = aligned_reference(cycle, n);

  JointMetrics m;
  const Eigen::Matrix3Xd err = mean_stride - ref;
  double sse_all = 0.0;
  const double ref_mean_all = ref.mean();
  for (int j = 0; j < 3; ++j) {
    const double sse = err.row(j).squaredNorm();
    const double ref_mean = ref.row(j).mean();
    const double sst = (ref.row(j).array() - ref_mean).square().sum();
    m.rmse_deg[j] = std::sqrt(sse / n) * synth::kRad2Deg;
    m.r2[j] = sst > 0.0 ? 1.0 - sse / sst : (sse == 0.0 ? 1.0 : 0.0);
    m.sse_joint[j] = sse;
    sse_all += sse;
  }
  const double sst_all = (ref.array() - ref_mean_all).square().sum();
  m.rmse_overall_deg = std::sqrt(sse_all / (3.0 * n)) * synth::kRad2Deg;
  m.r2_overall = sst_all > 0.0 ? 1.0 - sse_all / sst_all : (sse_all == 0.0 ? 1.0 : 0.0);
  m.sse = sse_all;
  m.sst = sst_all;
  m.count = 3L * n;
  return m;
}

SpeedMetrics speed_metrics(const EvalRecord& record, int steady_discard_steps) {
  SpeedMetrics sm;
  for (const EpisodeTrace& trace : record.episodes) {
    const int t = trace.length();
    const int start = std::min(steady_discard_steps, std::max(0, t - 1));
    if (t == 0) continue;
    double sum = 0.0;
    int n = 0;
    for (int k = start; k < t; ++k, ++n) sum += trace.com_vx[k];
    sm.per_episode_mean.push_back(sum / std::max(1, n));
    sm.per_episode_target.push_back(trace.target_speed);
  }
  const size_t n = sm.per_episode_mean.size();
  if (n == 0) return sm;
  double sse = 0.0;
  double target_mean = 0.0;
  for (double v : sm.per_episode_target) target_mean += v;
  target_mean /= double(n);
  double sst = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double e = sm.per_episode_mean[i] - sm.per_episode_target[i];
    sse += e * e;
    sst += (sm.per_episode_target[i] - target_mean) * (sm.per_episode_target[i] - target_mean);
  }
  sm.rmse = std::sqrt(sse / double(n));
  sm.r2 = sst > 0.0 ? 1.0 - sse / sst : (sse == 0.0 ? 1.0 : 0.0);
  return sm;
}

MetricsSummary summarize(const EvalRecord& record, const synth::SpeedLinearModel& synth_model,
                         const synth::BaseTrajectory& base, const EvalConfig& cfg) {
  MetricsSummary out;
  out.speed = speed_metrics(record, cfg.steady_discard_steps);

  std::vector<double> speeds;
  for (const auto& tr : record.episodes) {
    const bool seen = std::find_if(speeds.begin(), speeds.end(), [&](double v) {
                        return std::abs(v - tr.target_speed) < 1e-12;
                      }) != speeds.end();
    if (!seen) speeds.push_back(tr.target_speed);
  }

  double sse = 0.0, sst = 0.0;
  Eigen::Vector3d sse_joint = Eigen::Vector3d::Zero();
  long count = 0;

  for (double v : speeds) {
    const synth::SyntheticCycle cycle = synth::generate_kinematics(synth_model, base, v);

    // Pool strides from every episode at this speed into one concatenated
    // series; stride indices are shifted to the concatenation frame.
    std::vector<Stride> pooled_strides;
    std::vector<Eigen::Matrix3Xd> series_list;
    int falls = 0;
    int offset = 0;
    for (const auto& tr : record.episodes) {
      if (std::abs(tr.target_speed - v) > 1e-12) continue;
      falls += tr.fell ? 1 : 0;
      const StrideSet strides =
          segment_strides(tr.left_hip_series(), cfg.min_stride_steps, record.control_dt);
      if (strides.size() == 0) continue;
      Eigen::Matrix3Xd series = tr.left_joint_series();
      for (const Stride& s : strides.strides) {
        pooled_strides.push_back({offset + s.begin, offset + s.end, s.duration_s});
      }
      series_list.push_back(std::move(series));
      offset += int(series_list.back().cols());
    }

    MetricsSummary::PerSpeed row;
    row.speed = v;
    row.falls = falls;
    row.n_strides = int(pooled_strides.size());
    if (!pooled_strides.empty()) {
      long total_cols = 0;
      for (const auto& s : series_list) total_cols += s.cols();
      Eigen::Matrix3Xd joined(3, total_cols);
      long at = 0;
      for (const auto& s : series_list) {
        joined.middleCols(at, s.cols()) = s;
        at += s.cols();
      }
      StrideSet pooled;
      pooled.strides = pooled_strides;
      const JointMetrics jm = stride_metrics(pooled, joined, cycle);
      row.rmse_deg = jm.rmse_overall_deg;
      row.r2 = jm.r2_overall;
      sse += jm.sse;
      sst += jm.sst;
      sse_joint += jm.sse_joint;
      count += jm.count;
    }
    out.per_speed.push_back(row);
  }

  if (count > 0) {
    const double per_joint_count = double(count) / 3.0;
    out.joints.rmse_overall_deg = std::sqrt(sse / double(count)) * synth::kRad2Deg;
    out.joints.r2_overall = sst > 0.0 ? 1.0 - sse / sst : (sse == 0.0 ? 1.0 : 0.0);
    for (int j = 0; j < 3; ++j) {
      out.joints.rmse_deg[j] = std::sqrt(sse_joint[j] / per_joint_count) * synth::kRad2Deg;
    }
    out.joints.sse_joint = sse_joint;
    out.joints.sse = sse;
    out.joints.sst = sst;
    out.joints.count = count;
  }
  return out;
}

ChirpResult chirp_tracking(Agent& agent, const curriculum::ChirpSpec& spec, int episodes,
                           double control_dt, uint64_t seed) {
  ChirpResult out;
  const int steps = int(std::floor(spec.duration_s / control_dt + 1e-9));
  out.t.resize(steps);
  out.target.resize(steps);
  for (int k = 0; k < steps; ++k) {
    out.t[k] = k * control_dt;
    out.target[k] = curriculum::chirp_speed(out.t[k], spec);
  }

  Eigen::MatrixXd measured(episodes, steps);
  for (int ep = 0; ep < episodes; ++ep) {
    agent.begin_episode(out.target[0], seed + 7919ull * uint64_t(ep));
    EpisodeTrace trace;
    trace.target_speed = spec.center_mps;
    trace.episode_index = ep;
    for (int k = 0; k < steps; ++k) {
      const Agent::Sample s = agent.step(out.target[k]);
      measured(ep, k) = s.com_vx;
      trace.t.push_back(s.state.t);
      trace.q.push_back(s.state.q);
      trace.qd.push_back(s.state.qd);
      trace.torque.push_back(s.torque);
      trace.com_vx.push_back(s.com_vx);
      trace.per_step_target.push_back(out.target[k]);
      if (s.fell) {
        trace.fell = true;
        // Hold the last measurement if the agent fell early.
        for (int r = k + 1; r < steps; ++r) measured(ep, r) = s.com_vx;
        break;
      }
    }
    out.episodes.push_back(std::move(trace));
  }

  out.mean.resize(steps);
  out.sd.resize(steps);
  double sse = 0.0;
  for (int k = 0; k < steps; ++k) {
    out.mean[k] = measured.col(k).mean();
    const double var = (measured.col(k).array() - out.mean[k]).square().mean();
    out.sd[k] = std::sqrt(var);
    const double e = out.mean[k] - out.target[k];
    sse += e * e;
  }
  out.rmse = std::sqrt(sse / steps);
  return out;
}

namespace {

double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 200;
  constexpr double kEps = 3e-14;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_two_sided_p(double t, int dof) {
  const double nu = double(dof);
  return reg_inc_beta(nu / 2.0, 0.5, nu / (nu + t * t));
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t n = a.size();
  if (n < 2 || b.size() != n) {
    throw std::invalid_argument("paired t-test needs two equal-length vectors, n >= 2");
  }
  std::vector<double> d(n);
  for (size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  double mean = std::accumulate(d.begin(), d.end(), 0.0) / double(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / double(n - 1));

  TTestResult out;
  if (sd == 0.0) {
    if (mean == 0.0) {
      out.t = 0.0;
      out.p = 1.0;
    } else {
      out.t = mean > 0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
      out.p = 0.0;  // constant nonzero differences
    }
  } else {
    out.t = mean / (sd / std::sqrt(double(n)));
    out.p = student_t_two_sided_p(out.t, int(n) - 1);
  }
  out.significant = out.p < 0.05;
  return out;
}

KineticsCurves kinetics_curves(const EpisodeTrace& trace, const StrideSet& strides,
                               const sim::BipedModel& model, int grid_points) {
  if (strides.size() == 0) throw NoStrides();
  const int t = trace.length();

  // Per-step mass-normalized series first, then stride alignment.
  Eigen::MatrixXd torque_series(6, t);
  Eigen::MatrixXd power_series(6, t);
  for (int k = 0; k < t; ++k) {
    sim::BipedState st;
    st.q = trace.q[k];
    st.qd = trace.qd[k];
    const sim::JointKinetics jk = sim::joint_kinetics(model, st, trace.torque[k]);
    torque_series.col(k) = jk.torque_per_mass;
    power_series.col(k) = jk.power_per_mass;
  }

  auto align = [&](const Eigen::MatrixXd& series) {
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(6, grid_points);
    for (const Stride& s : strides.strides) {
      for (int j = 0; j < grid_points; ++j) {
        const double x = s.begin + double(s.end - s.begin) * (double(j) / grid_points);
        int k = int(std::floor(x));
        if (k >= s.end) k = s.end - 1;
        const double w = x - k;
        mean.col(j) += (1.0 - w) * series.col(k) + w * series.col(k + 1);
      }
    }
    return Eigen::MatrixXd(mean / double(strides.size()));
  };

  KineticsCurves out;
  out.torque_per_mass = align(torque_series);
  out.power_per_mass = align(power_series);
  return out;
}

void write_record(const std::string& dir, const EvalRecord& record,
                  const MetricsSummary& summary, const sim::BipedModel& model,
                  const EvalConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  json strides_doc = json::array();
  for (size_t i = 0; i < record.episodes.size(); ++i) {
    const EpisodeTrace& tr = record.episodes[i];
    char name[64];
    std::snprintf(name, sizeof(name), "episode_%03zu.csv", i);
    std::ofstream out(dir + "/" + name, std::ios::binary);
    out << "t,target_speed";
    for (int k = 0; k < sim::kDof; ++k) out << ",q" << k;
    for (int k = 0; k < sim::kDof; ++k) out << ",qd" << k;
    for (int k = 0; k < sim::kNumActuated; ++k) out << ",act" << k;
    out << ",com_vx,fell\n";
    for (int k = 0; k < tr.length(); ++k) {
      out << csv::format_double(tr.t[k]) << ',' << csv::format_double(tr.per_step_target[k]);
      for (int j = 0; j < sim::kDof; ++j) out << ',' << csv::format_double(tr.q[k][j]);
      for (int j = 0; j < sim::kDof; ++j) out << ',' << csv::format_double(tr.qd[k][j]);
      for (int j = 0; j < sim::kNumActuated; ++j) out << ',' << csv::format_double(tr.torque[k][j]);
      out << ',' << csv::format_double(tr.com_vx[k]) << ','
          << ((tr.fell && k + 1 == tr.length()) ? 1 : 0) << '\n';
    }

    const StrideSet strides =
        segment_strides(tr.left_hip_series(), cfg.min_stride_steps, record.control_dt);
    json ep;
    ep["file"] = name;
    ep["target_speed"] = tr.target_speed;
    ep["episode"] = tr.episode_index;
    ep["fell"] = tr.fell;
    json segs = json::array();
    for (const Stride& s : strides.strides) {
      segs.push_back({{"begin", s.begin}, {"end", s.end}, {"duration_s", s.duration_s}});
    }
    ep["strides"] = segs;
    strides_doc.push_back(std::move(ep));
  }
  {
    std::ofstream out(dir + "/strides.json", std::ios::binary);
    out << strides_doc.dump(2) << "\n";
  }

  json metrics;
  if (summary.joints.count > 0) {
    metrics["joint_rmse_deg"] = {{"hip", summary.joints.rmse_deg[0]},
                                 {"knee", summary.joints.rmse_deg[1]},
                                 {"ankle", summary.joints.rmse_deg[2]},
                                 {"overall", summary.joints.rmse_overall_deg}};
    metrics["joint_r2"] = summary.joints.r2_overall;
  } else {
    // No stride survived the duration filter anywhere; the kinematic
    // comparison is undefined, mirrored as nulls (a dash in reports).
    metrics["joint_rmse_deg"] = nullptr;
    metrics["joint_r2"] = nullptr;
  }
  metrics["speed_rmse"] = summary.speed.rmse;
  metrics["speed_r2"] = summary.speed.r2;
  json per_speed = json::array();
  for (const auto& row : summary.per_speed) {
    json entry = {{"speed", row.speed},
                  {"n_strides", row.n_strides},
                  {"falls", row.falls}};
    if (row.n_strides > 0) {
      entry["rmse_deg"] = row.rmse_deg;
      entry["r2"] = row.r2;
    } else {
      entry["rmse_deg"] = nullptr;
      entry["r2"] = nullptr;
    }
    per_speed.push_back(std::move(entry));
  }
  metrics["per_speed"] = per_speed;
  metrics["total_mass"] = model.total_mass;
  {
    std::ofstream out(dir + "/metrics.json", std::ios::binary);
    out << metrics.dump(2) << "\n";
  }
}

}  // namespace gaitforge::eval
