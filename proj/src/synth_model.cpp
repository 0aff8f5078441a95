#include "gaitforge/synth_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gaitforge/csv.hpp"

namespace gaitforge::synth {

using json = nlohmann::json;

namespace {

// Periodic linear interpolation of a 3 x n grid at phase in [0, 1).
// Grid point k sits at phase k/n; the last segment wraps to point 0.
Eigen::Vector3d interp_periodic(const Eigen::Matrix3Xd& grid, double phase) {
  const int n = int(grid.cols());
  phase -= std::floor(phase);
  const double x = phase * n;
  int k = int(std::floor(x));
  if (k >= n) k = n - 1;
  const double w = x - k;
  const int k1 = (k + 1) % n;
  return (1.0 - w) * grid.col(k) + w * grid.col(k1);
}

std::pair<double, double> ols_fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double n = double(x.size());
  const double mx = x.mean();
  const double my = y.mean();
  const double sxx = (x.array() - mx).square().sum();
  if (sxx <= 0.0) return {0.0, my};
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  const double slope = sxy / sxx;
  (void)n;
  return {slope, my - slope * mx};
}

}  // namespace

double SpeedLinearModel::min_fit_speed() const {
  return *std::min_element(fit_speeds.begin(), fit_speeds.end());
}

double SpeedLinearModel::max_fit_speed() const {
  return *std::max_element(fit_speeds.begin(), fit_speeds.end());
}

gait::AngleGrid SpeedLinearModel::evaluate_deg(double speed_mps) const {
  return slope_deg_per_mps * speed_mps + intercept_deg;
}

SpeedLinearModel fit_speed_model(const std::vector<gait::MeanGaitProfile>& profiles) {
  if (profiles.size() < 2) throw DegenerateSpeeds();
  std::set<double> distinct;
  for (const auto& p : profiles) distinct.insert(p.speed_mps);
  if (distinct.size() < 2) throw DegenerateSpeeds();

  const int n_points = profiles.front().n_points();
  for (const auto& p : profiles) {
    if (p.n_points() != n_points) throw gait::MixedResolution();
  }

  const int m = int(profiles.size());
  Eigen::VectorXd speeds(m);
  for (int i = 0; i < m; ++i) speeds[i] = profiles[i].speed_mps;

  SpeedLinearModel model;
  model.slope_deg_per_mps.resize(3, n_points);
  model.intercept_deg.resize(3, n_points);
  model.fit_speeds.assign(speeds.data(), speeds.data() + m);

  Eigen::VectorXd y(m);
  for (int j = 0; j < 3; ++j) {
    for (int p = 0; p < n_points; ++p) {
      for (int i = 0; i < m; ++i) y[i] = profiles[i].angles_deg(j, p);
      auto [slope, intercept] = ols_fit(speeds, y);
      model.slope_deg_per_mps(j, p) = slope;
      model.intercept_deg(j, p) = intercept;
    }
  }

  // Stride trend from data when every profile carries a duration.
  bool have_durations = true;
  for (const auto& p : profiles) have_durations = have_durations && p.stride_duration_s.has_value();
  if (have_durations) {
    Eigen::VectorXd d(m);
    for (int i = 0; i < m; ++i) d[i] = *profiles[i].stride_duration_s;
    auto [slope, intercept] = ols_fit(speeds, d);
    model.stride.slope_s_per_mps = slope;
    model.stride.intercept_s = intercept;
  }
  return model;
}

Eigen::Matrix3Xd differentiate_velocity(const Eigen::Matrix3Xd& angles_rad, double dt,
                                        bool periodic) {
  const int t = int(angles_rad.cols());
  if (t < 3) throw TooShort();
  if (dt <= 0.0) throw std::invalid_argument("dt must be positive");

  Eigen::Matrix3Xd vel(3, t);
  for (int i = 0; i < t; ++i) {
    int prev = i - 1;
    int next = i + 1;
    double span = 2.0 * dt;
    if (periodic) {
      prev = (i - 1 + t) % t;
      next = (i + 1) % t;
    } else if (i == 0) {
      prev = 0;
      next = 1;
      span = dt;
    } else if (i == t - 1) {
      prev = t - 2;
      next = t - 1;
      span = dt;
    }
    vel.col(i) = (angles_rad.col(next) - angles_rad.col(prev)) / span;
  }
  return vel;
}

Eigen::Vector3d SyntheticCycle::angles_at_phase(double phase) const {
  return interp_periodic(angles_rad, phase);
}

Eigen::Vector3d SyntheticCycle::velocities_at_phase(double phase) const {
  return interp_periodic(velocities_rps, phase);
}

SyntheticCycle generate_kinematics(const SpeedLinearModel& model, const BaseTrajectory& base,
                                   double speed_mps, double extrapolation_margin) {
  const double lo = model.min_fit_speed() - extrapolation_margin;
  const double hi = model.max_fit_speed() + extrapolation_margin;
  if (speed_mps < lo || speed_mps > hi) throw SpeedOutOfRange(speed_mps, lo, hi);

  const int t = base.samples();
  if (t < 3) throw TooShort();

  // Residual on the model grid, in radians.
  gait::AngleGrid delta_deg = model.evaluate_deg(speed_mps) - model.evaluate_deg(base.base_speed_mps);
  Eigen::Matrix3Xd delta_rad = delta_deg * kDeg2Rad;

  SyntheticCycle out;
  out.speed_mps = speed_mps;
  out.stride_duration_s = model.stride.duration(speed_mps);
  out.dt = out.stride_duration_s / double(t);
  out.angles_rad.resize(3, t);
  for (int i = 0; i < t; ++i) {
    out.angles_rad.col(i) = base.angles_rad.col(i) + interp_periodic(delta_rad, double(i) / double(t));
  }
  out.velocities_rps = differentiate_velocity(out.angles_rad, out.dt, /*periodic=*/true);
  return out;
}

FitQuality fit_quality(const SpeedLinearModel& model, const BaseTrajectory& base,
                       const std::vector<gait::MeanGaitProfile>& profiles) {
  if (profiles.empty()) throw std::invalid_argument("need at least one profile");
  const int n_points = profiles.front().n_points();

  // Pool prediction/target pairs over speeds and phase points.
  std::vector<Eigen::Matrix3Xd> predictions;
  predictions.reserve(profiles.size());
  for (const auto& prof : profiles) {
    SyntheticCycle cycle = generate_kinematics(model, base, prof.speed_mps);
    Eigen::Matrix3Xd pred_deg(3, n_points);
    for (int p = 0; p < n_points; ++p) {
      pred_deg.col(p) = cycle.angles_at_phase(double(p) / double(n_points)) * kRad2Deg;
    }
    predictions.push_back(std::move(pred_deg));
  }

  FitQuality q;
  Eigen::Vector3d sse_joint = Eigen::Vector3d::Zero();
  double sse = 0.0;
  double sum = 0.0;
  long count = 0;
  for (size_t i = 0; i < profiles.size(); ++i) {
    const auto err = predictions[i] - profiles[i].angles_deg;
    for (int j = 0; j < 3; ++j) sse_joint[j] += err.row(j).squaredNorm();
    sse += err.squaredNorm();
    sum += profiles[i].angles_deg.sum();
    count += profiles[i].angles_deg.size();
  }
  const double pooled_mean = sum / double(count);
  double sst = 0.0;
  for (const auto& prof : profiles) {
    sst += (prof.angles_deg.array() - pooled_mean).square().sum();
  }

  const double per_joint_count = double(count) / 3.0;
  for (int j = 0; j < 3; ++j) q.rmse_deg[j] = std::sqrt(sse_joint[j] / per_joint_count);
  q.rmse_overall_deg = std::sqrt(sse / double(count));
  q.r2_overall = sst > 0.0 ? 1.0 - sse / sst : (sse == 0.0 ? 1.0 : 0.0);
  return q;
}

BaseTrajectory base_from_model(const SpeedLinearModel& model, double base_speed_mps,
                               int samples) {
  if (samples < 3) throw TooShort();
  Eigen::Matrix3Xd anchor_rad = model.evaluate_deg(base_speed_mps) * kDeg2Rad;
  BaseTrajectory base;
  base.base_speed_mps = base_speed_mps;
  base.stride_duration_s = model.stride.duration(base_speed_mps);
  base.dt = base.stride_duration_s / double(samples);
  base.angles_rad.resize(3, samples);
  for (int i = 0; i < samples; ++i) {
    base.angles_rad.col(i) = interp_periodic(anchor_rad, double(i) / double(samples));
  }
  return base;
}

std::string SpeedLinearModel::to_json() const {
  json doc;
  doc["n_points"] = n_points();
  auto grid_to_json = [](const gait::AngleGrid& g) {
    json rows = json::array();
    for (int j = 0; j < 3; ++j) {
      json row = json::array();
      for (int p = 0; p < g.cols(); ++p) row.push_back(g(j, p));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  doc["slope"] = grid_to_json(slope_deg_per_mps);
  doc["intercept"] = grid_to_json(intercept_deg);
  doc["fit_speeds"] = fit_speeds;
  doc["stride_model"] = {{"slope", stride.slope_s_per_mps},
                         {"intercept", stride.intercept_s},
                         {"min_s", stride.min_s},
                         {"max_s", stride.max_s}};
  return doc.dump(2) + "\n";
}

SpeedLinearModel SpeedLinearModel::from_json(const std::string& text) {
  json doc = json::parse(text);
  SpeedLinearModel model;
  const int n = doc.at("n_points").get<int>();
  auto grid_from_json = [n](const json& rows) {
    gait::AngleGrid g(3, n);
    for (int j = 0; j < 3; ++j) {
      for (int p = 0; p < n; ++p) g(j, p) = rows.at(j).at(p).get<double>();
    }
    return g;
  };
  model.slope_deg_per_mps = grid_from_json(doc.at("slope"));
  model.intercept_deg = grid_from_json(doc.at("intercept"));
  model.fit_speeds = doc.at("fit_speeds").get<std::vector<double>>();
  const auto& sm = doc.at("stride_model");
  model.stride.slope_s_per_mps = sm.at("slope").get<double>();
  model.stride.intercept_s = sm.at("intercept").get<double>();
  if (sm.contains("min_s")) model.stride.min_s = sm.at("min_s").get<double>();
  if (sm.contains("max_s")) model.stride.max_s = sm.at("max_s").get<double>();
  if (model.fit_speeds.size() < 2) throw DegenerateSpeeds();
  return model;
}

std::string cycle_to_csv(const SyntheticCycle& cycle) {
  std::ostringstream out;
  out << "time_s,hip_deg,knee_deg,ankle_deg,hip_degps,knee_degps,ankle_degps\n";
  for (int i = 0; i < cycle.samples(); ++i) {
    out << csv::format_double(double(i) * cycle.dt);
    for (int j = 0; j < 3; ++j) out << ',' << csv::format_double(cycle.angles_rad(j, i) * kRad2Deg);
    for (int j = 0; j < 3; ++j) out << ',' << csv::format_double(cycle.velocities_rps(j, i) * kRad2Deg);
    out << '\n';
  }
  return out.str();
}

}  // namespace gaitforge::synth
