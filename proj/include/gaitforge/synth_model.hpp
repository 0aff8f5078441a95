#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitforge/gait_data.hpp"

namespace gaitforge::synth {

constexpr double kDeg2Rad = 0.017453292519943295;
constexpr double kRad2Deg = 57.29577951308232;

// Linear stride-duration trend: duration(v) = slope * v + intercept, clamped.
struct StrideModel {
  double slope_s_per_mps = -0.5;
  double intercept_s = 2.245;  // anchors duration(1.25) = 1.62 s
  double min_s = 0.7;
  double max_s = 2.2;

  double duration(double speed_mps) const {
    double d = slope_s_per_mps * speed_mps + intercept_s;
    return std::min(max_s, std::max(min_s, d));
  }
};

// Per (joint, phase point) ordinary least squares of angle against speed.
struct SpeedLinearModel {
  gait::AngleGrid slope_deg_per_mps;  // 3 x n_points
  gait::AngleGrid intercept_deg;      // 3 x n_points
  std::vector<double> fit_speeds;
  StrideModel stride;

  int n_points() const { return int(slope_deg_per_mps.cols()); }
  double min_fit_speed() const;
  double max_fit_speed() const;

  // Model evaluation at one speed, on the phase grid, in degrees.
  gait::AngleGrid evaluate_deg(double speed_mps) const;

  std::string to_json() const;
  static SpeedLinearModel from_json(const std::string& text);
};

// One-stride joint trajectory in radians with matching velocities.
struct SyntheticCycle {
  double speed_mps = 0.0;
  double dt = 0.0;
  Eigen::Matrix3Xd angles_rad;      // 3 x T
  Eigen::Matrix3Xd velocities_rps;  // 3 x T
  double stride_duration_s = 0.0;

  int samples() const { return int(angles_rad.cols()); }

  // Periodic linear interpolation at a cycle phase in [0, 1).
  Eigen::Vector3d angles_at_phase(double phase) const;
  Eigen::Vector3d velocities_at_phase(double phase) const;
};

struct BaseTrajectory {
  double base_speed_mps = 1.25;
  double dt = 0.0;
  Eigen::Matrix3Xd angles_rad;  // 3 x T
  double stride_duration_s = 0.0;

  int samples() const { return int(angles_rad.cols()); }
};

struct FitQuality {
  Eigen::Vector3d rmse_deg;  // per joint
  double rmse_overall_deg = 0.0;
  double r2_overall = 0.0;
};

struct DegenerateSpeeds : std::runtime_error {
  DegenerateSpeeds() : std::runtime_error("need profiles at >= 2 distinct speeds") {}
};

struct SpeedOutOfRange : std::runtime_error {
  SpeedOutOfRange(double speed, double lo, double hi)
      : std::runtime_error("speed " + std::to_string(speed) + " outside fitted range [" +
                           std::to_string(lo) + ", " + std::to_string(hi) + "]") {}
};

struct TooShort : std::runtime_error {
  TooShort() : std::runtime_error("need T >= 3 samples to differentiate") {}
};

// OLS per (joint, phase point); stride trend fitted from profile durations
// when present, default StrideModel otherwise.
SpeedLinearModel fit_speed_model(const std::vector<gait::MeanGaitProfile>& profiles);

// Central differences; periodic wrap when flagged, one-sided at the ends
// otherwise.
Eigen::Matrix3Xd differentiate_velocity(const Eigen::Matrix3Xd& angles_rad, double dt,
                                        bool periodic);

// Applies the model residual between `speed` and the base anchor speed on
// top of the base trajectory, warps the timeline to the stride duration at
// `speed`, and differentiates.
SyntheticCycle generate_kinematics(const SpeedLinearModel& model, const BaseTrajectory& base,
                                   double speed_mps, double extrapolation_margin = 0.2);

// RMSE / pooled R^2 of generated cycles against dataset profiles.
FitQuality fit_quality(const SpeedLinearModel& model, const BaseTrajectory& base,
                       const std::vector<gait::MeanGaitProfile>& profiles);

// A base trajectory anchored to the model: model evaluation at base_speed,
// upsampled to T samples by periodic linear interpolation.
BaseTrajectory base_from_model(const SpeedLinearModel& model, double base_speed_mps,
                               int samples);

// CSV export: time_s, hip/knee/ankle angles in degrees, velocities in deg/s.
std::string cycle_to_csv(const SyntheticCycle& cycle);

}  // namespace gaitforge::synth
