#pragma once

#include <Eigen/Dense>
#include <array>
#include <random>
#include <string>

#include "gaitforge/synth_model.hpp"

namespace gaitforge::sim {

// Generalized coordinate layout (9 DOF, sagittal plane):
//   q[0] pelvis x [m], q[1] pelvis z [m], q[2] pelvis pitch [rad],
//   q[3..5] left hip/knee/ankle [rad], q[6..8] right hip/knee/ankle [rad].
constexpr int kDof = 9;
constexpr int kNumActuated = 6;
constexpr int kObsDim = 18;

using StateVec = Eigen::Matrix<double, kDof, 1>;
using Action = Eigen::Matrix<double, kNumActuated, 1>;
using Observation = Eigen::Matrix<double, kObsDim, 1>;

struct BipedModel {
  double total_mass = 86.62;  // kg
  double gravity = 9.81;

  // Segment mass fractions of total mass.
  double trunk_fraction = 0.678;
  double thigh_fraction = 0.10;   // each
  double shank_fraction = 0.0465; // each
  double foot_fraction = 0.0145;  // each

  // Geometry [m].
  double thigh_length = 0.42;
  double shank_length = 0.43;
  double foot_length = 0.26;   // heel-to-toe box
  double foot_height = 0.06;   // sole-to-ankle box
  double heel_offset = 0.13;   // ankle to heel corner; ankle centered over the box
  double trunk_length = 0.60;  // lumped trunk rod above the hip

  // Contact (per corner point).
  double contact_stiffness = 3.0e4;  // N/m
  double contact_damping = 1.0e3;    // N s/m, normal and tangential
  double friction_mu = 0.9;

  // Actuation limits [N m]: hip, knee, ankle per leg.
  Eigen::Matrix<double, kNumActuated, 1> torque_limit =
      (Eigen::Matrix<double, kNumActuated, 1>() << 150, 150, 100, 150, 150, 100).finished();
  double joint_limit_hip = 1.6;    // symmetric [rad]
  double joint_limit_knee = 2.4;
  double joint_limit_ankle = 1.2;

  // Integration and episode termination.
  double dt_phys = 0.001;
  int n_substeps = 10;  // control period 0.01 s
  double fall_height_ratio = 0.6;
  double fall_pitch_rad = 1.0;
  double reset_noise_rad = 0.02;
  double blowup_limit = 1.0e6;

  double standing_pelvis_height() const { return thigh_length + shank_length + foot_height; }
  double toe_offset() const { return foot_length - heel_offset; }

  double trunk_mass() const { return trunk_fraction * total_mass; }
  double thigh_mass() const { return thigh_fraction * total_mass; }
  double shank_mass() const { return shank_fraction * total_mass; }
  double foot_mass() const { return foot_fraction * total_mass; }

  std::string to_json() const;
  static BipedModel from_json(const std::string& text);
};

struct BipedState {
  StateVec q = StateVec::Zero();
  StateVec qd = StateVec::Zero();
  double t = 0.0;
};

struct StepResult {
  BipedState state;
  Observation obs;
  bool fell = false;
  bool blowup = false;
};

struct JointKinetics {
  Eigen::Matrix<double, kNumActuated, 1> torque_per_mass;  // N m / kg
  Eigen::Matrix<double, kNumActuated, 1> power_per_mass;   // W / kg
};

// Episode initialization: joints from the synthetic cycle (left at phase 0,
// right half a cycle later) plus uniform noise, pelvis dropped until the
// lowest foot corner touches the ground, forward velocity at target speed.
BipedState reset_state(const BipedModel& model, double target_speed,
                       const synth::SyntheticCycle& cycle, std::mt19937_64& rng);

// n_substeps semi-implicit Euler integrations at dt_phys with penalty
// spring-damper foot contact and Coulomb friction caps.
StepResult step(const BipedModel& model, const BipedState& state, const Action& action,
                double target_speed, int n_substeps);

Observation observe(const BipedModel& model, const BipedState& state, double target_speed);

// Mass-weighted forward velocity of all segment COMs.
double com_velocity(const BipedModel& model, const BipedState& state);
Eigen::Vector2d com_velocity_xz(const BipedModel& model, const BipedState& state);
Eigen::Vector2d com_position(const BipedModel& model, const BipedState& state);

JointKinetics joint_kinetics(const BipedModel& model, const BipedState& state,
                             const Action& action);

// Heights of the four foot corners (left heel, left toe, right heel, right
// toe); negative means penetration.
std::array<double, 4> corner_heights(const BipedModel& model, const BipedState& state);

// Kinetic plus gravitational potential energy (contact springs excluded).
double mechanical_energy(const BipedModel& model, const BipedState& state);

bool fell(const BipedModel& model, const BipedState& state);

// Swaps the left and right leg coordinates of a state or action.
BipedState mirror_legs(const BipedState& state);
Action mirror_legs(const Action& action);

// Trajectory dump per the module interface:
// t, q[9], qdot[9], action[6], com_vx, fell.
std::string trajectory_csv_header();
std::string trajectory_csv_row(const BipedModel& model, const BipedState& state,
                               const Action& action, bool fell_flag);

}  // namespace gaitforge::sim
