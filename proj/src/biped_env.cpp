#include "gaitforge/biped_env.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gaitforge/csv.hpp"

namespace gaitforge::sim {

namespace {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using MatM = Eigen::Matrix<double, kDof, kDof>;
using JacP = Eigen::Matrix<double, 2, kDof>;

Mat2 rot(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

Mat2 drot(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat2 r;
  r << -s, -c, c, -s;
  return r;
}

// A point on the kinematic tree: pelvis origin plus a chain of offsets, each
// rotated by the absolute angle of its frame. Frame angles are sums of q
// components given by dof index lists.
struct ChainTerm {
  std::array<int, 4> dofs;  // q indices contributing to the frame angle
  int n_dofs;
  Vec2 offset;
};

struct Point {
  const ChainTerm* terms;
  int n_terms;
};

struct PointEval {
  Vec2 pos;
  JacP jac;
  Vec2 jdot_qd;
};

PointEval eval_point(const Point& pt, const StateVec& q, const StateVec& qd) {
  PointEval out;
  out.pos = Vec2(q[0], q[1]);
  out.jac.setZero();
  out.jac(0, 0) = 1.0;
  out.jac(1, 1) = 1.0;
  out.jdot_qd.setZero();
  for (int t = 0; t < pt.n_terms; ++t) {
    const ChainTerm& term = pt.terms[t];
    double angle = 0.0, rate = 0.0;
    for (int d = 0; d < term.n_dofs; ++d) {
      angle += q[term.dofs[d]];
      rate += qd[term.dofs[d]];
    }
    const Mat2 r = rot(angle);
    const Vec2 arm = r * term.offset;
    const Vec2 darm = drot(angle) * term.offset;
    out.pos += arm;
    for (int d = 0; d < term.n_dofs; ++d) out.jac.col(term.dofs[d]) += darm;
    out.jdot_qd -= rate * rate * arm;
  }
  return out;
}

struct BodyDef {
  Point point;             // COM
  std::array<int, 4> frame_dofs;  // body frame angle (for angular terms)
  int n_frame_dofs;
  double mass;
  double inertia;
};

// Static chain tables. Frames: trunk {2}; left thigh {2,3}, shank {2,3,4},
// foot {2,3,4,5}; right thigh {2,6}, shank {2,6,7}, foot {2,6,7,8}.
struct Tables {
  ChainTerm trunk_com[1];
  ChainTerm thigh_com_l[1], thigh_com_r[1];
  ChainTerm shank_com_l[2], shank_com_r[2];
  ChainTerm foot_com_l[3], foot_com_r[3];
  ChainTerm heel_l[3], toe_l[3], heel_r[3], toe_r[3];
  std::array<BodyDef, 7> bodies;
  std::array<Point, 4> corners;

  explicit Tables(const BipedModel& m) {
    const double lt = m.thigh_length, ls = m.shank_length;
    const Vec2 foot_com((m.toe_offset() - m.heel_offset) / 2.0, -m.foot_height / 2.0);

    trunk_com[0] = {{2}, 1, Vec2(0, m.trunk_length / 2.0)};
    thigh_com_l[0] = {{2, 3}, 2, Vec2(0, -lt / 2.0)};
    thigh_com_r[0] = {{2, 6}, 2, Vec2(0, -lt / 2.0)};
    shank_com_l[0] = {{2, 3}, 2, Vec2(0, -lt)};
    shank_com_l[1] = {{2, 3, 4}, 3, Vec2(0, -ls / 2.0)};
    shank_com_r[0] = {{2, 6}, 2, Vec2(0, -lt)};
    shank_com_r[1] = {{2, 6, 7}, 3, Vec2(0, -ls / 2.0)};
    foot_com_l[0] = {{2, 3}, 2, Vec2(0, -lt)};
    foot_com_l[1] = {{2, 3, 4}, 3, Vec2(0, -ls)};
    foot_com_l[2] = {{2, 3, 4, 5}, 4, foot_com};
    foot_com_r[0] = {{2, 6}, 2, Vec2(0, -lt)};
    foot_com_r[1] = {{2, 6, 7}, 3, Vec2(0, -ls)};
    foot_com_r[2] = {{2, 6, 7, 8}, 4, foot_com};

    auto corner = [&](ChainTerm* dst, bool left, double x_off) {
      if (left) {
        dst[0] = {{2, 3}, 2, Vec2(0, -lt)};
        dst[1] = {{2, 3, 4}, 3, Vec2(0, -ls)};
        dst[2] = {{2, 3, 4, 5}, 4, Vec2(x_off, -m.foot_height)};
      } else {
        dst[0] = {{2, 6}, 2, Vec2(0, -lt)};
        dst[1] = {{2, 6, 7}, 3, Vec2(0, -ls)};
        dst[2] = {{2, 6, 7, 8}, 4, Vec2(x_off, -m.foot_height)};
      }
    };
    corner(heel_l, true, -m.heel_offset);
    corner(toe_l, true, m.toe_offset());
    corner(heel_r, false, -m.heel_offset);
    corner(toe_r, false, m.toe_offset());

    const double m_tr = m.trunk_mass(), m_th = m.thigh_mass();
    const double m_sh = m.shank_mass(), m_ft = m.foot_mass();
    const double i_tr = m_tr * m.trunk_length * m.trunk_length / 12.0;
    const double i_th = m_th * lt * lt / 12.0;
    const double i_sh = m_sh * ls * ls / 12.0;
    const double i_ft = m_ft * (m.foot_length * m.foot_length + m.foot_height * m.foot_height) / 12.0;

    bodies = {{
        {{trunk_com, 1}, {2}, 1, m_tr, i_tr},
        {{thigh_com_l, 1}, {2, 3}, 2, m_th, i_th},
        {{shank_com_l, 2}, {2, 3, 4}, 3, m_sh, i_sh},
        {{foot_com_l, 3}, {2, 3, 4, 5}, 4, m_ft, i_ft},
        {{thigh_com_r, 1}, {2, 6}, 2, m_th, i_th},
        {{shank_com_r, 2}, {2, 6, 7}, 3, m_sh, i_sh},
        {{foot_com_r, 3}, {2, 6, 7, 8}, 4, m_ft, i_ft},
    }};
    corners = {{{heel_l, 3}, {toe_l, 3}, {heel_r, 3}, {toe_r, 3}}};
  }
};

struct Dynamics {
  MatM mass_matrix = MatM::Zero();
  StateVec bias = StateVec::Zero();     // sum m J^T (Jdot qd)
  StateVec gravity = StateVec::Zero();  // generalized gravity force
  std::array<PointEval, 7> body;
  std::array<PointEval, 4> corner;
};

Dynamics assemble(const BipedModel& model, const Tables& tab, const StateVec& q,
                  const StateVec& qd) {
  Dynamics dyn;
  for (int b = 0; b < 7; ++b) {
    const BodyDef& def = tab.bodies[b];
    dyn.body[b] = eval_point(def.point, q, qd);
    const PointEval& pe = dyn.body[b];
    dyn.mass_matrix.noalias() += def.mass * pe.jac.transpose() * pe.jac;
    for (int i = 0; i < def.n_frame_dofs; ++i) {
      for (int j = 0; j < def.n_frame_dofs; ++j) {
        dyn.mass_matrix(def.frame_dofs[i], def.frame_dofs[j]) += def.inertia;
      }
    }
    dyn.bias.noalias() += def.mass * pe.jac.transpose() * pe.jdot_qd;
    dyn.gravity.noalias() -= def.mass * model.gravity * pe.jac.row(1).transpose();
  }
  for (int c = 0; c < 4; ++c) dyn.corner[c] = eval_point(tab.corners[c], q, qd);
  return dyn;
}

Action clamp_action(const BipedModel& model, const Action& action) {
  Action out;
  for (int i = 0; i < kNumActuated; ++i) {
    const double lim = model.torque_limit[i];
    out[i] = std::min(lim, std::max(-lim, action[i]));
  }
  return out;
}

void clamp_joints(const BipedModel& model, StateVec& q, StateVec& qd) {
  const double lim[3] = {model.joint_limit_hip, model.joint_limit_knee, model.joint_limit_ankle};
  for (int leg = 0; leg < 2; ++leg) {
    for (int j = 0; j < 3; ++j) {
      const int idx = 3 + 3 * leg + j;
      if (q[idx] > lim[j]) {
        q[idx] = lim[j];
        if (qd[idx] > 0) qd[idx] = 0;
      } else if (q[idx] < -lim[j]) {
        q[idx] = -lim[j];
        if (qd[idx] < 0) qd[idx] = 0;
      }
    }
  }
}

void substep(const BipedModel& model, const Tables& tab, BipedState& s, const Action& tau) {
  const double dt = model.dt_phys;
  Dynamics dyn = assemble(model, tab, s.q, s.qd);

  StateVec applied = StateVec::Zero();
  applied.segment<kNumActuated>(3) = tau;
  const StateVec free_force = dyn.gravity + applied - dyn.bias;

  bool any_contact = false;
  std::array<double, 4> depth{};
  for (int c = 0; c < 4; ++c) {
    depth[c] = -dyn.corner[c].pos[1];
    any_contact = any_contact || depth[c] > 0.0;
  }

  StateVec qd_next;
  if (!any_contact) {
    qd_next = s.qd + dt * dyn.mass_matrix.ldlt().solve(free_force);
  } else {
    // Contact damping handled implicitly, spring explicitly; the implicit
    // velocities then feed clamped (unilateral, friction-capped) forces for
    // the final explicit update. Without clamping both routes coincide.
    const double kc = model.contact_stiffness;
    const double cc = model.contact_damping;
    MatM a = dyn.mass_matrix;
    StateVec rhs_force = free_force;
    for (int c = 0; c < 4; ++c) {
      if (depth[c] <= 0.0) continue;
      const JacP& jp = dyn.corner[c].jac;
      a.noalias() += (dt * cc) * jp.transpose() * jp;
      rhs_force.noalias() += jp.row(1).transpose() * (kc * depth[c]);
    }
    const StateVec qd_star =
        a.ldlt().solve(dyn.mass_matrix * s.qd + dt * rhs_force);

    StateVec contact_force = StateVec::Zero();
    for (int c = 0; c < 4; ++c) {
      if (depth[c] <= 0.0) continue;
      const JacP& jp = dyn.corner[c].jac;
      const Vec2 v_star = jp * qd_star;
      double fn = kc * depth[c] - cc * v_star[1];
      if (fn < 0.0) fn = 0.0;
      double ft = -cc * v_star[0];
      const double cap = model.friction_mu * fn;
      ft = std::min(cap, std::max(-cap, ft));
      contact_force.noalias() += jp.transpose() * Vec2(ft, fn);
    }
    qd_next = s.qd + dt * dyn.mass_matrix.ldlt().solve(free_force + contact_force);
  }

  s.qd = qd_next;
  s.q += dt * s.qd;
  clamp_joints(model, s.q, s.qd);
  s.t += dt;
}

}  // namespace

BipedState reset_state(const BipedModel& model, double target_speed,
                       const synth::SyntheticCycle& cycle, std::mt19937_64& rng) {
  BipedState s;
  const Eigen::Vector3d left = cycle.angles_at_phase(0.0);
  const Eigen::Vector3d right = cycle.angles_at_phase(0.5);
  s.q.segment<3>(3) = left;
  s.q.segment<3>(6) = right;
  if (model.reset_noise_rad > 0.0) {
    std::uniform_real_distribution<double> u(-model.reset_noise_rad, model.reset_noise_rad);
    for (int i = 3; i < kDof; ++i) s.q[i] += u(rng);
  }
  auto heights = corner_heights(model, s);
  const double min_h = *std::min_element(heights.begin(), heights.end());
  s.q[1] -= min_h;
  s.qd[0] = target_speed;
  return s;
}

StepResult step(const BipedModel& model, const BipedState& state, const Action& action,
                double target_speed, int n_substeps) {
  const Tables tab(model);
  const Action tau = clamp_action(model, action);

  StepResult out;
  out.state = state;
  for (int i = 0; i < n_substeps; ++i) {
    substep(model, tab, out.state, tau);
    if (!out.state.q.allFinite() || !out.state.qd.allFinite() ||
        out.state.q.cwiseAbs().maxCoeff() > model.blowup_limit ||
        out.state.qd.cwiseAbs().maxCoeff() > model.blowup_limit) {
      out.blowup = true;
      out.fell = true;
      break;
    }
  }
  out.fell = out.fell || fell(model, out.state);
  out.obs = observe(model, out.state, target_speed);
  return out;
}

Observation observe(const BipedModel& model, const BipedState& state, double target_speed) {
  (void)model;
  Observation obs;
  obs[0] = target_speed;
  obs[1] = state.q[1];
  obs[2] = state.q[2];
  obs[3] = state.qd[0];
  obs[4] = state.qd[1];
  obs[5] = state.qd[2];
  obs.segment<kNumActuated>(6) = state.q.segment<kNumActuated>(3);
  obs.segment<kNumActuated>(12) = state.qd.segment<kNumActuated>(3);
  return obs;
}

double com_velocity(const BipedModel& model, const BipedState& state) {
  return com_velocity_xz(model, state)[0];
}

Eigen::Vector2d com_velocity_xz(const BipedModel& model, const BipedState& state) {
  const Tables tab(model);
  Vec2 momentum = Vec2::Zero();
  for (int b = 0; b < 7; ++b) {
    const PointEval pe = eval_point(tab.bodies[b].point, state.q, state.qd);
    momentum += tab.bodies[b].mass * (pe.jac * state.qd);
  }
  return momentum / model.total_mass;
}

Eigen::Vector2d com_position(const BipedModel& model, const BipedState& state) {
  const Tables tab(model);
  Vec2 weighted = Vec2::Zero();
  for (int b = 0; b < 7; ++b) {
    const PointEval pe = eval_point(tab.bodies[b].point, state.q, state.qd);
    weighted += tab.bodies[b].mass * pe.pos;
  }
  return weighted / model.total_mass;
}

JointKinetics joint_kinetics(const BipedModel& model, const BipedState& state,
                             const Action& action) {
  const Action tau = clamp_action(model, action);
  JointKinetics k;
  k.torque_per_mass = tau / model.total_mass;
  k.power_per_mass =
      (tau.array() * state.qd.segment<kNumActuated>(3).array() / model.total_mass).matrix();
  return k;
}

std::array<double, 4> corner_heights(const BipedModel& model, const BipedState& state) {
  const Tables tab(model);
  std::array<double, 4> h{};
  for (int c = 0; c < 4; ++c) h[c] = eval_point(tab.corners[c], state.q, state.qd).pos[1];
  return h;
}

double mechanical_energy(const BipedModel& model, const BipedState& state) {
  const Tables tab(model);
  const Dynamics dyn = assemble(model, tab, state.q, state.qd);
  const double kinetic = 0.5 * state.qd.dot(dyn.mass_matrix * state.qd);
  double potential = 0.0;
  for (int b = 0; b < 7; ++b) {
    potential += tab.bodies[b].mass * model.gravity * dyn.body[b].pos[1];
  }
  return kinetic + potential;
}

bool fell(const BipedModel& model, const BipedState& state) {
  return state.q[1] < model.fall_height_ratio * model.standing_pelvis_height() ||
         std::abs(state.q[2]) > model.fall_pitch_rad;
}

BipedState mirror_legs(const BipedState& state) {
  BipedState out = state;
  out.q.segment<3>(3).swap(out.q.segment<3>(6));
  out.qd.segment<3>(3).swap(out.qd.segment<3>(6));
  return out;
}

Action mirror_legs(const Action& action) {
  Action out;
  out.segment<3>(0) = action.segment<3>(3);
  out.segment<3>(3) = action.segment<3>(0);
  return out;
}

std::string trajectory_csv_header() {
  std::ostringstream out;
  out << "t";
  for (int i = 0; i < kDof; ++i) out << ",q" << i;
  for (int i = 0; i < kDof; ++i) out << ",qd" << i;
  for (int i = 0; i < kNumActuated; ++i) out << ",act" << i;
  out << ",com_vx,fell";
  return out.str();
}

std::string trajectory_csv_row(const BipedModel& model, const BipedState& state,
                               const Action& action, bool fell_flag) {
  std::ostringstream out;
  out << csv::format_double(state.t);
  for (int i = 0; i < kDof; ++i) out << ',' << csv::format_double(state.q[i]);
  for (int i = 0; i < kDof; ++i) out << ',' << csv::format_double(state.qd[i]);
  for (int i = 0; i < kNumActuated; ++i) out << ',' << csv::format_double(action[i]);
  out << ',' << csv::format_double(com_velocity(model, state)) << ',' << (fell_flag ? 1 : 0);
  return out.str();
}

using json = nlohmann::json;

std::string BipedModel::to_json() const {
  json doc;
  doc["total_mass"] = total_mass;
  doc["gravity"] = gravity;
  doc["fractions"] = {{"trunk", trunk_fraction},
                      {"thigh", thigh_fraction},
                      {"shank", shank_fraction},
                      {"foot", foot_fraction}};
  doc["lengths"] = {{"thigh", thigh_length},     {"shank", shank_length},
                    {"foot_length", foot_length}, {"foot_height", foot_height},
                    {"heel_offset", heel_offset}, {"trunk", trunk_length}};
  doc["contact"] = {{"stiffness", contact_stiffness},
                    {"damping", contact_damping},
                    {"friction_mu", friction_mu}};
  doc["torque_limit"] = std::vector<double>(torque_limit.data(), torque_limit.data() + kNumActuated);
  doc["joint_limits"] = {{"hip", joint_limit_hip}, {"knee", joint_limit_knee}, {"ankle", joint_limit_ankle}};
  doc["dt_phys"] = dt_phys;
  doc["n_substeps"] = n_substeps;
  doc["fall"] = {{"height_ratio", fall_height_ratio}, {"pitch_rad", fall_pitch_rad}};
  doc["reset_noise_rad"] = reset_noise_rad;
  return doc.dump(2) + "\n";
}

BipedModel BipedModel::from_json(const std::string& text) {
  json doc = json::parse(text);
  BipedModel m;
  auto get = [&](const char* key, double& dst) {
    if (doc.contains(key)) dst = doc.at(key).get<double>();
  };
  get("total_mass", m.total_mass);
  get("gravity", m.gravity);
  if (doc.contains("fractions")) {
    const auto& f = doc.at("fractions");
    m.trunk_fraction = f.value("trunk", m.trunk_fraction);
    m.thigh_fraction = f.value("thigh", m.thigh_fraction);
    m.shank_fraction = f.value("shank", m.shank_fraction);
    m.foot_fraction = f.value("foot", m.foot_fraction);
  }
  if (doc.contains("lengths")) {
    const auto& l = doc.at("lengths");
    m.thigh_length = l.value("thigh", m.thigh_length);
    m.shank_length = l.value("shank", m.shank_length);
    m.foot_length = l.value("foot_length", m.foot_length);
    m.foot_height = l.value("foot_height", m.foot_height);
    m.heel_offset = l.value("heel_offset", m.heel_offset);
    m.trunk_length = l.value("trunk", m.trunk_length);
  }
  if (doc.contains("contact")) {
    const auto& c = doc.at("contact");
    m.contact_stiffness = c.value("stiffness", m.contact_stiffness);
    m.contact_damping = c.value("damping", m.contact_damping);
    m.friction_mu = c.value("friction_mu", m.friction_mu);
  }
  if (doc.contains("torque_limit")) {
    auto v = doc.at("torque_limit").get<std::vector<double>>();
    for (int i = 0; i < kNumActuated && i < int(v.size()); ++i) m.torque_limit[i] = v[i];
  }
  if (doc.contains("joint_limits")) {
    const auto& jl = doc.at("joint_limits");
    m.joint_limit_hip = jl.value("hip", m.joint_limit_hip);
    m.joint_limit_knee = jl.value("knee", m.joint_limit_knee);
    m.joint_limit_ankle = jl.value("ankle", m.joint_limit_ankle);
  }
  get("dt_phys", m.dt_phys);
  if (doc.contains("n_substeps")) m.n_substeps = doc.at("n_substeps").get<int>();
  if (doc.contains("fall")) {
    const auto& f = doc.at("fall");
    m.fall_height_ratio = f.value("height_ratio", m.fall_height_ratio);
    m.fall_pitch_rad = f.value("pitch_rad", m.fall_pitch_rad);
  }
  get("reset_noise_rad", m.reset_noise_rad);

  const double frac_sum =
      m.trunk_fraction + 2 * m.thigh_fraction + 2 * m.shank_fraction + 2 * m.foot_fraction;
  if (std::abs(frac_sum - 1.0) > 1e-9) {
    throw std::invalid_argument("segment mass fractions must sum to 1");
  }
  return m;
}

}  // namespace gaitforge::sim
