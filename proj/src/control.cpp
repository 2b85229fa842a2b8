#include "flying_humanoid/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Geometry>

namespace flying_humanoid {

namespace {

Eigen::Vector3d clamp_vector(const Eigen::Vector3d& v, double limit) {
  return v.cwiseMax(-limit).cwiseMin(limit);
}

}  // namespace

void GainSet::validate() const {
  const bool ok = (attitude_p.array() >= 0).all() && (attitude_i.array() >= 0).all() &&
                  (attitude_d.array() >= 0).all() && (position_p.array() >= 0).all() &&
                  (position_i.array() >= 0).all() && (position_d.array() >= 0).all() && wheel_z_p >= 0 &&
                  wheel_z_i >= 0 && wheel_z_d >= 0 && force_feedback_gain >= 0;
  if (!ok) throw std::invalid_argument("gains: all entries must be >= 0");
}

void ModeParams::validate() const {
  if (!(alpha_stable > 0.0 && alpha_stable < kGravity)) {
    throw std::invalid_argument("modes: alpha_stable must lie in (0, g)");
  }
  if (!(beta_stable > 0.0 && beta_stable < kGravity)) {
    throw std::invalid_argument("modes: beta_stable must lie in (0, g)");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("modes: control period must be > 0");
  if (!(integral_limit > 0.0)) throw std::invalid_argument("modes: integral_limit must be > 0");
  if (!(f_thresh >= 0.0)) throw std::invalid_argument("modes: f_thresh must be >= 0");
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

Eigen::Vector3d attitude_control(const RigidBodyState& state, ControllerState& ctrl, const GainSet& gains,
                                 const Eigen::Matrix3d& inertia) {
  const Eigen::Vector3d euler = state.euler();
  Eigen::Vector3d err;
  for (int i = 0; i < 3; ++i) err(i) = wrap_angle(ctrl.attitude_target(i) - euler(i));
  const Eigen::Vector3d& omega = state.angular_velocity;

  ctrl.attitude_integral = clamp_vector(ctrl.attitude_integral + err * ctrl.params.dt, ctrl.params.integral_limit);

  return omega.cross(inertia * omega) + gains.attitude_p.cwiseProduct(err) +
         gains.attitude_i.cwiseProduct(ctrl.attitude_integral) - gains.attitude_d.cwiseProduct(omega);
}

double leg_clamp(double a_z, double alpha_stable) {
  return std::clamp(a_z, alpha_stable, kGravity - kClampEpsilon);
}

double wheel_clamp(double a_z, double beta_stable) {
  return std::clamp(a_z, beta_stable, kGravity - kClampEpsilon);
}

double wheel_mode_update(ControllerState& ctrl, const GainSet& gains, double z_err, double z_rate_err,
                         double f_contact, double mass) {
  const double limit = ctrl.params.integral_limit;
  ctrl.wheel_z_integral = std::clamp(ctrl.wheel_z_integral + z_err * ctrl.params.dt, -limit, limit);
  const double a_z = gains.wheel_z_p * z_err + gains.wheel_z_i * ctrl.wheel_z_integral +
                     gains.wheel_z_d * z_rate_err + ctrl.force_feedback;
  // The accumulator is bounded to [-g, g] so a long clamp phase cannot wind it up.
  ctrl.force_feedback = std::clamp(
      ctrl.force_feedback + gains.force_feedback_gain * (f_contact - ctrl.params.f_thresh) / mass, -kGravity,
      kGravity);
  return wheel_clamp(a_z, ctrl.params.beta_stable);
}

PositionCommand position_control(const RigidBodyState& state, ControllerState& ctrl, const GainSet& gains,
                                 double mass, double contact_force) {
  const Eigen::Vector3d err = ctrl.position_target - state.position;
  const Eigen::Vector3d rate_err = -state.velocity;
  ctrl.position_integral = clamp_vector(ctrl.position_integral + err * ctrl.params.dt, ctrl.params.integral_limit);

  PositionCommand out;
  out.acceleration = Eigen::Vector3d(0.0, 0.0, kGravity) + gains.position_p.cwiseProduct(err) +
                     gains.position_i.cwiseProduct(ctrl.position_integral) + gains.position_d.cwiseProduct(rate_err);
  switch (ctrl.mode) {
    case LocomotionMode::Aerial:
      break;
    case LocomotionMode::Legged:
      out.acceleration.z() = leg_clamp(out.acceleration.z(), ctrl.params.alpha_stable);
      break;
    case LocomotionMode::Wheeled:
      ctrl.position_integral.z() = 0.0;
      out.acceleration.z() = wheel_mode_update(ctrl, gains, err.z(), rate_err.z(), contact_force, mass);
      break;
  }
  out.force = mass * state.rotation.transpose() * out.acceleration;
  return out;
}

void leg_mode_update(ControllerState& ctrl, const HumanoidModel& model, const JointVector& q,
                     const RigidBodyState& state) {
  const TorsoOrientation torso = torso_orientation(model, q);
  ctrl.attitude_target.x() = torso.roll;
  ctrl.attitude_target.z() = torso.yaw;
  ctrl.position_target.head<2>() = state.position.head<2>();
  ctrl.position_target.z() = state.position.z() + ctrl.params.leg_z_offset;
}

void switch_mode(ControllerState& ctrl, LocomotionMode mode, const RigidBodyState& state) {
  ctrl.mode = mode;
  ctrl.attitude_integral.setZero();
  ctrl.position_integral.setZero();
  ctrl.wheel_z_integral = 0.0;
  ctrl.force_feedback = 0.0;
  ctrl.position_target = state.position;
}

FlightController::FlightController(TrirotorGeometry geom, GainSet gains, ModeParams params,
                                   std::optional<HumanoidModel> model)
    : geom_(std::move(geom)), gains_(std::move(gains)), model_(std::move(model)), allocator_(geom_) {
  geom_.validate();
  gains_.validate();
  params.validate();
  ctrl_.params = params;
}

void FlightController::switch_mode(LocomotionMode mode, const RigidBodyState& state) {
  flying_humanoid::switch_mode(ctrl_, mode, state);
}

StepOutput FlightController::step(const RigidBodyState& state, const SensorReadings& sensors) {
  if (ctrl_.mode == LocomotionMode::Legged && sensors.footstep && sensors.joints && model_) {
    leg_mode_update(ctrl_, *model_, *sensors.joints, state);
  }

  const PositionCommand pos = position_control(state, ctrl_, gains_, geom_.mass, sensors.contact_force);
  const Eigen::Vector3d torque = attitude_control(state, ctrl_, gains_, geom_.inertia);

  StepOutput out;
  StepDiagnostics& diag = out.diagnostics;
  diag.desired = Wrench{pos.force, torque};
  diag.commanded_az = pos.acceleration.z();
  diag.lambda = allocator_.allocate(diag.desired);
  diag.unclamped = rotor_commands_from_lambda(diag.lambda);
  const ClampedCommands clamped = clamp_commands(geom_, diag.unclamped);
  diag.saturation = clamped.saturation;
  out.commands = clamped.commands;
  return out;
}

}  // namespace flying_humanoid
