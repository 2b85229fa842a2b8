#pragma once

#include <optional>

#include <Eigen/Core>

#include "flying_humanoid/allocation.hpp"
#include "flying_humanoid/kinematics.hpp"
#include "flying_humanoid/model.hpp"

namespace flying_humanoid {

/// Upper clamp margin below g for the legged and wheeled z clamps.
inline constexpr double kClampEpsilon = 1e-3;

struct GainSet {
  Eigen::Vector3d attitude_p{4.0, 4.0, 1.6};
  Eigen::Vector3d attitude_i{0.8, 0.8, 0.3};
  Eigen::Vector3d attitude_d{0.9, 0.9, 0.5};
  Eigen::Vector3d position_p{4.0, 4.0, 4.0};
  Eigen::Vector3d position_i{1.0, 1.0, 1.0};
  Eigen::Vector3d position_d{3.5, 3.5, 3.5};
  double wheel_z_p = 1.0;
  double wheel_z_i = 0.0;
  double wheel_z_d = 0.5;
  double force_feedback_gain = 0.2;

  void validate() const;
};

struct ModeParams {
  double alpha_stable = 0.4 * kGravity;   // m/s^2, legged lower clamp
  double beta_stable = 0.75 * kGravity;   // m/s^2, wheeled lower clamp
  double f_thresh = 8.0;                  // N, target heel contact force
  double dt = 0.01;                       // s, control period
  double integral_limit = 2.0;            // per-component anti-windup bound
  double leg_z_offset = 0.05;             // m, legged z target above current

  void validate() const;
};

struct ControllerState {
  LocomotionMode mode = LocomotionMode::Aerial;
  ModeParams params{};
  Eigen::Vector3d position_target = Eigen::Vector3d::Zero();
  Eigen::Vector3d attitude_target = Eigen::Vector3d::Zero();  // (roll, pitch, yaw)
  Eigen::Vector3d attitude_integral = Eigen::Vector3d::Zero();
  Eigen::Vector3d position_integral = Eigen::Vector3d::Zero();
  double wheel_z_integral = 0.0;
  double force_feedback = 0.0;  // accumulator a_i, m/s^2
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/**
 * PID attitude law with gyroscopic feedforward, in the CoG frame.
 * The rate term acts on -omega (desired body rate is zero). Advances the
 * attitude integral by the error times dt, clamped to the integral limit.
 */
Eigen::Vector3d attitude_control(const RigidBodyState& state, ControllerState& ctrl, const GainSet& gains,
                                 const Eigen::Matrix3d& inertia);

struct PositionCommand {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();         // CoG frame, N
  Eigen::Vector3d acceleration = Eigen::Vector3d::Zero();  // world frame, after clamps
};

/**
 * World-frame PID acceleration with gravity compensation, the active mode's
 * vertical clamp applied to its z component, then f = M R^T a.
 * `contact_force` feeds the wheeled-mode accumulator and is ignored otherwise.
 */
PositionCommand position_control(const RigidBodyState& state, ControllerState& ctrl, const GainSet& gains,
                                 double mass, double contact_force = 0.0);

/// Clamp into [alpha_stable, g - eps]: enough lift to unload the legs, never enough to hover.
double leg_clamp(double a_z, double alpha_stable);
double wheel_clamp(double a_z, double beta_stable);

/**
 * Wheeled-mode vertical acceleration. Evaluates the z PID plus the current
 * accumulator, then advances the accumulator by k_f (f_contact - f_thresh) / M.
 * The returned value is clamped into [beta_stable, g - eps].
 */
double wheel_mode_update(ControllerState& ctrl, const GainSet& gains, double z_err, double z_rate_err,
                         double f_contact, double mass);

/// Footstep target update: roll/yaw follow the torso, x-y latch to the
/// current position, z sits leg_z_offset above the current height.
void leg_mode_update(ControllerState& ctrl, const HumanoidModel& model, const JointVector& q,
                     const RigidBodyState& state);

/// Resets integrals and the accumulator, retargets position to the current
/// state, and installs the new mode's clamps.
void switch_mode(ControllerState& ctrl, LocomotionMode mode, const RigidBodyState& state);

struct SensorReadings {
  double contact_force = 0.0;              // summed heel force sensors, N
  bool footstep = false;                   // legged: footstep marker on this tick
  std::optional<JointVector> joints;       // legged: current gait sample
};

struct StepDiagnostics {
  Wrench desired{};
  ThrustVector lambda{};
  RotorCommands unclamped{};
  SaturationFlags saturation{};
  double commanded_az = 0.0;
};

struct StepOutput {
  RotorCommands commands{};
  StepDiagnostics diagnostics{};
};

/**
 * One tick of the integrated controller: mode-specific target update,
 * position and attitude laws, wrench allocation, per-rotor decomposition
 * and actuator clamping.
 */
class FlightController {
 public:
  FlightController(TrirotorGeometry geom, GainSet gains, ModeParams params,
                   std::optional<HumanoidModel> model = std::nullopt);

  StepOutput step(const RigidBodyState& state, const SensorReadings& sensors);
  void switch_mode(LocomotionMode mode, const RigidBodyState& state);

  ControllerState& state() { return ctrl_; }
  const ControllerState& state() const { return ctrl_; }
  const TrirotorGeometry& geometry() const { return geom_; }
  const GainSet& gains() const { return gains_; }

 private:
  TrirotorGeometry geom_;
  GainSet gains_;
  std::optional<HumanoidModel> model_;
  WrenchAllocator allocator_;
  ControllerState ctrl_;
};

}  // namespace flying_humanoid
