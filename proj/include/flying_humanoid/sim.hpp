#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "flying_humanoid/control.hpp"
#include "flying_humanoid/kinematics.hpp"
#include "flying_humanoid/model.hpp"

namespace flying_humanoid {

class SimulationDiverged : public std::runtime_error {
 public:
  SimulationDiverged(const std::string& what, long tick) : std::runtime_error(what), tick_(tick) {}
  long tick() const { return tick_; }

 private:
  long tick_;
};

struct SensorNoise {
  double position = 0.0;          // m
  double attitude = 0.0;          // rad
  double angular_velocity = 0.0;  // rad/s
  double contact_force = 0.0;     // N
};

struct SimConfig {
  double dt = 1e-3;
  double duration = 10.0;
  double control_period = 0.01;
  double contact_stiffness = 1e4;   // N/m per contact point
  double contact_damping = 50.0;    // N*s/m per contact point
  double lateral_friction = 0.8;    // Coulomb coefficient
  double friction_velocity = 0.01;  // m/s, regularization of the Coulomb law
  SensorNoise noise{};
  std::uint64_t seed = 1;
  /// Offset of the true CoG from the controller's CoG frame (body frame, m).
  Eigen::Vector3d cog_offset = Eigen::Vector3d::Zero();
  double divergence_bound = 1e4;

  void validate() const;
};

struct ContactPoint {
  Eigen::Vector3d body_position = Eigen::Vector3d::Zero();  // relative to the CoG, body frame
  bool heel = false;  // carries a foot force sensor
};

/**
 * Body-frame contact points for a mode: foot-plate corners for legged and
 * aerial, the two heel wheel contacts for wheeled. The rigid body's CoG is
 * placed `cog_height` above the ground, over the humanoid's CoG projection.
 */
std::vector<ContactPoint> contact_points(const HumanoidModel& model, const JointVector& q, LocomotionMode mode,
                                         double cog_height);

struct ContactState {
  std::vector<double> penetration;
  std::vector<double> normal_force;
  std::vector<bool> in_contact;
  Eigen::Vector3d world_force = Eigen::Vector3d::Zero();
  Eigen::Vector3d body_torque = Eigen::Vector3d::Zero();
  double heel_force = 0.0;  // foot force sensor reading
};

/// Penalty contact. Wheeled mode rolls freely along the heading and resists
/// lateral sliding; the other modes resist sliding in both ground directions.
ContactState contact_forces(const RigidBodyState& state, const std::vector<ContactPoint>& points,
                            LocomotionMode mode, const SimConfig& cfg);

/// Semi-implicit Euler step of the rigid-body equations. Rotation advances
/// by the exponential map and is re-orthonormalized. Throws
/// SimulationDiverged (tick -1) when the state leaves `divergence_bound`.
RigidBodyState dynamics_step(const RigidBodyState& state, const Wrench& applied, const ContactState& contacts,
                             double mass, const Eigen::Matrix3d& inertia, double dt,
                             double divergence_bound = 1e4);

double mechanical_energy(const RigidBodyState& state, double mass, const Eigen::Matrix3d& inertia);

struct ModeEvent {
  double time = 0.0;
  LocomotionMode mode = LocomotionMode::Aerial;
  std::optional<Eigen::Vector3d> position_target;
  std::optional<Eigen::Vector3d> attitude_target;
};

struct Waypoint {
  double time = 0.0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::optional<double> yaw;
};

struct GaitSample {
  double time = 0.0;
  bool footstep = false;
  JointVector q;
};

struct Scenario {
  std::string name;
  double duration = 10.0;
  LocomotionMode initial_mode = LocomotionMode::Aerial;
  RigidBodyState initial{};
  std::optional<Eigen::Vector3d> position_target;  // defaults to the initial position
  Eigen::Vector3d attitude_target = Eigen::Vector3d::Zero();
  std::vector<ModeEvent> events;
  std::vector<Waypoint> waypoints;
  std::vector<GaitSample> gait;
  JointVector stance;       // pose used for contact geometry
  double cog_height = 0.3;  // CoG height above the ground in `stance`

  void validate(const HumanoidModel& model) const;
};

struct TraceRow {
  long tick = 0;
  double time = 0.0;
  LocomotionMode mode = LocomotionMode::Aerial;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d euler = Eigen::Vector3d::Zero();
  Eigen::Vector3d angular_velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d position_target = Eigen::Vector3d::Zero();
  Eigen::Vector3d attitude_target = Eigen::Vector3d::Zero();
  RotorCommands commands{};
  double commanded_az = 0.0;
  double contact_force = 0.0;
  int saturation_count = 0;
  double orthonormality_error = 0.0;
};

struct Trace {
  std::vector<TraceRow> rows;
};

inline constexpr int kTraceVersion = 1;

/// Fixed CSV layout; the first line carries the trace version.
void write_trace_csv(std::ostream& out, const Trace& trace);

Trace run_scenario(const Scenario& scenario, const TrirotorGeometry& geom, const HumanoidModel& model,
                   const GainSet& gains, const ModeParams& params, const SimConfig& cfg);

struct TraceSummary {
  Eigen::Vector3d final_position_error = Eigen::Vector3d::Zero();
  Eigen::Vector3d final_attitude_error = Eigen::Vector3d::Zero();
  double max_abs_az = 0.0;
  int saturated_ticks = 0;
  std::optional<double> contact_force_error;  // relative, wheeled tail only
};

/// `settle_time`: rows before it are excluded from the wheeled force error.
TraceSummary summarize(const Trace& trace, double f_thresh, double settle_time);

}  // namespace flying_humanoid
