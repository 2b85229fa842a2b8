#include "flying_humanoid/sim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>

#include <Eigen/Geometry>

#include "flying_humanoid/allocation.hpp"

namespace flying_humanoid {

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("sim: dt must be > 0");
  if (!(duration > 0.0)) throw std::invalid_argument("sim: duration must be > 0");
  if (!(control_period >= dt)) throw std::invalid_argument("sim: control_period must be >= dt");
  if (contact_stiffness < 0.0 || contact_damping < 0.0) {
    throw std::invalid_argument("sim: contact stiffness and damping must be >= 0");
  }
  if (lateral_friction < 0.0 || !(friction_velocity > 0.0)) {
    throw std::invalid_argument("sim: friction parameters out of range");
  }
  if (noise.position < 0 || noise.attitude < 0 || noise.angular_velocity < 0 || noise.contact_force < 0) {
    throw std::invalid_argument("sim: noise standard deviations must be >= 0");
  }
}

std::vector<ContactPoint> contact_points(const HumanoidModel& model, const JointVector& q, LocomotionMode mode,
                                         double cog_height) {
  const SupportPolygon poly = support_polygon(model, q, mode);
  const Eigen::Vector2d cog = cog_projection(model, q);
  const double heel_x = std::min_element(poly.vertices.begin(), poly.vertices.end(), [](const auto& a, const auto& b) {
                          return a.x() < b.x();
                        })->x();
  std::vector<ContactPoint> points;
  for (const Eigen::Vector2d& v : poly.vertices) {
    points.push_back({Eigen::Vector3d(v.x() - cog.x(), v.y() - cog.y(), -cog_height), v.x() <= heel_x + 1e-12});
  }
  return points;
}

ContactState contact_forces(const RigidBodyState& state, const std::vector<ContactPoint>& points,
                            LocomotionMode mode, const SimConfig& cfg) {
  ContactState out;
  out.penetration.resize(points.size(), 0.0);
  out.normal_force.resize(points.size(), 0.0);
  out.in_contact.resize(points.size(), false);

  // Wheel axle direction: the body y axis projected onto the ground.
  Eigen::Vector3d lateral = state.rotation.col(1);
  lateral.z() = 0.0;
  lateral = lateral.norm() > 1e-9 ? lateral.normalized() : Eigen::Vector3d::UnitY();

  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::Vector3d arm = state.rotation * points[i].body_position;
    const Eigen::Vector3d p = state.position + arm;
    if (p.z() >= 0.0) continue;
    const Eigen::Vector3d v = state.velocity + state.rotation * state.angular_velocity.cross(points[i].body_position);
    const double depth = -p.z();
    const double normal = std::max(0.0, cfg.contact_stiffness * depth - cfg.contact_damping * v.z());
    out.penetration[i] = depth;
    out.in_contact[i] = true;
    out.normal_force[i] = normal;

    Eigen::Vector3d force(0.0, 0.0, normal);
    const double limit = cfg.lateral_friction * normal;
    if (mode == LocomotionMode::Wheeled) {
      const double slip = v.dot(lateral);
      force -= limit * std::clamp(slip / cfg.friction_velocity, -1.0, 1.0) * lateral;
    } else {
      const Eigen::Vector3d slip(v.x(), v.y(), 0.0);
      force -= limit * slip / std::max(slip.norm(), cfg.friction_velocity);
    }
    out.world_force += force;
    out.body_torque += points[i].body_position.cross(state.rotation.transpose() * force);
    if (points[i].heel) out.heel_force += normal;
  }
  return out;
}

RigidBodyState dynamics_step(const RigidBodyState& state, const Wrench& applied, const ContactState& contacts,
                             double mass, const Eigen::Matrix3d& inertia, double dt, double divergence_bound) {
  RigidBodyState next = state;
  const Eigen::Vector3d accel =
      Eigen::Vector3d(0.0, 0.0, -kGravity) + (state.rotation * applied.force + contacts.world_force) / mass;
  next.velocity = state.velocity + dt * accel;
  next.position = state.position + dt * next.velocity;

  const Eigen::Vector3d& w = state.angular_velocity;
  const Eigen::Vector3d torque = applied.torque + contacts.body_torque - w.cross(inertia * w);
  next.angular_velocity = w + dt * inertia.ldlt().solve(torque);

  const Eigen::Vector3d rot = next.angular_velocity * dt;
  const double angle = rot.norm();
  Eigen::Matrix3d increment = Eigen::Matrix3d::Identity();
  if (angle > 0.0) increment = Eigen::AngleAxisd(angle, rot / angle).toRotationMatrix();
  Eigen::Quaterniond q(state.rotation * increment);
  q.normalize();
  next.rotation = q.toRotationMatrix();

  const double size = std::max({next.position.cwiseAbs().maxCoeff(), next.velocity.cwiseAbs().maxCoeff(),
                                next.angular_velocity.cwiseAbs().maxCoeff()});
  if (!std::isfinite(size) || size > divergence_bound) {
    throw SimulationDiverged("rigid-body state exceeded sanity bound", -1);
  }
  return next;
}

double mechanical_energy(const RigidBodyState& state, double mass, const Eigen::Matrix3d& inertia) {
  const Eigen::Vector3d& w = state.angular_velocity;
  return 0.5 * mass * state.velocity.squaredNorm() + 0.5 * w.dot(inertia * w) + mass * kGravity * state.position.z();
}

void Scenario::validate(const HumanoidModel& model) const {
  if (!(duration > 0.0)) throw std::invalid_argument("scenario: duration must be > 0");
  if (!(cog_height > 0.0)) throw std::invalid_argument("scenario: cog_height must be > 0");
  model.check_joints(stance);
  for (const GaitSample& s : gait) model.check_joints(s.q);
  auto ascending = [](const auto& list) {
    return std::is_sorted(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
  };
  if (!ascending(events) || !ascending(waypoints) || !ascending(gait)) {
    throw std::invalid_argument("scenario: events, waypoints and gait samples must be time-ordered");
  }
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "# flying_humanoid trace v" << kTraceVersion << '\n';
  out << "tick,time,mode,x,y,z,roll,pitch,yaw,wx,wy,wz,x_des,y_des,z_des,roll_des,pitch_des,yaw_des,"
         "lambda1,alpha1,lambda2,alpha2,lambda3,alpha3,az_cmd,contact_force,saturated,ortho_err\n";
  out << std::setprecision(9);
  for (const TraceRow& r : trace.rows) {
    out << r.tick << ',' << r.time << ',' << to_string(r.mode);
    for (const auto* v : {&r.position, &r.euler, &r.angular_velocity, &r.position_target, &r.attitude_target}) {
      out << ',' << v->x() << ',' << v->y() << ',' << v->z();
    }
    for (const RotorCommand& c : r.commands) out << ',' << c.magnitude << ',' << c.vectoring_angle;
    out << ',' << r.commanded_az << ',' << r.contact_force << ',' << r.saturation_count << ','
        << r.orthonormality_error << '\n';
  }
}

namespace {

class NoiseSource {
 public:
  NoiseSource(const SensorNoise& noise, std::uint64_t seed) : noise_(noise), rng_(seed) {}

  RigidBodyState sense(const RigidBodyState& truth) {
    RigidBodyState s = truth;
    if (noise_.position > 0.0) s.position += vec(noise_.position);
    if (noise_.attitude > 0.0) s.rotation = truth.rotation * rotation_from_euler(vec(noise_.attitude));
    if (noise_.angular_velocity > 0.0) s.angular_velocity += vec(noise_.angular_velocity);
    return s;
  }

  double force(double truth) { return noise_.contact_force > 0.0 ? truth + sample(noise_.contact_force) : truth; }

 private:
  double sample(double std) { return std::normal_distribution<double>(0.0, std)(rng_); }
  Eigen::Vector3d vec(double std) { return {sample(std), sample(std), sample(std)}; }

  SensorNoise noise_;
  std::mt19937_64 rng_;
};

}  // namespace

Trace run_scenario(const Scenario& scenario, const TrirotorGeometry& geom, const HumanoidModel& model,
                   const GainSet& gains, const ModeParams& params, const SimConfig& cfg) {
  cfg.validate();
  scenario.validate(model);

  ModeParams ctrl_params = params;
  ctrl_params.dt = cfg.control_period;
  FlightController controller(geom, gains, ctrl_params, model);
  const WrenchAllocator allocator(geom);
  NoiseSource noise(cfg.noise, cfg.seed);

  RigidBodyState state = scenario.initial;
  controller.switch_mode(scenario.initial_mode, state);
  controller.state().position_target = scenario.position_target.value_or(state.position);
  controller.state().attitude_target = scenario.attitude_target;

  auto points_for = [&](LocomotionMode mode) { return contact_points(model, scenario.stance, mode, scenario.cog_height); };
  std::vector<ContactPoint> points = points_for(scenario.initial_mode);

  const int substeps = std::max(1, static_cast<int>(std::lround(cfg.control_period / cfg.dt)));
  const double physics_dt = cfg.control_period / substeps;
  const long ticks = static_cast<long>(std::floor(scenario.duration / cfg.control_period + 1e-9));

  std::size_t next_event = 0;
  std::size_t next_waypoint = 0;
  std::size_t next_gait = 0;
  std::optional<JointVector> joints;

  Trace trace;
  trace.rows.reserve(static_cast<std::size_t>(ticks) + 1);
  for (long tick = 0; tick <= ticks; ++tick) {
    const double t = static_cast<double>(tick) * cfg.control_period;
    const double now = t + 1e-9;
    ControllerState& ctrl = controller.state();

    for (; next_event < scenario.events.size() && scenario.events[next_event].time <= now; ++next_event) {
      const ModeEvent& ev = scenario.events[next_event];
      controller.switch_mode(ev.mode, state);
      if (ev.position_target) ctrl.position_target = *ev.position_target;
      if (ev.attitude_target) ctrl.attitude_target = *ev.attitude_target;
      points = points_for(ev.mode);
    }
    for (; next_waypoint < scenario.waypoints.size() && scenario.waypoints[next_waypoint].time <= now;
         ++next_waypoint) {
      const Waypoint& wp = scenario.waypoints[next_waypoint];
      ctrl.position_target = wp.position;
      if (wp.yaw) ctrl.attitude_target.z() = *wp.yaw;
    }
    SensorReadings sensors;
    for (; next_gait < scenario.gait.size() && scenario.gait[next_gait].time <= now; ++next_gait) {
      joints = scenario.gait[next_gait].q;
      sensors.footstep = sensors.footstep || scenario.gait[next_gait].footstep;
    }
    sensors.joints = joints;

    const ContactState contact = contact_forces(state, points, ctrl.mode, cfg);
    sensors.contact_force = noise.force(contact.heel_force);
    const StepOutput out = controller.step(noise.sense(state), sensors);

    TraceRow row;
    row.tick = tick;
    row.time = t;
    row.mode = ctrl.mode;
    row.position = state.position;
    row.euler = state.euler();
    row.angular_velocity = state.angular_velocity;
    row.position_target = ctrl.position_target;
    row.attitude_target = ctrl.attitude_target;
    row.commands = out.commands;
    row.commanded_az = out.diagnostics.commanded_az;
    row.contact_force = contact.heel_force;
    row.saturation_count = out.diagnostics.saturation.count();
    row.orthonormality_error = state.orthonormality_error();
    trace.rows.push_back(row);
    if (tick == ticks) break;

    Wrench applied = allocator.compose(lambda_from_rotor_commands(out.commands));
    applied.torque -= cfg.cog_offset.cross(applied.force);
    try {
      for (int s = 0; s < substeps; ++s) {
        state = dynamics_step(state, applied, contact_forces(state, points, ctrl.mode, cfg), geom.mass,
                              geom.inertia, physics_dt, cfg.divergence_bound);
      }
    } catch (const SimulationDiverged& e) {
      throw SimulationDiverged(std::string(e.what()) + " at tick " + std::to_string(tick), tick);
    }
  }
  return trace;
}

TraceSummary summarize(const Trace& trace, double f_thresh, double settle_time) {
  TraceSummary s;
  if (trace.rows.empty()) return s;
  const TraceRow& last = trace.rows.back();
  s.final_position_error = last.position_target - last.position;
  for (int i = 0; i < 3; ++i) s.final_attitude_error(i) = wrap_angle(last.attitude_target(i) - last.euler(i));

  double worst = -1.0;
  for (const TraceRow& r : trace.rows) {
    s.max_abs_az = std::max(s.max_abs_az, std::abs(r.commanded_az));
    if (r.saturation_count > 0) ++s.saturated_ticks;
    if (r.mode == LocomotionMode::Wheeled && r.time >= settle_time - 1e-9 && f_thresh > 0.0) {
      worst = std::max(worst, std::abs(r.contact_force - f_thresh) / f_thresh);
    }
  }
  if (worst >= 0.0) s.contact_force_error = worst;
  return s;
}

}  // namespace flying_humanoid
