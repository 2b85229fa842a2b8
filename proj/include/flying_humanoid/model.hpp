#pragma once

#include <array>
#include <numbers>

#include <Eigen/Core>

namespace flying_humanoid {

inline constexpr double kGravity = 9.81;

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/**
 * Trirotor flight unit geometry and actuator limits.
 *
 * Rotors 1 and 2 sit in front of the CoG at lateral offsets +l / -l and
 * longitudinal offset d_f. Rotor 3 sits behind at d_r. The vectored thrust
 * lines are offset vertically from the CoG by h.
 *
 * The inertia is a single combined matrix. Whether it covers the flight unit
 * alone or the flight unit plus humanoid is a modelling choice left to the
 * config; the bundled presets use the combined body.
 */
struct TrirotorGeometry {
  double l = 0.2;
  double h = 0.1;
  double d_f = 0.15;
  double d_r = 0.3;
  double mass = 3.343;
  Eigen::Matrix3d inertia = Eigen::Vector3d(0.12, 0.10, 0.08).asDiagonal();

  double lambda_min = 0.0;
  double lambda_max = 18.0;
  double alpha_min = -0.75 * std::numbers::pi;
  double alpha_max = 0.75 * std::numbers::pi;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

struct Wrench {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();

  Vector6d stacked() const;
  static Wrench from_stacked(const Vector6d& v);
  bool is_finite() const;
};

/// Ordered (l1_perp, l1_par, l2_perp, l2_par, l3_perp, l3_par).
struct ThrustVector {
  Vector6d components = Vector6d::Zero();

  double perpendicular(int rotor) const { return components(2 * rotor); }
  double parallel(int rotor) const { return components(2 * rotor + 1); }
};

struct RotorCommand {
  double magnitude = 0.0;
  double vectoring_angle = 0.0;
};

using RotorCommands = std::array<RotorCommand, 3>;

/// Z-Y-X (yaw-pitch-roll) Euler angles, stored as (roll, pitch, yaw).
Eigen::Vector3d euler_from_rotation(const Eigen::Matrix3d& rotation);
Eigen::Matrix3d rotation_from_euler(const Eigen::Vector3d& euler);

struct RigidBodyState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d angular_velocity = Eigen::Vector3d::Zero();  // CoG frame

  Eigen::Vector3d euler() const { return euler_from_rotation(rotation); }
  /// max |R^T R - I| entry
  double orthonormality_error() const;
};

/// Maps the thrust vector to the CoG-frame wrench (f_x, f_y, f_z, t_x, t_y, t_z).
Matrix6d build_allocation_matrix(const TrirotorGeometry& geom);

/// Closed form of det(Q); nonzero whenever l, d_f + d_r are nonzero.
double allocation_determinant(const TrirotorGeometry& geom);

}  // namespace flying_humanoid
