#include "flying_humanoid/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

namespace flying_humanoid {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("invalid geometry: " + what);
}

}  // namespace

void TrirotorGeometry::validate() const {
  require(std::isfinite(l) && l > 0.0, "l must be > 0");
  require(std::isfinite(h) && h >= 0.0, "h must be >= 0");
  require(std::isfinite(d_f) && d_f > 0.0, "d_f must be > 0");
  require(std::isfinite(d_r) && d_r > 0.0, "d_r must be > 0");
  require(std::isfinite(mass) && mass > 0.0, "mass must be > 0");
  require(inertia.allFinite(), "inertia must be finite");
  require((inertia - inertia.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, inertia.cwiseAbs().maxCoeff()),
          "inertia must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(inertia, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() > 0.0, "inertia must be positive definite");
  require(lambda_min < lambda_max, "lambda_min must be < lambda_max");
  require(lambda_min >= 0.0, "lambda_min must be >= 0");
  require(alpha_min < alpha_max, "alpha_min must be < alpha_max");
}

Vector6d Wrench::stacked() const {
  Vector6d v;
  v << force, torque;
  return v;
}

Wrench Wrench::from_stacked(const Vector6d& v) {
  return Wrench{v.head<3>(), v.tail<3>()};
}

bool Wrench::is_finite() const { return force.allFinite() && torque.allFinite(); }

Eigen::Vector3d euler_from_rotation(const Eigen::Matrix3d& r) {
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return {roll, pitch, yaw};
}

Eigen::Matrix3d rotation_from_euler(const Eigen::Vector3d& euler) {
  return (Eigen::AngleAxisd(euler.z(), Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(euler.y(), Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(euler.x(), Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

double RigidBodyState::orthonormality_error() const {
  return (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

Matrix6d build_allocation_matrix(const TrirotorGeometry& g) {
  Matrix6d q;
  // clang-format off
  q <<   0.0,  1.0,   0.0, 1.0, 0.0,   0.0,
         0.0,  0.0,   0.0, 0.0, 0.0,   1.0,
         1.0,  0.0,   1.0, 0.0, 1.0,   0.0,
         g.l,  0.0,  -g.l, 0.0, 0.0,  -g.h,
      -g.d_f,  g.h, -g.d_f, g.h, g.d_r, 0.0,
         0.0, -g.l,   0.0, g.l, 0.0, -g.d_r;
  // clang-format on
  return q;
}

double allocation_determinant(const TrirotorGeometry& g) {
  return -4.0 * g.l * g.l * (g.d_f + g.d_r);
}

}  // namespace flying_humanoid
