#include "flying_humanoid/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Geometry>

#include "flying_humanoid/model.hpp"

namespace flying_humanoid {

std::string_view to_string(LocomotionMode mode) {
  switch (mode) {
    case LocomotionMode::Aerial: return "aerial";
    case LocomotionMode::Legged: return "legged";
    case LocomotionMode::Wheeled: return "wheeled";
  }
  return "unknown";
}

LocomotionMode parse_mode(std::string_view name) {
  if (name == "aerial" || name == "air") return LocomotionMode::Aerial;
  if (name == "legged" || name == "leg") return LocomotionMode::Legged;
  if (name == "wheeled" || name == "wheel") return LocomotionMode::Wheeled;
  throw std::invalid_argument("unknown locomotion mode '" + std::string(name) + "'");
}

HumanoidModel::HumanoidModel(std::vector<Link> links, FootGeometry foot, int torso_link)
    : links_(std::move(links)), foot_(foot), torso_link_(torso_link) {
  validate();
}

HumanoidModel HumanoidModel::reduced_default() {
  const Eigen::Vector3d x = Eigen::Vector3d::UnitX();
  const Eigen::Vector3d y = Eigen::Vector3d::UnitY();
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
  std::vector<Link> links{
      {"feet", -1, Eigen::Vector3d::Zero(), 0.0, 0.0, {0, 0, 0}, 0.240, {0.01, 0, 0.01}},
      {"shank", 0, y, -1.0, 1.0, {0, 0, 0.03}, 0.260, {0, 0, 0.05}},
      {"thigh", 1, y, -2.2, 0.2, {0, 0, 0.10}, 0.260, {0, 0, 0.05}},
      {"hip", 2, y, -1.6, 1.6, {0, 0, 0.10}, 0.100, {0, 0, 0.0}},
      {"pelvis", 3, x, -0.6, 0.6, {0, 0, 0.0}, 0.150, {0, 0, 0.02}},
      {"torso", 4, z, -1.2, 1.2, {0, 0, 0.04}, 0.681, {0, 0, 0.08}},
  };
  return HumanoidModel(std::move(links), FootGeometry{}, 5);
}

void HumanoidModel::validate() const {
  if (links_.empty()) throw std::invalid_argument("humanoid model has no links");
  if (links_[0].parent != -1) throw std::invalid_argument("link 0 must be the root");
  for (std::size_t i = 1; i < links_.size(); ++i) {
    const Link& link = links_[i];
    if (link.parent < 0 || link.parent >= static_cast<int>(i)) {
      throw std::invalid_argument("link '" + link.name + "' must have a parent listed before it");
    }
    if (std::abs(link.axis.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("link '" + link.name + "' joint axis must be a unit vector");
    }
    if (!(link.lower <= link.upper)) throw std::invalid_argument("link '" + link.name + "' has inverted limits");
  }
  for (const Link& link : links_) {
    if (link.mass < 0.0) throw std::invalid_argument("link '" + link.name + "' has negative mass");
  }
  if (total_mass() <= 0.0) throw std::invalid_argument("humanoid total mass must be > 0");
  if (torso_link_ < 0 || torso_link_ >= static_cast<int>(links_.size())) {
    throw std::invalid_argument("torso link index out of range");
  }
  if (std::abs(foot_.wheel_radius - foot_.heel_plane_offset) > 1e-9) {
    throw std::invalid_argument("wheel radius must equal the heel plane offset");
  }
  if (foot_.plate_length <= 0.0 || foot_.plate_width <= 0.0) {
    throw std::invalid_argument("foot plate dimensions must be > 0");
  }
}

double HumanoidModel::total_mass() const {
  double m = 0.0;
  for (const Link& link : links_) m += link.mass;
  return m;
}

int HumanoidModel::find_link(std::string_view name) const {
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (links_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

void HumanoidModel::check_joints(const JointVector& q) const {
  if (q.angles.size() != joint_count()) {
    throw std::invalid_argument("joint vector has " + std::to_string(q.angles.size()) + " entries, model has " +
                                std::to_string(joint_count()) + " joints");
  }
  for (std::size_t j = 0; j < q.angles.size(); ++j) {
    const Link& link = links_[j + 1];
    const double a = q.angles[j];
    if (!std::isfinite(a) || a < link.lower || a > link.upper) {
      throw std::invalid_argument("joint '" + link.name + "' angle " + std::to_string(a) + " outside [" +
                                  std::to_string(link.lower) + ", " + std::to_string(link.upper) + "]");
    }
  }
}

std::vector<HumanoidModel::Pose> HumanoidModel::forward_kinematics(const JointVector& q) const {
  check_joints(q);
  std::vector<Pose> poses(links_.size());
  poses[0] = {Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero()};
  for (std::size_t i = 1; i < links_.size(); ++i) {
    const Link& link = links_[i];
    const Pose& parent = poses[static_cast<std::size_t>(link.parent)];
    poses[i].position = parent.position + parent.rotation * link.origin;
    poses[i].rotation = parent.rotation * Eigen::AngleAxisd(q.angles[i - 1], link.axis).toRotationMatrix();
  }
  return poses;
}

TorsoOrientation torso_orientation(const HumanoidModel& model, const JointVector& q) {
  const auto poses = model.forward_kinematics(q);
  const Eigen::Vector3d e = euler_from_rotation(poses[static_cast<std::size_t>(model.torso_link())].rotation);
  return {e.x(), e.y(), e.z()};
}

Eigen::Vector3d center_of_gravity(const HumanoidModel& model, const JointVector& q) {
  const auto poses = model.forward_kinematics(q);
  Eigen::Vector3d weighted = Eigen::Vector3d::Zero();
  double mass = 0.0;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const Link& link = model.links()[i];
    if (link.mass == 0.0) continue;
    weighted += link.mass * (poses[i].position + poses[i].rotation * link.com);
    mass += link.mass;
  }
  return weighted / mass;
}

Eigen::Vector2d cog_projection(const HumanoidModel& model, const JointVector& q) {
  return center_of_gravity(model, q).head<2>();
}

SupportPolygon support_polygon(const HumanoidModel& model, const JointVector& q, LocomotionMode mode) {
  model.check_joints(q);
  const FootGeometry& f = model.foot();
  SupportPolygon poly;
  if (mode == LocomotionMode::Wheeled) {
    poly.kind = SupportPolygon::Kind::Segment;
    poly.vertices = {{f.wheel_contact_x, -f.lateral_offset}, {f.wheel_contact_x, f.lateral_offset}};
    return poly;
  }
  // Both plates lie flat on the ground; the support area is their joint rectangle.
  const double x0 = f.plate_center_x - 0.5 * f.plate_length;
  const double x1 = f.plate_center_x + 0.5 * f.plate_length;
  const double y1 = f.lateral_offset + 0.5 * f.plate_width;
  poly.kind = SupportPolygon::Kind::Rectangle;
  poly.vertices = {{x0, -y1}, {x1, -y1}, {x1, y1}, {x0, y1}};
  return poly;
}

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

}  // namespace

double distance_to_polygon(const SupportPolygon& poly, const Eigen::Vector2d& point) {
  const auto& v = poly.vertices;
  if (poly.kind == SupportPolygon::Kind::Segment) return point_segment_distance(point, v[0], v[1]);

  bool inside = true;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Eigen::Vector2d& a = v[i];
    const Eigen::Vector2d& b = v[(i + 1) % v.size()];
    if (cross2(b - a, point - a) < 0.0) inside = false;
    best = std::min(best, point_segment_distance(point, a, b));
  }
  return inside ? 0.0 : best;
}

bool contains(const SupportPolygon& poly, const Eigen::Vector2d& point, double tolerance) {
  return distance_to_polygon(poly, point) <= tolerance;
}

}  // namespace flying_humanoid
