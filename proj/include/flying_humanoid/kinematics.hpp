#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace flying_humanoid {

enum class LocomotionMode { Aerial, Legged, Wheeled };

std::string_view to_string(LocomotionMode mode);
/// Accepts "aerial", "legged"/"leg", "wheeled"/"wheel". Throws std::invalid_argument.
LocomotionMode parse_mode(std::string_view name);

inline constexpr double kDefaultContainmentTolerance = 0.005;  // m

/**
 * One rigid link of the humanoid tree. Link 0 is the root (the foot frame,
 * ground-parallel and fixed at the origin); every other link hangs off its
 * parent through one revolute joint located at `origin` in the parent frame.
 */
struct Link {
  std::string name;
  int parent = -1;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitY();
  double lower = -3.14159;
  double upper = 3.14159;
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  double mass = 0.0;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();  // in the link frame
};

struct FootGeometry {
  double plate_length = 0.1;      // along x
  double plate_width = 0.05;      // along y
  double plate_center_x = 0.0;
  double lateral_offset = 0.06;   // each foot's center at y = +/- lateral_offset
  double wheel_contact_x = -0.04; // heel wheels, ground contact point
  double wheel_radius = 0.02;
  double heel_plane_offset = 0.02;  // wheel axle height above the foot plane
};

struct JointVector {
  std::vector<double> angles;  // one per non-root link, in link order
};

class HumanoidModel {
 public:
  HumanoidModel() = default;
  HumanoidModel(std::vector<Link> links, FootGeometry foot, int torso_link);

  /// Default reduced model: lumped legs (ankle pitch, knee, hip pitch,
  /// hip roll) plus waist yaw and a torso carrying the clutch.
  static HumanoidModel reduced_default();

  const std::vector<Link>& links() const { return links_; }
  const FootGeometry& foot() const { return foot_; }
  int torso_link() const { return torso_link_; }
  std::size_t joint_count() const { return links_.empty() ? 0 : links_.size() - 1; }
  double total_mass() const;
  int find_link(std::string_view name) const;  // -1 when absent

  /// Throws std::invalid_argument on size mismatch or limit violation.
  void check_joints(const JointVector& q) const;

  /// World-frame (foot-frame) poses of every link.
  struct Pose {
    Eigen::Matrix3d rotation;
    Eigen::Vector3d position;
  };
  std::vector<Pose> forward_kinematics(const JointVector& q) const;

  void validate() const;

 private:
  std::vector<Link> links_;
  FootGeometry foot_;
  int torso_link_ = 0;
};

struct TorsoOrientation {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

TorsoOrientation torso_orientation(const HumanoidModel& model, const JointVector& q);

/// Mass-weighted CoG in the foot frame.
Eigen::Vector3d center_of_gravity(const HumanoidModel& model, const JointVector& q);
Eigen::Vector2d cog_projection(const HumanoidModel& model, const JointVector& q);

struct SupportPolygon {
  enum class Kind { Rectangle, Segment };
  Kind kind = Kind::Rectangle;
  std::vector<Eigen::Vector2d> vertices;  // counter-clockwise for rectangles
};

SupportPolygon support_polygon(const HumanoidModel& model, const JointVector& q, LocomotionMode mode);

/// Euclidean distance from the point to the polygon region (0 inside).
double distance_to_polygon(const SupportPolygon& poly, const Eigen::Vector2d& point);

/// Rectangle: inside or within `tolerance` of it. Segment: within
/// `tolerance` of the segment. Boundaries are inclusive.
bool contains(const SupportPolygon& poly, const Eigen::Vector2d& point, double tolerance);

}  // namespace flying_humanoid
