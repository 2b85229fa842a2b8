#include <cmath>

#include <gtest/gtest.h>

#include "flying_humanoid/feasibility.hpp"
#include "flying_humanoid/kinematics.hpp"

using namespace flying_humanoid;

namespace {

Link link(const std::string& name, int parent, Eigen::Vector3d axis, Eigen::Vector3d origin, double mass,
          Eigen::Vector3d com) {
  Link l;
  l.name = name;
  l.parent = parent;
  l.axis = axis;
  l.origin = origin;
  l.mass = mass;
  l.com = com;
  return l;
}

// foot -> pitch joint -> link a -> pitch joint -> link b
HumanoidModel planar_chain(double m0, double m1, double m2) {
  std::vector<Link> links{
      link("foot", -1, Eigen::Vector3d::UnitY(), Eigen::Vector3d::Zero(), m0, {0.0, 0.0, 0.0}),
      link("a", 0, Eigen::Vector3d::UnitY(), {0.0, 0.0, 0.0}, m1, {0.0, 0.0, 0.2}),
      link("b", 1, Eigen::Vector3d::UnitY(), {0.0, 0.0, 0.4}, m2, {0.0, 0.0, 0.1}),
  };
  return HumanoidModel(links, FootGeometry{}, 2);
}

}  // namespace

TEST(Mode, Names) {
  EXPECT_EQ(to_string(LocomotionMode::Wheeled), "wheeled");
  EXPECT_EQ(parse_mode("leg"), LocomotionMode::Legged);
  EXPECT_EQ(parse_mode("aerial"), LocomotionMode::Aerial);
  EXPECT_THROW(parse_mode("swim"), std::invalid_argument);
}

TEST(TorsoOrientation, ZeroJoints) {
  const HumanoidModel m = HumanoidModel::reduced_default();
  const TorsoOrientation t = torso_orientation(m, JointVector{std::vector<double>(m.joint_count(), 0.0)});
  EXPECT_EQ(t.roll, 0.0);
  EXPECT_EQ(t.pitch, 0.0);
  EXPECT_EQ(t.yaw, 0.0);
}

TEST(TorsoOrientation, SinglePitchJoint) {
  const HumanoidModel m = planar_chain(1.0, 1.0, 1.0);
  EXPECT_NEAR(torso_orientation(m, JointVector{{0.3, 0.0}}).pitch, 0.3, 1e-15);
}

TEST(TorsoOrientation, StackedPitchJointsAdd) {
  const HumanoidModel m = planar_chain(1.0, 1.0, 1.0);
  EXPECT_NEAR(torso_orientation(m, JointVector{{0.2, 0.1}}).pitch, 0.3, 1e-15);
}

TEST(TorsoOrientation, WaistYaw) {
  const HumanoidModel m = HumanoidModel::reduced_default();
  const TorsoOrientation t = torso_orientation(m, JointVector{{0.0, 0.0, 0.0, 0.0, 0.1}});
  EXPECT_NEAR(t.yaw, 0.1, 1e-15);
  EXPECT_NEAR(t.pitch, 0.0, 1e-15);
}

TEST(ForwardKinematics, RejectsOutOfRangeJoints) {
  const HumanoidModel m = HumanoidModel::reduced_default();
  EXPECT_THROW(m.forward_kinematics(JointVector{{0.0, 0.0}}), std::invalid_argument);
  EXPECT_THROW(m.forward_kinematics(JointVector{{5.0, 0.0, 0.0, 0.0, 0.0}}), std::invalid_argument);
}

TEST(CenterOfGravity, ThreeLinkHandComputation) {
  // masses 1, 2, 3; joints 0.3 and -0.5 about y.
  // a: com at R(0.3) (0,0,0.2)           = (0.2 sin .3, 0, 0.2 cos .3)
  // b: origin at R(0.3) (0,0,0.4), com at R(-0.2) (0,0,0.1) further on
  const double s1 = std::sin(0.3), c1 = std::cos(0.3);
  const double s2 = std::sin(-0.2), c2 = std::cos(-0.2);
  const double ax = 0.2 * s1, az = 0.2 * c1;
  const double bx = 0.4 * s1 + 0.1 * s2, bz = 0.4 * c1 + 0.1 * c2;
  const Eigen::Vector3d expected((2 * ax + 3 * bx) / 6.0, 0.0, (2 * az + 3 * bz) / 6.0);

  const HumanoidModel m = planar_chain(1.0, 2.0, 3.0);
  const Eigen::Vector3d cog = center_of_gravity(m, JointVector{{0.3, -0.5}});
  EXPECT_LE((cog - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((cog_projection(m, JointVector{{0.3, -0.5}}) - expected.head<2>()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CenterOfGravity, AllMassInOneLink) {
  const HumanoidModel m = planar_chain(0.0, 0.0, 2.5);
  const JointVector q{{0.4, 0.2}};
  const auto poses = m.forward_kinematics(q);
  const Eigen::Vector3d expected = poses[2].position + poses[2].rotation * Eigen::Vector3d(0, 0, 0.1);
  EXPECT_LE((center_of_gravity(m, q) - expected).norm(), 1e-15);
}

TEST(CenterOfGravity, ZeroMassLinkHasNoEffect) {
  HumanoidModel base = planar_chain(1.0, 2.0, 3.0);
  std::vector<Link> links = base.links();
  links.push_back(link("ghost", 2, Eigen::Vector3d::UnitX(), {0.5, 0.5, 0.5}, 0.0, {1.0, 1.0, 1.0}));
  const HumanoidModel extended(links, FootGeometry{}, 2);
  const Eigen::Vector3d a = center_of_gravity(base, JointVector{{0.3, 0.1}});
  const Eigen::Vector3d b = center_of_gravity(extended, JointVector{{0.3, 0.1, 1.0}});
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CenterOfGravity, SymmetricUprightOnCenterline) {
  const HumanoidModel m = HumanoidModel::reduced_default();
  EXPECT_NEAR(cog_projection(m, JointVector{{0.1, -0.3, 0.4, 0.0, 0.0}}).y(), 0.0, 1e-15);
}

TEST(SupportPolygon, FootRectangle) {
  const HumanoidModel m = HumanoidModel::reduced_default();
  const SupportPolygon p = support_polygon(m, JointVector{std::vector<double>(5, 0.0)}, LocomotionMode::Legged);
  ASSERT_EQ(p.kind, SupportPolygon::Kind::Rectangle);
  ASSERT_EQ(p.vertices.size(), 4u);
  double xmin = 1, xmax = -1, ymin = 1, ymax = -1;
  for (const auto& v : p.vertices) {
    xmin = std::min(xmin, v.x());
    xmax = std::max(xmax, v.x());
    ymin = std::min(ymin, v.y());
    ymax = std::max(ymax, v.y());
  }
  EXPECT_NEAR(xmin, -0.05, 1e-15);
  EXPECT_NEAR(xmax, 0.05, 1e-15);
  EXPECT_NEAR(ymin, -0.085, 1e-15);
  EXPECT_NEAR(ymax, 0.085, 1e-15);
  // counter-clockwise
  double area2 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& a = p.vertices[i];
    const auto& b = p.vertices[(i + 1) % 4];
    area2 += a.x() * b.y() - b.x() * a.y();
  }
  EXPECT_GT(area2, 0.0);
}

TEST(SupportPolygon, WheelSegment) {
  const HumanoidModel m = HumanoidModel::reduced_default();
  const SupportPolygon p = support_polygon(m, JointVector{std::vector<double>(5, 0.0)}, LocomotionMode::Wheeled);
  ASSERT_EQ(p.kind, SupportPolygon::Kind::Segment);
  EXPECT_EQ(p.vertices[0], Eigen::Vector2d(-0.04, -0.06));
  EXPECT_EQ(p.vertices[1], Eigen::Vector2d(-0.04, 0.06));
}

TEST(Contains, Examples) {
  const HumanoidModel m = HumanoidModel::reduced_default();
  const JointVector q{std::vector<double>(5, 0.0)};
  const SupportPolygon rect = support_polygon(m, q, LocomotionMode::Legged);
  const SupportPolygon seg = support_polygon(m, q, LocomotionMode::Wheeled);
  EXPECT_TRUE(contains(rect, {0.0, 0.0}, 0.005));
  EXPECT_FALSE(contains(rect, {1.05, 0.0}, 0.005));
  EXPECT_NEAR(distance_to_polygon(rect, {1.05, 0.0}), 1.0, 1e-12);
  EXPECT_TRUE(contains(seg, {-0.04, 0.0}, 0.005));
  EXPECT_FALSE(contains(seg, {0.0, 0.0}, 0.005));
}

TEST(Contains, BoundaryInclusive) {
  const HumanoidModel m = HumanoidModel::reduced_default();
  const SupportPolygon rect = support_polygon(m, JointVector{std::vector<double>(5, 0.0)}, LocomotionMode::Legged);
  for (const auto& v : rect.vertices) EXPECT_TRUE(contains(rect, v, 0.0));
  EXPECT_TRUE(contains(rect, {0.05, 0.0}, 0.0));
  EXPECT_TRUE(contains(rect, {0.055, 0.0}, 0.005));
  EXPECT_FALSE(contains(rect, {0.0551, 0.0}, 0.005));
}

TEST(ClutchAngle, UprightEqualsTorsoPitch) {
  const HumanoidModel m = HumanoidModel::reduced_default();
  const JointVector q{{0.1, -0.2, 0.3, 0.0, 0.0}};
  const auto theta = desired_clutch_angle(m, q, LocomotionMode::Legged, 0.0);
  ASSERT_TRUE(theta.has_value());
  EXPECT_NEAR(*theta, torso_orientation(m, q).pitch, 1e-15);
  const auto shifted = desired_clutch_angle(m, q, LocomotionMode::Legged, 0.05);
  EXPECT_NEAR(*shifted, *theta - 0.05, 1e-15);
}

TEST(ClutchAngle, CogFarBehindHeelsIsInvalid) {
  std::vector<Link> links{
      link("foot", -1, Eigen::Vector3d::UnitY(), Eigen::Vector3d::Zero(), 0.1, Eigen::Vector3d::Zero()),
      link("tail", 0, Eigen::Vector3d::UnitY(), Eigen::Vector3d::Zero(), 5.0, {-1.0, 0.0, 0.0}),
  };
  const HumanoidModel m(links, FootGeometry{}, 1);
  EXPECT_FALSE(desired_clutch_angle(m, JointVector{{0.0}}, LocomotionMode::Legged, 0.0).has_value());
  EXPECT_FALSE(desired_clutch_angle(m, JointVector{{0.0}}, LocomotionMode::Wheeled, 0.0).has_value());
}
