#include "flying_humanoid/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flying_humanoid {

WrenchAllocator::WrenchAllocator(const TrirotorGeometry& geom)
    : q_(build_allocation_matrix(geom)), lu_(q_) {
  // PartialPivLU does not report rank; check the determinant directly.
  const double det = lu_.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-14) {
    throw AllocationError("allocation matrix is singular (det = " + std::to_string(det) + ")");
  }
}

ThrustVector WrenchAllocator::allocate(const Wrench& desired) const {
  ThrustVector out{lu_.solve(desired.stacked())};
  if (!out.components.allFinite()) throw AllocationError("allocation produced non-finite thrust vector");
  return out;
}

Wrench WrenchAllocator::compose(const ThrustVector& lambda) const {
  return Wrench::from_stacked(q_ * lambda.components);
}

ThrustVector allocate_wrench(const TrirotorGeometry& geom, const Wrench& desired) {
  return WrenchAllocator(geom).allocate(desired);
}

Wrench compose_wrench(const TrirotorGeometry& geom, const ThrustVector& lambda) {
  return Wrench::from_stacked(build_allocation_matrix(geom) * lambda.components);
}

RotorCommands rotor_commands_from_lambda(const ThrustVector& lambda) {
  RotorCommands out{};
  for (int i = 0; i < 3; ++i) {
    const double perp = lambda.perpendicular(i);
    const double par = lambda.parallel(i);
    out[i].magnitude = std::hypot(perp, par);
    out[i].vectoring_angle = (perp == 0.0 && par == 0.0) ? 0.0 : std::atan2(par, perp);
  }
  return out;
}

ThrustVector lambda_from_rotor_commands(const RotorCommands& cmds) {
  ThrustVector out;
  for (int i = 0; i < 3; ++i) {
    out.components(2 * i) = cmds[i].magnitude * std::cos(cmds[i].vectoring_angle);
    out.components(2 * i + 1) = cmds[i].magnitude * std::sin(cmds[i].vectoring_angle);
  }
  return out;
}

bool SaturationFlags::any() const { return count() > 0; }

int SaturationFlags::count() const {
  return static_cast<int>(std::count(magnitude.begin(), magnitude.end(), true) +
                          std::count(angle.begin(), angle.end(), true));
}

ClampedCommands clamp_commands(const TrirotorGeometry& geom, const RotorCommands& cmds) {
  ClampedCommands out;
  for (int i = 0; i < 3; ++i) {
    const RotorCommand& in = cmds[i];
    RotorCommand& c = out.commands[i];
    c.magnitude = std::clamp(in.magnitude, geom.lambda_min, geom.lambda_max);
    c.vectoring_angle = std::clamp(in.vectoring_angle, geom.alpha_min, geom.alpha_max);
    out.saturation.magnitude[i] = c.magnitude != in.magnitude;
    out.saturation.angle[i] = c.vectoring_angle != in.vectoring_angle;
  }
  return out;
}

}  // namespace flying_humanoid
