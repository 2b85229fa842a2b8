#pragma once

#include <array>
#include <stdexcept>

#include <Eigen/LU>

#include "flying_humanoid/model.hpp"

namespace flying_humanoid {

class AllocationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Cached factorization of the allocation matrix for one geometry.
 *
 * The matrix is square and invertible for every valid geometry, so the
 * inverse map is a plain linear solve. Construction factorizes once;
 * allocate() is a back-substitution. Immutable after construction.
 */
class WrenchAllocator {
 public:
  explicit WrenchAllocator(const TrirotorGeometry& geom);

  /// Thrust vector producing `desired` exactly. Does not clamp.
  ThrustVector allocate(const Wrench& desired) const;
  Wrench compose(const ThrustVector& lambda) const;

  const Matrix6d& matrix() const { return q_; }

 private:
  Matrix6d q_;
  Eigen::PartialPivLU<Matrix6d> lu_;
};

ThrustVector allocate_wrench(const TrirotorGeometry& geom, const Wrench& desired);
Wrench compose_wrench(const TrirotorGeometry& geom, const ThrustVector& lambda);

/// Per-rotor magnitude and vectoring angle. The angle uses atan2 so that
/// negative perpendicular components (|alpha| > pi/2) are representable.
RotorCommands rotor_commands_from_lambda(const ThrustVector& lambda);
ThrustVector lambda_from_rotor_commands(const RotorCommands& cmds);

struct SaturationFlags {
  std::array<bool, 3> magnitude{};
  std::array<bool, 3> angle{};

  bool any() const;
  int count() const;
};

struct ClampedCommands {
  RotorCommands commands{};
  SaturationFlags saturation{};
};

ClampedCommands clamp_commands(const TrirotorGeometry& geom, const RotorCommands& cmds);

}  // namespace flying_humanoid
