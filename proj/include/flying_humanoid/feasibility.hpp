#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "flying_humanoid/allocation.hpp"
#include "flying_humanoid/kinematics.hpp"
#include "flying_humanoid/model.hpp"

namespace flying_humanoid {

struct FeasibilityConfig {
  std::vector<double> theta_grid;  // ascending, rad
  double tau_grid_resolution = 0.01;  // N*m
  int lambda_grid_points = 4001;  // brute-force oracle only
  int alpha_grid_points = 25;   // brute-force oracle only

  /// Symmetric grid k*step for |k*step| covering [-half_span, half_span].
  static std::vector<double> symmetric_grid(double half_span, double step);
  static FeasibilityConfig defaults();
  void validate() const;
};

struct TorqueRange {
  double theta = 0.0;
  double tau_min = 0.0;
  double tau_max = 0.0;
  bool feasible = false;

  double span() const { return feasible ? tau_max - tau_min : 0.0; }
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hover wrench of a body pitched by theta, plus a pitch torque tau_y.
Wrench hover_wrench_at_pitch(double mass, double theta, double tau_y);

/// True iff Q^-1 w lies inside the per-rotor thrust and vectoring limits
/// (closed intervals). Rotors with ~zero thrust have no angle constraint.
bool is_wrench_feasible(const TrirotorGeometry& geom, const Wrench& w);
bool is_wrench_feasible(const TrirotorGeometry& geom, const WrenchAllocator& allocator, const Wrench& w);

/**
 * Feasible pitch-torque interval at body pitch theta.
 *
 * Scans tau_y on the symmetric grid k * tau_grid_resolution up to the
 * largest torque any admissible actuator input can produce, then bisects
 * between the outermost feasible sample and its infeasible neighbour.
 * Returns feasible = false when tau_y = 0 is infeasible.
 */
TorqueRange feasible_torque_range(const TrirotorGeometry& geom, double mass, double theta,
                                  const FeasibilityConfig& cfg);

struct PitchOptimum {
  double theta_star = 0.0;
  std::vector<TorqueRange> curve;
};

/// Spans closer than this are treated as ties.
inline constexpr double kSpanTieTolerance = 1e-9;

/// Maximizes tau_max - tau_min over cfg.theta_grid. Ties resolve to the
/// smallest |theta|, negative first. Throws InfeasibleError if no theta is
/// feasible.
PitchOptimum optimize_pitch_angle(const TrirotorGeometry& geom, double mass, const FeasibilityConfig& cfg);

void write_curve_csv(std::ostream& out, const std::vector<TorqueRange>& curve);

/// Clutch angle theta_torso(q) - theta_flight_unit, or empty when the CoG
/// projection leaves the mode's support polygon.
std::optional<double> desired_clutch_angle(const HumanoidModel& model, const JointVector& q, LocomotionMode mode,
                                           double theta_flight_unit,
                                           double tolerance = kDefaultContainmentTolerance);

}  // namespace flying_humanoid
