#include "flying_humanoid/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <stdexcept>

namespace flying_humanoid {

namespace {

// Below this thrust a rotor's vectoring angle is irrelevant.
constexpr double kIdleMagnitude = 1e-9;

bool lambda_within_limits(const TrirotorGeometry& geom, const ThrustVector& lambda) {
  const RotorCommands cmds = rotor_commands_from_lambda(lambda);
  for (const RotorCommand& c : cmds) {
    if (c.magnitude < geom.lambda_min || c.magnitude > geom.lambda_max) return false;
    if (c.magnitude <= kIdleMagnitude) continue;
    if (c.vectoring_angle < geom.alpha_min || c.vectoring_angle > geom.alpha_max) return false;
  }
  return true;
}

double refine_boundary(const TrirotorGeometry& geom, const WrenchAllocator& allocator, double mass, double theta,
                       double feasible_tau, double infeasible_tau) {
  for (int i = 0; i < 80 && std::abs(infeasible_tau - feasible_tau) > 1e-12; ++i) {
    const double mid = 0.5 * (feasible_tau + infeasible_tau);
    if (is_wrench_feasible(geom, allocator, hover_wrench_at_pitch(mass, theta, mid))) {
      feasible_tau = mid;
    } else {
      infeasible_tau = mid;
    }
  }
  return feasible_tau;
}

}  // namespace

std::vector<double> FeasibilityConfig::symmetric_grid(double half_span, double step) {
  if (!(step > 0.0) || !(half_span >= 0.0)) throw std::invalid_argument("grid step must be > 0");
  const long n = static_cast<long>(std::ceil(half_span / step - 1e-9));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(2 * n + 1));
  for (long k = -n; k <= n; ++k) grid.push_back(static_cast<double>(k) * step);
  return grid;
}

FeasibilityConfig FeasibilityConfig::defaults() {
  FeasibilityConfig cfg;
  cfg.theta_grid = symmetric_grid(std::numbers::pi / 3.0, 0.01);
  return cfg;
}

void FeasibilityConfig::validate() const {
  if (theta_grid.empty()) throw std::invalid_argument("feasibility: theta grid is empty");
  if (!std::is_sorted(theta_grid.begin(), theta_grid.end()) ||
      std::adjacent_find(theta_grid.begin(), theta_grid.end()) != theta_grid.end()) {
    throw std::invalid_argument("feasibility: theta grid must be strictly ascending");
  }
  if (!(tau_grid_resolution > 0.0)) throw std::invalid_argument("feasibility: tau_grid_resolution must be > 0");
  if (lambda_grid_points < 2 || alpha_grid_points < 2) {
    throw std::invalid_argument("feasibility: oracle grids need at least 2 points per axis");
  }
}

Wrench hover_wrench_at_pitch(double mass, double theta, double tau_y) {
  const double weight = mass * kGravity;
  return Wrench{{-weight * std::sin(theta), 0.0, weight * std::cos(theta)}, {0.0, tau_y, 0.0}};
}

bool is_wrench_feasible(const TrirotorGeometry& geom, const WrenchAllocator& allocator, const Wrench& w) {
  return lambda_within_limits(geom, allocator.allocate(w));
}

bool is_wrench_feasible(const TrirotorGeometry& geom, const Wrench& w) {
  return is_wrench_feasible(geom, WrenchAllocator(geom), w);
}

TorqueRange feasible_torque_range(const TrirotorGeometry& geom, double mass, double theta,
                                  const FeasibilityConfig& cfg) {
  const WrenchAllocator allocator(geom);
  TorqueRange out{theta, 0.0, 0.0, false};
  auto feasible_at = [&](double tau) {
    return is_wrench_feasible(geom, allocator, hover_wrench_at_pitch(mass, theta, tau));
  };
  if (!feasible_at(0.0)) return out;

  // No admissible input yields more pitch torque than every rotor at full
  // thrust aligned with its own torque arm.
  const double step = cfg.tau_grid_resolution;
  const double bound = geom.lambda_max * (2.0 * std::hypot(geom.d_f, geom.h) + geom.d_r);
  const long n = static_cast<long>(std::ceil(bound / step)) + 1;

  long k_min = 0;
  long k_max = 0;
  for (long k = -n; k <= n; ++k) {
    if (k == 0 || !feasible_at(static_cast<double>(k) * step)) continue;
    k_min = std::min(k_min, k);
    k_max = std::max(k_max, k);
  }

  const double lo = static_cast<double>(k_min) * step;
  const double hi = static_cast<double>(k_max) * step;
  out.tau_min = refine_boundary(geom, allocator, mass, theta, lo, lo - step);
  out.tau_max = refine_boundary(geom, allocator, mass, theta, hi, hi + step);
  out.feasible = true;
  return out;
}

PitchOptimum optimize_pitch_angle(const TrirotorGeometry& geom, double mass, const FeasibilityConfig& cfg) {
  cfg.validate();
  PitchOptimum result;
  result.curve.reserve(cfg.theta_grid.size());
  for (double theta : cfg.theta_grid) result.curve.push_back(feasible_torque_range(geom, mass, theta, cfg));

  const TorqueRange* best = nullptr;
  for (const TorqueRange& r : result.curve) {
    if (!r.feasible) continue;
    if (best == nullptr) {
      best = &r;
      continue;
    }
    const double diff = r.span() - best->span();
    if (diff > kSpanTieTolerance) {
      best = &r;
    } else if (std::abs(diff) <= kSpanTieTolerance) {
      const double a = std::abs(r.theta);
      const double b = std::abs(best->theta);
      if (a < b || (a == b && r.theta < best->theta)) best = &r;
    }
  }
  if (best == nullptr) throw InfeasibleError("no pitch angle in the grid admits a feasible hover wrench");
  result.theta_star = best->theta;
  return result;
}

void write_curve_csv(std::ostream& out, const std::vector<TorqueRange>& curve) {
  out << "theta,tau_min,tau_max,feasible\n";
  out << std::setprecision(10);
  for (const TorqueRange& r : curve) {
    out << r.theta << ',' << r.tau_min << ',' << r.tau_max << ',' << (r.feasible ? 1 : 0) << '\n';
  }
}

std::optional<double> desired_clutch_angle(const HumanoidModel& model, const JointVector& q, LocomotionMode mode,
                                           double theta_flight_unit, double tolerance) {
  const SupportPolygon poly = support_polygon(model, q, mode);
  if (!contains(poly, cog_projection(model, q), tolerance)) return std::nullopt;
  return torso_orientation(model, q).pitch - theta_flight_unit;
}

}  // namespace flying_humanoid
