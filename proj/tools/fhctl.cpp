// Command-line front end: allocation, pitch optimization, clutch angle
// selection and closed-loop scenario simulation.
//
// Exit codes: 0 ok, 1 input error, 2 infeasible / invalid pose, 3 divergence.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flying_humanoid/allocation.hpp"
#include "flying_humanoid/config.hpp"
#include "flying_humanoid/feasibility.hpp"
#include "flying_humanoid/kinematics.hpp"
#include "flying_humanoid/sim.hpp"

namespace fh = flying_humanoid;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitDiverged = 3;

double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

int cmd_allocate(const std::string& config_path, const std::vector<double>& values) {
  const fh::ProjectConfig cfg = fh::load_config(config_path);
  if (values.size() != 6) throw fh::ConfigError("wrench needs 6 values (fx fy fz tx ty tz)");
  fh::Vector6d w6;
  for (int i = 0; i < 6; ++i) {
    if (!std::isfinite(values[static_cast<std::size_t>(i)])) throw fh::ConfigError("wrench values must be finite");
    w6(i) = values[static_cast<std::size_t>(i)];
  }
  const fh::Wrench w = fh::Wrench::from_stacked(w6);
  const fh::ThrustVector lambda = fh::allocate_wrench(cfg.geometry, w);
  const fh::RotorCommands cmds = fh::rotor_commands_from_lambda(lambda);
  const bool feasible = fh::is_wrench_feasible(cfg.geometry, w);
  for (int i = 0; i < 3; ++i) {
    std::printf("rotor %d: thrust %.4f N, angle %.4f rad\n", i + 1, cmds[static_cast<std::size_t>(i)].magnitude,
                cmds[static_cast<std::size_t>(i)].vectoring_angle);
  }
  std::printf("feasible: %s\n", feasible ? "yes" : "no");
  return feasible ? kExitOk : kExitInfeasible;
}

int cmd_optimize_pitch(const std::string& config_path, const std::string& out_path) {
  const fh::ProjectConfig cfg = fh::load_config(config_path);
  fh::PitchOptimum opt;
  try {
    opt = fh::optimize_pitch_angle(cfg.geometry, cfg.geometry.mass, cfg.feasibility);
  } catch (const fh::InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw fh::ConfigError("cannot write '" + out_path + "'");
    fh::write_curve_csv(out, opt.curve);
  }
  const auto best = std::find_if(opt.curve.begin(), opt.curve.end(),
                                 [&](const fh::TorqueRange& r) { return r.theta == opt.theta_star; });
  std::printf("theta_star: %.2f rad\n", opt.theta_star);
  std::printf("torque range at theta_star: [%.4f, %.4f] N*m\n", best->tau_min, best->tau_max);
  return kExitOk;
}

int cmd_clutch(const std::string& config_path, const std::string& pose_name, const std::vector<double>& q_values,
               const std::string& mode_name, std::optional<double> theta_fu) {
  const fh::ProjectConfig cfg = fh::load_config(config_path);
  fh::LocomotionMode mode;
  try {
    mode = fh::parse_mode(mode_name);
  } catch (const std::invalid_argument& e) {
    throw fh::ConfigError(e.what());
  }
  fh::JointVector q;
  if (!q_values.empty()) {
    q.angles = q_values;
  } else {
    try {
      q = cfg.pose(pose_name);
    } catch (const std::out_of_range& e) {
      throw fh::ConfigError(e.what());
    }
  }
  try {
    cfg.humanoid.check_joints(q);
  } catch (const std::invalid_argument& e) {
    throw fh::ConfigError(e.what());
  }

  const double flight_unit = theta_fu.value_or(cfg.theta_flight_unit);
  const auto angle = fh::desired_clutch_angle(cfg.humanoid, q, mode, flight_unit);
  const Eigen::Vector2d cog = fh::cog_projection(cfg.humanoid, q);
  const fh::SupportPolygon poly = fh::support_polygon(cfg.humanoid, q, mode);
  if (const auto it = cfg.clutch_presets_deg.find(std::string(fh::to_string(mode)));
      it != cfg.clutch_presets_deg.end()) {
    std::printf("configured preset (%s): %.1f deg\n", it->first.c_str(), it->second);
  }
  if (angle) {
    std::printf("theta_clutch: %.3f deg\n", rad_to_deg(*angle));
    std::printf("theta_torso: %.3f deg, cog: (%.4f, %.4f) m\n", rad_to_deg(fh::torso_orientation(cfg.humanoid, q).pitch),
                cog.x(), cog.y());
    return kExitOk;
  }
  std::printf("invalid pose\n");
  std::printf("cog: (%.4f, %.4f) m\n", cog.x(), cog.y());
  std::printf("polygon (%s):", poly.kind == fh::SupportPolygon::Kind::Segment ? "segment" : "rectangle");
  for (const auto& v : poly.vertices) std::printf(" (%.4f, %.4f)", v.x(), v.y());
  std::printf("\ndistance: %.4f m\n", fh::distance_to_polygon(poly, cog));
  return kExitInfeasible;
}

void print_summary(const fh::TraceSummary& s) {
  std::printf("final position error: [%.5f, %.5f, %.5f] m (max %.5f)\n", s.final_position_error.x(),
              s.final_position_error.y(), s.final_position_error.z(), s.final_position_error.cwiseAbs().maxCoeff());
  std::printf("final attitude error: [%.5f, %.5f, %.5f] rad (max %.5f)\n", s.final_attitude_error.x(),
              s.final_attitude_error.y(), s.final_attitude_error.z(), s.final_attitude_error.cwiseAbs().maxCoeff());
  std::printf("max |a_z|: %.4f m/s^2\n", s.max_abs_az);
  std::printf("saturated ticks: %d\n", s.saturated_ticks);
  if (s.contact_force_error) std::printf("contact force error: %.2f %%\n", 100.0 * *s.contact_force_error);
}

// Wheeled rows before this time are excluded from the contact force error.
constexpr double kSettleTime = 5.0;

int cmd_simulate(const std::string& scenario_path, const std::string& config_path, const std::string& trace_path,
                 std::optional<std::uint64_t> seed, std::optional<double> duration) {
  fh::ProjectConfig cfg = fh::load_config(config_path);
  fh::Scenario scenario = fh::load_scenario(scenario_path, cfg);
  if (seed) cfg.sim.seed = *seed;
  if (duration) {
    if (!(*duration > 0.0)) throw fh::ConfigError("duration must be > 0");
    scenario.duration = *duration;
  }

  fh::Trace trace;
  try {
    trace = fh::run_scenario(scenario, cfg.geometry, cfg.humanoid, cfg.gains, cfg.modes, cfg.sim);
  } catch (const fh::SimulationDiverged& e) {
    std::fprintf(stderr, "diverged: %s (tick %ld)\n", e.what(), e.tick());
    return kExitDiverged;
  }
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw fh::ConfigError("cannot write '" + trace_path + "'");
    fh::write_trace_csv(out, trace);
  }
  std::printf("scenario: %s (%zu ticks)\n", scenario.name.c_str(), trace.rows.size());
  print_summary(fh::summarize(trace, cfg.modes.f_thresh, kSettleTime));
  return kExitOk;
}

int cmd_sweep(const std::string& scenario_path, const std::string& config_path, const std::vector<double>& offsets) {
  const fh::ProjectConfig cfg = fh::load_config(config_path);
  const fh::Scenario scenario = fh::load_scenario(scenario_path, cfg);
  std::vector<std::future<std::optional<fh::TraceSummary>>> runs;
  for (double offset : offsets) {
    runs.push_back(std::async(std::launch::async, [&, offset]() -> std::optional<fh::TraceSummary> {
      fh::SimConfig sim = cfg.sim;
      sim.cog_offset = Eigen::Vector3d(offset, 0.0, 0.0);
      try {
        return fh::summarize(fh::run_scenario(scenario, cfg.geometry, cfg.humanoid, cfg.gains, cfg.modes, sim),
                             cfg.modes.f_thresh, kSettleTime);
      } catch (const fh::SimulationDiverged&) {
        return std::nullopt;
      }
    }));
  }
  std::printf("cog_offset_x,final_pos_err,final_att_err,saturated_ticks\n");
  bool diverged = false;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto s = runs[i].get();
    if (!s) {
      std::printf("%.4f,diverged,diverged,-\n", offsets[i]);
      diverged = true;
      continue;
    }
    std::printf("%.4f,%.6f,%.6f,%d\n", offsets[i], s->final_position_error.cwiseAbs().maxCoeff(),
                s->final_attitude_error.cwiseAbs().maxCoeff(), s->saturated_ticks);
  }
  return diverged ? kExitDiverged : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flying humanoid trirotor toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string scenario_path;

  auto* allocate = app.add_subcommand("allocate", "allocate a CoG-frame wrench to rotor commands");
  std::vector<double> wrench;
  allocate->add_option("--config", config_path, "config file")->required();
  allocate->add_option("wrench", wrench, "fx fy fz tx ty tz")->required()->expected(6);

  auto* optimize = app.add_subcommand("optimize-pitch", "maximize the feasible pitch-torque range");
  optimize->add_option("--config", config_path, "config file")->required();
  optimize->add_option("--out", out_path, "curve CSV (theta, tau_min, tau_max)");

  auto* simulate = app.add_subcommand("simulate", "run a closed-loop scenario");
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  simulate->add_option("--scenario", scenario_path, "scenario file")->required();
  simulate->add_option("--config", config_path, "config file")->required();
  simulate->add_option("--out", out_path, "trace CSV");
  simulate->add_option("--seed", seed, "noise seed");
  simulate->add_option("--duration", duration, "override scenario duration (s)");

  auto* clutch = app.add_subcommand("clutch", "desired clutch angle for a humanoid pose");
  std::string pose_name = "flight";
  std::vector<double> q_values;
  std::string mode_name = "legged";
  std::optional<double> theta_fu;
  clutch->add_option("--config", config_path, "config file")->required();
  clutch->add_option("--pose", pose_name, "named pose from the config");
  clutch->add_option("--q", q_values, "joint angles (rad)")->delimiter(',');
  clutch->add_option("--mode", mode_name, "aerial | legged | wheeled");
  clutch->add_option("--theta-flight-unit", theta_fu, "flight unit pitch (rad)");

  auto* sweep = app.add_subcommand("sweep", "rerun a scenario under CoG offset perturbations");
  std::vector<double> offsets{0.0, 0.005, 0.01, 0.02};
  sweep->add_option("--scenario", scenario_path, "scenario file")->required();
  sweep->add_option("--config", config_path, "config file")->required();
  sweep->add_option("--offsets", offsets, "CoG x offsets (m)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*allocate) return cmd_allocate(config_path, wrench);
    if (*optimize) return cmd_optimize_pitch(config_path, out_path);
    if (*simulate) return cmd_simulate(scenario_path, config_path, out_path, seed, duration);
    if (*clutch) return cmd_clutch(config_path, pose_name, q_values, mode_name, theta_fu);
    if (*sweep) return cmd_sweep(scenario_path, config_path, offsets);
  } catch (const fh::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitInput;
}
