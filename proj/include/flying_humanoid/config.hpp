#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "flying_humanoid/control.hpp"
#include "flying_humanoid/feasibility.hpp"
#include "flying_humanoid/kinematics.hpp"
#include "flying_humanoid/model.hpp"
#include "flying_humanoid/sim.hpp"

namespace flying_humanoid {

/// Malformed or invalid input file. The message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProjectConfig {
  TrirotorGeometry geometry;
  GainSet gains;
  ModeParams modes;
  SimConfig sim;
  FeasibilityConfig feasibility = FeasibilityConfig::defaults();
  HumanoidModel humanoid = HumanoidModel::reduced_default();
  std::map<std::string, JointVector> poses;
  std::map<std::string, double> clutch_presets_deg;  // keyed by mode name
  double theta_flight_unit = 0.0;

  JointVector pose(const std::string& name) const;
};

ProjectConfig parse_config(const std::string& text);
ProjectConfig load_config(const std::filesystem::path& path);

/// Gait files are CSV: time,footstep,q1..qn with a header row.
std::vector<GaitSample> load_gait_csv(const std::filesystem::path& path);

/// Relative gait paths resolve against the scenario file's directory.
Scenario parse_scenario(const std::string& text, const ProjectConfig& cfg,
                        const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path, const ProjectConfig& cfg);

}  // namespace flying_humanoid
