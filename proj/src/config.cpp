#include "flying_humanoid/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace flying_humanoid {

namespace {

// Field accessors that report the dotted path of whatever fails to parse.
class Reader {
 public:
  Reader(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {}

  bool has(const std::string& key) const { return node_.IsMap() && node_[key]; }

  Reader child(const std::string& key) const {
    if (!node_.IsMap() || !node_[key]) throw ConfigError("missing field '" + join(key) + "'");
    return Reader(node_[key], join(key));
  }

  double number(const std::string& key) const {
    const double v = as<double>(child(key));
    if (!std::isfinite(v)) throw ConfigError("field '" + join(key) + "' must be finite");
    return v;
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::string text(const std::string& key) const { return as<std::string>(child(key)); }

  std::vector<double> numbers(const std::string& key) const { return child(key).as_numbers(); }

  Eigen::Vector3d vec3(const std::string& key) const {
    const std::vector<double> v = numbers(key);
    if (v.size() != 3) throw ConfigError("field '" + join(key) + "' must have 3 entries");
    return {v[0], v[1], v[2]};
  }
  Eigen::Vector3d vec3(const std::string& key, const Eigen::Vector3d& fallback) const {
    return has(key) ? vec3(key) : fallback;
  }

  std::vector<double> as_numbers() const {
    if (!node_.IsSequence()) throw ConfigError("field '" + path_ + "' must be a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < node_.size(); ++i) {
      const double v = as<double>(Reader(node_[i], path_ + "[" + std::to_string(i) + "]"));
      if (!std::isfinite(v)) throw ConfigError("field '" + path_ + "' must be finite");
      out.push_back(v);
    }
    return out;
  }

  const YAML::Node& node() const { return node_; }
  const std::string& path() const { return path_; }

 private:
  template <typename T>
  static T as(const Reader& r) {
    try {
      return r.node_.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError("field '" + r.path_ + "' has the wrong type");
    }
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  YAML::Node node_;
  std::string path_;
};

YAML::Node parse_yaml(const std::string& text) {
  try {
    YAML::Node root = YAML::Load(text);
    if (!root.IsMap()) throw ConfigError("top level must be a table");
    return root;
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <typename Fn>
void checked(const std::string& section, Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(section + ": " + e.what());
  }
}

TrirotorGeometry read_geometry(const Reader& r) {
  TrirotorGeometry g;
  g.l = r.number("l", g.l);
  g.h = r.number("h", g.h);
  g.d_f = r.number("d_f", g.d_f);
  g.d_r = r.number("d_r", g.d_r);
  g.mass = r.number("mass", g.mass);
  const std::vector<double> inertia = r.has("inertia") ? r.numbers("inertia") : std::vector<double>{};
  if (inertia.empty()) {
    // keep the default
  } else if (inertia.size() == 3) {
    g.inertia = Eigen::Vector3d(inertia[0], inertia[1], inertia[2]).asDiagonal();
  } else if (inertia.size() == 9) {
    g.inertia = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(inertia.data());
  } else {
    throw ConfigError("field 'geometry.inertia' must have 3 (diagonal) or 9 (row-major) entries");
  }
  g.lambda_min = r.number("lambda_min", g.lambda_min);
  g.lambda_max = r.number("lambda_max", g.lambda_max);
  g.alpha_min = r.number("alpha_min", g.alpha_min);
  g.alpha_max = r.number("alpha_max", g.alpha_max);
  checked("geometry", [&] { g.validate(); });
  return g;
}

GainSet read_gains(const Reader& r) {
  GainSet g;
  if (r.has("attitude")) {
    const Reader a = r.child("attitude");
    g.attitude_p = a.vec3("p", g.attitude_p);
    g.attitude_i = a.vec3("i", g.attitude_i);
    g.attitude_d = a.vec3("d", g.attitude_d);
  }
  if (r.has("position")) {
    const Reader p = r.child("position");
    g.position_p = p.vec3("p", g.position_p);
    g.position_i = p.vec3("i", g.position_i);
    g.position_d = p.vec3("d", g.position_d);
  }
  if (r.has("wheel_z")) {
    const Reader w = r.child("wheel_z");
    g.wheel_z_p = w.number("p", g.wheel_z_p);
    g.wheel_z_i = w.number("i", g.wheel_z_i);
    g.wheel_z_d = w.number("d", g.wheel_z_d);
  }
  g.force_feedback_gain = r.number("force_feedback", g.force_feedback_gain);
  checked("gains", [&] { g.validate(); });
  return g;
}

ModeParams read_modes(const Reader& r) {
  ModeParams m;
  m.alpha_stable = r.number("alpha_stable_g", m.alpha_stable / kGravity) * kGravity;
  m.beta_stable = r.number("beta_stable_g", m.beta_stable / kGravity) * kGravity;
  m.f_thresh = r.number("f_thresh", m.f_thresh);
  m.dt = r.number("control_period", m.dt);
  m.integral_limit = r.number("integral_limit", m.integral_limit);
  m.leg_z_offset = r.number("leg_z_offset", m.leg_z_offset);
  checked("modes", [&] { m.validate(); });
  return m;
}

SimConfig read_sim(const Reader& r, double control_period) {
  SimConfig s;
  s.control_period = control_period;
  s.dt = r.number("dt", s.dt);
  s.duration = r.number("duration", s.duration);
  s.contact_stiffness = r.number("contact_stiffness", s.contact_stiffness);
  s.contact_damping = r.number("contact_damping", s.contact_damping);
  s.lateral_friction = r.number("lateral_friction", s.lateral_friction);
  s.friction_velocity = r.number("friction_velocity", s.friction_velocity);
  s.divergence_bound = r.number("divergence_bound", s.divergence_bound);
  s.cog_offset = r.vec3("cog_offset", s.cog_offset);
  if (r.has("seed")) {
    const double seed = r.number("seed");
    if (seed < 0 || seed != std::floor(seed)) throw ConfigError("field 'sim.seed' must be a non-negative integer");
    s.seed = static_cast<std::uint64_t>(seed);
  }
  if (r.has("noise")) {
    const Reader n = r.child("noise");
    s.noise.position = n.number("position", 0.0);
    s.noise.attitude = n.number("attitude", 0.0);
    s.noise.angular_velocity = n.number("angular_velocity", 0.0);
    s.noise.contact_force = n.number("contact_force", 0.0);
  }
  checked("sim", [&] { s.validate(); });
  return s;
}

FeasibilityConfig read_feasibility(const Reader& r) {
  FeasibilityConfig f = FeasibilityConfig::defaults();
  const double half_span = r.number("theta_half_span", std::numbers::pi / 3.0);
  const double step = r.number("theta_step", 0.01);
  checked("feasibility", [&] { f.theta_grid = FeasibilityConfig::symmetric_grid(half_span, step); });
  f.tau_grid_resolution = r.number("tau_resolution", f.tau_grid_resolution);
  f.lambda_grid_points = static_cast<int>(r.number("oracle_lambda_points", f.lambda_grid_points));
  f.alpha_grid_points = static_cast<int>(r.number("oracle_alpha_points", f.alpha_grid_points));
  checked("feasibility", [&] { f.validate(); });
  return f;
}

HumanoidModel read_humanoid(const Reader& r) {
  const Reader links_node = r.child("links");
  if (!links_node.node().IsSequence()) throw ConfigError("field 'humanoid.links' must be a list");
  std::vector<Link> links;
  for (std::size_t i = 0; i < links_node.node().size(); ++i) {
    const Reader l(links_node.node()[i], "humanoid.links[" + std::to_string(i) + "]");
    Link link;
    link.name = l.text("name");
    if (l.has("parent")) {
      const std::string parent = l.text("parent");
      auto it = std::find_if(links.begin(), links.end(), [&](const Link& p) { return p.name == parent; });
      if (it == links.end()) throw ConfigError("field '" + l.path() + ".parent' names unknown link '" + parent + "'");
      link.parent = static_cast<int>(it - links.begin());
      link.axis = l.vec3("axis");
      const std::vector<double> limits = l.numbers("limits");
      if (limits.size() != 2) throw ConfigError("field '" + l.path() + ".limits' must have 2 entries");
      link.lower = limits[0];
      link.upper = limits[1];
    } else {
      link.axis = Eigen::Vector3d::Zero();
      link.lower = link.upper = 0.0;
    }
    link.origin = l.vec3("origin", Eigen::Vector3d::Zero());
    link.mass = l.number("mass");
    link.com = l.vec3("com", Eigen::Vector3d::Zero());
    links.push_back(std::move(link));
  }

  FootGeometry foot;
  if (r.has("foot")) {
    const Reader f = r.child("foot");
    foot.plate_length = f.number("plate_length", foot.plate_length);
    foot.plate_width = f.number("plate_width", foot.plate_width);
    foot.plate_center_x = f.number("plate_center_x", foot.plate_center_x);
    foot.lateral_offset = f.number("lateral_offset", foot.lateral_offset);
    foot.wheel_contact_x = f.number("wheel_contact_x", foot.wheel_contact_x);
    foot.wheel_radius = f.number("wheel_radius", foot.wheel_radius);
    foot.heel_plane_offset = f.number("heel_plane_offset", foot.heel_plane_offset);
  }
  const std::string torso = r.text("torso");
  const auto it = std::find_if(links.begin(), links.end(), [&](const Link& l) { return l.name == torso; });
  if (it == links.end()) throw ConfigError("field 'humanoid.torso' names unknown link '" + torso + "'");
  const int torso_index = static_cast<int>(it - links.begin());

  HumanoidModel model;
  checked("humanoid", [&] { model = HumanoidModel(std::move(links), foot, torso_index); });
  return model;
}

JointVector read_pose(const Reader& parent, const std::string& key, const ProjectConfig& cfg) {
  const Reader r = parent.child(key);
  if (r.node().IsScalar()) {
    try {
      return cfg.pose(r.node().as<std::string>());
    } catch (const std::out_of_range&) {
      throw ConfigError("field '" + r.path() + "' names unknown pose '" + r.node().as<std::string>() + "'");
    }
  }
  JointVector q{r.as_numbers()};
  checked(r.path(), [&] { cfg.humanoid.check_joints(q); });
  return q;
}

}  // namespace

JointVector ProjectConfig::pose(const std::string& name) const {
  const auto it = poses.find(name);
  if (it == poses.end()) throw std::out_of_range("unknown pose '" + name + "'");
  return it->second;
}

ProjectConfig parse_config(const std::string& text) {
  const Reader root(parse_yaml(text), "");
  ProjectConfig cfg;
  cfg.geometry = read_geometry(root.child("geometry"));
  if (root.has("gains")) cfg.gains = read_gains(root.child("gains"));
  if (root.has("modes")) cfg.modes = read_modes(root.child("modes"));
  cfg.sim = root.has("sim") ? read_sim(root.child("sim"), cfg.modes.dt) : SimConfig{};
  cfg.sim.control_period = cfg.modes.dt;
  if (root.has("feasibility")) cfg.feasibility = read_feasibility(root.child("feasibility"));
  if (root.has("humanoid")) {
    const Reader h = root.child("humanoid");
    cfg.humanoid = read_humanoid(h);
    if (h.has("poses")) {
      const Reader poses = h.child("poses");
      for (const auto& kv : poses.node()) {
        const std::string name = kv.first.as<std::string>();
        JointVector q{Reader(kv.second, poses.path() + "." + name).as_numbers()};
        checked(poses.path() + "." + name, [&] { cfg.humanoid.check_joints(q); });
        cfg.poses.emplace(name, std::move(q));
      }
    }
    if (h.has("clutch_presets_deg")) {
      const Reader presets = h.child("clutch_presets_deg");
      for (const auto& kv : presets.node()) {
        const std::string mode = kv.first.as<std::string>();
        checked(presets.path(), [&] { parse_mode(mode); });
        cfg.clutch_presets_deg[mode] = presets.number(mode);
      }
    }
    cfg.theta_flight_unit = h.number("theta_flight_unit", 0.0);
  }
  return cfg;
}

ProjectConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

std::vector<GaitSample> load_gait_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open gait file '" + path.string() + "'");
  std::vector<GaitSample> gait;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line_no == 1) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw ConfigError("gait file '" + path.string() + "' line " + std::to_string(line_no) + ": bad number '" +
                          cell + "'");
      }
    }
    if (values.size() < 3) {
      throw ConfigError("gait file '" + path.string() + "' line " + std::to_string(line_no) + ": too few columns");
    }
    gait.push_back({values[0], values[1] != 0.0, JointVector{{values.begin() + 2, values.end()}}});
  }
  return gait;
}

Scenario parse_scenario(const std::string& text, const ProjectConfig& cfg, const std::filesystem::path& base_dir) {
  const Reader root(parse_yaml(text), "");
  Scenario s;
  s.name = root.has("name") ? root.text("name") : "scenario";
  s.duration = root.number("duration", cfg.sim.duration);
  checked("mode", [&] { s.initial_mode = parse_mode(root.text("mode")); });
  s.stance = read_pose(root, "stance", cfg);
  s.cog_height = root.number("cog_height", s.cog_height);

  const Reader init = root.child("initial");
  s.initial.position = init.vec3("position");
  s.initial.velocity = init.vec3("velocity", Eigen::Vector3d::Zero());
  s.initial.rotation = rotation_from_euler(init.vec3("euler", Eigen::Vector3d::Zero()));
  s.initial.angular_velocity = init.vec3("angular_velocity", Eigen::Vector3d::Zero());

  if (root.has("target")) {
    const Reader target = root.child("target");
    if (target.has("position")) s.position_target = target.vec3("position");
    s.attitude_target = target.vec3("euler", Eigen::Vector3d::Zero());
  }
  if (root.has("events")) {
    const Reader events = root.child("events");
    for (std::size_t i = 0; i < events.node().size(); ++i) {
      const Reader e(events.node()[i], "events[" + std::to_string(i) + "]");
      ModeEvent ev;
      ev.time = e.number("time");
      checked(e.path() + ".mode", [&] { ev.mode = parse_mode(e.text("mode")); });
      if (e.has("position")) ev.position_target = e.vec3("position");
      if (e.has("euler")) ev.attitude_target = e.vec3("euler");
      s.events.push_back(ev);
    }
  }
  if (root.has("waypoints")) {
    const Reader wps = root.child("waypoints");
    for (std::size_t i = 0; i < wps.node().size(); ++i) {
      const Reader w(wps.node()[i], "waypoints[" + std::to_string(i) + "]");
      Waypoint wp;
      wp.time = w.number("time");
      wp.position = w.vec3("position");
      if (w.has("yaw")) wp.yaw = w.number("yaw");
      s.waypoints.push_back(wp);
    }
  }
  if (root.has("gait")) {
    std::filesystem::path gait = root.text("gait");
    if (gait.is_relative()) gait = base_dir / gait;
    s.gait = load_gait_csv(gait);
  }
  checked("scenario", [&] { s.validate(cfg.humanoid); });
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, const ProjectConfig& cfg) {
  return parse_scenario(read_file(path), cfg, path.parent_path());
}

}  // namespace flying_humanoid
