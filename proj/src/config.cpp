#include "nvrelax/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace nvrelax {

using nlohmann::json;

Eigen::VectorXd ScanRange::values() const {
  validate();
  Eigen::VectorXd out(count);
  if (count == 1) {
    out[0] = min;
    return out;
  }
  for (int i = 0; i < count; ++i) {
    const double frac = static_cast<double>(i) / (count - 1);
    out[i] = log_spaced ? min * std::pow(max / min, frac) : min + (max - min) * frac;
  }
  return out;
}

void ScanRange::validate() const {
  if (count < 1) throw std::invalid_argument("ScanRange: count must be >= 1");
  if (!(max >= min)) throw std::invalid_argument("ScanRange: max must be >= min");
  if (log_spaced && !(min > 0.0)) {
    throw std::invalid_argument("ScanRange: log spacing requires min > 0");
  }
}

void RunConfig::validate() const {
  constants.validate();
  depth.validate();
  surface.validate();
  label.validate();
  pillar_depth.validate();
  surface_scan.validate();
  c_surf_scan.validate();
  sa_scan.validate();
  ub_scan.validate();
  if (ensemble_n_nv < 1 || single_nv_n < 1) {
    throw std::invalid_argument("RunConfig: population sizes must be >= 1");
  }
  if (tau_points < 4) throw std::invalid_argument("RunConfig: tau_points must be >= 4");
  if (!(noise_sd >= 0.0)) throw std::invalid_argument("RunConfig: noise_sd must be >= 0");
  if (sa_occupied_sites < 0 || sa_occupied_sites > 4) {
    throw std::invalid_argument("RunConfig: sa_occupied_sites must lie in [0, 4]");
  }
}

BackgroundModel RunConfig::background_model() const {
  BackgroundModel model;
  model.depth = depth;
  model.surface = surface;
  model.constants = constants;
  return model;
}

SingleNvSimConfig RunConfig::single_nv_sim() const {
  SingleNvSimConfig sim;
  sim.depth = pillar_depth;
  sim.surface = surface;
  sim.surface.sigma_surf = pillar_sigma_surf;
  sim.constants = constants;
  sim.sigma_sa = sigma_sa;
  sim.region_side_nm = region_side_nm;
  sim.sa.cube_edge_nm = sa_cube_edge_nm;
  sim.sa.standoff_nm = sa_standoff_nm;
  sim.sa.labels_per_site = labels_per_site;
  if (sa_occupied_sites < 4) {
    sim.sa.occupancy.kind = OccupancyRule::Kind::fixed_count;
    sim.sa.occupancy.count = sa_occupied_sites;
  }
  sim.sa.label_spec = label;
  sim.n_nv = single_nv_n;
  sim.lateral_spacing_nm = lateral_spacing_nm;
  sim.gamma_bg_max = gamma_bg_max;
  sim.seed = seed;
  sim.workers = workers;
  return sim;
}

PlaneResponseConfig RunConfig::plane_response() const {
  PlaneResponseConfig plane;
  plane.background = background_model();
  plane.plane_height_nm = plane_height_nm;
  plane.labels_per_point = labels_per_site;
  plane.label_spec = label;
  plane.region_side_nm = region_side_nm;
  plane.n_nv = ensemble_n_nv;
  plane.tau_points = tau_points;
  plane.t_max = t_max;
  plane.seed = seed;
  plane.workers = workers;
  return plane;
}

ProbabilityMapConfig RunConfig::map_config() const {
  ProbabilityMapConfig map;
  map.gamma_bg_edges.resize(map_gamma_bg_bins + 1);
  for (int i = 0; i <= map_gamma_bg_bins; ++i) {
    map.gamma_bg_edges[i] = map_gamma_bg_min + (map_gamma_bg_max - map_gamma_bg_min) *
                                                   static_cast<double>(i) / map_gamma_bg_bins;
  }
  map.delta_gamma_edges.resize(map_delta_bins + 1);
  for (int i = 0; i <= map_delta_bins; ++i) {
    map.delta_gamma_edges[i] =
        map_delta_max * static_cast<double>(i) / map_delta_bins;
  }
  map.dominance_threshold = dominance_threshold;
  map.contour_level = contour_level;
  return map;
}

namespace {

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& context) {
  if (!obj.is_object()) throw std::invalid_argument("config: " + context + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* name : allowed) {
      if (key == name) {
        ok = true;
        break;
      }
    }
    if (!ok) throw std::invalid_argument("config: unknown key '" + key + "' in " + context);
  }
}

template <typename T>
void read_into(const json& obj, const char* key, T& value) {
  if (obj.contains(key)) value = obj.at(key).get<T>();
}

json tilt_to_json(AxisTilt tilt) { return tilt == AxisTilt::magic ? "magic" : "normal"; }

AxisTilt tilt_from_json(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "magic") return AxisTilt::magic;
  if (s == "normal") return AxisTilt::normal;
  throw std::invalid_argument("config: axis_tilt must be 'magic' or 'normal'");
}

json depth_to_json(const DepthDistribution& d) {
  return json{{"mu_nm", d.mu}, {"sigma_nm", d.sigma}, {"d_min_nm", d.d_min}};
}

DepthDistribution depth_from_json(const json& j, const std::string& context,
                                  DepthDistribution base) {
  require_keys(j, {"mu_nm", "sigma_nm", "d_min_nm"}, context);
  read_into(j, "mu_nm", base.mu);
  read_into(j, "sigma_nm", base.sigma);
  read_into(j, "d_min_nm", base.d_min);
  return base;
}

json scan_to_json(const ScanRange& s) {
  return json{{"min", s.min}, {"max", s.max}, {"count", s.count}, {"log", s.log_spaced}};
}

ScanRange scan_from_json(const json& j, const std::string& context, ScanRange base) {
  require_keys(j, {"min", "max", "count", "log"}, context);
  read_into(j, "min", base.min);
  read_into(j, "max", base.max);
  read_into(j, "count", base.count);
  read_into(j, "log", base.log_spaced);
  return base;
}

json config_to_json_object(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["constants"] = {{"mu0", c.constants.mu0},
                    {"hbar", c.constants.hbar},
                    {"gamma_nv", c.constants.gamma_nv},
                    {"omega0", c.constants.omega0}};
  j["depth"] = depth_to_json(c.depth);
  j["surface"] = {{"sigma_surf_nm2", c.surface.sigma_surf},
                  {"tau_c_surf_s", c.surface.tau_c_surf},
                  {"gamma_bulk_s", c.surface.gamma_bulk},
                  {"axis_tilt", tilt_to_json(c.surface.axis_tilt)},
                  {"c_surf_override_nm4", c.surface.c_surf_override
                                              ? json(*c.surface.c_surf_override)
                                              : json(nullptr)}};
  j["label"] = {{"spin_2s", c.label.spin_2s},
                {"gamma_rad_s_T", c.label.gamma},
                {"tau_c_s", c.label.tau_c}};
  j["scene"] = {{"region_side_nm", c.region_side_nm},
                {"sa_cube_edge_nm", c.sa_cube_edge_nm},
                {"sa_standoff_nm", c.sa_standoff_nm},
                {"sa_occupied_sites", c.sa_occupied_sites},
                {"labels_per_site", c.labels_per_site},
                {"plane_height_nm", c.plane_height_nm},
                {"sigma_sa_nm2", c.sigma_sa},
                {"sigma_ub_nm2", c.sigma_ub}};
  j["ensemble"] = {{"n_nv", c.ensemble_n_nv},
                   {"tau_points", c.tau_points},
                   {"t_max_s", c.t_max},
                   {"noise_sd", c.noise_sd}};
  j["single_nv"] = {{"depth", depth_to_json(c.pillar_depth)},
                    {"sigma_surf_nm2", c.pillar_sigma_surf},
                    {"n_nv", c.single_nv_n},
                    {"lateral_spacing_nm", c.lateral_spacing_nm},
                    {"gamma_bg_max_s", c.gamma_bg_max},
                    {"delta_cutoff_s", c.delta_cutoff}};
  j["scans"] = {{"surface", scan_to_json(c.surface_scan)},
                {"c_surf", scan_to_json(c.c_surf_scan)},
                {"sa", scan_to_json(c.sa_scan)},
                {"ub", scan_to_json(c.ub_scan)}};
  j["map"] = {{"gamma_bg_min_s", c.map_gamma_bg_min},
              {"gamma_bg_max_s", c.map_gamma_bg_max},
              {"gamma_bg_bins", c.map_gamma_bg_bins},
              {"delta_max_s", c.map_delta_max},
              {"delta_bins", c.map_delta_bins},
              {"dominance_threshold", c.dominance_threshold},
              {"contour_level", c.contour_level}};
  return j;
}

RunConfig config_from_json_object(const json& j) {
  require_keys(j, {"seed", "workers", "constants", "depth", "surface", "label", "scene",
                   "ensemble", "single_nv", "scans", "map"},
               "config");
  RunConfig c;
  read_into(j, "seed", c.seed);
  read_into(j, "workers", c.workers);
  if (j.contains("constants")) {
    const auto& jc = j.at("constants");
    require_keys(jc, {"mu0", "hbar", "gamma_nv", "omega0"}, "constants");
    read_into(jc, "mu0", c.constants.mu0);
    read_into(jc, "hbar", c.constants.hbar);
    read_into(jc, "gamma_nv", c.constants.gamma_nv);
    read_into(jc, "omega0", c.constants.omega0);
  }
  if (j.contains("depth")) c.depth = depth_from_json(j.at("depth"), "depth", c.depth);
  if (j.contains("surface")) {
    const auto& js = j.at("surface");
    require_keys(js, {"sigma_surf_nm2", "tau_c_surf_s", "gamma_bulk_s", "axis_tilt",
                      "c_surf_override_nm4"},
                 "surface");
    read_into(js, "sigma_surf_nm2", c.surface.sigma_surf);
    read_into(js, "tau_c_surf_s", c.surface.tau_c_surf);
    read_into(js, "gamma_bulk_s", c.surface.gamma_bulk);
    if (js.contains("axis_tilt")) c.surface.axis_tilt = tilt_from_json(js.at("axis_tilt"));
    if (js.contains("c_surf_override_nm4") && !js.at("c_surf_override_nm4").is_null()) {
      c.surface.c_surf_override = js.at("c_surf_override_nm4").get<double>();
    }
    c.surface.surface_spin.tau_c = c.surface.tau_c_surf;
  }
  if (j.contains("label")) {
    const auto& jl = j.at("label");
    require_keys(jl, {"spin_2s", "gamma_rad_s_T", "tau_c_s"}, "label");
    read_into(jl, "spin_2s", c.label.spin_2s);
    read_into(jl, "gamma_rad_s_T", c.label.gamma);
    read_into(jl, "tau_c_s", c.label.tau_c);
  }
  if (j.contains("scene")) {
    const auto& js = j.at("scene");
    require_keys(js, {"region_side_nm", "sa_cube_edge_nm", "sa_standoff_nm",
                      "sa_occupied_sites", "labels_per_site", "plane_height_nm",
                      "sigma_sa_nm2", "sigma_ub_nm2"},
                 "scene");
    read_into(js, "region_side_nm", c.region_side_nm);
    read_into(js, "sa_cube_edge_nm", c.sa_cube_edge_nm);
    read_into(js, "sa_standoff_nm", c.sa_standoff_nm);
    read_into(js, "sa_occupied_sites", c.sa_occupied_sites);
    read_into(js, "labels_per_site", c.labels_per_site);
    read_into(js, "plane_height_nm", c.plane_height_nm);
    read_into(js, "sigma_sa_nm2", c.sigma_sa);
    read_into(js, "sigma_ub_nm2", c.sigma_ub);
  }
  if (j.contains("ensemble")) {
    const auto& je = j.at("ensemble");
    require_keys(je, {"n_nv", "tau_points", "t_max_s", "noise_sd"}, "ensemble");
    read_into(je, "n_nv", c.ensemble_n_nv);
    read_into(je, "tau_points", c.tau_points);
    read_into(je, "t_max_s", c.t_max);
    read_into(je, "noise_sd", c.noise_sd);
  }
  if (j.contains("single_nv")) {
    const auto& js = j.at("single_nv");
    require_keys(js, {"depth", "sigma_surf_nm2", "n_nv", "lateral_spacing_nm",
                      "gamma_bg_max_s", "delta_cutoff_s"},
                 "single_nv");
    if (js.contains("depth")) {
      c.pillar_depth = depth_from_json(js.at("depth"), "single_nv.depth", c.pillar_depth);
    }
    read_into(js, "sigma_surf_nm2", c.pillar_sigma_surf);
    read_into(js, "n_nv", c.single_nv_n);
    read_into(js, "lateral_spacing_nm", c.lateral_spacing_nm);
    read_into(js, "gamma_bg_max_s", c.gamma_bg_max);
    read_into(js, "delta_cutoff_s", c.delta_cutoff);
  }
  if (j.contains("scans")) {
    const auto& js = j.at("scans");
    require_keys(js, {"surface", "c_surf", "sa", "ub"}, "scans");
    if (js.contains("surface")) {
      c.surface_scan = scan_from_json(js.at("surface"), "scans.surface", c.surface_scan);
    }
    if (js.contains("c_surf")) {
      c.c_surf_scan = scan_from_json(js.at("c_surf"), "scans.c_surf", c.c_surf_scan);
    }
    if (js.contains("sa")) c.sa_scan = scan_from_json(js.at("sa"), "scans.sa", c.sa_scan);
    if (js.contains("ub")) c.ub_scan = scan_from_json(js.at("ub"), "scans.ub", c.ub_scan);
  }
  if (j.contains("map")) {
    const auto& jm = j.at("map");
    require_keys(jm, {"gamma_bg_min_s", "gamma_bg_max_s", "gamma_bg_bins", "delta_max_s",
                      "delta_bins", "dominance_threshold", "contour_level"},
                 "map");
    read_into(jm, "gamma_bg_min_s", c.map_gamma_bg_min);
    read_into(jm, "gamma_bg_max_s", c.map_gamma_bg_max);
    read_into(jm, "gamma_bg_bins", c.map_gamma_bg_bins);
    read_into(jm, "delta_max_s", c.map_delta_max);
    read_into(jm, "delta_bins", c.map_delta_bins);
    read_into(jm, "dominance_threshold", c.dominance_threshold);
    read_into(jm, "contour_level", c.contour_level);
  }
  c.validate();
  return c;
}

}  // namespace

std::string config_to_json(const RunConfig& config) {
  return config_to_json_object(config).dump(2);
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  return config_from_json_object(j);
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  json j;
  try {
    j = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: JSON parse error in " + path + ": " + e.what());
  }
  if (j.is_object() && j.contains("config")) {
    return config_from_json_object(j.at("config"));  // manifest re-run
  }
  return config_from_json_object(j);
}

}  // namespace nvrelax
