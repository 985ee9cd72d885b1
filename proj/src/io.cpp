#include "nvrelax/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace nvrelax {

using nlohmann::json;

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double parse_double(const std::string& token, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw CsvError("invalid numeric field '" + token + "'", line);
  }
}

std::vector<std::string> split_row(const std::string& row) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(row);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!row.empty() && row.back() == ',') fields.emplace_back();
  return fields;
}

// Single-column CSV with the given header.
std::string column_to_csv(const std::string& header, const std::vector<double>& values) {
  std::string out = header + "\n";
  for (const double v : values) {
    out += format_double(v);
    out += "\n";
  }
  return out;
}

std::vector<double> column_from_csv(const std::string& text, const std::string& header) {
  std::stringstream ss(text);
  std::string row;
  int line = 0;
  if (!std::getline(ss, row)) throw CsvError("empty file", 1);
  ++line;
  if (!row.empty() && row.back() == '\r') row.pop_back();
  if (row != header) throw CsvError("expected header '" + header + "'", line);
  std::vector<double> values;
  while (std::getline(ss, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    values.push_back(parse_double(row, line));
  }
  return values;
}

}  // namespace

std::string t1_curve_to_csv(const T1Curve& curve) {
  curve.validate();
  const bool with_sd = curve.noise_sd.has_value();
  std::string out = with_sd ? "tau_s,intensity,sd\n" : "tau_s,intensity\n";
  for (Eigen::Index i = 0; i < curve.tau.size(); ++i) {
    out += format_double(curve.tau[i]);
    out += ",";
    out += format_double(curve.intensity[i]);
    if (with_sd) {
      out += ",";
      out += format_double((*curve.noise_sd)[i]);
    }
    out += "\n";
  }
  return out;
}

T1Curve t1_curve_from_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string row;
  int line = 0;
  if (!std::getline(ss, row)) throw CsvError("empty file", 1);
  ++line;
  if (!row.empty() && row.back() == '\r') row.pop_back();
  bool with_sd = false;
  if (row == "tau_s,intensity,sd") {
    with_sd = true;
  } else if (row != "tau_s,intensity") {
    throw CsvError("expected header 'tau_s,intensity[,sd]'", line);
  }

  std::vector<double> tau, intensity, sd;
  while (std::getline(ss, row)) {
    ++line;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty()) continue;
    const auto fields = split_row(row);
    if (fields.size() != (with_sd ? 3u : 2u)) {
      throw CsvError("wrong field count", line);
    }
    tau.push_back(parse_double(fields[0], line));
    intensity.push_back(parse_double(fields[1], line));
    if (with_sd) sd.push_back(parse_double(fields[2], line));
  }
  T1Curve curve;
  curve.tau = from_vector(tau);
  curve.intensity = from_vector(intensity);
  if (with_sd) curve.noise_sd = from_vector(sd);
  try {
    curve.validate();
  } catch (const std::exception& e) {
    throw CsvError(e.what(), line);
  }
  return curve;
}

std::string rates_to_csv(const std::vector<double>& rates) {
  return column_to_csv("gamma_bg_s", rates);
}
std::vector<double> rates_from_csv(const std::string& text) {
  return column_from_csv(text, "gamma_bg_s");
}
std::string deltas_to_csv(const std::vector<double>& deltas) {
  return column_to_csv("delta_gamma_s", deltas);
}
std::vector<double> deltas_from_csv(const std::string& text) {
  return column_from_csv(text, "delta_gamma_s");
}

std::string fit_result_to_json(const FitResult& result) {
  json params;
  switch (result.model.family()) {
    case DecayFamily::single_exp: {
      const auto& m = std::get<SingleExp>(result.model.shape);
      params = {{"A", m.amp}, {"T", m.t1}};
      break;
    }
    case DecayFamily::biexp: {
      const auto& m = std::get<Biexp>(result.model.shape);
      params = {{"A_short", m.amp_short},
                {"T_short", m.t_short},
                {"A_long", m.amp_long},
                {"T_long", m.t_long}};
      break;
    }
    case DecayFamily::stretched: {
      const auto& m = std::get<StretchedExp>(result.model.shape);
      params = {{"A", m.amp}, {"T", m.t1}, {"beta", m.beta}};
      break;
    }
  }
  json j{{"family", family_name(result.model.family())},
         {"params", params},
         {"r_squared", result.r_squared},
         {"residual_norm", result.residual_norm},
         {"iterations", result.iterations},
         {"converged", result.converged},
         {"collapsed", result.collapsed},
         {"derived_rates", result.derived_rates}};
  return j.dump(2);
}

std::string scan_result_to_json(const DensityScanResult& result) {
  json j{{"scanned_values", to_vector(result.scanned_values)},
         {"scores", to_vector(result.scores)},
         {"best", result.best},
         {"interval", {result.interval.first, result.interval.second}}};
  return j.dump(2);
}

std::string spacing_result_to_json(const SpacingResult& result) {
  json j{{"scanned_densities", to_vector(result.scanned_densities)},
         {"delta_gammas", to_vector(result.delta_gammas)},
         {"slope", result.slope},
         {"intercept", result.intercept},
         {"density_best", result.density_best},
         {"density_interval", {result.density_low, result.density_high}},
         {"spacing_best_nm", result.spacing_best},
         {"spacing_interval_nm",
          {result.spacing_low, result.unbounded_above ? json(nullptr) : json(result.spacing_high)}},
         {"unbounded_above", result.unbounded_above}};
  return j.dump(2);
}

std::string scene_to_json(const Scene& scene) {
  json complexes = json::array();
  for (const auto& c : scene.complexes) {
    complexes.push_back({{"center_nm", {c.center_nm.x(), c.center_nm.y()}},
                         {"cube_edge_nm", c.cube_edge_nm},
                         {"standoff_nm", c.standoff_nm},
                         {"occupied", c.occupied},
                         {"labels_per_site", c.labels_per_site}});
  }
  json planes = json::array();
  for (const auto& p : scene.planes) {
    json points = json::array();
    for (const auto& pt : p.points_nm) points.push_back({pt.x(), pt.y()});
    planes.push_back({{"density_nm2", p.plane.density_nm2},
                      {"height_nm", p.plane.height_nm},
                      {"labels_per_point", p.plane.labels_per_point},
                      {"points_nm", points}});
  }
  json j{{"region",
          {{"x_min", scene.region.x_min},
           {"x_max", scene.region.x_max},
           {"y_min", scene.region.y_min},
           {"y_max", scene.region.y_max}}},
         {"complexes", complexes},
         {"planes", planes},
         {"label_spec",
          {{"spin_2s", scene.label_spec.spin_2s},
           {"gamma_rad_s_T", scene.label_spec.gamma},
           {"tau_c_s", scene.label_spec.tau_c}}}};
  return j.dump(2);
}

Scene scene_from_json(const std::string& text) {
  const json j = json::parse(text);
  Scene scene;
  const auto& jr = j.at("region");
  scene.region = Region{jr.at("x_min").get<double>(), jr.at("x_max").get<double>(),
                        jr.at("y_min").get<double>(), jr.at("y_max").get<double>()};
  for (const auto& jc : j.at("complexes")) {
    SaComplex c;
    c.center_nm = Eigen::Vector2d(jc.at("center_nm")[0].get<double>(),
                                  jc.at("center_nm")[1].get<double>());
    c.cube_edge_nm = jc.at("cube_edge_nm").get<double>();
    c.standoff_nm = jc.at("standoff_nm").get<double>();
    const auto occ = jc.at("occupied").get<std::vector<bool>>();
    if (occ.size() != 4) throw std::invalid_argument("scene: occupied must have 4 entries");
    for (std::size_t i = 0; i < 4; ++i) c.occupied[i] = occ[i];
    c.labels_per_site = jc.at("labels_per_site").get<int>();
    scene.complexes.push_back(c);
  }
  for (const auto& jp : j.at("planes")) {
    RealizedPlane p;
    p.plane.density_nm2 = jp.at("density_nm2").get<double>();
    p.plane.height_nm = jp.at("height_nm").get<double>();
    p.plane.labels_per_point = jp.at("labels_per_point").get<int>();
    for (const auto& pt : jp.at("points_nm")) {
      p.points_nm.emplace_back(pt[0].get<double>(), pt[1].get<double>());
    }
    scene.planes.push_back(std::move(p));
  }
  const auto& jl = j.at("label_spec");
  scene.label_spec.spin_2s = jl.at("spin_2s").get<int>();
  scene.label_spec.gamma = jl.at("gamma_rad_s_T").get<double>();
  scene.label_spec.tau_c = jl.at("tau_c_s").get<double>();
  scene.validate();
  return scene;
}

std::string probability_map_to_json(const ProbabilityMap& map) {
  const auto matrix_to_json = [](const Eigen::MatrixXd& m, bool nan_as_null) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (nan_as_null && !std::isfinite(m(r, c))) {
          row.push_back(nullptr);
        } else {
          row.push_back(m(r, c));
        }
      }
      rows.push_back(row);
    }
    return rows;
  };
  json contour = json::array();
  for (const auto& p : map.contour) contour.push_back({p.x(), p.y()});
  json j{{"gamma_bg_edges", to_vector(map.gamma_bg_edges)},
         {"delta_gamma_edges", to_vector(map.delta_gamma_edges)},
         {"counts", matrix_to_json(map.counts, false)},
         {"density", matrix_to_json(map.density, false)},
         {"p_single", matrix_to_json(map.p_single, true)},
         {"contour", contour},
         {"empty", map.empty}};
  return j.dump(2);
}

std::string probability_map_matrix(const ProbabilityMap& map) {
  std::string out;
  for (Eigen::Index r = 0; r < map.density.rows(); ++r) {
    for (Eigen::Index c = 0; c < map.density.cols(); ++c) {
      if (c > 0) out += " ";
      out += format_double(map.density(r, c));
    }
    out += "\n";
  }
  return out;
}

std::string contour_to_csv(const ProbabilityMap& map) {
  std::string out = "gamma_bg_s,delta_gamma_s\n";
  for (const auto& p : map.contour) {
    out += format_double(p.x());
    out += ",";
    out += format_double(p.y());
    out += "\n";
  }
  return out;
}

std::string sensitivity_table_to_csv(const SensitivityTable& table) {
  std::string out = "sigma_ub_nm2,dg_weighted_s,dg_long_s,dg_stretched_s,dg_true_s,fits_converged\n";
  for (const auto& row : table.rows) {
    out += format_double(row.density);
    out += ",";
    out += format_double(row.dg_weighted);
    out += ",";
    out += format_double(row.dg_long);
    out += ",";
    out += format_double(row.dg_stretched);
    out += ",";
    out += format_double(row.dg_true);
    out += ",";
    out += row.fits_converged ? "1" : "0";
    out += "\n";
  }
  return out;
}

std::string sensitivity_table_to_json(const SensitivityTable& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"sigma_ub_nm2", row.density},
                    {"dg_weighted_s", row.dg_weighted},
                    {"dg_long_s", row.dg_long},
                    {"dg_stretched_s", row.dg_stretched},
                    {"dg_true_s", row.dg_true},
                    {"fits_converged", row.fits_converged}});
  }
  json j{{"rows", rows},
         {"slopes",
          {{"weighted", table.slope_weighted},
           {"long", table.slope_long},
           {"stretched", table.slope_stretched},
           {"true", table.slope_true}}}};
  return j.dump(2);
}

std::string rate_population_to_json(const RatePopulation& pop) {
  pop.validate();
  const std::vector<double> rates(pop.rates.data(), pop.rates.data() + pop.rates.size());
  json histogram = nullptr;
  if (rates.size() >= 4) {
    try {
      const Eigen::VectorXd edges = freedman_diaconis_edges(rates);
      const Eigen::VectorXd density = histogram_density(rates, edges);
      histogram = {{"edges", to_vector(edges)}, {"density", to_vector(density)}};
    } catch (const std::exception&) {
      histogram = nullptr;  // degenerate population; summary only
    }
  }
  json j{{"n", rates.size()}, {"mean_rate_s", pop.mean_rate()}, {"histogram", histogram}};
  return j.dump(2);
}

std::string manifest_to_json(const std::string& command, const RunConfig& config) {
  // workers is an execution parameter that never changes results; normalize
  // it so outputs stay byte-identical across --workers values.
  RunConfig recorded = config;
  recorded.workers = 0;
  json j{{"command", command}, {"config", json::parse(config_to_json(recorded))}};
  return j.dump(2);
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace nvrelax
