#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nvrelax/config.hpp"
#include "nvrelax/fitters.hpp"
#include "nvrelax/inference.hpp"
#include "nvrelax/scene.hpp"

namespace nvrelax {

// Malformed tabular input; `line` is 1-based.
struct CsvError : std::runtime_error {
  int line;
  CsvError(const std::string& message, int line_number)
      : std::runtime_error(message), line(line_number) {}
};

// T1 curve CSV: header `tau_s,intensity[,sd]`, one row per point, LF line
// endings, 17 significant digits. Bit-exact across runs.
std::string t1_curve_to_csv(const T1Curve& curve);
T1Curve t1_curve_from_csv(const std::string& text);

// Single-column CSVs for rates and signal lists.
std::string rates_to_csv(const std::vector<double>& rates);          // header gamma_bg_s
std::vector<double> rates_from_csv(const std::string& text);
std::string deltas_to_csv(const std::vector<double>& deltas);        // header delta_gamma_s
std::vector<double> deltas_from_csv(const std::string& text);

// JSON documents.
std::string fit_result_to_json(const FitResult& result);
std::string scan_result_to_json(const DensityScanResult& result);
std::string spacing_result_to_json(const SpacingResult& result);
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);
std::string probability_map_to_json(const ProbabilityMap& map);
std::string sensitivity_table_to_json(const SensitivityTable& table);

// gnuplot-compatible matrix: rows = delta-gamma bins, columns = gamma_bg bins.
std::string probability_map_matrix(const ProbabilityMap& map);
// P = contour_level polyline, header gamma_bg_s,delta_gamma_s.
std::string contour_to_csv(const ProbabilityMap& map);

std::string sensitivity_table_to_csv(const SensitivityTable& table);

// Rate population histogram summary for provenance output.
std::string rate_population_to_json(const RatePopulation& pop);

// Manifest {"command": ..., "config": ...}; load_config_file accepts it back.
std::string manifest_to_json(const std::string& command, const RunConfig& config);

// Writes with LF endings; throws std::runtime_error naming the path.
void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

// Deterministic float formatting used by every writer (17 significant digits).
std::string format_double(double value);

}  // namespace nvrelax
