#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "nvrelax/inference.hpp"

namespace nvrelax {

// Parameter scan grid, linear or geometric.
struct ScanRange {
  double min = 0.0;
  double max = 1.0;
  int count = 10;
  bool log_spaced = false;

  Eigen::VectorXd values() const;
  void validate() const;
};

// Fully resolved run configuration. Every default equals the headline
// parameter set of the simulations this toolkit reproduces; see README.
struct RunConfig {
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = NV_RELAXO_WORKERS, then hardware
  PhysicalConstants constants;

  // Ensemble sample: depth law and surface noise.
  DepthDistribution depth = DepthDistribution::ensemble();
  SurfaceNoiseModel surface;  // sigma_surf 0.40 nm^-2, tau_c 0.28 ns, bulk 100 s^-1
  SpinLabelSpec label = SpinLabelSpec::mn2();

  // Scene geometry.
  double region_side_nm = 40.0;
  double sa_cube_edge_nm = 5.8;
  double sa_standoff_nm = 0.0;
  int sa_occupied_sites = 4;
  int labels_per_site = 4;
  double plane_height_nm = 2.0;
  double sigma_sa = 0.007;         // nm^-2
  double sigma_ub = 1.0 / 81.0;    // nm^-2, 9 nm spacing

  // Ensemble synthesis.
  std::size_t ensemble_n_nv = 40000;
  int tau_points = 31;
  double t_max = 0.0;  // s; 0 = auto from the population median rate
  double noise_sd = 0.01;

  // Single-NV Monte Carlo (nano-pillar sample).
  DepthDistribution pillar_depth = DepthDistribution::pillars();
  double pillar_sigma_surf = 0.50;  // nm^-2
  std::size_t single_nv_n = 10000;
  double lateral_spacing_nm = 100.0;
  double gamma_bg_max = 2000.0;  // s^-1
  double delta_cutoff = 1e4;     // s^-1

  // Scan grids.
  ScanRange surface_scan{0.20, 0.60, 17, false};   // nm^-2
  ScanRange c_surf_scan{1.2e6, 6.0e6, 49, true};   // s^-1 nm^4
  ScanRange sa_scan{0.002, 0.02, 25, true};        // nm^-2
  ScanRange ub_scan{0.0025, 1.0 / 49.0, 8, false}; // nm^-2, spacings 20 -> 7 nm

  // Probability map.
  double map_gamma_bg_min = 300.0;
  double map_gamma_bg_max = 2000.0;
  int map_gamma_bg_bins = 17;
  double map_delta_max = 1.0e4;
  int map_delta_bins = 40;
  double dominance_threshold = 0.70;
  double contour_level = 0.5;

  void validate() const;

  // Assembled sub-configurations.
  BackgroundModel background_model() const;
  SingleNvSimConfig single_nv_sim() const;
  PlaneResponseConfig plane_response() const;
  ProbabilityMapConfig map_config() const;
};

// JSON round-trip; parsing rejects unknown keys at every level.
std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(const std::string& text);

// Reads either a bare config document or a manifest ({"command", "config"}).
RunConfig load_config_file(const std::string& path);

}  // namespace nvrelax
