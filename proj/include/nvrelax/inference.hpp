#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "nvrelax/ensemble.hpp"
#include "nvrelax/fitters.hpp"
#include "nvrelax/scene.hpp"
#include "nvrelax/surface_noise.hpp"

namespace nvrelax {

// Goodness-of-fit scan over a model parameter.
struct DensityScanResult {
  Eigen::VectorXd scanned_values;
  Eigen::VectorXd scores;
  double best = 0.0;
  std::pair<double, double> interval{0.0, 0.0};  // values scoring within a fraction of best
};

// Depth law + surface noise + constants, the full background model.
struct BackgroundModel {
  DepthDistribution depth = DepthDistribution::ensemble();
  SurfaceNoiseModel surface;
  PhysicalConstants constants;
};

// Background rates of n NVs with depths drawn from the model's depth law.
RatePopulation sample_background_rates(const BackgroundModel& model, std::size_t n,
                                       std::uint64_t seed);

// Uses t_max when positive; otherwise 5 / (median population rate), the
// expected weighted-rate scale of the mixture.
Eigen::VectorXd resolve_tau_grid(const RatePopulation& pop, double t_max, int n_points);

// ---------------------------------------------------------------------------
// Histogram utilities (shared by the distribution-matching inferences)

// Freedman-Diaconis bin edges over [min, max] of the samples; bin count
// clamped to [4, 1000].
Eigen::VectorXd freedman_diaconis_edges(std::span<const double> samples);

// Normalized histogram density per bin (counts / (n * width)).
Eigen::VectorXd histogram_density(std::span<const double> samples,
                                  const Eigen::VectorXd& edges);

// R^2 of `model` against `observed`, both per-bin densities.
double binned_r_squared(const Eigen::VectorXd& model, const Eigen::VectorXd& observed);

// ---------------------------------------------------------------------------
// Ensemble-curve surface density inference

struct SurfaceScanOptions {
  std::size_t n_nv = 40000;
  std::uint64_t seed = 1;
  double interval_fraction = 0.01;
  int workers = 1;
};

// Scores each candidate sigma_surf by the R^2 between the synthesized
// ensemble curve (fixed depth sample) and the target curve.
DensityScanResult infer_surface_density_from_curve(const T1Curve& target,
                                                   const DepthDistribution& depth,
                                                   double tau_c_surf, double gamma_bulk,
                                                   const Eigen::VectorXd& scan,
                                                   const SurfaceScanOptions& options,
                                                   const PhysicalConstants& constants);

// ---------------------------------------------------------------------------
// Background-rate histogram inference

struct CsurfScanOptions {
  double interval_fraction = 0.01;
};

// Scores each candidate c_surf by the binned R^2 of the analytic rate PDF
// against the empirical rate histogram.
DensityScanResult infer_c_surf_from_histogram(std::span<const double> rates,
                                              const DepthDistribution& depth, double gamma_bulk,
                                              const Eigen::VectorXd& scan,
                                              const CsurfScanOptions& options = {});

// ---------------------------------------------------------------------------
// Plane-density ensemble response (label spacing, estimator sensitivity)

struct PlaneResponseConfig {
  BackgroundModel background;
  double plane_height_nm = 2.0;
  int labels_per_point = 4;
  SpinLabelSpec label_spec = SpinLabelSpec::mn2();
  double region_side_nm = 40.0;
  std::size_t n_nv = 40000;
  int tau_points = 31;
  double t_max = 0.0;  // auto
  std::uint64_t seed = 1;
  int workers = 1;
};

struct SensitivityRow {
  double density = 0.0;      // nm^-2
  double dg_weighted = 0.0;  // weighted-rate estimator response, s^-1
  double dg_long = 0.0;      // 1/T_long response
  double dg_stretched = 0.0; // 1/T_stre response
  double dg_true = 0.0;      // mean single-NV acceleration
  bool fits_converged = true;
};

struct SensitivityTable {
  std::vector<SensitivityRow> rows;
  double slope_weighted = 0.0;  // OLS slopes of response vs density
  double slope_long = 0.0;
  double slope_stretched = 0.0;
  double slope_true = 0.0;
};

// For every density: synthesize background and with-protein ensemble curves,
// fit all three families, difference each estimator, and fit linear slopes.
SensitivityTable sensitivity_compare(const Eigen::VectorXd& densities,
                                     const PlaneResponseConfig& config);

struct SpacingResult {
  Eigen::VectorXd scanned_densities;
  Eigen::VectorXd delta_gammas;  // simulated mean ensemble response per density
  double slope = 0.0;            // linear fit of response vs density
  double intercept = 0.0;
  double density_best = 0.0;     // nm^-2
  double density_low = 0.0;
  double density_high = 0.0;
  double spacing_best = 0.0;     // nm, density^(-1/2)
  double spacing_low = 0.0;
  double spacing_high = 0.0;     // +inf when unbounded
  bool unbounded_above = false;
};

// Inverts a measured delta_gamma +- sd through the simulated linear
// density response into a bonding-density and spacing interval.
SpacingResult infer_label_spacing(double delta_gamma, double delta_gamma_sd,
                                  const Eigen::VectorXd& densities,
                                  const PlaneResponseConfig& config);

// ---------------------------------------------------------------------------
// Single-NV scene Monte Carlo

struct SingleNvSimConfig {
  DepthDistribution depth = DepthDistribution::pillars();
  SurfaceNoiseModel surface;  // sigma_surf 0.50 nm^-2 for the pillar sample
  PhysicalConstants constants;
  double sigma_sa = 0.007;  // nm^-2
  double region_side_nm = 40.0;
  SaSceneParams sa;
  std::size_t n_nv = 10000;
  double lateral_spacing_nm = 100.0;
  double gamma_bg_max = 2000.0;  // retain NVs below this background rate
  std::uint64_t seed = 1;
  int workers = 1;
};

struct SingleNvSignal {
  double gamma_bg = 0.0;     // s^-1
  double delta_gamma = 0.0;  // s^-1
  double max_share = 0.0;    // largest per-complex share of delta_gamma
  double depth_nm = 0.0;
};

// Per retained NV: depth, background rate, and the scene-induced signal.
std::vector<SingleNvSignal> simulate_single_nv_signals(const SingleNvSimConfig& config);

// ---------------------------------------------------------------------------
// SA bonding-density inference

struct SaDensityScanOptions {
  double delta_cutoff = 1e4;  // s^-1; larger signals are protein aggregates
  double interval_fraction = 0.01;
};

DensityScanResult infer_sa_density(std::span<const double> observed_deltas,
                                   const SingleNvSimConfig& base, const Eigen::VectorXd& scan,
                                   const SaDensityScanOptions& options = {});

// ---------------------------------------------------------------------------
// Conditional probability map and single-molecule detection probability

struct ProbabilityMapConfig {
  Eigen::VectorXd gamma_bg_edges;     // s^-1
  Eigen::VectorXd delta_gamma_edges;  // s^-1
  double dominance_threshold = 0.70;
  double contour_level = 0.5;
};

struct ProbabilityMap {
  Eigen::VectorXd gamma_bg_edges;
  Eigen::VectorXd delta_gamma_edges;
  Eigen::MatrixXd counts;    // rows = delta bins, cols = gamma_bg bins
  Eigen::MatrixXd density;   // column-normalized conditional density, 1/(s^-1)
  Eigen::MatrixXd p_single;  // NaN where a bin holds no events
  std::vector<Eigen::Vector2d> contour;  // (gamma_bg, delta_gamma) at contour_level
  bool empty = false;
};

ProbabilityMap probability_map(const SingleNvSimConfig& sim, const ProbabilityMapConfig& map);

}  // namespace nvrelax
