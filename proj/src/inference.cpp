#include "nvrelax/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nvrelax/parallel.hpp"
#include "nvrelax/random.hpp"

namespace nvrelax {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LinearFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("ols_fit: need two or more paired points");
  }
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("ols_fit: degenerate abscissae");
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

std::pair<double, double> score_interval(const Eigen::VectorXd& values,
                                         const Eigen::VectorXd& scores, double fraction) {
  Eigen::Index best_idx = 0;
  scores.maxCoeff(&best_idx);
  const double floor = scores[best_idx] - fraction * std::abs(scores[best_idx]);
  double lo = values[best_idx];
  double hi = values[best_idx];
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (scores[i] >= floor) {
      lo = std::min(lo, values[i]);
      hi = std::max(hi, values[i]);
    }
  }
  return {lo, hi};
}

DensityScanResult make_scan_result(Eigen::VectorXd values, Eigen::VectorXd scores,
                                   double fraction) {
  DensityScanResult result;
  Eigen::Index best_idx = 0;
  scores.maxCoeff(&best_idx);
  result.best = values[best_idx];
  result.interval = score_interval(values, scores, fraction);
  result.scanned_values = std::move(values);
  result.scores = std::move(scores);
  return result;
}

double curve_r_squared(const Eigen::VectorXd& model, const Eigen::VectorXd& target) {
  const double mean = target.mean();
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    ss_res += (model[i] - target[i]) * (model[i] - target[i]);
    ss_tot += (target[i] - mean) * (target[i] - mean);
  }
  if (!(ss_tot > 0.0)) throw std::invalid_argument("curve_r_squared: flat target");
  return 1.0 - ss_res / ss_tot;
}

}  // namespace

RatePopulation sample_background_rates(const BackgroundModel& model, std::size_t n,
                                       std::uint64_t seed) {
  const double c_surf = model.surface.c_surf(model.constants);
  const std::vector<double> depths = sample_depths(model.depth, n, seed);
  RatePopulation pop;
  pop.rates.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    pop.rates[static_cast<Eigen::Index>(i)] =
        background_rate(c_surf, model.surface.gamma_bulk, depths[i]);
  }
  return pop;
}

Eigen::VectorXd resolve_tau_grid(const RatePopulation& pop, double t_max, int n_points) {
  if (t_max > 0.0) return default_tau_grid(t_max, n_points);
  pop.validate();
  std::vector<double> rates(pop.rates.data(), pop.rates.data() + pop.rates.size());
  std::sort(rates.begin(), rates.end());
  const double median = quantile_sorted(rates, 0.5);
  return default_tau_grid(5.0 / median, n_points);
}

Eigen::VectorXd freedman_diaconis_edges(std::span<const double> samples) {
  if (samples.size() < 4) throw std::invalid_argument("histogram: too few samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (!(hi > lo)) throw std::invalid_argument("histogram: all samples equal");
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double width = 2.0 * iqr / std::cbrt(static_cast<double>(sorted.size()));
  int bins = width > 0.0 ? static_cast<int>(std::ceil((hi - lo) / width)) : 4;
  bins = std::clamp(bins, 4, 1000);
  Eigen::VectorXd edges(bins + 1);
  for (int i = 0; i <= bins; ++i) {
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
  }
  return edges;
}

Eigen::VectorXd histogram_density(std::span<const double> samples,
                                  const Eigen::VectorXd& edges) {
  if (edges.size() < 2) throw std::invalid_argument("histogram: need at least one bin");
  if (samples.empty()) throw std::invalid_argument("histogram: empty sample");
  const auto bins = edges.size() - 1;
  Eigen::VectorXd density = Eigen::VectorXd::Zero(bins);
  const double lo = edges[0];
  const double hi = edges[bins];
  for (const double v : samples) {
    if (v < lo || v > hi) continue;  // out-of-range mass still normalizes below
    auto b = static_cast<Eigen::Index>((v - lo) / (hi - lo) * static_cast<double>(bins));
    b = std::min(b, bins - 1);
    while (b > 0 && v < edges[b]) --b;
    while (b < bins - 1 && v >= edges[b + 1]) ++b;
    density[b] += 1.0;
  }
  const double n = static_cast<double>(samples.size());
  for (Eigen::Index b = 0; b < bins; ++b) {
    density[b] /= n * (edges[b + 1] - edges[b]);
  }
  return density;
}

double binned_r_squared(const Eigen::VectorXd& model, const Eigen::VectorXd& observed) {
  if (model.size() != observed.size() || model.size() < 2) {
    throw std::invalid_argument("binned_r_squared: size mismatch");
  }
  const double mean = observed.mean();
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (Eigen::Index i = 0; i < model.size(); ++i) {
    ss_res += (model[i] - observed[i]) * (model[i] - observed[i]);
    ss_tot += (observed[i] - mean) * (observed[i] - mean);
  }
  if (!(ss_tot > 0.0)) throw std::invalid_argument("binned_r_squared: flat histogram");
  return 1.0 - ss_res / ss_tot;
}

DensityScanResult infer_surface_density_from_curve(const T1Curve& target,
                                                   const DepthDistribution& depth,
                                                   double tau_c_surf, double gamma_bulk,
                                                   const Eigen::VectorXd& scan,
                                                   const SurfaceScanOptions& options,
                                                   const PhysicalConstants& constants) {
  target.validate();
  if (scan.size() == 0) throw std::invalid_argument("surface scan: empty grid");
  for (Eigen::Index i = 0; i < scan.size(); ++i) {
    if (!(scan[i] >= 0.0)) throw std::invalid_argument("surface scan: negative density");
  }

  // One shared depth sample keeps the score a smooth function of the density.
  const std::vector<double> depths =
      sample_depths(depth, options.n_nv, derive_seed(options.seed, "surface_scan_depths", 0));

  SurfaceNoiseModel model;
  model.tau_c_surf = tau_c_surf;
  model.gamma_bulk = gamma_bulk;
  model.surface_spin.tau_c = tau_c_surf;

  Eigen::VectorXd scores(scan.size());
  RatePopulation pop;
  pop.rates.resize(static_cast<Eigen::Index>(options.n_nv));
  for (Eigen::Index k = 0; k < scan.size(); ++k) {
    model.sigma_surf = scan[k];
    const double c_surf = model.c_surf(constants);
    for (std::size_t i = 0; i < options.n_nv; ++i) {
      pop.rates[static_cast<Eigen::Index>(i)] = background_rate(c_surf, gamma_bulk, depths[i]);
    }
    const T1Curve synth = synthesize_curve(pop, target.tau, options.workers);
    scores[k] = curve_r_squared(synth.intensity, target.intensity);
  }
  return make_scan_result(scan, scores, options.interval_fraction);
}

DensityScanResult infer_c_surf_from_histogram(std::span<const double> rates,
                                              const DepthDistribution& depth, double gamma_bulk,
                                              const Eigen::VectorXd& scan,
                                              const CsurfScanOptions& options) {
  if (rates.size() < 50) {
    throw std::invalid_argument("c_surf inference: at least 50 rates required");
  }
  if (scan.size() == 0) throw std::invalid_argument("c_surf scan: empty grid");

  // Rates span several decades; bin on the log of the surface excess
  // (Freedman-Diaconis count on that scale) so the score is not dominated
  // by sparsely populated far-tail bins.
  std::vector<double> log_excess;
  log_excess.reserve(rates.size());
  for (const double r : rates) {
    if (r > gamma_bulk) log_excess.push_back(std::log(r - gamma_bulk));
  }
  if (log_excess.size() < 50) {
    throw std::invalid_argument("c_surf inference: too few rates above gamma_bulk");
  }
  const Eigen::VectorXd edges = freedman_diaconis_edges(log_excess);
  const auto bins = edges.size() - 1;

  Eigen::VectorXd observed = Eigen::VectorXd::Zero(bins);  // probability per bin
  const double lo = edges[0];
  const double hi = edges[bins];
  for (const double v : log_excess) {
    auto b = std::min(static_cast<Eigen::Index>((v - lo) / (hi - lo) * bins), bins - 1);
    while (b > 0 && v < edges[b]) --b;
    while (b < bins - 1 && v >= edges[b + 1]) ++b;
    observed[b] += 1.0 / static_cast<double>(log_excess.size());
  }

  Eigen::VectorXd scores(scan.size());
  Eigen::VectorXd model_mass(bins);
  for (Eigen::Index k = 0; k < scan.size(); ++k) {
    for (Eigen::Index b = 0; b < bins; ++b) {
      model_mass[b] =
          background_rate_cdf(gamma_bulk + std::exp(edges[b + 1]), depth, scan[k],
                              gamma_bulk) -
          background_rate_cdf(gamma_bulk + std::exp(edges[b]), depth, scan[k], gamma_bulk);
    }
    scores[k] = binned_r_squared(model_mass, observed);
  }
  return make_scan_result(scan, scores, options.interval_fraction);
}

namespace {

struct EstimatorRates {
  double weighted = 0.0;
  double long_component = 0.0;
  double stretched = 0.0;
  bool converged = true;
};

EstimatorRates estimate_rates(const T1Curve& curve, const FitOptions& options = {}) {
  EstimatorRates rates;
  const FitResult biexp_fit = fit(curve, DecayFamily::biexp, options);
  const FitResult stretched_fit = fit(curve, DecayFamily::stretched, options);
  rates.converged = biexp_fit.converged && stretched_fit.converged;
  rates.weighted = biexp_fit.derived_rates.at("gamma_w");
  rates.long_component = biexp_fit.derived_rates.at("gamma_long");
  rates.stretched = stretched_fit.derived_rates.at("gamma_stre");
  return rates;
}

// Per-NV plane-induced accelerations for one density, each NV surrounded by
// an independently realized 40 x 40 nm patch.
std::vector<double> plane_accelerations(const PlaneResponseConfig& config, double density,
                                        std::span<const double> depths,
                                        std::uint64_t density_index) {
  LabelPlane plane;
  plane.density_nm2 = density;
  plane.height_nm = config.plane_height_nm;
  plane.labels_per_point = config.labels_per_point;

  const Region region = Region::square(config.region_side_nm);
  const double tilt = axis_tilt_angle(config.background.surface.axis_tilt);

  std::vector<double> deltas(depths.size());
  parallel_for(depths.size(), config.workers, [&](std::size_t i) {
    const Scene scene =
        build_plane_scene(plane, region, config.label_spec,
                          derive_seed(config.seed, "plane_scene",
                                      density_index * depths.size() + i));
    NvCenter nv;
    nv.depth_nm = depths[i];
    nv.axis_tilt_rad = tilt;
    deltas[i] = nv_signal(nv, scene, config.background.constants).delta_gamma;
  });
  return deltas;
}

}  // namespace

SensitivityTable sensitivity_compare(const Eigen::VectorXd& densities,
                                     const PlaneResponseConfig& config) {
  if (densities.size() < 2) {
    throw std::invalid_argument("sensitivity_compare: need at least two densities");
  }

  const std::vector<double> depths = sample_depths(
      config.background.depth, config.n_nv, derive_seed(config.seed, "plane_depths", 0));
  const double c_surf = config.background.surface.c_surf(config.background.constants);

  RatePopulation background;
  background.rates.resize(static_cast<Eigen::Index>(config.n_nv));
  for (std::size_t i = 0; i < config.n_nv; ++i) {
    background.rates[static_cast<Eigen::Index>(i)] =
        background_rate(c_surf, config.background.surface.gamma_bulk, depths[i]);
  }

  const Eigen::VectorXd grid = resolve_tau_grid(background, config.t_max, config.tau_points);
  const T1Curve bg_curve = synthesize_curve(background, grid, config.workers);
  const EstimatorRates bg_rates = estimate_rates(bg_curve);

  SensitivityTable table;
  table.rows.reserve(static_cast<std::size_t>(densities.size()));
  RatePopulation shifted;
  shifted.rates.resize(background.rates.size());
  for (Eigen::Index k = 0; k < densities.size(); ++k) {
    const std::vector<double> deltas =
        plane_accelerations(config, densities[k], depths, static_cast<std::uint64_t>(k));
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      shifted.rates[static_cast<Eigen::Index>(i)] =
          background.rates[static_cast<Eigen::Index>(i)] + deltas[i];
    }
    const T1Curve curve = synthesize_curve(shifted, grid, config.workers);
    const EstimatorRates with_protein = estimate_rates(curve);

    SensitivityRow row;
    row.density = densities[k];
    row.dg_weighted = with_protein.weighted - bg_rates.weighted;
    row.dg_long = with_protein.long_component - bg_rates.long_component;
    row.dg_stretched = with_protein.stretched - bg_rates.stretched;
    row.dg_true = pairwise_sum(deltas) / static_cast<double>(deltas.size());
    row.fits_converged = with_protein.converged && bg_rates.converged;
    table.rows.push_back(row);
  }

  std::vector<double> xs, yw, yl, ys, yt;
  for (const auto& row : table.rows) {
    if (!row.fits_converged) continue;
    xs.push_back(row.density);
    yw.push_back(row.dg_weighted);
    yl.push_back(row.dg_long);
    ys.push_back(row.dg_stretched);
    yt.push_back(row.dg_true);
  }
  table.slope_weighted = ols_fit(xs, yw).slope;
  table.slope_long = ols_fit(xs, yl).slope;
  table.slope_stretched = ols_fit(xs, ys).slope;
  table.slope_true = ols_fit(xs, yt).slope;
  return table;
}

SpacingResult infer_label_spacing(double delta_gamma, double delta_gamma_sd,
                                  const Eigen::VectorXd& densities,
                                  const PlaneResponseConfig& config) {
  if (!(delta_gamma > 0.0)) {
    throw std::domain_error("infer_label_spacing: delta_gamma must be positive");
  }
  if (!(delta_gamma_sd >= 0.0)) {
    throw std::domain_error("infer_label_spacing: delta_gamma_sd must be non-negative");
  }

  // Invert through the mean ensemble response (the population average of the
  // per-NV accelerations), the quantity the linear response plot tracks.
  const SensitivityTable table = sensitivity_compare(densities, config);
  std::vector<double> xs, mean_response;
  for (const auto& row : table.rows) {
    xs.push_back(row.density);
    mean_response.push_back(row.dg_true);
  }
  const LinearFit line = ols_fit(xs, mean_response);
  if (!(line.slope > 0.0)) {
    throw std::runtime_error("infer_label_spacing: simulated response is not increasing");
  }

  SpacingResult result;
  result.scanned_densities = Eigen::Map<const Eigen::VectorXd>(
      xs.data(), static_cast<Eigen::Index>(xs.size()));
  result.delta_gammas = Eigen::Map<const Eigen::VectorXd>(
      mean_response.data(), static_cast<Eigen::Index>(mean_response.size()));
  result.slope = line.slope;
  result.intercept = line.intercept;

  const auto density_of = [&](double dg) { return (dg - line.intercept) / line.slope; };
  const auto spacing_of = [](double density) {
    return density > 0.0 ? 1.0 / std::sqrt(density) : std::numeric_limits<double>::infinity();
  };
  result.density_best = density_of(delta_gamma);
  result.density_low = density_of(delta_gamma - delta_gamma_sd);
  result.density_high = density_of(delta_gamma + delta_gamma_sd);

  // Signals at or below the simulated response floor cannot bound the
  // spacing from above; report the open interval instead of failing. The
  // floor is the fitted intercept clamped at zero signal, since the true
  // response passes through the origin.
  const double floor = std::max(line.intercept, 0.0);
  result.unbounded_above = delta_gamma - delta_gamma_sd <= floor;
  if (result.unbounded_above) result.density_low = 0.0;
  result.spacing_best = spacing_of(result.density_best);
  result.spacing_low = spacing_of(result.density_high);
  result.spacing_high = spacing_of(result.density_low);
  return result;
}

std::vector<SingleNvSignal> simulate_single_nv_signals(const SingleNvSimConfig& config) {
  if (config.n_nv < 1) throw std::invalid_argument("single NV sim: n_nv must be >= 1");
  if (!(config.sigma_sa >= 0.0)) {
    throw std::invalid_argument("single NV sim: sigma_sa must be non-negative");
  }

  const double c_surf = config.surface.c_surf(config.constants);
  const std::vector<double> depths =
      sample_depths(config.depth, config.n_nv, derive_seed(config.seed, "nv_depths", 0));
  const double tilt = axis_tilt_angle(config.surface.axis_tilt);
  const auto cols = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(config.n_nv))));

  std::vector<SingleNvSignal> all(config.n_nv);
  parallel_for(config.n_nv, config.workers, [&](std::size_t i) {
    NvCenter nv;
    nv.lateral_nm = Eigen::Vector2d(static_cast<double>(i % cols) * config.lateral_spacing_nm,
                                    static_cast<double>(i / cols) * config.lateral_spacing_nm);
    nv.depth_nm = depths[i];
    nv.axis_tilt_rad = tilt;
    nv.gamma_bg = background_rate(c_surf, config.surface.gamma_bulk, depths[i]);

    const Scene scene = build_sa_scene(config.sigma_sa,
                                       Region::square(config.region_side_nm, nv.lateral_nm),
                                       config.sa, derive_seed(config.seed, "nv_scene", i));
    const SceneSignal signal = nv_signal(nv, scene, config.constants);

    all[i].gamma_bg = nv.gamma_bg;
    all[i].delta_gamma = signal.delta_gamma;
    all[i].max_share = signal.max_share();
    all[i].depth_nm = depths[i];
  });

  std::vector<SingleNvSignal> retained;
  retained.reserve(all.size());
  for (const auto& s : all) {
    if (config.gamma_bg_max > 0.0 && !(s.gamma_bg < config.gamma_bg_max)) continue;
    retained.push_back(s);
  }
  return retained;
}

DensityScanResult infer_sa_density(std::span<const double> observed_deltas,
                                   const SingleNvSimConfig& base, const Eigen::VectorXd& scan,
                                   const SaDensityScanOptions& options) {
  if (observed_deltas.size() < 30) {
    throw std::invalid_argument("sa density inference: at least 30 observations required");
  }
  if (scan.size() == 0) throw std::invalid_argument("sa scan: empty grid");

  std::vector<double> observed;
  observed.reserve(observed_deltas.size());
  for (const double d : observed_deltas) {
    if (d < options.delta_cutoff) observed.push_back(d);
  }
  const Eigen::VectorXd edges = freedman_diaconis_edges(observed);
  const Eigen::VectorXd observed_density = histogram_density(observed, edges);

  Eigen::VectorXd scores(scan.size());
  for (Eigen::Index k = 0; k < scan.size(); ++k) {
    SingleNvSimConfig sim = base;
    sim.sigma_sa = scan[k];
    const std::vector<SingleNvSignal> events = simulate_single_nv_signals(sim);
    std::vector<double> deltas;
    deltas.reserve(events.size());
    for (const auto& e : events) {
      if (e.delta_gamma < options.delta_cutoff) deltas.push_back(e.delta_gamma);
    }
    if (deltas.size() < 4) {
      scores[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    scores[k] = binned_r_squared(histogram_density(deltas, edges), observed_density);
  }
  return make_scan_result(scan, scores, options.interval_fraction);
}

ProbabilityMap probability_map(const SingleNvSimConfig& sim, const ProbabilityMapConfig& map) {
  if (map.gamma_bg_edges.size() < 2 || map.delta_gamma_edges.size() < 2) {
    throw std::invalid_argument("probability_map: need at least one bin per axis");
  }

  const std::vector<SingleNvSignal> events = simulate_single_nv_signals(sim);

  ProbabilityMap out;
  out.gamma_bg_edges = map.gamma_bg_edges;
  out.delta_gamma_edges = map.delta_gamma_edges;
  const auto n_cols = map.gamma_bg_edges.size() - 1;
  const auto n_rows = map.delta_gamma_edges.size() - 1;
  out.counts = Eigen::MatrixXd::Zero(n_rows, n_cols);
  out.density = Eigen::MatrixXd::Zero(n_rows, n_cols);
  out.p_single = Eigen::MatrixXd::Constant(n_rows, n_cols,
                                           std::numeric_limits<double>::quiet_NaN());

  bool any_signal = false;
  for (const auto& e : events) {
    if (e.delta_gamma > 0.0) {
      any_signal = true;
      break;
    }
  }
  if (events.empty() || !any_signal) {
    out.empty = true;
    return out;
  }

  const auto locate = [](const Eigen::VectorXd& edges, double v) -> Eigen::Index {
    if (v < edges[0] || v > edges[edges.size() - 1]) return -1;
    Eigen::Index b = std::min<Eigen::Index>(
        static_cast<Eigen::Index>((v - edges[0]) / (edges[edges.size() - 1] - edges[0]) *
                                  static_cast<double>(edges.size() - 1)),
        edges.size() - 2);
    while (b > 0 && v < edges[b]) --b;
    while (b < edges.size() - 2 && v >= edges[b + 1]) ++b;
    return b;
  };

  Eigen::MatrixXd dominant = Eigen::MatrixXd::Zero(n_rows, n_cols);
  for (const auto& e : events) {
    const Eigen::Index col = locate(map.gamma_bg_edges, e.gamma_bg);
    const Eigen::Index row = locate(map.delta_gamma_edges, e.delta_gamma);
    if (col < 0 || row < 0) continue;
    out.counts(row, col) += 1.0;
    if (e.max_share > map.dominance_threshold) dominant(row, col) += 1.0;
  }

  for (Eigen::Index c = 0; c < n_cols; ++c) {
    const double total = out.counts.col(c).sum();
    if (total == 0.0) continue;
    for (Eigen::Index r = 0; r < n_rows; ++r) {
      const double width = map.delta_gamma_edges[r + 1] - map.delta_gamma_edges[r];
      out.density(r, c) = out.counts(r, c) / (total * width);
      if (out.counts(r, c) > 0.0) {
        out.p_single(r, c) = dominant(r, c) / out.counts(r, c);
      }
    }
  }

  // Contour of p_single = contour_level: first upward crossing per column,
  // interpolated between bin centers over bins that hold events.
  for (Eigen::Index c = 0; c < n_cols; ++c) {
    const double x = 0.5 * (map.gamma_bg_edges[c] + map.gamma_bg_edges[c + 1]);
    double prev_p = std::numeric_limits<double>::quiet_NaN();
    double prev_y = 0.0;
    for (Eigen::Index r = 0; r < n_rows; ++r) {
      if (!std::isfinite(out.p_single(r, c))) continue;
      const double y = 0.5 * (map.delta_gamma_edges[r] + map.delta_gamma_edges[r + 1]);
      const double p = out.p_single(r, c);
      if (!std::isfinite(prev_p)) {
        if (p >= map.contour_level) {
          out.contour.emplace_back(x, y);
          break;
        }
      } else if ((prev_p - map.contour_level) * (p - map.contour_level) <= 0.0 &&
                 p != prev_p) {
        const double frac = (map.contour_level - prev_p) / (p - prev_p);
        out.contour.emplace_back(x, prev_y + frac * (y - prev_y));
        break;
      }
      prev_p = p;
      prev_y = y;
    }
  }
  return out;
}

}  // namespace nvrelax
