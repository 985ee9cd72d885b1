#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

namespace nvrelax {

// Normalized T1 relaxation curve on a strictly increasing dark-time grid.
struct T1Curve {
  Eigen::VectorXd tau;        // s
  Eigen::VectorXd intensity;  // dimensionless, ~1 at tau = 0
  std::optional<Eigen::VectorXd> noise_sd;

  void validate() const;
};

// Heterogeneous single-NV rate population; weights default to uniform.
struct RatePopulation {
  Eigen::VectorXd rates;  // s^-1
  std::optional<Eigen::VectorXd> weights;

  void validate() const;
  // Weighted mean rate; equals the initial slope of the mixture curve.
  double mean_rate() const;
};

// Mixture curve intensity[j] = sum_i w_i exp(-rate_i * tau_j). The per-tau
// sums run through the fixed pairwise reduction, so results are bit-stable
// for any worker count.
T1Curve synthesize_curve(const RatePopulation& pop, const Eigen::VectorXd& tau_grid,
                         int workers = 1);

// Adds i.i.d. Gaussian perturbations of width sd to every intensity point.
T1Curve add_measurement_noise(const T1Curve& curve, double sd, std::uint64_t seed);

// {0} followed by n_points-1 log-spaced times from t_max/1000 to t_max.
Eigen::VectorXd default_tau_grid(double t_max, int n_points);

}  // namespace nvrelax
