#include "nvrelax/ensemble.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nvrelax/parallel.hpp"
#include "nvrelax/random.hpp"

namespace nvrelax {

void T1Curve::validate() const {
  if (tau.size() != intensity.size()) {
    throw std::domain_error("T1Curve: tau and intensity lengths differ");
  }
  if (tau.size() < 4) throw std::domain_error("T1Curve: at least 4 points required");
  for (Eigen::Index i = 1; i < tau.size(); ++i) {
    if (!(tau[i] > tau[i - 1])) {
      throw std::domain_error("T1Curve: tau grid must be strictly increasing");
    }
  }
  if (noise_sd && noise_sd->size() != intensity.size()) {
    throw std::domain_error("T1Curve: noise_sd length differs from intensity");
  }
}

void RatePopulation::validate() const {
  if (rates.size() == 0) throw std::domain_error("RatePopulation: empty population");
  for (Eigen::Index i = 0; i < rates.size(); ++i) {
    if (!(rates[i] > 0.0)) throw std::domain_error("RatePopulation: rates must be positive");
  }
  if (weights) {
    if (weights->size() != rates.size()) {
      throw std::domain_error("RatePopulation: weights length differs from rates");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < weights->size(); ++i) {
      if (!((*weights)[i] >= 0.0)) {
        throw std::domain_error("RatePopulation: weights must be non-negative");
      }
      sum += (*weights)[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::domain_error("RatePopulation: weights must sum to 1");
    }
  }
}

double RatePopulation::mean_rate() const {
  validate();
  const auto n = rates.size();
  std::vector<double> terms(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = weights ? (*weights)[i] : 1.0 / static_cast<double>(n);
    terms[static_cast<std::size_t>(i)] = w * rates[i];
  }
  return pairwise_sum(terms);
}

T1Curve synthesize_curve(const RatePopulation& pop, const Eigen::VectorXd& tau_grid,
                         int workers) {
  pop.validate();
  if (tau_grid.size() < 4) {
    throw std::domain_error("synthesize_curve: tau grid must have at least 4 points");
  }

  const auto n = pop.rates.size();
  const double uniform_w = 1.0 / static_cast<double>(n);

  T1Curve curve;
  curve.tau = tau_grid;
  curve.intensity.resize(tau_grid.size());
  parallel_for(static_cast<std::size_t>(tau_grid.size()), workers, [&](std::size_t j) {
    const double t = tau_grid[static_cast<Eigen::Index>(j)];
    std::vector<double> terms(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = pop.weights ? (*pop.weights)[i] : uniform_w;
      terms[static_cast<std::size_t>(i)] = w * std::exp(-pop.rates[i] * t);
    }
    curve.intensity[static_cast<Eigen::Index>(j)] = pairwise_sum(terms);
  });
  return curve;
}

T1Curve add_measurement_noise(const T1Curve& curve, double sd, std::uint64_t seed) {
  curve.validate();
  if (!(sd >= 0.0)) throw std::domain_error("add_measurement_noise: sd must be >= 0");

  T1Curve out = curve;
  if (sd > 0.0) {
    for (Eigen::Index j = 0; j < out.intensity.size(); ++j) {
      Rng rng(derive_seed(seed, "measurement_noise", static_cast<std::uint64_t>(j)));
      out.intensity[j] += sd * rng.gaussian();
    }
  }
  out.noise_sd = Eigen::VectorXd::Constant(out.intensity.size(), sd);
  return out;
}

Eigen::VectorXd default_tau_grid(double t_max, int n_points) {
  if (n_points < 4) throw std::domain_error("default_tau_grid: at least 4 points required");
  if (!(t_max > 0.0)) throw std::domain_error("default_tau_grid: t_max must be positive");

  Eigen::VectorXd grid(n_points);
  grid[0] = 0.0;
  const double t_lo = t_max * 1e-3;
  const int m = n_points - 1;
  for (int i = 0; i < m; ++i) {
    const double frac = m > 1 ? static_cast<double>(i) / (m - 1) : 1.0;
    grid[i + 1] = t_lo * std::pow(t_max / t_lo, frac);
  }
  return grid;
}

}  // namespace nvrelax
