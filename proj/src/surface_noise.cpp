#include "nvrelax/surface_noise.hpp"

#include <cmath>
#include <stdexcept>

#include "nvrelax/random.hpp"

namespace nvrelax {

namespace {

constexpr double kNmToM = 1e-9;
constexpr double kPerNm2ToPerM2 = 1e18;
constexpr double kM4ToNm4 = 1e36;

double standard_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// A^2 = S(S+1)/3 * (mu0 gamma_i gamma_nv hbar / 4pi)^2, SI.
double coupling_prefactor(const SpinLabelSpec& spec, const PhysicalConstants& constants) {
  const double s = spec.spin_s();
  const double pref = constants.mu0 * spec.gamma * constants.gamma_nv * constants.hbar /
                      (4.0 * std::numbers::pi);
  return (s * (s + 1.0) / 3.0) * pref * pref;
}

double tilt_geometry_factor(AxisTilt tilt) {
  switch (tilt) {
    case AxisTilt::magic:
      return 2.0 * std::numbers::pi;
    case AxisTilt::normal:
      return 1.5 * std::numbers::pi;
  }
  throw std::domain_error("unknown axis tilt");
}

}  // namespace

void DepthDistribution::validate() const {
  if (!(sigma > 0.0)) throw std::domain_error("DepthDistribution: sigma must be positive");
  if (!(d_min > 0.0)) throw std::domain_error("DepthDistribution: d_min must be positive");
}

double DepthDistribution::mass_above_min() const {
  const double alpha = (d_min - mu) / sigma;
  return 0.5 * std::erfc(alpha / std::sqrt(2.0));
}

double DepthDistribution::mean() const {
  const double alpha = (d_min - mu) / sigma;
  const double z = mass_above_min();
  return mu + sigma * standard_normal_pdf(alpha) / z;
}

double DepthDistribution::variance() const {
  const double alpha = (d_min - mu) / sigma;
  const double z = mass_above_min();
  const double ratio = standard_normal_pdf(alpha) / z;
  return sigma * sigma * (1.0 + alpha * ratio - ratio * ratio);
}

DepthDistribution DepthDistribution::ensemble() { return DepthDistribution{6.5, 2.8, 2.0}; }
DepthDistribution DepthDistribution::pillars() { return DepthDistribution{5.5, 2.8, 2.0}; }
DepthDistribution DepthDistribution::pillars_alt() { return DepthDistribution{5.5, 2.2, 2.0}; }

double axis_tilt_angle(AxisTilt tilt) {
  return tilt == AxisTilt::magic ? magic_angle() : 0.0;
}

void SurfaceNoiseModel::validate() const {
  if (!(sigma_surf >= 0.0)) {
    throw std::domain_error("SurfaceNoiseModel: sigma_surf must be non-negative");
  }
  if (!(tau_c_surf > 0.0)) {
    throw std::domain_error("SurfaceNoiseModel: tau_c_surf must be positive");
  }
  if (!(gamma_bulk >= 0.0)) {
    throw std::domain_error("SurfaceNoiseModel: gamma_bulk must be non-negative");
  }
  surface_spin.validate();
}

double SurfaceNoiseModel::c_surf(const PhysicalConstants& constants) const {
  if (c_surf_override) return *c_surf_override;
  validate();
  // c_surf = [3 tau_c / (1 + (omega0 tau_c)^2)] * geom * A^2 * sigma_surf, in s^-1 nm^4.
  const double spectral = 1.5 * lorentzian_weight(tau_c_surf, constants.omega0);
  const double coupling_si = tilt_geometry_factor(axis_tilt) *
                             coupling_prefactor(surface_spin, constants) * sigma_surf *
                             kPerNm2ToPerM2;
  return spectral * coupling_si * kM4ToNm4;
}

double surface_coupling(const SurfaceNoiseModel& model, double depth_nm,
                        const SpinLabelSpec& spec, const PhysicalConstants& constants) {
  if (!(depth_nm > 0.0)) throw std::domain_error("surface_coupling: depth must be positive");
  model.validate();
  const double d = depth_nm * kNmToM;
  const double d4 = d * d * d * d;
  return tilt_geometry_factor(model.axis_tilt) * coupling_prefactor(spec, constants) *
         model.sigma_surf * kPerNm2ToPerM2 / d4;
}

double background_rate(double c_surf, double gamma_bulk, double depth_nm) {
  if (!(depth_nm > 0.0)) throw std::domain_error("background_rate: depth must be positive");
  const double d4 = depth_nm * depth_nm * depth_nm * depth_nm;
  return gamma_bulk + c_surf / d4;
}

double depth_for_rate(double c_surf, double gamma_bulk, double gamma) {
  if (!(gamma > gamma_bulk)) {
    throw std::domain_error("depth_for_rate: gamma must exceed gamma_bulk");
  }
  return std::pow(c_surf / (gamma - gamma_bulk), 0.25);
}

std::vector<double> sample_depths(const DepthDistribution& dist, std::size_t n,
                                  std::uint64_t seed) {
  dist.validate();
  if (n < 1) throw std::domain_error("sample_depths: n must be >= 1");
  constexpr int kMaxAttempts = 1'000'000;

  std::vector<double> depths(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, "depth", i));
    double d = 0.0;
    int attempt = 0;
    do {
      if (++attempt > kMaxAttempts) {
        throw std::runtime_error("sample_depths: rejection budget exhausted; "
                                 "distribution has vanishing mass above d_min");
      }
      d = dist.mu + dist.sigma * rng.gaussian();
    } while (d < dist.d_min);
    depths[i] = d;
  }
  return depths;
}

double background_rate_pdf(double gamma, const DepthDistribution& dist, double c_surf,
                           double gamma_bulk) {
  dist.validate();
  if (!(c_surf > 0.0)) throw std::domain_error("background_rate_pdf: c_surf must be positive");
  if (!(gamma > gamma_bulk)) return 0.0;

  const double excess = gamma - gamma_bulk;
  const double dmin4 = dist.d_min * dist.d_min * dist.d_min * dist.d_min;
  if (excess > c_surf / dmin4) return 0.0;  // depths below d_min carry no mass

  // Change of variables d = (c_surf / (gamma - gamma_bulk))^(1/4) applied to
  // the truncated Gaussian depth density.
  const double d = std::pow(c_surf / excess, 0.25);
  const double z = (d - dist.mu) / dist.sigma;
  const double norm = 1.0 / dist.mass_above_min();
  return norm * std::pow(c_surf, 0.25) /
         (4.0 * dist.sigma * std::sqrt(2.0 * std::numbers::pi) * std::pow(excess, 1.25)) *
         std::exp(-0.5 * z * z);
}

double background_rate_cdf(double gamma, const DepthDistribution& dist, double c_surf,
                           double gamma_bulk) {
  dist.validate();
  if (!(c_surf > 0.0)) throw std::domain_error("background_rate_cdf: c_surf must be positive");
  if (!(gamma > gamma_bulk)) return 0.0;
  // Gamma <= gamma corresponds to depths >= d(gamma), clamped at d_min.
  const double d = std::max(std::pow(c_surf / (gamma - gamma_bulk), 0.25), dist.d_min);
  const double upper = 0.5 * std::erfc((d - dist.mu) / (dist.sigma * std::sqrt(2.0)));
  return std::min(upper / dist.mass_above_min(), 1.0);
}

}  // namespace nvrelax
