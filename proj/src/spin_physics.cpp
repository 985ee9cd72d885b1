#include "nvrelax/spin_physics.hpp"

#include <cmath>
#include <stdexcept>

namespace nvrelax {

void SpinLabelSpec::validate() const {
  if (spin_2s < 1 || spin_2s > 7) {
    throw std::domain_error("SpinLabelSpec: 2S must lie in {1, ..., 7}");
  }
  if (!(gamma > 0.0)) throw std::domain_error("SpinLabelSpec: gamma must be positive");
  if (!(tau_c > 0.0)) throw std::domain_error("SpinLabelSpec: tau_c must be positive");
}

SpinLabelSpec SpinLabelSpec::mn2() { return SpinLabelSpec{}; }

SpinLabelSpec SpinLabelSpec::electron() {
  SpinLabelSpec s;
  s.spin_2s = 1;
  s.gamma = kFreeElectronGamma;
  s.tau_c = 0.28e-9;
  return s;
}

void LabelSite::validate() const {
  spec.validate();
  if (!(position.squaredNorm() > 0.0)) {
    throw std::domain_error("LabelSite: label may not coincide with the NV");
  }
  if (multiplicity < 1) throw std::domain_error("LabelSite: multiplicity must be >= 1");
}

void RateEquationParams::validate() const {
  if (!(k01 >= 0.0) || !(k11 >= 0.0)) {
    throw std::domain_error("RateEquationParams: rates must be non-negative");
  }
}

void Populations::validate() const {
  if (!(n0 >= 0.0 && n_minus >= 0.0 && n_plus >= 0.0)) {
    throw std::domain_error("Populations: components must be non-negative");
  }
  if (std::abs(sum() - 1.0) > 1e-9) {
    throw std::domain_error("Populations: components must sum to 1");
  }
}

double transverse_coupling(const LabelSite& site, const Eigen::Vector3d& axis,
                           const PhysicalConstants& constants) {
  site.validate();
  const double axis_norm2 = axis.squaredNorm();
  if (!(axis_norm2 > 0.0)) throw std::domain_error("transverse_coupling: zero axis");

  const double r2 = site.position.squaredNorm();
  const double r6 = r2 * r2 * r2;
  const double cos_theta2 =
      (site.position.dot(axis) * site.position.dot(axis)) / (r2 * axis_norm2);
  const double sin_theta2 = 1.0 - cos_theta2;

  const double s = site.spec.spin_s();
  const double prefactor = constants.mu0 * site.spec.gamma * constants.gamma_nv *
                           constants.hbar / (4.0 * std::numbers::pi);
  return site.multiplicity * (s * (s + 1.0) / 3.0) * prefactor * prefactor *
         (2.0 + 3.0 * sin_theta2) / r6;
}

double lorentzian_weight(double tau_c, double omega) {
  if (!(tau_c > 0.0)) throw std::domain_error("lorentzian_weight: tau_c must be positive");
  if (!(omega >= 0.0)) throw std::domain_error("lorentzian_weight: omega must be non-negative");
  const double x = omega * tau_c;
  return 2.0 * tau_c / (1.0 + x * x);
}

double induced_rate(std::span<const LabelSite> sites, const Eigen::Vector3d& axis,
                    const PhysicalConstants& constants) {
  double total = 0.0;
  for (const LabelSite& site : sites) {
    const double b2 = transverse_coupling(site, axis, constants);
    total += 1.5 * b2 * lorentzian_weight(site.spec.tau_c, constants.omega0);
  }
  return total;
}

Populations solve_populations(const RateEquationParams& params, const Populations& init,
                              double t) {
  params.validate();
  init.validate();
  if (!(t >= 0.0)) throw std::domain_error("solve_populations: t must be non-negative");

  const double third = 1.0 / 3.0;
  const double e0 = std::exp(-3.0 * params.k01 * t);
  const double e1 = std::exp(-(params.k01 + 2.0 * params.k11) * t);
  const double dn0 = init.n0 - third;
  const double asym = 0.5 * (init.n_plus - init.n_minus);

  Populations out;
  out.n0 = third + dn0 * e0;
  out.n_minus = third - asym * e1 - 0.5 * dn0 * e0;
  out.n_plus = third + asym * e1 - 0.5 * dn0 * e0;
  return out;
}

double t1_signal(double k01, double t) {
  if (!(k01 >= 0.0)) throw std::domain_error("t1_signal: k01 must be non-negative");
  if (!(t >= 0.0)) throw std::domain_error("t1_signal: t must be non-negative");
  return std::exp(-3.0 * k01 * t);
}

}  // namespace nvrelax
