#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nvrelax/constants.hpp"
#include "nvrelax/spin_physics.hpp"

namespace nvrelax {

// NV implantation depth law: Gaussian truncated from below at d_min.
// Depths are in nanometers, matching the external parameterization.
struct DepthDistribution {
  double mu = 6.5;     // nm
  double sigma = 2.8;  // nm
  double d_min = 2.0;  // nm

  void validate() const;

  // Probability mass of the untruncated Gaussian above d_min.
  double mass_above_min() const;
  // Mean and variance of the truncated law (closed form).
  double mean() const;
  double variance() const;

  static DepthDistribution ensemble();    // bulk ensemble sample, mu 6.5, sigma 2.8
  static DepthDistribution pillars();     // nano-pillar sample, mu 5.5, sigma 2.8
  static DepthDistribution pillars_alt(); // nano-pillar sample with sigma 2.2 (see README)
};

enum class AxisTilt {
  magic,   // arccos(1/sqrt(3)), [100]-cut surface
  normal,  // 0
};

double axis_tilt_angle(AxisTilt tilt);

// Depth-dependent magnetic noise from surface paramagnetic impurities plus a
// depth-independent bulk bath.
struct SurfaceNoiseModel {
  double sigma_surf = 0.40;                      // areal impurity density, nm^-2
  double tau_c_surf = 0.28e-9;                   // s
  double gamma_bulk = 100.0;                     // s^-1
  AxisTilt axis_tilt = AxisTilt::magic;
  SpinLabelSpec surface_spin = SpinLabelSpec::electron();
  std::optional<double> c_surf_override;         // s^-1 nm^4; bypasses the derived value

  void validate() const;

  // Composite coefficient of the d^-4 background law, s^-1 nm^4. Derived
  // from (sigma_surf, tau_c_surf, axis_tilt) unless overridden.
  double c_surf(const PhysicalConstants& constants) const;
};

// Total squared transverse coupling of all surface impurities seen by an NV
// at depth d, in (rad/s)^2. Closed form of the planar dipolar integral:
//   2*pi  * A^2 * sigma_surf / d^4   (magic-angle axis)
//   3*pi/2* A^2 * sigma_surf / d^4   (surface-normal axis)
double surface_coupling(const SurfaceNoiseModel& model, double depth_nm,
                        const SpinLabelSpec& spec, const PhysicalConstants& constants);

// Background relaxation rate gamma_bulk + c_surf / d^4 (d in nm).
double background_rate(double c_surf, double gamma_bulk, double depth_nm);

// Inverse of background_rate in d.
double depth_for_rate(double c_surf, double gamma_bulk, double gamma);

// n truncated-Gaussian depths, rejection sampled on per-index substreams.
std::vector<double> sample_depths(const DepthDistribution& dist, std::size_t n,
                                  std::uint64_t seed);

// Probability density of the background rate under the truncated depth law,
// in seconds. Zero outside (gamma_bulk, gamma_bulk + c_surf/d_min^4].
double background_rate_pdf(double gamma, const DepthDistribution& dist, double c_surf,
                           double gamma_bulk);

// Cumulative distribution of the background rate (integral of the pdf).
double background_rate_cdf(double gamma, const DepthDistribution& dist, double c_surf,
                           double gamma_bulk);

}  // namespace nvrelax
