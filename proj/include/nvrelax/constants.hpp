#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nvrelax {

// Physical constants used throughout the relaxation model. Strict SI:
// meters, seconds, tesla, rad/s. Nanometers appear only at external
// interfaces (file formats, scene geometry, CLI flags).
struct PhysicalConstants {
  double mu0 = 1.25663706212e-6;      // vacuum permeability, T*m/A
  double hbar = 1.054571817e-34;      // reduced Planck constant, J*s
  double gamma_nv = 1.76085963e11;    // NV electron gyromagnetic ratio, rad/s/T
  double omega0 = two_pi() * 2.87e9;  // NV zero-field splitting, rad/s

  static constexpr double two_pi() { return 2.0 * std::numbers::pi; }

  void validate() const {
    if (!(mu0 > 0.0 && hbar > 0.0 && gamma_nv > 0.0 && omega0 > 0.0)) {
      throw std::domain_error("PhysicalConstants: all constants must be strictly positive");
    }
  }
};

// Free-electron gyromagnetic ratio (g ~= 2), rad/s/T. Default for both the
// NV center and surface dangling-bond spins.
inline constexpr double kFreeElectronGamma = 1.76085963e11;

// NV-axis tilt from the surface normal on a [100]-cut diamond. The closed
// forms of the planar surface integral require the exact arccos(1/sqrt(3)),
// not the rounded 54.7 degrees.
inline double magic_angle() { return std::acos(1.0 / std::sqrt(3.0)); }

}  // namespace nvrelax
