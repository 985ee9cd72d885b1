#pragma once

#include <Eigen/Dense>
#include <span>

#include "nvrelax/constants.hpp"

namespace nvrelax {

// One paramagnetic label species. Half-integer spins are stored as 2S to
// keep the quantum number exact.
struct SpinLabelSpec {
  int spin_2s = 5;                        // 2S; Mn(II) has S = 5/2
  double gamma = kFreeElectronGamma;      // rad/s/T
  double tau_c = 5.3051647697298445e-11;  // s; from the 3 GHz Mn(II) linewidth, 1/(2*pi*3e9)

  double spin_s() const { return 0.5 * static_cast<double>(spin_2s); }
  void validate() const;

  static SpinLabelSpec mn2();       // Mn(II), S = 5/2
  static SpinLabelSpec electron();  // surface dangling bond, S = 1/2, tau_c left to the noise model
};

// A point source of magnetic noise at a fixed offset from the NV center.
// `multiplicity` co-located spins fluctuate independently and add linearly.
struct LabelSite {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // m, relative to the NV
  int multiplicity = 1;
  SpinLabelSpec spec;

  void validate() const;
};

// Single- and double-quantum transition rates of the NV ground-state triplet.
struct RateEquationParams {
  double k01 = 0.0;  // s^-1, |0> <-> |+-1>
  double k11 = 0.0;  // s^-1, |+1> <-> |-1>

  void validate() const;
};

// Populations of (m_s = 0, -1, +1). Components sum to 1.
struct Populations {
  double n0 = 1.0;
  double n_minus = 0.0;
  double n_plus = 0.0;

  double sum() const { return n0 + n_minus + n_plus; }
  void validate() const;
};

// Squared transverse dipolar coupling b_perp^2 between the NV and one label
// site, in (rad/s)^2:
//   multiplicity * S(S+1)/3 * (mu0*gamma_i*gamma_nv*hbar / 4pi)^2 * (2 + 3 sin^2 theta) / r^6
// where theta is the angle between `axis` (NV quantization axis) and the
// NV->site direction.
double transverse_coupling(const LabelSite& site, const Eigen::Vector3d& axis,
                           const PhysicalConstants& constants);

// Lorentzian spectral weight 2*tau_c / (1 + (omega*tau_c)^2), in seconds.
double lorentzian_weight(double tau_c, double omega);

// Total relaxation acceleration from a bath of label sites:
//   sum_i 3 * b_perp_i^2 * tau_c_i / (1 + (omega0 * tau_c_i)^2)
double induced_rate(std::span<const LabelSite> sites, const Eigen::Vector3d& axis,
                    const PhysicalConstants& constants);

// Closed-form populations at time t for the triplet rate equation with
// single-quantum rate k01 and double-quantum rate k11.
Populations solve_populations(const RateEquationParams& params, const Populations& init, double t);

// Normalized T1 difference signal exp(-3 * k01 * t).
double t1_signal(double k01, double t);

}  // namespace nvrelax
