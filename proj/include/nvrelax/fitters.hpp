#pragma once

#include <map>
#include <string>
#include <variant>

#include "nvrelax/ensemble.hpp"

namespace nvrelax {

enum class DecayFamily { single_exp, biexp, stretched };

std::string family_name(DecayFamily family);
DecayFamily family_from_name(const std::string& name);

struct SingleExp {
  double amp = 1.0;
  double t1 = 1.0;  // s
};

struct Biexp {
  double amp_short = 0.5;
  double t_short = 1.0;  // s, canonically t_short <= t_long
  double amp_long = 0.5;
  double t_long = 1.0;  // s
};

struct StretchedExp {
  double amp = 1.0;
  double t1 = 1.0;   // s
  double beta = 1.0;  // in (0, 2]
};

struct DecayModel {
  std::variant<SingleExp, Biexp, StretchedExp> shape;

  DecayFamily family() const;
  double evaluate(double t) const;
  void validate() const;
};

struct FitResult {
  DecayModel model;
  double r_squared = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool collapsed = false;  // biexp degenerated to a single exponential
  std::map<std::string, double> derived_rates;
};

struct FitOptions {
  int max_iterations = 500;
  double step_tolerance = 1e-10;   // relative step size
  double grad_tolerance = 1e-12;   // infinity norm of the gradient
};

// Damped Gauss-Newton least squares in log-transformed parameters
// (amplitudes and times via log, beta via a logistic map into (0, 2)).
// Non-convergence is reported through the flag, not an exception.
FitResult fit(const T1Curve& curve, DecayFamily family, const FitOptions& options = {});

// Amplitude-weighted characteristic rate of a converged biexponential fit:
// (A_short/T_short + A_long/T_long) / (A_short + A_long).
double weighted_rate(const FitResult& fit);

// 1 - SS_res / SS_tot with SS_tot about the intensity mean.
double r_squared(const T1Curve& curve, const DecayModel& model);

}  // namespace nvrelax
