#include "nvrelax/fitters.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace nvrelax {

std::string family_name(DecayFamily family) {
  switch (family) {
    case DecayFamily::single_exp: return "single_exp";
    case DecayFamily::biexp: return "biexp";
    case DecayFamily::stretched: return "stretched";
  }
  throw std::domain_error("unknown decay family");
}

DecayFamily family_from_name(const std::string& name) {
  if (name == "single_exp" || name == "single") return DecayFamily::single_exp;
  if (name == "biexp") return DecayFamily::biexp;
  if (name == "stretched") return DecayFamily::stretched;
  throw std::invalid_argument("unknown decay family: " + name);
}

DecayFamily DecayModel::family() const {
  if (std::holds_alternative<SingleExp>(shape)) return DecayFamily::single_exp;
  if (std::holds_alternative<Biexp>(shape)) return DecayFamily::biexp;
  return DecayFamily::stretched;
}

double DecayModel::evaluate(double t) const {
  return std::visit(
      [t](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, SingleExp>) {
          return m.amp * std::exp(-t / m.t1);
        } else if constexpr (std::is_same_v<M, Biexp>) {
          return m.amp_short * std::exp(-t / m.t_short) + m.amp_long * std::exp(-t / m.t_long);
        } else {
          return t == 0.0 ? m.amp : m.amp * std::exp(-std::pow(t / m.t1, m.beta));
        }
      },
      shape);
}

void DecayModel::validate() const {
  std::visit(
      [](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, SingleExp>) {
          if (!(m.amp >= 0.0) || !(m.t1 > 0.0)) {
            throw std::domain_error("SingleExp: amp >= 0 and t1 > 0 required");
          }
        } else if constexpr (std::is_same_v<M, Biexp>) {
          if (!(m.amp_short >= 0.0) || !(m.amp_long >= 0.0) || !(m.t_short > 0.0) ||
              !(m.t_long > 0.0)) {
            throw std::domain_error("Biexp: amplitudes >= 0 and times > 0 required");
          }
          if (m.t_short > m.t_long) {
            throw std::domain_error("Biexp: canonical ordering t_short <= t_long violated");
          }
        } else {
          if (!(m.amp >= 0.0) || !(m.t1 > 0.0) || !(m.beta > 0.0 && m.beta <= 2.0)) {
            throw std::domain_error("StretchedExp: amp >= 0, t1 > 0, beta in (0, 2] required");
          }
        }
      },
      shape);
}

namespace {

constexpr double kBetaCap = 2.0;

double beta_from_q(double q) { return kBetaCap / (1.0 + std::exp(-q)); }
double q_from_beta(double beta) { return std::log(beta / (kBetaCap - beta)); }

int parameter_count(DecayFamily family) {
  switch (family) {
    case DecayFamily::single_exp: return 2;
    case DecayFamily::biexp: return 4;
    case DecayFamily::stretched: return 3;
  }
  return 0;
}

DecayModel model_from_params(DecayFamily family, const Eigen::VectorXd& x) {
  switch (family) {
    case DecayFamily::single_exp:
      return DecayModel{SingleExp{std::exp(x[0]), std::exp(x[1])}};
    case DecayFamily::biexp:
      return DecayModel{Biexp{std::exp(x[0]), std::exp(x[1]), std::exp(x[2]), std::exp(x[3])}};
    case DecayFamily::stretched:
      return DecayModel{StretchedExp{std::exp(x[0]), std::exp(x[1]), beta_from_q(x[2])}};
  }
  throw std::domain_error("unknown decay family");
}

// Residuals f(t_i) - y_i and the Jacobian in transformed coordinates.
void residuals_and_jacobian(DecayFamily family, const Eigen::VectorXd& x, const T1Curve& curve,
                            Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
  const auto n = curve.tau.size();
  const int p = parameter_count(family);
  r.resize(n);
  jac.resize(n, p);

  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = curve.tau[i];
    switch (family) {
      case DecayFamily::single_exp: {
        const double amp = std::exp(x[0]);
        const double t1 = std::exp(x[1]);
        const double f = amp * std::exp(-t / t1);
        r[i] = f - curve.intensity[i];
        jac(i, 0) = f;
        jac(i, 1) = f * (t / t1);
        break;
      }
      case DecayFamily::biexp: {
        const double as = std::exp(x[0]);
        const double ts = std::exp(x[1]);
        const double al = std::exp(x[2]);
        const double tl = std::exp(x[3]);
        const double fs = as * std::exp(-t / ts);
        const double fl = al * std::exp(-t / tl);
        r[i] = fs + fl - curve.intensity[i];
        jac(i, 0) = fs;
        jac(i, 1) = fs * (t / ts);
        jac(i, 2) = fl;
        jac(i, 3) = fl * (t / tl);
        break;
      }
      case DecayFamily::stretched: {
        const double amp = std::exp(x[0]);
        const double t1 = std::exp(x[1]);
        const double beta = beta_from_q(x[2]);
        const double u = t == 0.0 ? 0.0 : std::pow(t / t1, beta);
        const double f = amp * std::exp(-u);
        r[i] = f - curve.intensity[i];
        jac(i, 0) = f;
        jac(i, 1) = f * beta * u;
        // d beta / d q of the logistic map
        const double dbeta = beta * (1.0 - beta / kBetaCap);
        jac(i, 2) = (t == 0.0 || u == 0.0) ? 0.0 : -f * u * std::log(t / t1) * dbeta;
        break;
      }
    }
  }
}

struct LmOutcome {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
};

LmOutcome levenberg_marquardt(DecayFamily family, Eigen::VectorXd x, const T1Curve& curve,
                              const FitOptions& options) {
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  residuals_and_jacobian(family, x, curve, r, jac);
  double cost = 0.5 * r.squaredNorm();

  double lambda = 1e-3;
  LmOutcome out;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    out.iterations = iter;
    const Eigen::VectorXd grad = jac.transpose() * r;
    if (grad.lpNorm<Eigen::Infinity>() < options.grad_tolerance) {
      out.converged = true;
      break;
    }
    const Eigen::MatrixXd hess = jac.transpose() * jac;

    bool accepted = false;
    Eigen::VectorXd step;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd damped = hess;
      for (Eigen::Index k = 0; k < damped.rows(); ++k) {
        damped(k, k) += lambda * std::max(hess(k, k), 1e-12);
      }
      step = damped.ldlt().solve(-grad);
      const Eigen::VectorXd x_trial = x + step;
      Eigen::VectorXd r_trial;
      Eigen::MatrixXd jac_trial;
      residuals_and_jacobian(family, x_trial, curve, r_trial, jac_trial);
      const double cost_trial = 0.5 * r_trial.squaredNorm();
      if (std::isfinite(cost_trial) && cost_trial <= cost) {
        x = x_trial;
        r.swap(r_trial);
        jac.swap(jac_trial);
        cost = cost_trial;
        lambda = std::max(lambda / 3.0, 1e-14);
        accepted = true;
        break;
      }
      lambda *= 4.0;
      if (lambda > 1e14) break;
    }
    if (!accepted) break;  // stalled; converged stays false unless step already tiny

    if (step.norm() < options.step_tolerance * (x.norm() + options.step_tolerance)) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(x);
  return out;
}

// Log-linear regression ln y = ln A - t / T over strictly positive samples.
SingleExp single_exp_seed(const T1Curve& curve) {
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int m = 0;
  for (Eigen::Index i = 0; i < curve.tau.size(); ++i) {
    if (!(curve.intensity[i] > 0.0)) continue;
    const double t = curve.tau[i];
    const double ly = std::log(curve.intensity[i]);
    st += t;
    sy += ly;
    stt += t * t;
    sty += t * ly;
    ++m;
  }
  const double t_span = curve.tau[curve.tau.size() - 1] - curve.tau[0];
  if (m < 2) return SingleExp{std::max(curve.intensity.maxCoeff(), 1e-6), t_span};
  const double denom = m * stt - st * st;
  const double slope = denom != 0.0 ? (m * sty - st * sy) / denom : 0.0;
  const double intercept = (sy - slope * st) / m;
  SingleExp seed;
  seed.amp = std::exp(intercept);
  seed.t1 = slope < 0.0 ? -1.0 / slope : 10.0 * t_span;
  return seed;
}

double compute_r_squared(const T1Curve& curve, const DecayModel& model) {
  const double mean = curve.intensity.mean();
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (Eigen::Index i = 0; i < curve.tau.size(); ++i) {
    const double res = model.evaluate(curve.tau[i]) - curve.intensity[i];
    const double dev = curve.intensity[i] - mean;
    ss_res += res * res;
    ss_tot += dev * dev;
  }
  if (!(ss_tot > 0.0)) throw std::domain_error("r_squared: curve has zero variance");
  return 1.0 - ss_res / ss_tot;
}

double residual_norm_of(const T1Curve& curve, const DecayModel& model) {
  double ss = 0.0;
  for (Eigen::Index i = 0; i < curve.tau.size(); ++i) {
    const double res = model.evaluate(curve.tau[i]) - curve.intensity[i];
    ss += res * res;
  }
  return std::sqrt(ss);
}

FitResult finish_result(const T1Curve& curve, DecayModel model, int iterations, bool converged,
                        bool collapsed) {
  FitResult result;
  result.model = model;
  result.iterations = iterations;
  result.converged = converged;
  result.collapsed = collapsed;
  result.r_squared = compute_r_squared(curve, model);
  result.residual_norm = residual_norm_of(curve, model);
  switch (model.family()) {
    case DecayFamily::single_exp: {
      const auto& m = std::get<SingleExp>(model.shape);
      result.derived_rates["gamma"] = 1.0 / m.t1;
      if (collapsed) {
        result.derived_rates["gamma_w"] = 1.0 / m.t1;
        result.derived_rates["gamma_long"] = 1.0 / m.t1;
      }
      break;
    }
    case DecayFamily::biexp: {
      const auto& m = std::get<Biexp>(model.shape);
      const double total = m.amp_short + m.amp_long;
      result.derived_rates["gamma_w"] =
          (m.amp_short / m.t_short + m.amp_long / m.t_long) / total;
      result.derived_rates["gamma_long"] = 1.0 / m.t_long;
      break;
    }
    case DecayFamily::stretched: {
      const auto& m = std::get<StretchedExp>(model.shape);
      result.derived_rates["gamma_stre"] = 1.0 / m.t1;
      break;
    }
  }
  return result;
}

FitResult fit_single(const T1Curve& curve, const FitOptions& options) {
  const SingleExp seed = single_exp_seed(curve);
  Eigen::VectorXd x(2);
  x << std::log(seed.amp), std::log(seed.t1);
  const LmOutcome lm = levenberg_marquardt(DecayFamily::single_exp, x, curve, options);
  return finish_result(curve, model_from_params(DecayFamily::single_exp, lm.x), lm.iterations,
                       lm.converged, false);
}

FitResult fit_biexp(const T1Curve& curve, const FitOptions& options) {
  const FitResult single = fit_single(curve, options);
  const auto& s = std::get<SingleExp>(single.model.shape);

  Eigen::VectorXd x(4);
  x << std::log(0.5 * s.amp), std::log(0.25 * s.t1), std::log(0.5 * s.amp), std::log(4.0 * s.t1);
  const LmOutcome lm = levenberg_marquardt(DecayFamily::biexp, x, curve, options);

  DecayModel model = model_from_params(DecayFamily::biexp, lm.x);
  auto& m = std::get<Biexp>(model.shape);
  if (m.t_short > m.t_long) {
    std::swap(m.amp_short, m.amp_long);
    std::swap(m.t_short, m.t_long);
  }

  // Collapse handling: indistinguishable components, or a local optimum that
  // fails to improve on the nested single exponential, reduce to single_exp.
  const bool degenerate = m.t_short / m.t_long > 0.99;
  const double r2_biexp = compute_r_squared(curve, model);
  if (degenerate || r2_biexp < single.r_squared) {
    const double total = m.amp_short + m.amp_long;
    const double gamma_w = (m.amp_short / m.t_short + m.amp_long / m.t_long) / total;
    DecayModel collapsed_model{SingleExp{total, 1.0 / gamma_w}};
    if (!degenerate) collapsed_model = single.model;
    return finish_result(curve, collapsed_model, lm.iterations + single.iterations,
                         lm.converged && single.converged, true);
  }
  return finish_result(curve, model, lm.iterations + single.iterations, lm.converged, false);
}

FitResult fit_stretched(const T1Curve& curve, const FitOptions& options) {
  const FitResult single = fit_single(curve, options);
  const auto& s = std::get<SingleExp>(single.model.shape);

  Eigen::VectorXd x(3);
  x << std::log(s.amp), std::log(s.t1), q_from_beta(0.8);
  const LmOutcome lm = levenberg_marquardt(DecayFamily::stretched, x, curve, options);
  return finish_result(curve, model_from_params(DecayFamily::stretched, lm.x), lm.iterations,
                       lm.converged, false);
}

}  // namespace

FitResult fit(const T1Curve& curve, DecayFamily family, const FitOptions& options) {
  curve.validate();
  if (curve.tau.size() < parameter_count(family) + 1) {
    throw std::invalid_argument("fit: curve shorter than parameter count + 1");
  }
  const double first = curve.intensity[0];
  bool constant = true;
  for (Eigen::Index i = 1; i < curve.intensity.size(); ++i) {
    if (curve.intensity[i] != first) {
      constant = false;
      break;
    }
  }
  if (constant) throw std::invalid_argument("fit: constant intensity data");

  switch (family) {
    case DecayFamily::single_exp: return fit_single(curve, options);
    case DecayFamily::biexp: return fit_biexp(curve, options);
    case DecayFamily::stretched: return fit_stretched(curve, options);
  }
  throw std::domain_error("unknown decay family");
}

double weighted_rate(const FitResult& fit) {
  if (fit.model.family() != DecayFamily::biexp) {
    if (fit.collapsed && fit.derived_rates.count("gamma_w")) {
      return fit.derived_rates.at("gamma_w");
    }
    throw std::domain_error("weighted_rate: biexponential fit required");
  }
  if (!fit.converged) throw std::domain_error("weighted_rate: fit did not converge");
  const auto& m = std::get<Biexp>(fit.model.shape);
  return (m.amp_short / m.t_short + m.amp_long / m.t_long) / (m.amp_short + m.amp_long);
}

double r_squared(const T1Curve& curve, const DecayModel& model) {
  curve.validate();
  model.validate();
  return compute_r_squared(curve, model);
}

}  // namespace nvrelax
