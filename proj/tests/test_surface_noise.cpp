#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "nvrelax/surface_noise.hpp"
#include "oracles.hpp"

using namespace nvrelax;
using oracles::integrate;
using oracles::standard_normal_cdf;

namespace {

const PhysicalConstants kConstants;

double quadrature_surface_coupling(double sigma_surf_nm2, double depth_nm, double tilt_rad,
                                   const SpinLabelSpec& spec) {
  return oracles::quadrature_surface_coupling(sigma_surf_nm2, depth_nm, tilt_rad, spec,
                                              kConstants);
}

}  // namespace

TEST_CASE("surface coupling closed forms match planar quadrature at both tilts") {
  SurfaceNoiseModel model;
  model.sigma_surf = 0.50;
  const SpinLabelSpec spec = SpinLabelSpec::electron();
  for (const double d : {2.0, 5.0, 10.0, 20.0}) {
    for (const AxisTilt tilt : {AxisTilt::magic, AxisTilt::normal}) {
      model.axis_tilt = tilt;
      const double closed = surface_coupling(model, d, spec, kConstants);
      const double quad =
          quadrature_surface_coupling(model.sigma_surf, d, axis_tilt_angle(tilt), spec);
      CHECK(closed == doctest::Approx(quad).epsilon(1e-6));
    }
  }
}

TEST_CASE("surface coupling tilt-branch ratio is exactly 3/4") {
  SurfaceNoiseModel magic;
  SurfaceNoiseModel normal;
  normal.axis_tilt = AxisTilt::normal;
  const SpinLabelSpec spec = SpinLabelSpec::electron();
  const double ratio = surface_coupling(normal, 5.0, spec, kConstants) /
                       surface_coupling(magic, 5.0, spec, kConstants);
  CHECK(ratio == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("surface coupling follows the d^-4 law") {
  SurfaceNoiseModel model;
  const SpinLabelSpec spec = SpinLabelSpec::electron();
  const double near = surface_coupling(model, 4.0, spec, kConstants);
  const double far = surface_coupling(model, 8.0, spec, kConstants);
  CHECK(far / near == doctest::Approx(1.0 / 16.0).epsilon(1e-13));
  CHECK_THROWS_AS(surface_coupling(model, 0.0, spec, kConstants), std::domain_error);
}

TEST_CASE("derived c_surf matches the frozen high-precision value") {
  SurfaceNoiseModel model;
  model.sigma_surf = 0.50;
  // 50-digit evaluation of the spectral-weight and coupling composition.
  CHECK(model.c_surf(kConstants) == doctest::Approx(2662388.0431178424).epsilon(1e-10));
  model.sigma_surf = 0.40;
  CHECK(model.c_surf(kConstants) == doctest::Approx(2129910.4344942739).epsilon(1e-10));
}

TEST_CASE("derived c_surf is consistent with the spectral-weight composition") {
  SurfaceNoiseModel model;
  model.sigma_surf = 0.37;
  model.tau_c_surf = 0.4e-9;
  model.surface_spin.tau_c = model.tau_c_surf;
  for (const double d : {2.0, 6.5, 14.0}) {
    const double gamma_surf = 1.5 * lorentzian_weight(model.tau_c_surf, kConstants.omega0) *
                              surface_coupling(model, d, model.surface_spin, kConstants);
    const double c_from_rate = gamma_surf * d * d * d * d;
    CHECK(model.c_surf(kConstants) == doctest::Approx(c_from_rate).epsilon(1e-10));
  }
}

TEST_CASE("c_surf override bypasses the derivation") {
  SurfaceNoiseModel model;
  model.c_surf_override = 2.7e6;
  CHECK(model.c_surf(kConstants) == 2.7e6);
}

TEST_CASE("background rate closed form and inverse") {
  CHECK(background_rate(2.7e6, 100.0, 2.0) == doctest::Approx(168850.0).epsilon(1e-14));
  CHECK(background_rate(2.7e6, 100.0, 1e6) == doctest::Approx(100.0).epsilon(1e-9));
  CHECK_THROWS_AS(background_rate(2.7e6, 100.0, -1.0), std::domain_error);

  for (const double d : {2.3, 5.0, 11.7}) {
    const double gamma = background_rate(2.7e6, 100.0, d);
    CHECK(depth_for_rate(2.7e6, 100.0, gamma) == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("background rate is monotone decreasing in depth") {
  double prev = background_rate(2.7e6, 100.0, 2.0);
  for (double d = 2.5; d < 30.0; d += 0.5) {
    const double g = background_rate(2.7e6, 100.0, d);
    CHECK(g < prev);
    prev = g;
  }
}

TEST_CASE("sample_depths respects the truncation floor and the seed") {
  const DepthDistribution dist = DepthDistribution::ensemble();
  const auto depths = sample_depths(dist, 5000, 42);
  for (const double d : depths) CHECK(d >= dist.d_min);

  const auto again = sample_depths(dist, 5000, 42);
  CHECK(std::equal(depths.begin(), depths.end(), again.begin()));

  // Per-index substreams: a shorter run is a prefix of a longer one.
  const auto longer = sample_depths(dist, 6000, 42);
  CHECK(std::equal(depths.begin(), depths.end(), longer.begin()));

  const auto other = sample_depths(dist, 5000, 43);
  CHECK(depths[0] != other[0]);
}

TEST_CASE("sample_depths mean matches the truncated-Gaussian closed form") {
  const DepthDistribution dist = DepthDistribution::ensemble();
  const std::size_t n = 1'000'000;
  const auto depths = sample_depths(dist, n, 7);
  double sum = 0.0;
  for (const double d : depths) sum += d;
  const double sample_mean = sum / static_cast<double>(n);

  // Independent closed form: mu + sigma * phi(alpha) / (1 - Phi(alpha)).
  const double alpha = (dist.d_min - dist.mu) / dist.sigma;
  const double phi = std::exp(-0.5 * alpha * alpha) / std::sqrt(2.0 * std::numbers::pi);
  const double z = 1.0 - standard_normal_cdf(alpha);
  const double analytic_mean = dist.mu + dist.sigma * phi / z;
  CHECK(analytic_mean == doctest::Approx(6.8245718618234944).epsilon(1e-12));

  const double analytic_var =
      dist.sigma * dist.sigma * (1.0 + alpha * phi / z - (phi / z) * (phi / z));
  const double standard_error = std::sqrt(analytic_var / static_cast<double>(n));
  CHECK(std::abs(sample_mean - analytic_mean) < 3.0 * standard_error);
}

TEST_CASE("sample_depths fails cleanly when the support carries no mass") {
  DepthDistribution hopeless;
  hopeless.mu = -500.0;
  hopeless.sigma = 1.0;
  hopeless.d_min = 2.0;
  CHECK_THROWS_AS(sample_depths(hopeless, 1, 1), std::runtime_error);
}

TEST_CASE("background rate pdf vanishes outside its support") {
  const DepthDistribution dist = DepthDistribution::pillars();
  const double c = 2.7e6;
  const double bulk = 100.0;
  CHECK(background_rate_pdf(bulk, dist, c, bulk) == 0.0);
  CHECK(background_rate_pdf(bulk - 50.0, dist, c, bulk) == 0.0);
  const double ceiling = bulk + c / std::pow(dist.d_min, 4.0);
  CHECK(background_rate_pdf(ceiling * 1.001, dist, c, bulk) == 0.0);
  CHECK(background_rate_pdf(ceiling * 0.999, dist, c, bulk) > 0.0);
}

TEST_CASE("background rate pdf integrates to one") {
  const DepthDistribution dist = DepthDistribution::pillars();
  const double c = 2.7e6;
  const double bulk = 100.0;
  const double ceiling_excess = c / std::pow(dist.d_min, 4.0);
  // Log substitution x = ln(gamma - bulk) keeps the quadrature well scaled.
  const auto integrand = [&](double x) {
    const double excess = std::exp(x);
    return background_rate_pdf(bulk + excess, dist, c, bulk) * excess;
  };
  const double mass =
      integrate(integrand, std::log(1e-4), std::log(ceiling_excess), 1e-10);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("background rate pdf mode sits at the mapped stationary depth") {
  // The d^4 change of variables shifts the mode: the stationary point solves
  // d^2 - mu*d - 5*sigma^2 = 0, not d = mu.
  const DepthDistribution dist = DepthDistribution::pillars();
  const double c = 2.7e6;
  const double bulk = 100.0;
  const double d_star = 0.5 * (dist.mu + std::sqrt(dist.mu * dist.mu +
                                                   20.0 * dist.sigma * dist.sigma));
  const double gamma_star = bulk + c / std::pow(d_star, 4.0);

  double best_gamma = 0.0;
  double best = -1.0;
  for (int i = 0; i <= 20000; ++i) {
    const double gamma = bulk + std::pow(10.0, -1.0 + 5.0 * i / 20000.0);
    const double f = background_rate_pdf(gamma, dist, c, bulk);
    if (f > best) {
      best = f;
      best_gamma = gamma;
    }
  }
  CHECK(best_gamma == doctest::Approx(gamma_star).epsilon(2e-3));
}

TEST_CASE("background rate cdf is the integral of the pdf") {
  const DepthDistribution dist = DepthDistribution::pillars();
  const double c = 2.7e6;
  const double bulk = 100.0;
  CHECK(background_rate_cdf(bulk, dist, c, bulk) == 0.0);
  const double ceiling = bulk + c / std::pow(dist.d_min, 4.0);
  CHECK(background_rate_cdf(ceiling, dist, c, bulk) == doctest::Approx(1.0).epsilon(1e-12));

  for (const double gamma : {300.0, 1000.0, 5000.0, 40000.0}) {
    const auto integrand = [&](double x) {
      const double excess = std::exp(x);
      return background_rate_pdf(bulk + excess, dist, c, bulk) * excess;
    };
    const double mass = integrate(integrand, std::log(1e-4), std::log(gamma - bulk), 1e-10);
    CHECK(background_rate_cdf(gamma, dist, c, bulk) ==
          doctest::Approx(mass).epsilon(1e-7));
  }
}

TEST_CASE("sampled background rates follow the analytic pdf (KS)") {
  const DepthDistribution dist = DepthDistribution::pillars();
  const double c = 2.7e6;
  const double bulk = 100.0;
  const std::size_t n = 200'000;
  const auto depths = sample_depths(dist, n, 11);
  std::vector<double> rates(n);
  for (std::size_t i = 0; i < n; ++i) rates[i] = background_rate(c, bulk, depths[i]);
  std::sort(rates.begin(), rates.end());

  // Analytic CDF through the depth map: P(Gamma <= g) = P(d >= d(g)) / mass.
  const double mass = dist.mass_above_min();
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = depth_for_rate(c, bulk, rates[i]);
    const double cdf = (1.0 - standard_normal_cdf((d - dist.mu) / dist.sigma)) / mass;
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    ks = std::max({ks, std::abs(cdf - lo), std::abs(cdf - hi)});
  }
  CHECK(ks < 0.01);
}

TEST_CASE("depth presets carry majority mass above the floor") {
  for (const auto& dist : {DepthDistribution::ensemble(), DepthDistribution::pillars(),
                           DepthDistribution::pillars_alt()}) {
    CHECK(dist.mass_above_min() > 0.5);
  }
}
