#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nvrelax/scene.hpp"
#include "nvrelax/surface_noise.hpp"

using namespace nvrelax;

namespace {

const PhysicalConstants kConstants;

// Single-site closed form evaluated independently of the scene machinery.
double single_site_rate(double r_m, double theta, int multiplicity,
                        const SpinLabelSpec& spec) {
  const double s = spec.spin_s();
  const double pref = kConstants.mu0 * spec.gamma * kConstants.gamma_nv * kConstants.hbar /
                      (4.0 * std::numbers::pi);
  const double b2 = multiplicity * (s * (s + 1.0) / 3.0) * pref * pref *
                    (2.0 + 3.0 * std::sin(theta) * std::sin(theta)) / std::pow(r_m, 6.0);
  const double x = kConstants.omega0 * spec.tau_c;
  return 3.0 * b2 * spec.tau_c / (1.0 + x * x);
}

}  // namespace

TEST_CASE("sa scene is empty at zero density and deterministic per seed") {
  const Region region = Region::square(40.0);
  CHECK(build_sa_scene(0.0, region, {}, 5).complexes.empty());

  const Scene a = build_sa_scene(0.007, region, {}, 5);
  const Scene b = build_sa_scene(0.007, region, {}, 5);
  REQUIRE(a.complexes.size() == b.complexes.size());
  for (std::size_t i = 0; i < a.complexes.size(); ++i) {
    CHECK(a.complexes[i].center_nm.x() == b.complexes[i].center_nm.x());
    CHECK(a.complexes[i].center_nm.y() == b.complexes[i].center_nm.y());
  }
  const Scene c = build_sa_scene(0.007, region, {}, 6);
  bool identical = a.complexes.size() == c.complexes.size();
  if (identical) {
    for (std::size_t i = 0; i < a.complexes.size(); ++i) {
      identical = identical && a.complexes[i].center_nm.x() == c.complexes[i].center_nm.x();
    }
  }
  CHECK_FALSE(identical);
}

TEST_CASE("sa scene complex count matches the Poisson mean") {
  const Region region = Region::square(40.0);
  const double sigma = 0.007;
  const int n_scenes = 10000;
  double total = 0.0;
  for (int s = 0; s < n_scenes; ++s) {
    total += static_cast<double>(build_sa_scene(sigma, region, {}, 1000 + s).complexes.size());
  }
  const double mean = total / n_scenes;
  const double expected = sigma * region.area();  // 11.2
  const double se = std::sqrt(expected / n_scenes);
  CHECK(std::abs(mean - expected) < 3.0 * se);
}

TEST_CASE("sa scene centers stay inside the region and validate") {
  const Region region = Region::square(40.0, {100.0, -50.0});
  const Scene scene = build_sa_scene(0.02, region, {}, 17);
  CHECK_NOTHROW(scene.validate());
  for (const auto& c : scene.complexes) CHECK(region.contains(c.center_nm));
}

TEST_CASE("binding sites sit on alternating cube vertices") {
  SaComplex c;
  c.center_nm = {1.0, 2.0};
  c.cube_edge_nm = 5.8;
  c.standoff_nm = 0.5;
  const auto sites = c.site_positions();
  CHECK(sites[0].z() == doctest::Approx(0.5));
  CHECK(sites[1].z() == doctest::Approx(0.5));
  CHECK(sites[2].z() == doctest::Approx(6.3));
  CHECK(sites[3].z() == doctest::Approx(6.3));
  // bottom pair spans one diagonal, top pair the other
  CHECK(((sites[0].head<2>() + sites[1].head<2>()) / 2.0 - c.center_nm).norm() ==
        doctest::Approx(0.0));
  CHECK(((sites[2].head<2>() + sites[3].head<2>()) / 2.0 - c.center_nm).norm() ==
        doctest::Approx(0.0));
  CHECK((sites[1] - sites[0]).head<2>().norm() ==
        doctest::Approx(5.8 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("plane scene density, placement, and determinism") {
  const Region region = Region::square(40.0);
  LabelPlane plane;
  plane.density_nm2 = 1.0 / 81.0;
  plane.height_nm = 2.0;
  CHECK(build_plane_scene(LabelPlane{0.0, 2.0, 4}, region, SpinLabelSpec::mn2(), 1)
            .planes[0]
            .points_nm.empty());

  const int n_scenes = 10000;
  double total = 0.0;
  for (int s = 0; s < n_scenes; ++s) {
    const Scene scene = build_plane_scene(plane, region, SpinLabelSpec::mn2(), 2000 + s);
    total += static_cast<double>(scene.planes[0].points_nm.size());
    if (s < 50) {
      for (const auto& p : scene.planes[0].points_nm) CHECK(region.contains(p));
    }
  }
  const double expected = plane.density_nm2 * region.area();  // 19.75
  const double se = std::sqrt(expected / n_scenes);
  CHECK(total / n_scenes == doctest::Approx(expected).epsilon(3.0 * se / expected));
}

TEST_CASE("nv_signal of an empty scene is zero") {
  Scene scene;
  scene.region = Region::square(40.0);
  NvCenter nv;
  nv.depth_nm = 5.0;
  const SceneSignal signal = nv_signal(nv, scene, kConstants);
  CHECK(signal.delta_gamma == 0.0);
  CHECK(signal.per_unit.empty());
  CHECK(signal.max_share() == 0.0);
}

TEST_CASE("nv_signal matches the closed form for a point directly above") {
  Scene scene;
  scene.region = Region::square(40.0);
  RealizedPlane plane;
  plane.plane.density_nm2 = 1e-3;
  plane.plane.height_nm = 2.0;
  plane.plane.labels_per_point = 4;
  plane.points_nm.push_back({0.0, 0.0});
  scene.planes.push_back(plane);

  NvCenter nv;
  nv.depth_nm = 6.0;
  nv.axis_tilt_rad = magic_angle();
  const SceneSignal signal = nv_signal(nv, scene, kConstants);

  const double expected =
      single_site_rate(8.0e-9, magic_angle(), 4, scene.label_spec);
  CHECK(signal.delta_gamma == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("per-unit contributions sum to the total") {
  const Region region = Region::square(40.0);
  SaSceneParams params;
  const Scene scene = build_sa_scene(0.01, region, params, 99);
  NvCenter nv;
  nv.depth_nm = 5.0;
  nv.axis_tilt_rad = magic_angle();
  const SceneSignal signal = nv_signal(nv, scene, kConstants);
  double sum = 0.0;
  for (const auto& [id, v] : signal.per_unit) sum += v;
  CHECK(sum == doctest::Approx(signal.delta_gamma).epsilon(1e-12));
  CHECK(signal.per_unit.size() == scene.complexes.size());
}

TEST_CASE("delta gamma grows monotonically as complexes are added") {
  const Region region = Region::square(40.0);
  const Scene full = build_sa_scene(0.02, region, {}, 3);
  NvCenter nv;
  nv.depth_nm = 6.0;
  nv.axis_tilt_rad = magic_angle();

  Scene partial;
  partial.region = full.region;
  partial.label_spec = full.label_spec;
  double prev = 0.0;
  for (const auto& c : full.complexes) {
    partial.complexes.push_back(c);
    const double current = nv_signal(nv, partial, kConstants).delta_gamma;
    CHECK(current > prev);
    prev = current;
  }
}

TEST_CASE("joint translation of scene and NV leaves the signal unchanged") {
  const Region region = Region::square(40.0);
  Scene scene = build_sa_scene(0.01, region, {}, 4);
  NvCenter nv;
  nv.depth_nm = 4.5;
  nv.axis_tilt_rad = magic_angle();
  const double base = nv_signal(nv, scene, kConstants).delta_gamma;

  const Eigen::Vector2d shift(123.0, -77.0);
  scene.region.x_min += shift.x();
  scene.region.x_max += shift.x();
  scene.region.y_min += shift.y();
  scene.region.y_max += shift.y();
  for (auto& c : scene.complexes) c.center_nm += shift;
  nv.lateral_nm += shift;
  CHECK(nv_signal(nv, scene, kConstants).delta_gamma ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("40 nm region captures nearly all of the wide-region signal") {
  // Paired comparison: realize the 200 nm process once, then restrict the
  // same points to the inner 40 nm window.
  LabelPlane plane;
  plane.density_nm2 = 1.0 / 81.0;
  plane.height_nm = 2.0;
  const Region wide = Region::square(200.0);
  NvCenter nv;
  nv.depth_nm = 6.0;  // d + h = 8 nm
  nv.axis_tilt_rad = magic_angle();

  double inner_total = 0.0;
  double wide_total = 0.0;
  for (int s = 0; s < 3000; ++s) {
    const Scene scene = build_plane_scene(plane, wide, SpinLabelSpec::mn2(), 5000 + s);
    Scene inner = scene;
    inner.planes[0].points_nm.clear();
    for (const auto& p : scene.planes[0].points_nm) {
      if (std::abs(p.x()) <= 20.0 && std::abs(p.y()) <= 20.0) {
        inner.planes[0].points_nm.push_back(p);
      }
    }
    wide_total += nv_signal(nv, scene, kConstants).delta_gamma;
    inner_total += nv_signal(nv, inner, kConstants).delta_gamma;
  }
  CHECK(inner_total / wide_total >= 0.95);
}

TEST_CASE("occupancy rules control the bound sites") {
  SaSceneParams params;
  params.occupancy.kind = OccupancyRule::Kind::fixed_count;
  params.occupancy.count = 2;
  const Scene scene = build_sa_scene(0.02, Region::square(40.0), params, 12);
  for (const auto& c : scene.complexes) {
    int occupied = 0;
    for (const bool o : c.occupied) occupied += o ? 1 : 0;
    CHECK(occupied == 2);
  }
}

TEST_CASE("label on top of the NV is a geometry error") {
  Scene scene;
  scene.region = Region::square(40.0);
  RealizedPlane plane;
  plane.plane.height_nm = 0.0;
  plane.points_nm.push_back({0.0, 0.0});
  scene.planes.push_back(plane);
  NvCenter nv;
  nv.depth_nm = 1.0;
  CHECK_NOTHROW(nv_signal(nv, scene, kConstants));
  // driving the NV onto the label position itself
  nv.depth_nm = 1e-300;
  CHECK_THROWS_AS(nv_signal(nv, scene, kConstants), std::domain_error);
}
