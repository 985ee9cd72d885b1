#include "nvrelax/scene.hpp"

#include <cmath>
#include <stdexcept>

#include "nvrelax/random.hpp"

namespace nvrelax {

namespace {
constexpr double kNmToM = 1e-9;
}

Region Region::square(double side_nm, const Eigen::Vector2d& center) {
  const double h = 0.5 * side_nm;
  return Region{center.x() - h, center.x() + h, center.y() - h, center.y() + h};
}

void Region::validate() const {
  if (!(area() > 0.0)) throw std::domain_error("Region: area must be positive");
}

void NvCenter::validate() const {
  if (!(depth_nm > 0.0)) throw std::domain_error("NvCenter: depth must be positive");
  if (!(gamma_bg >= 0.0)) throw std::domain_error("NvCenter: gamma_bg must be non-negative");
}

std::array<Eigen::Vector3d, 4> SaComplex::site_positions() const {
  const double h = 0.5 * cube_edge_nm;
  const double z0 = standoff_nm;
  const double z1 = standoff_nm + cube_edge_nm;
  return {
      Eigen::Vector3d{center_nm.x() - h, center_nm.y() - h, z0},
      Eigen::Vector3d{center_nm.x() + h, center_nm.y() + h, z0},
      Eigen::Vector3d{center_nm.x() - h, center_nm.y() + h, z1},
      Eigen::Vector3d{center_nm.x() + h, center_nm.y() - h, z1},
  };
}

void SaComplex::validate() const {
  if (!(cube_edge_nm > 0.0)) throw std::domain_error("SaComplex: cube_edge must be positive");
  if (!(standoff_nm >= 0.0)) throw std::domain_error("SaComplex: standoff must be non-negative");
  if (labels_per_site < 1) throw std::domain_error("SaComplex: labels_per_site must be >= 1");
}

void LabelPlane::validate() const {
  if (!(density_nm2 >= 0.0)) throw std::domain_error("LabelPlane: density must be non-negative");
  if (!(height_nm >= 0.0)) throw std::domain_error("LabelPlane: height must be non-negative");
  if (labels_per_point < 1) throw std::domain_error("LabelPlane: labels_per_point must be >= 1");
}

void Scene::validate() const {
  region.validate();
  label_spec.validate();
  for (const auto& c : complexes) {
    c.validate();
    if (!region.contains(c.center_nm)) {
      throw std::domain_error("Scene: complex center outside region");
    }
  }
  for (const auto& p : planes) {
    p.plane.validate();
    for (const auto& pt : p.points_nm) {
      if (!region.contains(pt)) throw std::domain_error("Scene: plane point outside region");
    }
  }
}

namespace {

Eigen::Vector2d uniform_in_region(const Region& region, Rng& rng) {
  const double x = region.x_min + (region.x_max - region.x_min) * rng.uniform();
  const double y = region.y_min + (region.y_max - region.y_min) * rng.uniform();
  return {x, y};
}

std::array<bool, 4> draw_occupancy(const OccupancyRule& rule, Rng& rng) {
  std::array<bool, 4> occ{false, false, false, false};
  switch (rule.kind) {
    case OccupancyRule::Kind::all:
      occ = {true, true, true, true};
      break;
    case OccupancyRule::Kind::fixed_count: {
      if (rule.count < 0 || rule.count > 4) {
        throw std::domain_error("OccupancyRule: count must lie in [0, 4]");
      }
      for (int i = 0; i < rule.count; ++i) occ[static_cast<std::size_t>(i)] = true;
      break;
    }
    case OccupancyRule::Kind::bernoulli: {
      if (!(rule.p >= 0.0 && rule.p <= 1.0)) {
        throw std::domain_error("OccupancyRule: p must lie in [0, 1]");
      }
      for (auto& o : occ) o = rng.uniform() < rule.p;
      break;
    }
  }
  return occ;
}

}  // namespace

Scene build_sa_scene(double sigma_sa, const Region& region, const SaSceneParams& params,
                     std::uint64_t seed) {
  if (!(sigma_sa >= 0.0)) throw std::domain_error("build_sa_scene: sigma_sa must be >= 0");
  region.validate();

  Scene scene;
  scene.region = region;
  scene.label_spec = params.label_spec;

  Rng rng(derive_seed(seed, "sa_scene", 0));
  const auto count = rng.poisson(sigma_sa * region.area());
  scene.complexes.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    SaComplex c;
    c.center_nm = uniform_in_region(region, rng);
    c.cube_edge_nm = params.cube_edge_nm;
    c.standoff_nm = params.standoff_nm;
    c.labels_per_site = params.labels_per_site;
    c.occupied = draw_occupancy(params.occupancy, rng);
    scene.complexes.push_back(c);
  }
  return scene;
}

Scene build_plane_scene(const LabelPlane& plane, const Region& region,
                        const SpinLabelSpec& label_spec, std::uint64_t seed) {
  plane.validate();
  region.validate();

  Scene scene;
  scene.region = region;
  scene.label_spec = label_spec;

  RealizedPlane realized;
  realized.plane = plane;
  Rng rng(derive_seed(seed, "plane_scene", 0));
  const auto count = rng.poisson(plane.density_nm2 * region.area());
  realized.points_nm.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    realized.points_nm.push_back(uniform_in_region(region, rng));
  }
  scene.planes.push_back(std::move(realized));
  return scene;
}

double SceneSignal::max_share() const {
  if (!(delta_gamma > 0.0)) return 0.0;
  double best = 0.0;
  for (const auto& [id, value] : per_unit) best = std::max(best, value);
  return best / delta_gamma;
}

SceneSignal nv_signal(const NvCenter& nv, const Scene& scene,
                      const PhysicalConstants& constants) {
  nv.validate();
  const Eigen::Vector3d axis = nv.axis();
  // NV sits at depth below the surface origin plane; site coordinates are
  // (x, y, height) in nm relative to the surface.
  const Eigen::Vector3d nv_pos{nv.lateral_nm.x(), nv.lateral_nm.y(), -nv.depth_nm};

  SceneSignal out;
  int unit_id = 0;
  const auto site_rate = [&](const Eigen::Vector3d& pos_nm, int multiplicity) {
    LabelSite site;
    site.position = (pos_nm - nv_pos) * kNmToM;
    site.multiplicity = multiplicity;
    site.spec = scene.label_spec;
    return induced_rate(std::span<const LabelSite>(&site, 1), axis, constants);
  };

  for (const auto& complex : scene.complexes) {
    double contribution = 0.0;
    const auto sites = complex.site_positions();
    for (std::size_t s = 0; s < sites.size(); ++s) {
      if (!complex.occupied[s]) continue;
      contribution += site_rate(sites[s], complex.labels_per_site);
    }
    out.per_unit.emplace_back(unit_id++, contribution);
    out.delta_gamma += contribution;
  }
  for (const auto& realized : scene.planes) {
    for (const auto& pt : realized.points_nm) {
      const Eigen::Vector3d pos{pt.x(), pt.y(), realized.plane.height_nm};
      const double contribution = site_rate(pos, realized.plane.labels_per_point);
      out.per_unit.emplace_back(unit_id++, contribution);
      out.delta_gamma += contribution;
    }
  }
  return out;
}

}  // namespace nvrelax
