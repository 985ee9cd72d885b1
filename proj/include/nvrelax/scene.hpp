#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "nvrelax/constants.hpp"
#include "nvrelax/spin_physics.hpp"

namespace nvrelax {

// Axis-aligned rectangle on the diamond surface, nm.
struct Region {
  double x_min = -20.0;
  double x_max = 20.0;
  double y_min = -20.0;
  double y_max = 20.0;

  double area() const { return (x_max - x_min) * (y_max - y_min); }
  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }
  static Region square(double side_nm, const Eigen::Vector2d& center = Eigen::Vector2d::Zero());
  void validate() const;
};

// A single sensing NV center. Lateral position and depth in nm; the
// quantization axis is tilted by axis_tilt_rad from the surface normal
// (azimuth fixed along +x).
struct NvCenter {
  Eigen::Vector2d lateral_nm = Eigen::Vector2d::Zero();
  double depth_nm = 6.5;
  double axis_tilt_rad = 0.0;  // set to magic_angle() for [100] samples
  double gamma_bg = 0.0;       // s^-1

  Eigen::Vector3d axis() const {
    return {std::sin(axis_tilt_rad), 0.0, std::cos(axis_tilt_rad)};
  }
  void validate() const;
};

// Streptavidin complex approximated as an axis-aligned cube sitting on the
// surface (base at `standoff_nm`). The four biotin binding sites are the
// alternating vertices: one diagonal pair on the bottom face, the opposite
// diagonal pair on the top face. Each occupied site holds one labeled
// protein modeled as `labels_per_site` co-located spins.
struct SaComplex {
  Eigen::Vector2d center_nm = Eigen::Vector2d::Zero();
  double cube_edge_nm = 5.8;
  double standoff_nm = 0.0;
  std::array<bool, 4> occupied = {true, true, true, true};
  int labels_per_site = 4;

  // Positions of the four binding vertices (x, y, height above surface), nm.
  std::array<Eigen::Vector3d, 4> site_positions() const;
  void validate() const;
};

// Uniform layer of labeled points at a fixed height, plus its realization.
struct LabelPlane {
  double density_nm2 = 0.0;
  double height_nm = 2.0;
  int labels_per_point = 4;

  void validate() const;
};

struct RealizedPlane {
  LabelPlane plane;
  std::vector<Eigen::Vector2d> points_nm;  // lateral positions, height from plane
};

struct Scene {
  Region region;
  std::vector<SaComplex> complexes;
  std::vector<RealizedPlane> planes;
  SpinLabelSpec label_spec = SpinLabelSpec::mn2();

  void validate() const;
};

// Occupancy of the four binding sites of each generated complex.
struct OccupancyRule {
  enum class Kind { all, fixed_count, bernoulli };
  Kind kind = Kind::all;
  int count = 4;     // fixed_count: sites 0..count-1 occupied
  double p = 1.0;    // bernoulli: independent occupancy probability

  static OccupancyRule all_sites() { return {}; }
};

struct SaSceneParams {
  double cube_edge_nm = 5.8;
  double standoff_nm = 0.0;
  int labels_per_site = 4;
  OccupancyRule occupancy;
  SpinLabelSpec label_spec = SpinLabelSpec::mn2();
};

// Complex count ~ Poisson(sigma_sa * area); centers uniform in the region.
Scene build_sa_scene(double sigma_sa, const Region& region, const SaSceneParams& params,
                     std::uint64_t seed);

// Point count ~ Poisson(density * area); uniform placement at the plane height.
Scene build_plane_scene(const LabelPlane& plane, const Region& region,
                        const SpinLabelSpec& label_spec, std::uint64_t seed);

// Relaxation acceleration seen by one NV, with the contribution of every
// molecular unit (complexes first, then plane points) for dominance analysis.
struct SceneSignal {
  double delta_gamma = 0.0;  // s^-1
  std::vector<std::pair<int, double>> per_unit;

  // Largest single-unit share of delta_gamma; 0 when delta_gamma is 0.
  double max_share() const;
};

SceneSignal nv_signal(const NvCenter& nv, const Scene& scene,
                      const PhysicalConstants& constants);

}  // namespace nvrelax
