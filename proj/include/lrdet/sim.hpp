#pragma once

// Deterministic synthetic scene generator. Produces the long-range sparsity
// phenomenon: object surface point counts fall off as density_k / range^2, so
// far objects get a handful of returns (or none) while near objects are dense.
// Masks are exact projected-hull rasterizations, no occlusion handling.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrdet/rng.hpp"
#include "lrdet/types.hpp"
#include "lrdet/virtual_points.hpp"

namespace lrdet {

struct ClassSpec {
  std::string name = "object";
  std::array<double, 3> size = {4.7, 2.0, 1.8};  // mean l, w, h
  double size_jitter = 0.15;                     // +- fraction per dimension
  double weight = 1.0;                           // sampling weight
};

struct GroundConfig {
  bool enabled = false;
  double density_k = 200.0;  // same inverse-square law, per m^2
  double r_min = 2.0, r_max = 250.0;
};

struct SceneConfig {
  std::uint64_t seed = 0;
  std::uint64_t n_objects = 12;
  double r_min = 5.0, r_max = 240.0;  // log-uniform center L-inf range
  std::vector<ClassSpec> classes = {ClassSpec{}};
  double density_k = 2000.0;        // expected points = density_k * area / r^2
  std::uint64_t min_pts_floor = 0;  // raise per-object counts to at least this
  GroundConfig ground;
  std::vector<CameraModel> cameras;  // default rig when empty? no — explicit
  // placement
  double min_gap = 2.0;         // meters of clearance between footprints
  double angular_margin = 1.2;  // x apparent half-widths; <= 0 disables
  std::uint64_t max_retries = 200;
};

SceneConfig default_scene_config();  // includes the 4-camera ring rig
std::vector<CameraModel> default_camera_rig();

struct Scene {
  std::vector<Box3D> gt;
  PointCloud cloud;
  std::vector<InstanceMask> masks;
  std::vector<std::size_t> mask_object;  // gt index behind each mask
  std::vector<CameraModel> cameras;
};

/// Expected surface point count for a box seen from the ego origin:
/// density_k * (area of the <= 2 origin-facing side faces + top face) / range^2.
double expected_surface_point_count(const Box3D& box, double range, double density_k);

/// Poisson(expected count) points uniform on the origin-facing faces + top.
PointCloud sample_surface_points(const Box3D& box, double range, double density_k, Rng& rng);

/// Pixel set of the convex hull of the box's projected corners, clipped to the
/// image; nullopt when nothing lands in front of the camera / inside the image.
std::optional<InstanceMask> render_mask(const CameraModel& cam, const Box3D& box,
                                        const std::string& class_id);

/// Fully deterministic in (config); `threads` only changes the schedule, never
/// an output byte. Throws PlacementFailure when separation constraints cannot
/// be met within max_retries draws per object.
Scene generate_scene(const SceneConfig& config, unsigned threads = 1);

}  // namespace lrdet
