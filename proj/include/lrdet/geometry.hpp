#pragma once

#include "lrdet/kernels.hpp"
#include "lrdet/types.hpp"

namespace lrdet {

// Points with camera depth at or below this are not projectable.
inline constexpr double kDepthEpsilon = 1e-6;

struct PixelPoint {
  double u = 0.0, v = 0.0;
  double depth = 0.0;  // camera-frame z, > kDepthEpsilon when valid
};

/// R * p + t; intensity and provenance pass through untouched.
Point transform_point(const Pose& pose, const Point& p);
Vec3 transform_point(const Pose& pose, const Vec3& p);

kernels::ProjectionParams projection_params(const CameraModel& cam);

/// Pinhole projection of a single ego-frame point. Throws BehindCamera when
/// camera depth <= kDepthEpsilon; never returns pixel coordinates for such
/// points. Does NOT check image bounds — batch helpers do.
PixelPoint project(const CameraModel& cam, const Point& p);

/// Inverse pinhole at a given camera depth. Returns an ego-frame point with
/// provenance = virtual and intensity 0. Throws NonPositiveDepth for depth <= 0.
Point unproject(const CameraModel& cam, double u, double v, double depth);

/// Inclusive containment test in the box frame (boundary counts as inside).
bool box_contains(const Box3D& box, const Vec3& p);
inline bool box_contains(const Box3D& box, const Point& p) {
  return box_contains(box, Vec3{p.x, p.y, p.z});
}

/// The 8 corners of a box, fixed order (for hull/mask computations).
std::array<Vec3, 8> box_corners(const Box3D& box);

}  // namespace lrdet
