#pragma once

// Camera-guided cloud upsampling ("virtual points"): project the cloud into
// each instance mask, sample mask pixels, give each sampled pixel the depth of
// its nearest in-mask projected LiDAR point, and unproject back into the ego
// frame. Purely geometric — no learned depth completion.

#include <cstdint>
#include <utility>
#include <vector>

#include "lrdet/geometry.hpp"
#include "lrdet/rng.hpp"
#include "lrdet/types.hpp"

namespace lrdet {

// Integer pixel set of one instance in one camera, canonically ordered
// row-major (v, then u). Nonempty by construction.
struct InstanceMask {
  std::string camera_id;
  std::string class_id;
  std::vector<std::pair<int, int>> pixels;  // (v, u), sorted, unique

  bool contains(int u, int v) const;  // binary search
};

void validate(const InstanceMask& mask);

struct ProjectedPoint {
  double u = 0.0, v = 0.0;
  double depth = 0.0;        // > kDepthEpsilon
  std::size_t source_index;  // index into the source cloud
};

struct MvpConfig {
  std::uint64_t s = 50;         // pixels sampled per mask
  std::uint64_t rng_seed = 0;   // per-mask substreams derive from this
};

/// Exactly the points with depth > kDepthEpsilon and 0 <= u < width,
/// 0 <= v < height, in source order (so source_index is ascending).
std::vector<ProjectedPoint> project_cloud_to_image(const CameraModel& cam,
                                                   const PointCloud& cloud);

/// min(s, |pixels|) distinct pixels, uniform without replacement, in selection
/// order. Returned as (u, v).
std::vector<std::pair<int, int>> sample_mask_pixels(const InstanceMask& mask, std::uint64_t s,
                                                    Rng& rng);

/// Depth of the nearest projected point per sample, squared pixel distance,
/// ties to the lowest source_index. Throws NoLidarInView on an empty
/// candidate set.
std::vector<double> assign_depth_nn(const std::vector<std::pair<int, int>>& samples,
                                    const std::vector<ProjectedPoint>& projected);

/// Virtual points for every mask (skipping masks with no in-mask projection),
/// concatenated in mask order. Provenance virtual, intensity 0. A mask whose
/// camera_id is not in `cameras` is an UnknownCamera error. `threads` > 1
/// fans out per mask; output is identical for every thread count.
PointCloud generate_virtual_points(const std::vector<CameraModel>& cameras,
                                   const PointCloud& cloud,
                                   const std::vector<InstanceMask>& masks,
                                   const MvpConfig& config = {}, unsigned threads = 1);

/// Real points first (original order), then virtual points (original order).
PointCloud fuse_clouds(const PointCloud& real, const PointCloud& virtual_points);

}  // namespace lrdet
