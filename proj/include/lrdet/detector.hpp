#pragma once

// Non-learned stand-in detector: voxel connected components + axis-aligned
// box fit, plus the range-expert / late-fusion plumbing that the learned
// models slot into in the original pipeline.

#include <cstdint>
#include <vector>

#include "lrdet/range.hpp"
#include "lrdet/types.hpp"

namespace lrdet {

struct ClusterConfig {
  double voxel_size = 0.5;       // > 0
  int connectivity = 26;         // 6 or 26
  std::uint64_t min_points = 1;  // clusters below this are dropped
};

void validate(const ClusterConfig& config);

/// Connected components over occupied voxels. Each cluster is an ascending
/// list of point indices; clusters are ordered by their smallest index. The
/// partition is a pure function of the point positions (no hash-order leaks).
std::vector<std::vector<std::size_t>> cluster_points(const PointCloud& cloud,
                                                     const ClusterConfig& config);

/// Axis-aligned box around a cluster: midpoint center, sizes floored at 0.1 m,
/// yaw 0, class "object", confidence n / (n + 10). Throws EmptyCluster.
Detection fit_box(const PointCloud& cloud, const std::vector<std::size_t>& cluster);

struct DetectionSet {
  std::string source;
  std::vector<Detection> detections;
};

/// cluster + fit over the whole cloud; detections in cluster order.
DetectionSet detect(const PointCloud& cloud, const ClusterConfig& config = {});

/// Threshold the cloud to [spec.r1, spec.r2], then detect. The set and each
/// detection carry the expert label.
DetectionSet run_expert(const PointCloud& cloud, const ExpertSpec& spec,
                        const ClusterConfig& config = {});

/// Range-partitioned late fusion: mid contributes detections whose center
/// L-inf range is < boundary, long contributes the rest (a center exactly at
/// the boundary goes to long). Input order is preserved within each side;
/// per-detection sources are preserved, the fused set is labeled "fused".
DetectionSet late_fuse(const DetectionSet& mid, const DetectionSet& long_range,
                       double boundary = 100.0);

/// Optional near-duplicate suppression around the fusion boundary: greedy by
/// descending confidence (ties by input order); a detection is dropped when a
/// kept detection of the same class has its center within center_dist
/// (3D Euclidean, inclusive). Output in ranked order. Off by default in the
/// pipeline.
DetectionSet dedupe_boundary(const DetectionSet& fused, double center_dist = 2.0);

}  // namespace lrdet
