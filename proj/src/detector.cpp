#include "lrdet/detector.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "lrdet/geometry.hpp"

namespace lrdet {

void validate(const ClusterConfig& config) {
  if (!(config.voxel_size > 0.0)) throw Error("voxel size must be positive");
  if (config.connectivity != 6 && config.connectivity != 26)
    throw Error("connectivity must be 6 or 26");
  if (config.min_points < 1) throw Error("min_points must be >= 1");
}

namespace {

struct VoxelKey {
  long long x, y, z;
  bool operator==(const VoxelKey& o) const { return x == o.x && y == o.y && z == o.z; }
};

struct VoxelHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.x) * 73856093ULL;
    h ^= static_cast<std::size_t>(k.y) * 19349663ULL;
    h ^= static_cast<std::size_t>(k.z) * 83492791ULL;
    return h;
  }
};

inline VoxelKey voxel_of(const Point& p, double voxel) {
  return VoxelKey{static_cast<long long>(std::floor(p.x / voxel)),
                  static_cast<long long>(std::floor(p.y / voxel)),
                  static_cast<long long>(std::floor(p.z / voxel))};
}

}  // namespace

std::vector<std::vector<std::size_t>> cluster_points(const PointCloud& cloud,
                                                     const ClusterConfig& config) {
  validate(config);
  const std::size_t n = cloud.size();
  std::unordered_map<VoxelKey, std::vector<std::size_t>, VoxelHash> grid;
  std::vector<VoxelKey> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    keys[i] = voxel_of(cloud.points[i], config.voxel_size);
    grid[keys[i]].push_back(i);  // ascending i per voxel
  }

  std::vector<int> label(n, -1);
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> stack;
  // Seeding in point order (not hash order) keeps the result a pure function
  // of positions and yields the canonical ordering for free.
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (label[seed] != -1) continue;
    const int id = static_cast<int>(clusters.size());
    clusters.emplace_back();
    stack.assign(1, seed);
    label[seed] = id;
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      clusters.back().push_back(cur);
      const VoxelKey k = keys[cur];
      for (long long dz = -1; dz <= 1; ++dz) {
        for (long long dy = -1; dy <= 1; ++dy) {
          for (long long dx = -1; dx <= 1; ++dx) {
            if (config.connectivity == 6 && (std::llabs(dx) + std::llabs(dy) + std::llabs(dz)) > 1)
              continue;
            const auto it = grid.find(VoxelKey{k.x + dx, k.y + dy, k.z + dz});
            if (it == grid.end()) continue;
            for (std::size_t j : it->second) {
              if (label[j] == -1) {
                label[j] = id;
                stack.push_back(j);
              }
            }
          }
        }
      }
    }
    std::sort(clusters.back().begin(), clusters.back().end());
  }

  std::vector<std::vector<std::size_t>> kept;
  for (auto& c : clusters) {
    if (c.size() >= config.min_points) kept.push_back(std::move(c));
  }
  return kept;  // already ordered by smallest contained index (== seed order)
}

Detection fit_box(const PointCloud& cloud, const std::vector<std::size_t>& cluster) {
  if (cluster.empty()) throw EmptyCluster();
  double mn[3] = {cloud.points[cluster[0]].x, cloud.points[cluster[0]].y,
                  cloud.points[cluster[0]].z};
  double mx[3] = {mn[0], mn[1], mn[2]};
  for (std::size_t idx : cluster) {
    const Point& p = cloud.points[idx];
    mn[0] = std::min(mn[0], p.x);
    mn[1] = std::min(mn[1], p.y);
    mn[2] = std::min(mn[2], p.z);
    mx[0] = std::max(mx[0], p.x);
    mx[1] = std::max(mx[1], p.y);
    mx[2] = std::max(mx[2], p.z);
  }
  Detection det;
  det.box.center = Vec3{(mn[0] + mx[0]) * 0.5, (mn[1] + mx[1]) * 0.5, (mn[2] + mx[2]) * 0.5};
  for (int a = 0; a < 3; ++a)
    det.box.size[static_cast<std::size_t>(a)] = std::max(mx[a] - mn[a], 0.1);
  det.box.yaw = 0.0;
  det.box.class_id = "object";
  const double n = static_cast<double>(cluster.size());
  det.confidence = n / (n + 10.0);
  return det;
}

DetectionSet detect(const PointCloud& cloud, const ClusterConfig& config) {
  DetectionSet set;
  set.source = "detect";
  for (const auto& cluster : cluster_points(cloud, config)) {
    Detection det = fit_box(cloud, cluster);
    det.source = set.source;
    set.detections.push_back(std::move(det));
  }
  return set;
}

DetectionSet run_expert(const PointCloud& cloud, const ExpertSpec& spec,
                        const ClusterConfig& config) {
  if (!(spec.r1 >= 0.0) || !(spec.r1 < spec.r2)) throw InvalidInterval("expert needs 0 <= r1 < r2");
  const PointCloud sub = threshold_cloud(cloud, spec.r1, spec.r2);
  DetectionSet set = detect(sub, config);
  set.source = spec.label();
  for (Detection& det : set.detections) det.source = set.source;
  return set;
}

DetectionSet late_fuse(const DetectionSet& mid, const DetectionSet& long_range, double boundary) {
  if (!(boundary > 0.0)) throw InvalidInterval("fusion boundary must be positive");
  DetectionSet fused;
  fused.source = "fused";
  for (const Detection& det : mid.detections) {
    if (linf_range(det.box.center) < boundary) fused.detections.push_back(det);
  }
  for (const Detection& det : long_range.detections) {
    if (linf_range(det.box.center) >= boundary) fused.detections.push_back(det);
  }
  return fused;
}

DetectionSet dedupe_boundary(const DetectionSet& fused, double center_dist) {
  std::vector<std::size_t> order(fused.detections.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fused.detections[a].confidence > fused.detections[b].confidence;
  });
  DetectionSet out;
  out.source = fused.source;
  const double d2 = center_dist * center_dist;
  for (std::size_t idx : order) {
    const Detection& cand = fused.detections[idx];
    bool duplicate = false;
    for (const Detection& kept : out.detections) {
      if (kept.box.class_id != cand.box.class_id) continue;
      const Vec3 d = kept.box.center - cand.box.center;
      if (d.x * d.x + d.y * d.y + d.z * d.z <= d2) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) out.detections.push_back(cand);
  }
  return out;
}

}  // namespace lrdet
