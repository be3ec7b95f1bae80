#include "lrdet/virtual_points.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "lrdet/util.hpp"

namespace lrdet {

bool InstanceMask::contains(int u, int v) const {
  return std::binary_search(pixels.begin(), pixels.end(), std::make_pair(v, u));
}

void validate(const InstanceMask& mask) {
  if (mask.pixels.empty()) throw Error("instance mask has no pixels");
  if (!std::is_sorted(mask.pixels.begin(), mask.pixels.end()))
    throw Error("instance mask pixels not in canonical order");
  if (std::adjacent_find(mask.pixels.begin(), mask.pixels.end()) != mask.pixels.end())
    throw Error("instance mask has duplicate pixels");
}

std::vector<ProjectedPoint> project_cloud_to_image(const CameraModel& cam,
                                                   const PointCloud& cloud) {
  std::vector<double> xs, ys, zs;
  extract_xyz(cloud, xs, ys, zs);
  std::vector<double> u(cloud.size()), v(cloud.size()), depth(cloud.size());
  if (!cloud.empty()) {
    const kernels::ProjectionParams params = projection_params(cam);
    kernels::project_points(params, xs.data(), ys.data(), zs.data(), u.data(), v.data(),
                            depth.data(), cloud.size());
  }
  std::vector<ProjectedPoint> out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (depth[i] > kDepthEpsilon && u[i] >= 0.0 && u[i] < cam.width && v[i] >= 0.0 &&
        v[i] < cam.height) {
      out.push_back(ProjectedPoint{u[i], v[i], depth[i], i});
    }
  }
  return out;
}

std::vector<std::pair<int, int>> sample_mask_pixels(const InstanceMask& mask, std::uint64_t s,
                                                    Rng& rng) {
  const std::size_t n = mask.pixels.size();
  const std::size_t k = static_cast<std::size_t>(std::min<std::uint64_t>(s, n));
  std::vector<std::pair<int, int>> pool = mask.pixels;  // canonical (v, u) order
  std::vector<std::pair<int, int>> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {  // partial Fisher-Yates
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
    std::swap(pool[i], pool[j]);
    out.emplace_back(pool[i].second, pool[i].first);  // -> (u, v)
  }
  return out;
}

std::vector<double> assign_depth_nn(const std::vector<std::pair<int, int>>& samples,
                                    const std::vector<ProjectedPoint>& projected) {
  if (projected.empty()) throw NoLidarInView();
  std::vector<double> pu(projected.size()), pv(projected.size());
  for (std::size_t i = 0; i < projected.size(); ++i) {
    pu[i] = projected[i].u;
    pv[i] = projected[i].v;
  }
  std::vector<double> depths;
  depths.reserve(samples.size());
  for (const auto& [su, sv] : samples) {
    // candidates are in ascending source_index order, and the kernel breaks
    // distance ties toward the lowest array index
    const std::size_t idx = kernels::nearest_pixel(static_cast<double>(su),
                                                   static_cast<double>(sv), pu.data(), pv.data(),
                                                   projected.size());
    depths.push_back(projected[idx].depth);
  }
  return depths;
}

namespace {

struct PixelKey {
  std::size_t operator()(const std::pair<int, int>& p) const {
    return std::hash<long long>()((static_cast<long long>(p.first) << 32) ^
                                  static_cast<unsigned>(p.second));
  }
};

}  // namespace

PointCloud generate_virtual_points(const std::vector<CameraModel>& cameras,
                                   const PointCloud& cloud,
                                   const std::vector<InstanceMask>& masks,
                                   const MvpConfig& config, unsigned threads) {
  // resolve + project once per camera
  std::unordered_map<std::string, std::size_t> cam_index;
  for (std::size_t c = 0; c < cameras.size(); ++c) cam_index[cameras[c].camera_id] = c;
  std::vector<bool> cam_used(cameras.size(), false);
  std::vector<std::size_t> mask_cam(masks.size());
  for (std::size_t m = 0; m < masks.size(); ++m) {
    const auto it = cam_index.find(masks[m].camera_id);
    if (it == cam_index.end())
      throw UnknownCamera("mask references unknown camera '" + masks[m].camera_id + "'");
    mask_cam[m] = it->second;
    cam_used[it->second] = true;
  }
  std::vector<std::vector<ProjectedPoint>> projections(cameras.size());
  for (std::size_t c = 0; c < cameras.size(); ++c) {
    if (cam_used[c]) projections[c] = project_cloud_to_image(cameras[c], cloud);
  }

  const auto per_mask = [&](std::size_t m) -> std::vector<Point> {
    const InstanceMask& mask = masks[m];
    validate(mask);
    const CameraModel& cam = cameras[mask_cam[m]];
    const std::vector<ProjectedPoint>& all = projections[mask_cam[m]];

    std::unordered_set<std::pair<int, int>, PixelKey> pixel_set(mask.pixels.begin(),
                                                                mask.pixels.end());
    std::vector<ProjectedPoint> in_mask;
    for (const ProjectedPoint& pp : all) {
      const int pu = static_cast<int>(std::floor(pp.u));
      const int pv = static_cast<int>(std::floor(pp.v));
      if (pixel_set.count({pv, pu})) in_mask.push_back(pp);
    }
    if (in_mask.empty()) return {};  // nothing to anchor depth on: skip mask

    Rng rng = Rng::substream(config.rng_seed, m);
    const auto samples = sample_mask_pixels(mask, config.s, rng);
    const auto depths = assign_depth_nn(samples, in_mask);
    std::vector<Point> out;
    out.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      out.push_back(unproject(cam, static_cast<double>(samples[i].first),
                              static_cast<double>(samples[i].second), depths[i]));
    }
    return out;
  };

  const auto chunks = parallel_map<std::vector<Point>>(masks.size(), threads, per_mask);
  PointCloud virtual_cloud;
  for (const auto& chunk : chunks) {
    virtual_cloud.points.insert(virtual_cloud.points.end(), chunk.begin(), chunk.end());
  }
  return virtual_cloud;
}

PointCloud fuse_clouds(const PointCloud& real, const PointCloud& virtual_points) {
  PointCloud fused;
  fused.points.reserve(real.size() + virtual_points.size());
  fused.points.insert(fused.points.end(), real.points.begin(), real.points.end());
  fused.points.insert(fused.points.end(), virtual_points.points.begin(),
                      virtual_points.points.end());
  return fused;
}

}  // namespace lrdet
