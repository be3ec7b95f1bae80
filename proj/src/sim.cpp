#include "lrdet/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lrdet/geometry.hpp"
#include "lrdet/range.hpp"
#include "lrdet/util.hpp"

namespace lrdet {

namespace {

constexpr std::uint64_t kStreamPlacement = 1;
constexpr std::uint64_t kStreamGround = 2;
constexpr std::uint64_t kStreamObjectBase = 0x10000;

void validate_config(const SceneConfig& config) {
  if (!(config.r_min > 0.0 && config.r_min < config.r_max))
    throw Error("scene range law needs 0 < r_min < r_max");
  if (config.classes.empty()) throw Error("scene needs at least one class");
  for (const ClassSpec& cls : config.classes) {
    if (!(cls.size[0] > 0.0 && cls.size[1] > 0.0 && cls.size[2] > 0.0))
      throw Error("class size prior must be positive");
    if (!(cls.size_jitter >= 0.0 && cls.size_jitter < 1.0))
      throw Error("size jitter must be in [0, 1)");
    if (!(cls.weight > 0.0)) throw Error("class weight must be positive");
  }
  if (!(config.density_k >= 0.0)) throw Error("density_k must be non-negative");
  if (config.max_retries < 1) throw Error("max_retries must be >= 1");
  for (const CameraModel& cam : config.cameras) validate(cam);
}

// One rectangular face in box-frame coordinates: origin corner + two spanning
// axes (unit, scaled by extent); normal used for the facing test.
struct Face {
  Vec3 bf_normal;
  int axis_a, axis_b;     // box-frame axes the face spans
  double half_a, half_b;  // their half extents
  double bf_fixed;        // coordinate along the normal axis
  int fixed_axis;
  double area;
};

std::vector<Face> visible_faces(const Box3D& box) {
  const double hl = box.size[0] * 0.5, hw = box.size[1] * 0.5, hh = box.size[2] * 0.5;
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  const Vec3 to_origin{-box.center.x, -box.center.y, -box.center.z};

  std::vector<Face> faces;
  // +-x pair (area w*h), +-y pair (area l*h): keep the strictly origin-facing one
  for (int axis = 0; axis < 2; ++axis) {
    for (double side : {-1.0, 1.0}) {
      Vec3 world_normal;
      if (axis == 0)
        world_normal = Vec3{c * side, s * side, 0.0};
      else
        world_normal = Vec3{-s * side, c * side, 0.0};
      const double dot = world_normal.x * to_origin.x + world_normal.y * to_origin.y;
      if (dot > 0.0) {
        Face f;
        f.fixed_axis = axis;
        f.bf_fixed = side * (axis == 0 ? hl : hw);
        f.axis_a = (axis == 0) ? 1 : 0;
        f.axis_b = 2;
        f.half_a = (axis == 0) ? hw : hl;
        f.half_b = hh;
        f.area = 2.0 * f.half_a * 2.0 * f.half_b;
        faces.push_back(f);
      }
    }
  }
  // top face, always part of the visible set
  Face top;
  top.fixed_axis = 2;
  top.bf_fixed = hh;
  top.axis_a = 0;
  top.axis_b = 1;
  top.half_a = hl;
  top.half_b = hw;
  top.area = 2.0 * hl * 2.0 * hw;
  faces.push_back(top);
  return faces;
}

Point sample_on_faces(const Box3D& box, const std::vector<Face>& faces, double total_area,
                      Rng& rng) {
  const double pick = rng.uniform01() * total_area;
  double acc = 0.0;
  const Face* chosen = &faces.back();
  for (const Face& f : faces) {
    acc += f.area;
    if (pick < acc) {
      chosen = &f;
      break;
    }
  }
  double bf[3] = {0, 0, 0};
  bf[chosen->fixed_axis] = chosen->bf_fixed;
  bf[chosen->axis_a] = rng.uniform(-chosen->half_a, chosen->half_a);
  bf[chosen->axis_b] = rng.uniform(-chosen->half_b, chosen->half_b);
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  const double x = box.center.x + c * bf[0] - s * bf[1];
  const double y = box.center.y + s * bf[0] + c * bf[1];
  const double z = box.center.z + bf[2];
  return make_point(x, y, z, rng.uniform01(), Provenance::kReal);
}

double total_area(const std::vector<Face>& faces) {
  double a = 0.0;
  for (const Face& f : faces) a += f.area;
  return a;
}

}  // namespace

double expected_surface_point_count(const Box3D& box, double range, double density_k) {
  if (!(range > 0.0)) throw Error("range must be positive");
  return density_k * total_area(visible_faces(box)) / (range * range);
}

PointCloud sample_surface_points(const Box3D& box, double range, double density_k, Rng& rng) {
  if (!(range > 0.0)) throw Error("range must be positive");
  const std::vector<Face> faces = visible_faces(box);
  const double area = total_area(faces);
  const double lambda = density_k * area / (range * range);
  const std::uint64_t count = rng.poisson(lambda);
  PointCloud cloud;
  cloud.points.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    cloud.points.push_back(sample_on_faces(box, faces, area, rng));
  }
  return cloud;
}

std::vector<CameraModel> default_camera_rig() {
  const char* names[4] = {"cam_front", "cam_left", "cam_back", "cam_right"};
  // exact cos/sin for yaw 0, pi/2, pi, -pi/2 — keeps the axis-aligned rig
  // axis-aligned to the last bit instead of carrying sin(pi) ~ 1e-16 noise
  const double cos_yaw[4] = {1.0, 0.0, -1.0, 0.0};
  const double sin_yaw[4] = {0.0, 1.0, 0.0, -1.0};
  const Vec3 mount{0.0, 0.0, 1.6};
  std::vector<CameraModel> rig;
  for (int i = 0; i < 4; ++i) {
    CameraModel cam;
    cam.camera_id = names[i];
    cam.fx = cam.fy = 800.0;
    cam.width = 2048;
    cam.height = 1536;
    cam.cx = 1024.0;
    cam.cy = 768.0;
    // camera frame: z forward, x right, y down
    const double c = cos_yaw[i], s = sin_yaw[i];
    cam.ego_to_cam.rotation = {s, -c, 0,   // right
                               0, 0,  -1,  // down
                               c, s,  0};  // forward
    const Vec3 rc = transform_point(Pose{cam.ego_to_cam.rotation, Vec3{}}, mount);
    cam.ego_to_cam.translation = Vec3{-rc.x, -rc.y, -rc.z};
    rig.push_back(cam);
  }
  return rig;
}

SceneConfig default_scene_config() {
  SceneConfig config;
  config.cameras = default_camera_rig();
  return config;
}

namespace {

// 2D convex hull, monotone chain, CCW, no collinear points.
std::vector<std::pair<double, double>> convex_hull(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  const auto cross = [](const std::pair<double, double>& o, const std::pair<double, double>& a,
                        const std::pair<double, double>& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<double, double>> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

std::optional<InstanceMask> render_mask(const CameraModel& cam, const Box3D& box,
                                        const std::string& class_id) {
  const kernels::ProjectionParams params = projection_params(cam);
  std::vector<std::pair<double, double>> projected;
  for (const Vec3& corner : box_corners(box)) {
    double u, v, depth;
    kernels::detail::project_one(params, corner.x, corner.y, corner.z, u, v, depth);
    if (depth > kDepthEpsilon) projected.emplace_back(u, v);
  }
  if (projected.empty()) return std::nullopt;
  const auto hull = convex_hull(std::move(projected));
  if (hull.size() < 3) return std::nullopt;

  double min_v = hull[0].second, max_v = hull[0].second;
  for (const auto& p : hull) {
    min_v = std::min(min_v, p.second);
    max_v = std::max(max_v, p.second);
  }
  const int v_lo = std::max(0, static_cast<int>(std::ceil(min_v)));
  const int v_hi = std::min(cam.height - 1, static_cast<int>(std::floor(max_v)));

  InstanceMask mask;
  mask.camera_id = cam.camera_id;
  mask.class_id = class_id;
  for (int v = v_lo; v <= v_hi; ++v) {
    const double y = static_cast<double>(v);
    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const auto& a = hull[i];
      const auto& b = hull[(i + 1) % hull.size()];
      if (a.second == b.second) {
        if (a.second == y) {
          x_lo = std::min({x_lo, a.first, b.first});
          x_hi = std::max({x_hi, a.first, b.first});
        }
        continue;
      }
      const double t = (y - a.second) / (b.second - a.second);
      if (t < 0.0 || t > 1.0) continue;
      const double x = a.first + t * (b.first - a.first);
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
    }
    if (!(x_lo <= x_hi)) continue;
    const int u_lo = std::max(0, static_cast<int>(std::ceil(x_lo)));
    const int u_hi = std::min(cam.width - 1, static_cast<int>(std::floor(x_hi)));
    for (int u = u_lo; u <= u_hi; ++u) mask.pixels.emplace_back(v, u);
  }
  if (mask.pixels.empty()) return std::nullopt;
  return mask;
}

namespace {

struct Placement {
  Box3D box;
  double azimuth = 0.0;
  double range = 0.0;  // L-inf of the center
};

double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

double circumradius_xy(const Box3D& box) { return std::hypot(box.size[0], box.size[1]) * 0.5; }

std::vector<Placement> place_objects(const SceneConfig& config, Rng& rng) {
  double weight_total = 0.0;
  for (const ClassSpec& cls : config.classes) weight_total += cls.weight;

  std::vector<Placement> placed;
  for (std::uint64_t i = 0; i < config.n_objects; ++i) {
    bool ok = false;
    for (std::uint64_t attempt = 0; attempt < config.max_retries && !ok; ++attempt) {
      // class by weight
      const double pick = rng.uniform01() * weight_total;
      double acc = 0.0;
      const ClassSpec* cls = &config.classes.back();
      for (const ClassSpec& c : config.classes) {
        acc += c.weight;
        if (pick < acc) {
          cls = &c;
          break;
        }
      }
      Placement cand;
      for (int d = 0; d < 3; ++d) {
        cand.box.size[static_cast<std::size_t>(d)] =
            cls->size[static_cast<std::size_t>(d)] *
            (1.0 + cls->size_jitter * rng.uniform(-1.0, 1.0));
      }
      cand.range = rng.log_uniform(config.r_min, config.r_max);
      cand.azimuth = rng.uniform(0.0, 2.0 * M_PI);
      cand.box.yaw = rng.uniform(-M_PI, M_PI);
      cand.box.class_id = cls->name;
      // center with L-inf range == cand.range along the azimuth
      const double dir_x = std::cos(cand.azimuth);
      const double dir_y = std::sin(cand.azimuth);
      const double scale = cand.range / std::max(std::fabs(dir_x), std::fabs(dir_y));
      cand.box.center =
          Vec3{scale * dir_x, scale * dir_y, cand.box.size[2] * 0.5};  // resting on the ground

      bool clash = false;
      const double circ_c = circumradius_xy(cand.box);
      for (const Placement& other : placed) {
        const double dx = cand.box.center.x - other.box.center.x;
        const double dy = cand.box.center.y - other.box.center.y;
        const double need = circ_c + circumradius_xy(other.box) + config.min_gap;
        if (dx * dx + dy * dy < need * need) {
          clash = true;
          break;
        }
        if (config.angular_margin > 0.0) {
          const double gap = std::fabs(wrap_angle(cand.azimuth - other.azimuth));
          const double need_ang =
              config.angular_margin *
              (std::atan(circ_c / cand.range) + std::atan(circumradius_xy(other.box) / other.range));
          if (gap < need_ang) {
            clash = true;
            break;
          }
        }
      }
      if (!clash) {
        placed.push_back(cand);
        ok = true;
      }
    }
    if (!ok)
      throw PlacementFailure("object " + std::to_string(i) + " could not be placed after " +
                             std::to_string(config.max_retries) + " attempts");
  }
  return placed;
}

}  // namespace

Scene generate_scene(const SceneConfig& config, unsigned threads) {
  validate_config(config);
  Scene scene;
  scene.cameras = config.cameras;

  Rng place_rng = Rng::substream(config.seed, kStreamPlacement);
  const std::vector<Placement> placed = place_objects(config, place_rng);
  for (const Placement& p : placed) scene.gt.push_back(p.box);

  // surface points, one independent substream per object
  const auto object_points = parallel_map<PointCloud>(
      placed.size(), threads, [&](std::size_t i) -> PointCloud {
        Rng rng = Rng::substream(config.seed, kStreamObjectBase + i);
        PointCloud cloud =
            sample_surface_points(placed[i].box, placed[i].range, config.density_k, rng);
        const std::vector<Face> faces = visible_faces(placed[i].box);
        const double area = total_area(faces);
        while (cloud.size() < config.min_pts_floor) {
          cloud.points.push_back(sample_on_faces(placed[i].box, faces, area, rng));
        }
        return cloud;
      });
  for (const PointCloud& chunk : object_points) {
    scene.cloud.points.insert(scene.cloud.points.end(), chunk.points.begin(), chunk.points.end());
  }

  if (config.ground.enabled) {
    Rng rng = Rng::substream(config.seed, kStreamGround);
    const double expected = 2.0 * M_PI * config.ground.density_k *
                            std::log(config.ground.r_max / config.ground.r_min);
    const std::uint64_t count = rng.poisson(expected);
    for (std::uint64_t i = 0; i < count; ++i) {
      const double r = rng.log_uniform(config.ground.r_min, config.ground.r_max);
      const double a = rng.uniform(0.0, 2.0 * M_PI);
      scene.cloud.points.push_back(
          make_point(r * std::cos(a), r * std::sin(a), 0.0, rng.uniform01(), Provenance::kReal));
    }
  }

  // masks, camera-major order
  for (const CameraModel& cam : scene.cameras) {
    for (std::size_t i = 0; i < placed.size(); ++i) {
      auto mask = render_mask(cam, placed[i].box, placed[i].box.class_id);
      if (mask) {
        scene.masks.push_back(std::move(*mask));
        scene.mask_object.push_back(i);
      }
    }
  }
  return scene;
}

}  // namespace lrdet
