#include "lrdet/geometry.hpp"

#include <cmath>

namespace lrdet {

void extract_xy(const PointCloud& cloud, std::vector<double>& xs, std::vector<double>& ys) {
  xs.resize(cloud.size());
  ys.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    xs[i] = cloud.points[i].x;
    ys[i] = cloud.points[i].y;
  }
}

void extract_xyz(const PointCloud& cloud, std::vector<double>& xs, std::vector<double>& ys,
                 std::vector<double>& zs) {
  extract_xy(cloud, xs, ys);
  zs.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) zs[i] = cloud.points[i].z;
}

namespace {

// Same left-associated dot order as kernels::detail::project_one.
inline Vec3 rotate(const std::array<double, 9>& r, const Vec3& p) {
  return Vec3{((r[0] * p.x + r[1] * p.y) + r[2] * p.z),
              ((r[3] * p.x + r[4] * p.y) + r[5] * p.z),
              ((r[6] * p.x + r[7] * p.y) + r[8] * p.z)};
}

}  // namespace

void validate(const Pose& pose) {
  const auto& m = pose.rotation;
  constexpr double tol = 1e-9;
  // rows orthonormal
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += m[static_cast<std::size_t>(a * 3 + k)] * m[static_cast<std::size_t>(b * 3 + k)];
      const double want = (a == b) ? 1.0 : 0.0;
      if (std::fabs(dot - want) > tol) throw Error("pose rotation is not orthonormal");
    }
  }
  const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
                     m[2] * (m[3] * m[7] - m[4] * m[6]);
  if (std::fabs(det - 1.0) > tol) throw Error("pose rotation determinant must be +1");
  if (!std::isfinite(pose.translation.x) || !std::isfinite(pose.translation.y) ||
      !std::isfinite(pose.translation.z))
    throw Error("pose translation has non-finite entries");
}

Pose inverse(const Pose& pose) {
  Pose inv;
  const auto& m = pose.rotation;
  inv.rotation = {m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]};  // transpose
  const Vec3 t = rotate(inv.rotation, pose.translation);
  inv.translation = Vec3{-t.x, -t.y, -t.z};
  return inv;
}

Pose rotation_z(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Pose pose;
  pose.rotation = {c, -s, 0, s, c, 0, 0, 0, 1};
  return pose;
}

void validate(const CameraModel& cam) {
  if (!(cam.fx > 0.0 && cam.fy > 0.0)) throw Error("camera focal lengths must be positive");
  if (!(cam.width > 0 && cam.height > 0)) throw Error("camera image size must be positive");
  if (!(cam.cx >= 0.0 && cam.cx < cam.width && cam.cy >= 0.0 && cam.cy < cam.height))
    throw Error("camera principal point outside the image");
  validate(cam.ego_to_cam);
}

Vec3 transform_point(const Pose& pose, const Vec3& p) {
  const Vec3 r = rotate(pose.rotation, p);
  return Vec3{r.x + pose.translation.x, r.y + pose.translation.y, r.z + pose.translation.z};
}

Point transform_point(const Pose& pose, const Point& p) {
  const Vec3 out = transform_point(pose, Vec3{p.x, p.y, p.z});
  Point q = p;
  q.x = out.x;
  q.y = out.y;
  q.z = out.z;
  return q;
}

kernels::ProjectionParams projection_params(const CameraModel& cam) {
  kernels::ProjectionParams p;
  for (int i = 0; i < 9; ++i) p.r[i] = cam.ego_to_cam.rotation[static_cast<std::size_t>(i)];
  p.t[0] = cam.ego_to_cam.translation.x;
  p.t[1] = cam.ego_to_cam.translation.y;
  p.t[2] = cam.ego_to_cam.translation.z;
  p.fx = cam.fx;
  p.fy = cam.fy;
  p.cx = cam.cx;
  p.cy = cam.cy;
  return p;
}

PixelPoint project(const CameraModel& cam, const Point& p) {
  const kernels::ProjectionParams params = projection_params(cam);
  double u, v, depth;
  kernels::detail::project_one(params, p.x, p.y, p.z, u, v, depth);
  if (!(depth > kDepthEpsilon)) throw BehindCamera();
  return PixelPoint{u, v, depth};
}

Point unproject(const CameraModel& cam, double u, double v, double depth) {
  if (!(depth > 0.0)) throw NonPositiveDepth();
  const Vec3 cam_point{(u - cam.cx) / cam.fx * depth, (v - cam.cy) / cam.fy * depth, depth};
  const Vec3 ego = transform_point(inverse(cam.ego_to_cam), cam_point);
  return make_point(ego.x, ego.y, ego.z, 0.0, Provenance::kVirtual);
}

bool box_contains(const Box3D& box, const Vec3& p) {
  const double dx = p.x - box.center.x;
  const double dy = p.y - box.center.y;
  const double dz = p.z - box.center.z;
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double lx = c * dx + s * dy;  // R_z(yaw)^T
  const double ly = -s * dx + c * dy;
  return std::fabs(lx) <= box.size[0] * 0.5 && std::fabs(ly) <= box.size[1] * 0.5 &&
         std::fabs(dz) <= box.size[2] * 0.5;
}

std::array<Vec3, 8> box_corners(const Box3D& box) {
  const double hx = box.size[0] * 0.5;
  const double hy = box.size[1] * 0.5;
  const double hz = box.size[2] * 0.5;
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  std::array<Vec3, 8> corners;
  int k = 0;
  for (double sz : {-hz, hz}) {
    for (double sy : {-hy, hy}) {
      for (double sx : {-hx, hx}) {
        corners[static_cast<std::size_t>(k++)] =
            Vec3{box.center.x + c * sx - s * sy, box.center.y + s * sx + c * sy,
                 box.center.z + sz};
      }
    }
  }
  return corners;
}

}  // namespace lrdet
