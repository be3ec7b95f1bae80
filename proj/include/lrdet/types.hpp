#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lrdet/errors.hpp"

namespace lrdet {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }

enum class Provenance : std::uint8_t { kReal = 0, kVirtual = 1 };

// One LiDAR return (or synthesized point) in the ego frame: x forward, y left,
// z up. Coordinates are doubles in memory but every point-producing operation
// quantizes through float32 (the wire precision of cloud.bin), so clouds
// round-trip through files bit-exactly.
struct Point {
  double x = 0.0, y = 0.0, z = 0.0;
  double intensity = 0.0;  // [0, 1]
  Provenance provenance = Provenance::kReal;
};

inline double quantize_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

inline Point make_point(double x, double y, double z, double intensity,
                        Provenance prov = Provenance::kReal) {
  return Point{quantize_f32(x), quantize_f32(y), quantize_f32(z), quantize_f32(intensity), prov};
}

inline void validate(const Point& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
    throw Error("point has non-finite coordinates");
  if (!(p.intensity >= 0.0 && p.intensity <= 1.0))
    throw Error("point intensity outside [0, 1]");
}

// Ordered container; filtering operations preserve relative order, which is
// what makes every downstream artifact byte-deterministic.
struct PointCloud {
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// Column extraction for the kernel layer (structure-of-arrays views).
void extract_xy(const PointCloud& cloud, std::vector<double>& xs, std::vector<double>& ys);
void extract_xyz(const PointCloud& cloud, std::vector<double>& xs, std::vector<double>& ys,
                 std::vector<double>& zs);

// Oriented box: center, full sizes (l, w, h), yaw about +z, category label.
struct Box3D {
  Vec3 center;
  std::array<double, 3> size = {1.0, 1.0, 1.0};  // l, w, h (> 0)
  double yaw = 0.0;                              // [-pi, pi)
  std::string class_id;
};

inline void validate(const Box3D& b) {
  if (!(b.size[0] > 0.0 && b.size[1] > 0.0 && b.size[2] > 0.0))
    throw Error("box sizes must be positive");
  if (!(b.yaw >= -M_PI && b.yaw < M_PI)) throw Error("box yaw outside [-pi, pi)");
  if (!std::isfinite(b.center.x) || !std::isfinite(b.center.y) || !std::isfinite(b.center.z))
    throw Error("box center has non-finite coordinates");
}

struct Detection {
  Box3D box;
  double confidence = 0.0;  // [0, 1]
  std::string source;       // which expert/stage produced it
};

inline void validate(const Detection& d) {
  validate(d.box);
  if (!(d.confidence >= 0.0 && d.confidence <= 1.0))
    throw Error("detection confidence outside [0, 1]");
}

// Rigid transform: p_out = R * p_in + t. Stored row-major.
struct Pose {
  std::array<double, 9> rotation = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  Vec3 translation;

  double r(int row, int col) const { return rotation[static_cast<std::size_t>(row * 3 + col)]; }
};

void validate(const Pose& pose);  // orthonormal, det +1, tolerance 1e-9
Pose inverse(const Pose& pose);
Pose rotation_z(double angle);  // pure rotation about +z

// Pinhole camera. Camera frame: z forward, x right, y down.
struct CameraModel {
  std::string camera_id;
  double fx = 1.0, fy = 1.0;  // > 0
  double cx = 0.0, cy = 0.0;  // inside the image
  int width = 0, height = 0;  // > 0
  Pose ego_to_cam;
};

void validate(const CameraModel& cam);

}  // namespace lrdet
