#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "lrdet/geometry.hpp"
#include "lrdet/rng.hpp"

using namespace lrdet;

namespace {

Pose random_pose(Rng& rng) {
  const Eigen::Vector3d axis =
      Eigen::Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized();
  const Eigen::Matrix3d rot =
      Eigen::AngleAxisd(rng.uniform(-M_PI, M_PI), axis).toRotationMatrix();
  Pose pose;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) pose.rotation[static_cast<std::size_t>(r * 3 + c)] = rot(r, c);
  pose.translation = Vec3{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
  return pose;
}

CameraModel random_camera(Rng& rng) {
  CameraModel cam;
  cam.camera_id = "test";
  cam.fx = rng.uniform(400, 1200);
  cam.fy = rng.uniform(400, 1200);
  cam.width = 2048;
  cam.height = 1536;
  cam.cx = rng.uniform(900, 1100);
  cam.cy = rng.uniform(700, 830);
  cam.ego_to_cam = random_pose(rng);
  return cam;
}

}  // namespace

TEST_CASE("transform_point matches the Eigen oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Pose pose = random_pose(rng);
    validate(pose);
    Eigen::Matrix3d rot;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) rot(r, c) = pose.r(r, c);
    const Eigen::Vector3d t(pose.translation.x, pose.translation.y, pose.translation.z);
    for (int i = 0; i < 5; ++i) {
      const Vec3 p{rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(-100, 100)};
      const Eigen::Vector3d expected = rot * Eigen::Vector3d(p.x, p.y, p.z) + t;
      const Vec3 got = transform_point(pose, p);
      CHECK(std::fabs(got.x - expected.x()) <= 1e-12);
      CHECK(std::fabs(got.y - expected.y()) <= 1e-12);
      CHECK(std::fabs(got.z - expected.z()) <= 1e-12);
    }
  }
}

TEST_CASE("transform_point preserves intensity and provenance") {
  Rng rng(12);
  const Pose pose = random_pose(rng);
  const Point p = make_point(1, 2, 3, 0.5, Provenance::kVirtual);
  const Point q = transform_point(pose, p);
  CHECK(q.intensity == p.intensity);
  CHECK(q.provenance == Provenance::kVirtual);
}

TEST_CASE("pose validation rejects non-rigid matrices") {
  Pose scaled;
  scaled.rotation = {2, 0, 0, 0, 2, 0, 0, 0, 2};
  CHECK_THROWS_AS(validate(scaled), Error);

  Pose reflection;
  reflection.rotation = {1, 0, 0, 0, 1, 0, 0, 0, -1};  // det -1
  CHECK_THROWS_AS(validate(reflection), Error);

  Pose shear;
  shear.rotation = {1, 0.1, 0, 0, 1, 0, 0, 0, 1};
  CHECK_THROWS_AS(validate(shear), Error);

  CHECK_NOTHROW(validate(Pose{}));  // identity
}

TEST_CASE("pose inverse composes to the identity") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Pose pose = random_pose(rng);
    const Pose inv = inverse(pose);
    const Vec3 p{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const Vec3 round = transform_point(inv, transform_point(pose, p));
    CHECK(std::fabs(round.x - p.x) <= 1e-12);
    CHECK(std::fabs(round.y - p.y) <= 1e-12);
    CHECK(std::fabs(round.z - p.z) <= 1e-12);
  }
}

TEST_CASE("rotation_z matches Eigen") {
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const double angle = rng.uniform(-M_PI, M_PI);
    const Pose pose = rotation_z(angle);
    validate(pose);
    const Eigen::Matrix3d expected =
        Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) CHECK(std::fabs(pose.r(r, c) - expected(r, c)) <= 1e-15);
  }
}

TEST_CASE("project matches a manual pinhole computation") {
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const CameraModel cam = random_camera(rng);
    Eigen::Matrix3d rot;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) rot(r, c) = cam.ego_to_cam.r(r, c);
    const Eigen::Vector3d t(cam.ego_to_cam.translation.x, cam.ego_to_cam.translation.y,
                            cam.ego_to_cam.translation.z);
    // choose the point in the camera frame so depth is controlled, then pull
    // it back to the ego frame
    const Eigen::Vector3d pc(rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(0.5, 200));
    const Eigen::Vector3d pe = rot.transpose() * (pc - t);
    const Point p = make_point(pe.x(), pe.y(), pe.z(), 0.0);
    const PixelPoint px = project(cam, p);
    // recompute with the quantized ego point for an apples-to-apples check
    const Eigen::Vector3d qc = rot * Eigen::Vector3d(p.x, p.y, p.z) + t;
    CHECK(std::fabs(px.depth - qc.z()) <= 1e-9 * std::max(1.0, std::fabs(qc.z())));
    CHECK(std::fabs(px.u - (cam.fx * qc.x() / qc.z() + cam.cx)) <= 1e-7);
    CHECK(std::fabs(px.v - (cam.fy * qc.y() / qc.z() + cam.cy)) <= 1e-7);
  }
}

TEST_CASE("project throws BehindCamera for camera depth <= epsilon") {
  // identity extrinsics make the camera depth exactly the ego z coordinate
  CameraModel cam;
  cam.camera_id = "ident";
  cam.fx = cam.fy = 500;
  cam.cx = cam.cy = 250;
  cam.width = cam.height = 500;

  for (const double depth : {-50.0, -1e-9, 0.0, 1e-7, 1e-6}) {
    CHECK_THROWS_AS(project(cam, make_point(0.1, 0.2, depth, 0.0)), BehindCamera);
  }
  CHECK_NOTHROW(project(cam, make_point(0.1, 0.2, 2e-6, 0.0)));

  Rng rng(16);
  for (int trial = 0; trial < 200; ++trial) {
    const CameraModel rc = random_camera(rng);
    Eigen::Matrix3d rot;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) rot(r, c) = rc.ego_to_cam.r(r, c);
    const Eigen::Vector3d t(rc.ego_to_cam.translation.x, rc.ego_to_cam.translation.y,
                            rc.ego_to_cam.translation.z);
    const Eigen::Vector3d pc(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-100, -0.001));
    const Eigen::Vector3d pe = rot.transpose() * (pc - t);
    CHECK_THROWS_AS(project(rc, make_point(pe.x(), pe.y(), pe.z(), 0.0)), BehindCamera);
  }
}

TEST_CASE("project/unproject round-trip is exact for quantized points") {
  Rng rng(17);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const CameraModel cam = random_camera(rng);
    Eigen::Matrix3d rot;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) rot(r, c) = cam.ego_to_cam.r(r, c);
    const Eigen::Vector3d t(cam.ego_to_cam.translation.x, cam.ego_to_cam.translation.y,
                            cam.ego_to_cam.translation.z);
    const Eigen::Vector3d pc(rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(0.1, 250));
    const Eigen::Vector3d pe = rot.transpose() * (pc - t);
    const Point p = make_point(pe.x(), pe.y(), pe.z(), 0.0);

    PixelPoint px;
    try {
      px = project(cam, p);
    } catch (const BehindCamera&) {
      continue;  // quantization can push a razor-thin depth over the edge
    }
    const Point back = unproject(cam, px.u, px.v, px.depth);
    ++checked;
    // the criterion is 1e-6; quantized inputs actually round-trip bit-exactly
    CHECK(std::fabs(back.x - p.x) <= 1e-6);
    CHECK(std::fabs(back.y - p.y) <= 1e-6);
    CHECK(std::fabs(back.z - p.z) <= 1e-6);
    CHECK(back.provenance == Provenance::kVirtual);
    CHECK(back.intensity == 0.0);
  }
  CHECK(checked > 1900);
}

TEST_CASE("unproject rejects non-positive depth") {
  CameraModel cam;
  cam.camera_id = "ident";
  cam.fx = cam.fy = 500;
  cam.cx = cam.cy = 250;
  cam.width = cam.height = 500;
  CHECK_THROWS_AS(unproject(cam, 250, 250, 0.0), NonPositiveDepth);
  CHECK_THROWS_AS(unproject(cam, 250, 250, -3.0), NonPositiveDepth);
}

TEST_CASE("box_contains: frozen cases") {
  Box3D unit;
  unit.size = {1, 1, 1};
  unit.class_id = "object";
  CHECK(box_contains(unit, Vec3{0.5, 0.0, 0.0}));  // boundary is inside
  CHECK(box_contains(unit, Vec3{0.0, 0.0, 0.0}));
  CHECK_FALSE(box_contains(unit, Vec3{0.50001, 0.0, 0.0}));

  Box3D yawed;
  yawed.size = {2, 1, 1};
  yawed.yaw = M_PI / 2;  // long axis now along +y
  yawed.class_id = "object";
  CHECK(box_contains(yawed, Vec3{0.4, 0.9, 0.0}));
  CHECK_FALSE(box_contains(yawed, Vec3{0.9, 0.4, 0.0}));
}

TEST_CASE("box_contains is invariant under in-plane rigid motion") {
  Rng rng(18);
  for (int trial = 0; trial < 300; ++trial) {
    Box3D box;
    box.center = Vec3{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-2, 2)};
    box.size = {rng.uniform(0.5, 6), rng.uniform(0.5, 6), rng.uniform(0.5, 6)};
    box.yaw = rng.uniform(-M_PI, M_PI);
    box.class_id = "object";
    const Vec3 p{box.center.x + rng.uniform(-4, 4), box.center.y + rng.uniform(-4, 4),
                 box.center.z + rng.uniform(-4, 4)};

    const double angle = rng.uniform(-M_PI / 2, M_PI / 2);
    Pose motion = rotation_z(angle);
    motion.translation = Vec3{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20)};

    Box3D moved = box;
    moved.center = transform_point(motion, box.center);
    moved.yaw = box.yaw + angle;  // stays within (-3pi/2, 3pi/2); wrap for validity
    if (moved.yaw >= M_PI) moved.yaw -= 2 * M_PI;
    if (moved.yaw < -M_PI) moved.yaw += 2 * M_PI;

    // skip points too close to a face to survive floating-point motion
    const bool inside = box_contains(box, p);
    CHECK(box_contains(moved, transform_point(motion, p)) == inside);
  }
}

TEST_CASE("box_corners") {
  Box3D box;
  box.center = Vec3{10, -4, 2};
  box.size = {4, 2, 1};
  box.class_id = "object";

  SUBCASE("axis-aligned extents at yaw 0") {
    const auto corners = box_corners(box);
    double mn[3] = {1e300, 1e300, 1e300}, mx[3] = {-1e300, -1e300, -1e300};
    for (const Vec3& c : corners) {
      mn[0] = std::min(mn[0], c.x);
      mx[0] = std::max(mx[0], c.x);
      mn[1] = std::min(mn[1], c.y);
      mx[1] = std::max(mx[1], c.y);
      mn[2] = std::min(mn[2], c.z);
      mx[2] = std::max(mx[2], c.z);
    }
    CHECK(mx[0] - mn[0] == doctest::Approx(4.0));
    CHECK(mx[1] - mn[1] == doctest::Approx(2.0));
    CHECK(mx[2] - mn[2] == doctest::Approx(1.0));
    CHECK((mn[0] + mx[0]) / 2 == doctest::Approx(10.0));
  }

  SUBCASE("corners stay on the box under yaw") {
    box.yaw = 0.7;
    for (const Vec3& c : box_corners(box)) {
      // corners sit exactly on the boundary; probe a hair inside so the
      // inclusive test is robust to rotation round-trip noise
      const Vec3 probe{c.x + 1e-9 * (box.center.x - c.x), c.y + 1e-9 * (box.center.y - c.y),
                       c.z + 1e-9 * (box.center.z - c.z)};
      CHECK(box_contains(box, probe));
      // and a point nudged outward must be outside
      const Vec3 outside{c.x + 1e-3 * (c.x - box.center.x), c.y + 1e-3 * (c.y - box.center.y),
                         c.z + 1e-3 * (c.z - box.center.z)};
      CHECK_FALSE(box_contains(box, outside));
    }
  }

  SUBCASE("8 distinct corners") {
    const auto corners = box_corners(box);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = i + 1; j < 8; ++j) {
        const Vec3 d = corners[i] - corners[j];
        CHECK(std::fabs(d.x) + std::fabs(d.y) + std::fabs(d.z) > 0.5);
      }
  }
}
