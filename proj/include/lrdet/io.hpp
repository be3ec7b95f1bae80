#pragma once

// File formats:
//   cloud.bin         little-endian float32 quadruples (x, y, z, intensity)
//   *.provenance.json {"n_real": R, "n_virtual": V} sidecar (real points first)
//   gt.json           {"boxes": [{center, size, yaw, class_id}]}
//   detections.json   {"source", "detections": [{center, size, yaw, class_id,
//                      confidence, source}]}
//   cameras.json      {"cameras": [{camera_id, fx, fy, cx, cy, width, height,
//                      ego_to_cam: {rotation (3x3), translation}}]}
//   masks.json        {"masks": [{camera_id, class_id, rows: [{v, runs:
//                      [[u, len], ...]}]}]}  (run-length encoded pixel rows)
//   weights.json      {"edges", "counts"?, "weights", "r1", "r2"}
//   report.json       eval report with per-class and per-bin entries
// JSON numbers round-trip exactly (shortest-representation doubles).
// All writers are atomic (temp file + rename).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrdet/detector.hpp"
#include "lrdet/eval.hpp"
#include "lrdet/range.hpp"
#include "lrdet/sim.hpp"
#include "lrdet/types.hpp"
#include "lrdet/virtual_points.hpp"

namespace lrdet::io {

using json = nlohmann::json;

// --- cloud.bin ---
void write_cloud(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_cloud(const std::filesystem::path& path);  // provenance all-real
struct ProvenanceCounts {
  std::uint64_t n_real = 0, n_virtual = 0;
};
void write_provenance(const std::filesystem::path& path, const PointCloud& cloud);
// applies the sidecar split (real prefix, virtual suffix) to a loaded cloud
void apply_provenance(PointCloud& cloud, const ProvenanceCounts& counts);
ProvenanceCounts read_provenance(const std::filesystem::path& path);

// --- JSON converters ---
json to_json(const Vec3& v);
json to_json(const Pose& pose);
json to_json(const Box3D& box);
json to_json(const Detection& det);
json to_json(const DetectionSet& set);
json to_json(const CameraModel& cam);
json to_json(const InstanceMask& mask);
json to_json(const RangeWeights& weights);
json to_json(const EvalReport& report, const EvalConfig& config);
json to_json(const SceneConfig& config);

Vec3 vec3_from_json(const json& j);
RangeWeights weights_from_json(const json& j);
Pose pose_from_json(const json& j);
Box3D box_from_json(const json& j);
Detection detection_from_json(const json& j);
DetectionSet detection_set_from_json(const json& j);
CameraModel camera_from_json(const json& j);
InstanceMask mask_from_json(const json& j);
SceneConfig scene_config_from_json(const json& j);

// --- whole-file helpers (atomic writes, validated reads) ---
void write_json_file(const std::filesystem::path& path, const json& j);
json read_json_file(const std::filesystem::path& path);

void write_boxes(const std::filesystem::path& path, const std::vector<Box3D>& boxes);
std::vector<Box3D> read_boxes(const std::filesystem::path& path);
void write_detections(const std::filesystem::path& path, const DetectionSet& set);
DetectionSet read_detections(const std::filesystem::path& path);
void write_cameras(const std::filesystem::path& path, const std::vector<CameraModel>& cameras);
std::vector<CameraModel> read_cameras(const std::filesystem::path& path);
void write_masks(const std::filesystem::path& path, const std::vector<InstanceMask>& masks);
std::vector<InstanceMask> read_masks(const std::filesystem::path& path);
// counts: per-bin label counts to record alongside the weights (may be empty)
void write_weights(const std::filesystem::path& path, const RangeWeights& weights,
                   const std::vector<std::uint64_t>& counts = {});
RangeWeights read_weights(const std::filesystem::path& path);

// --- run manifest ---
struct RunManifest {
  std::string tool_version;
  std::string subcommand;
  json config;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::optional<std::uint64_t> seed;
  double duration_seconds = 0.0;
};

json to_json(const RunManifest& m);
void write_manifest(const std::filesystem::path& path, const RunManifest& m);

}  // namespace lrdet::io
