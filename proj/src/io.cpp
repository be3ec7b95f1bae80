#include "lrdet/io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>

#include "lrdet/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "cloud.bin I/O assumes a little-endian host");
static_assert(sizeof(float) == 4);

namespace lrdet::io {

namespace {

// write-to-temp + rename so readers never observe a partial file
template <typename WriteFn>
void atomic_write(const std::filesystem::path& path, WriteFn&& fn) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    fn(out);
    out.flush();
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

double get_double(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw Error(std::string("missing or non-numeric field: ") + key);
  return j.at(key).get<double>();
}

}  // namespace

void write_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  atomic_write(path, [&](std::ofstream& out) {
    std::vector<float> buffer;
    buffer.reserve(cloud.size() * 4);
    for (const Point& p : cloud.points) {
      buffer.push_back(static_cast<float>(p.x));
      buffer.push_back(static_cast<float>(p.y));
      buffer.push_back(static_cast<float>(p.z));
      buffer.push_back(static_cast<float>(p.intensity));
    }
    out.write(reinterpret_cast<const char*>(buffer.data()),
              static_cast<std::streamsize>(buffer.size() * sizeof(float)));
  });
}

PointCloud read_cloud(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error("cannot open cloud file: " + path.string());
  const std::streamsize bytes = in.tellg();
  if (bytes % 16 != 0)
    throw Error("cloud file size is not a multiple of 16 bytes: " + path.string());
  in.seekg(0);
  std::vector<float> buffer(static_cast<std::size_t>(bytes) / 4);
  in.read(reinterpret_cast<char*>(buffer.data()), bytes);
  if (!in) throw Error("short read: " + path.string());
  PointCloud cloud;
  cloud.points.reserve(buffer.size() / 4);
  for (std::size_t i = 0; i < buffer.size(); i += 4) {
    const Point p = make_point(buffer[i], buffer[i + 1], buffer[i + 2], buffer[i + 3],
                               Provenance::kReal);
    validate(p);
    cloud.points.push_back(p);
  }
  return cloud;
}

void write_provenance(const std::filesystem::path& path, const PointCloud& cloud) {
  std::uint64_t n_real = 0, n_virtual = 0;
  bool seen_virtual = false;
  for (const Point& p : cloud.points) {
    if (p.provenance == Provenance::kReal) {
      if (seen_virtual) throw Error("provenance sidecar needs all real points first");
      ++n_real;
    } else {
      seen_virtual = true;
      ++n_virtual;
    }
  }
  write_json_file(path, json{{"n_real", n_real}, {"n_virtual", n_virtual}});
}

ProvenanceCounts read_provenance(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  ProvenanceCounts counts;
  counts.n_real = j.at("n_real").get<std::uint64_t>();
  counts.n_virtual = j.at("n_virtual").get<std::uint64_t>();
  return counts;
}

void apply_provenance(PointCloud& cloud, const ProvenanceCounts& counts) {
  if (counts.n_real + counts.n_virtual != cloud.size())
    throw LengthMismatch("provenance counts do not sum to the cloud size");
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    cloud.points[i].provenance =
        i < counts.n_real ? Provenance::kReal : Provenance::kVirtual;
  }
}

// --- JSON converters ---

json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error("expected a 3-element array");
  return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json to_json(const Pose& pose) {
  return json{{"rotation", pose.rotation}, {"translation", to_json(pose.translation)}};
}

Pose pose_from_json(const json& j) {
  Pose pose;
  const auto& r = j.at("rotation");
  if (!r.is_array() || r.size() != 9) throw Error("rotation must be a 9-element array");
  for (std::size_t i = 0; i < 9; ++i) pose.rotation[i] = r[i].get<double>();
  pose.translation = vec3_from_json(j.at("translation"));
  return pose;
}

json to_json(const Box3D& box) {
  return json{{"center", to_json(box.center)},
              {"size", box.size},
              {"yaw", box.yaw},
              {"class_id", box.class_id}};
}

Box3D box_from_json(const json& j) {
  Box3D box;
  box.center = vec3_from_json(j.at("center"));
  const auto& s = j.at("size");
  if (!s.is_array() || s.size() != 3) throw Error("size must be a 3-element array");
  for (std::size_t i = 0; i < 3; ++i) box.size[i] = s[i].get<double>();
  box.yaw = get_double(j, "yaw");
  box.class_id = j.at("class_id").get<std::string>();
  validate(box);
  return box;
}

json to_json(const Detection& det) {
  json j = to_json(det.box);
  j["confidence"] = det.confidence;
  j["source"] = det.source;
  return j;
}

Detection detection_from_json(const json& j) {
  Detection det;
  det.box = box_from_json(j);
  det.confidence = get_double(j, "confidence");
  if (!(det.confidence >= 0.0 && det.confidence <= 1.0))
    throw Error("confidence must be in [0, 1]");
  det.source = j.value("source", "");
  return det;
}

json to_json(const DetectionSet& set) {
  json dets = json::array();
  for (const Detection& d : set.detections) dets.push_back(to_json(d));
  return json{{"source", set.source}, {"detections", std::move(dets)}};
}

DetectionSet detection_set_from_json(const json& j) {
  DetectionSet set;
  set.source = j.value("source", "");
  for (const json& d : j.at("detections")) set.detections.push_back(detection_from_json(d));
  return set;
}

json to_json(const CameraModel& cam) {
  return json{{"camera_id", cam.camera_id},
              {"fx", cam.fx},
              {"fy", cam.fy},
              {"cx", cam.cx},
              {"cy", cam.cy},
              {"width", cam.width},
              {"height", cam.height},
              {"ego_to_cam", to_json(cam.ego_to_cam)}};
}

CameraModel camera_from_json(const json& j) {
  CameraModel cam;
  cam.camera_id = j.at("camera_id").get<std::string>();
  cam.fx = get_double(j, "fx");
  cam.fy = get_double(j, "fy");
  cam.cx = get_double(j, "cx");
  cam.cy = get_double(j, "cy");
  cam.width = j.at("width").get<int>();
  cam.height = j.at("height").get<int>();
  cam.ego_to_cam = pose_from_json(j.at("ego_to_cam"));
  validate(cam);
  return cam;
}

json to_json(const InstanceMask& mask) {
  json rows = json::array();
  std::size_t i = 0;
  while (i < mask.pixels.size()) {
    const int v = mask.pixels[i].first;
    json runs = json::array();
    while (i < mask.pixels.size() && mask.pixels[i].first == v) {
      const int u0 = mask.pixels[i].second;
      int len = 1;
      while (i + 1 < mask.pixels.size() && mask.pixels[i + 1].first == v &&
             mask.pixels[i + 1].second == mask.pixels[i].second + 1) {
        ++i;
        ++len;
      }
      runs.push_back(json::array({u0, len}));
      ++i;
    }
    rows.push_back(json{{"v", v}, {"runs", std::move(runs)}});
  }
  return json{{"camera_id", mask.camera_id}, {"class_id", mask.class_id},
              {"rows", std::move(rows)}};
}

InstanceMask mask_from_json(const json& j) {
  InstanceMask mask;
  mask.camera_id = j.at("camera_id").get<std::string>();
  mask.class_id = j.at("class_id").get<std::string>();
  for (const json& row : j.at("rows")) {
    const int v = row.at("v").get<int>();
    for (const json& run : row.at("runs")) {
      if (!run.is_array() || run.size() != 2) throw Error("mask run must be [u, len]");
      const int u0 = run[0].get<int>();
      const int len = run[1].get<int>();
      if (len <= 0) throw Error("mask run length must be positive");
      for (int u = u0; u < u0 + len; ++u) mask.pixels.emplace_back(v, u);
    }
  }
  validate(mask);
  return mask;
}

json to_json(const RangeWeights& weights) {
  return json{{"edges", weights.binning.edges},
              {"weights", weights.weights},
              {"r1", weights.r1},
              {"r2", weights.r2}};
}

RangeWeights weights_from_json(const json& j) {
  RangeWeights w;
  w.binning.edges = j.at("edges").get<std::vector<double>>();
  w.weights = j.at("weights").get<std::vector<double>>();
  w.r1 = get_double(j, "r1");
  w.r2 = get_double(j, "r2");
  validate(w);
  return w;
}

namespace {

json to_json(const std::map<std::string, ClassEval>& per_class) {
  json classes = json::object();
  for (const auto& [name, ce] : per_class) {
    classes[name] = json{{"ap", ce.ap},
                         {"num_gt", ce.num_gt},
                         {"num_detections", ce.num_detections}};
  }
  return classes;
}

json optional_to_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json to_json(const EvalReport& report, const EvalConfig& config) {
  json bins = json::array();
  for (const BinReport& bin : report.bins) {
    bins.push_back(json{{"lo", bin.lo},
                        {"hi", bin.hi},
                        {"mAP", optional_to_json(bin.map)},
                        {"classes", to_json(bin.per_class)}});
  }
  return json{
      {"eval_range", json::array({report.eval_range.first, report.eval_range.second})},
      {"range_metric",
       config.range_metric == RangeMetric::kEuclideanXY ? "euclidean_xy" : "linf"},
      {"recall_grid", config.recall_grid.size()},
      {"distance_thresholds", config.distance_thresholds},
      {"mAP", optional_to_json(report.map)},
      {"classes", to_json(report.per_class)},
      {"bins", std::move(bins)}};
}

json to_json(const SceneConfig& config) {
  json classes = json::array();
  for (const ClassSpec& cls : config.classes) {
    classes.push_back(json{{"name", cls.name},
                           {"size", cls.size},
                           {"size_jitter", cls.size_jitter},
                           {"weight", cls.weight}});
  }
  json cameras = json::array();
  for (const CameraModel& cam : config.cameras) cameras.push_back(to_json(cam));
  return json{{"seed", config.seed},
              {"n_objects", config.n_objects},
              {"r_min", config.r_min},
              {"r_max", config.r_max},
              {"classes", std::move(classes)},
              {"density_k", config.density_k},
              {"min_pts_floor", config.min_pts_floor},
              {"ground",
               json{{"enabled", config.ground.enabled},
                    {"density_k", config.ground.density_k},
                    {"r_min", config.ground.r_min},
                    {"r_max", config.ground.r_max}}},
              {"cameras", std::move(cameras)},
              {"min_gap", config.min_gap},
              {"angular_margin", config.angular_margin},
              {"max_retries", config.max_retries}};
}

SceneConfig scene_config_from_json(const json& j) {
  SceneConfig config = default_scene_config();
  config.seed = j.value("seed", config.seed);
  config.n_objects = j.value("n_objects", config.n_objects);
  config.r_min = j.value("r_min", config.r_min);
  config.r_max = j.value("r_max", config.r_max);
  if (j.contains("classes")) {
    config.classes.clear();
    for (const json& c : j.at("classes")) {
      ClassSpec cls;
      cls.name = c.value("name", cls.name);
      if (c.contains("size")) {
        const auto& s = c.at("size");
        if (!s.is_array() || s.size() != 3) throw Error("class size must be a 3-element array");
        for (std::size_t i = 0; i < 3; ++i) cls.size[i] = s[i].get<double>();
      }
      cls.size_jitter = c.value("size_jitter", cls.size_jitter);
      cls.weight = c.value("weight", cls.weight);
      config.classes.push_back(cls);
    }
  }
  config.density_k = j.value("density_k", config.density_k);
  config.min_pts_floor = j.value("min_pts_floor", config.min_pts_floor);
  if (j.contains("ground")) {
    const json& g = j.at("ground");
    config.ground.enabled = g.value("enabled", config.ground.enabled);
    config.ground.density_k = g.value("density_k", config.ground.density_k);
    config.ground.r_min = g.value("r_min", config.ground.r_min);
    config.ground.r_max = g.value("r_max", config.ground.r_max);
  }
  if (j.contains("cameras")) {
    config.cameras.clear();
    for (const json& c : j.at("cameras")) config.cameras.push_back(camera_from_json(c));
  }
  config.min_gap = j.value("min_gap", config.min_gap);
  config.angular_margin = j.value("angular_margin", config.angular_margin);
  config.max_retries = j.value("max_retries", config.max_retries);
  return config;
}

// --- whole-file helpers ---

void write_json_file(const std::filesystem::path& path, const json& j) {
  atomic_write(path, [&](std::ofstream& out) { out << j.dump(2) << '\n'; });
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open JSON file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error("invalid JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

void write_boxes(const std::filesystem::path& path, const std::vector<Box3D>& boxes) {
  json arr = json::array();
  for (const Box3D& b : boxes) arr.push_back(to_json(b));
  write_json_file(path, json{{"boxes", std::move(arr)}});
}

std::vector<Box3D> read_boxes(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  std::vector<Box3D> boxes;
  for (const json& b : j.at("boxes")) boxes.push_back(box_from_json(b));
  return boxes;
}

void write_detections(const std::filesystem::path& path, const DetectionSet& set) {
  write_json_file(path, to_json(set));
}

DetectionSet read_detections(const std::filesystem::path& path) {
  return detection_set_from_json(read_json_file(path));
}

void write_cameras(const std::filesystem::path& path, const std::vector<CameraModel>& cameras) {
  json arr = json::array();
  for (const CameraModel& c : cameras) arr.push_back(to_json(c));
  write_json_file(path, json{{"cameras", std::move(arr)}});
}

std::vector<CameraModel> read_cameras(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  std::vector<CameraModel> cameras;
  for (const json& c : j.at("cameras")) cameras.push_back(camera_from_json(c));
  return cameras;
}

void write_masks(const std::filesystem::path& path, const std::vector<InstanceMask>& masks) {
  json arr = json::array();
  for (const InstanceMask& m : masks) arr.push_back(to_json(m));
  write_json_file(path, json{{"masks", std::move(arr)}});
}

std::vector<InstanceMask> read_masks(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  std::vector<InstanceMask> masks;
  for (const json& m : j.at("masks")) masks.push_back(mask_from_json(m));
  return masks;
}

void write_weights(const std::filesystem::path& path, const RangeWeights& weights,
                   const std::vector<std::uint64_t>& counts) {
  json j = to_json(weights);
  if (!counts.empty()) j["counts"] = counts;
  write_json_file(path, j);
}

RangeWeights read_weights(const std::filesystem::path& path) {
  return weights_from_json(read_json_file(path));
}

json to_json(const RunManifest& m) {
  return json{{"tool_version", m.tool_version},
              {"subcommand", m.subcommand},
              {"config", m.config},
              {"inputs", m.inputs},
              {"outputs", m.outputs},
              {"seed", m.seed ? json(*m.seed) : json(nullptr)},
              {"duration_seconds", m.duration_seconds}};
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  write_json_file(path, to_json(m));
}

}  // namespace lrdet::io
