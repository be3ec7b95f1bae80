// lrdet: long-range detection toolkit CLI.
//
// Subcommands: simulate, upsample, detect, fuse, eval, weights.
// Every run writes a manifest next to its outputs (manifest.json inside
// directory outputs, <out>.manifest.json next to file outputs) recording the
// tool version, the effective configuration, inputs, outputs, and wall time.
//
// Exit codes: 0 success, 1 data/processing error, 2 usage error.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrdet/detector.hpp"
#include "lrdet/eval.hpp"
#include "lrdet/io.hpp"
#include "lrdet/kernels.hpp"
#include "lrdet/losses.hpp"
#include "lrdet/range.hpp"
#include "lrdet/sim.hpp"
#include "lrdet/types.hpp"
#include "lrdet/version.hpp"
#include "lrdet/virtual_points.hpp"

namespace fs = std::filesystem;
using lrdet::io::json;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

lrdet::io::RunManifest make_manifest(const std::string& subcommand, json config,
                                     std::vector<std::string> inputs,
                                     std::vector<std::string> outputs,
                                     std::optional<std::uint64_t> seed, double duration) {
  lrdet::io::RunManifest m;
  m.tool_version = LRDET_VERSION;
  m.subcommand = subcommand;
  m.config = std::move(config);
  m.inputs = std::move(inputs);
  m.outputs = std::move(outputs);
  m.seed = seed;
  m.duration_seconds = duration;
  return m;
}

// --- simulate ---

struct SimulateArgs {
  std::string out_dir;
  std::string config_path;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> n_objects;
  std::optional<double> r_min, r_max, density_k, min_gap, angular_margin;
  std::optional<std::uint64_t> min_pts_floor;
  bool ground = false;
  bool no_cameras = false;
  unsigned threads = 1;
};

int run_simulate(const SimulateArgs& args) {
  Stopwatch timer;
  lrdet::SceneConfig config = args.config_path.empty()
                                  ? lrdet::default_scene_config()
                                  : lrdet::io::scene_config_from_json(
                                        lrdet::io::read_json_file(args.config_path));
  config.seed = args.seed;
  if (args.n_objects) config.n_objects = *args.n_objects;
  if (args.r_min) config.r_min = *args.r_min;
  if (args.r_max) config.r_max = *args.r_max;
  if (args.density_k) config.density_k = *args.density_k;
  if (args.min_pts_floor) config.min_pts_floor = *args.min_pts_floor;
  if (args.min_gap) config.min_gap = *args.min_gap;
  if (args.angular_margin) config.angular_margin = *args.angular_margin;
  if (args.ground) config.ground.enabled = true;
  if (args.no_cameras) config.cameras.clear();

  const lrdet::Scene scene = lrdet::generate_scene(config, args.threads);

  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  lrdet::io::write_cloud(dir / "cloud.bin", scene.cloud);
  lrdet::io::write_provenance(dir / "cloud.provenance.json", scene.cloud);
  lrdet::io::write_boxes(dir / "gt.json", scene.gt);
  std::vector<std::string> outputs = {"cloud.bin", "cloud.provenance.json", "gt.json"};
  if (!scene.cameras.empty()) {
    lrdet::io::write_cameras(dir / "cameras.json", scene.cameras);
    lrdet::io::write_masks(dir / "masks.json", scene.masks);
    outputs.push_back("cameras.json");
    outputs.push_back("masks.json");
  }
  lrdet::io::write_manifest(dir / "manifest.json",
                            make_manifest("simulate", lrdet::io::to_json(config), {}, outputs,
                                          config.seed, timer.seconds()));
  std::cout << "simulate: " << scene.gt.size() << " objects, " << scene.cloud.size()
            << " points, " << scene.masks.size() << " masks -> " << dir.string() << "\n";
  return 0;
}

// --- upsample ---

struct UpsampleArgs {
  std::string cloud_path, cameras_path, masks_path, out_path;
  std::uint64_t s = 50;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

int run_upsample(const UpsampleArgs& args) {
  Stopwatch timer;
  const lrdet::PointCloud cloud = lrdet::io::read_cloud(args.cloud_path);
  const auto cameras = lrdet::io::read_cameras(args.cameras_path);
  const auto masks = lrdet::io::read_masks(args.masks_path);

  lrdet::MvpConfig config;
  config.s = args.s;
  config.rng_seed = args.seed;
  const lrdet::PointCloud virtual_points =
      lrdet::generate_virtual_points(cameras, cloud, masks, config, args.threads);
  const lrdet::PointCloud fused = lrdet::fuse_clouds(cloud, virtual_points);

  const fs::path out(args.out_path);
  lrdet::io::write_cloud(out, fused);
  lrdet::io::write_provenance(fs::path(out.string() + ".provenance.json"), fused);
  lrdet::io::write_manifest(
      fs::path(out.string() + ".manifest.json"),
      make_manifest("upsample", json{{"s", config.s}, {"seed", config.rng_seed}},
                    {args.cloud_path, args.cameras_path, args.masks_path},
                    {out.string(), out.string() + ".provenance.json"}, config.rng_seed,
                    timer.seconds()));
  std::cout << "upsample: " << cloud.size() << " real + " << virtual_points.size()
            << " virtual -> " << out.string() << "\n";
  return 0;
}

// --- detect ---

struct DetectArgs {
  std::string cloud_path, out_path;
  double voxel_size = 0.5;
  std::uint64_t min_points = 1;
  int connectivity = 26;
  std::optional<double> r1, r2;
};

int run_detect(const DetectArgs& args) {
  Stopwatch timer;
  const lrdet::PointCloud cloud = lrdet::io::read_cloud(args.cloud_path);
  lrdet::ClusterConfig config;
  config.voxel_size = args.voxel_size;
  config.min_points = args.min_points;
  config.connectivity = args.connectivity;

  lrdet::DetectionSet set;
  json manifest_config{{"voxel_size", config.voxel_size},
                       {"min_points", config.min_points},
                       {"connectivity", config.connectivity}};
  if (args.r1 || args.r2) {
    if (!(args.r1 && args.r2))
      throw lrdet::InvalidInterval("--r1 and --r2 must be given together");
    lrdet::ExpertSpec spec;
    spec.r1 = *args.r1;
    spec.r2 = *args.r2;
    set = lrdet::run_expert(cloud, spec, config);
    manifest_config["r1"] = spec.r1;
    manifest_config["r2"] = spec.r2;
  } else {
    set = lrdet::detect(cloud, config);
  }

  lrdet::io::write_detections(args.out_path, set);
  lrdet::io::write_manifest(fs::path(args.out_path + ".manifest.json"),
                            make_manifest("detect", manifest_config, {args.cloud_path},
                                          {args.out_path}, std::nullopt, timer.seconds()));
  std::cout << "detect: " << set.detections.size() << " detections (" << set.source << ") -> "
            << args.out_path << "\n";
  return 0;
}

// --- fuse ---

struct FuseArgs {
  std::string mid_path, long_path, out_path;
  double boundary = 100.0;
  bool dedupe = false;
  double dedupe_dist = 2.0;
};

int run_fuse(const FuseArgs& args) {
  Stopwatch timer;
  const lrdet::DetectionSet mid = lrdet::io::read_detections(args.mid_path);
  const lrdet::DetectionSet long_range = lrdet::io::read_detections(args.long_path);
  lrdet::DetectionSet fused = lrdet::late_fuse(mid, long_range, args.boundary);
  if (args.dedupe) fused = lrdet::dedupe_boundary(fused, args.dedupe_dist);

  lrdet::io::write_detections(args.out_path, fused);
  lrdet::io::write_manifest(
      fs::path(args.out_path + ".manifest.json"),
      make_manifest("fuse",
                    json{{"boundary", args.boundary},
                         {"dedupe", args.dedupe},
                         {"dedupe_dist", args.dedupe_dist}},
                    {args.mid_path, args.long_path}, {args.out_path}, std::nullopt,
                    timer.seconds()));
  std::cout << "fuse: " << mid.detections.size() << " mid + " << long_range.detections.size()
            << " long -> " << fused.detections.size() << " fused -> " << args.out_path << "\n";
  return 0;
}

// --- eval ---

struct EvalArgs {
  std::string gt_path, detections_path, out_path;
  bool bins = false;
  std::vector<double> edges;
  std::string range_metric = "euclidean_xy";
  int recall_grid = 100;
  double eval_lo = 0.0, eval_hi = 250.0;
  std::vector<double> thresholds;
};

int run_eval(const EvalArgs& args) {
  Stopwatch timer;
  const std::vector<lrdet::Box3D> gt = lrdet::io::read_boxes(args.gt_path);
  const lrdet::DetectionSet set = lrdet::io::read_detections(args.detections_path);

  lrdet::EvalConfig config;
  if (!args.thresholds.empty()) config.distance_thresholds = args.thresholds;
  config.recall_grid =
      args.recall_grid == 21 ? lrdet::recall_grid_21() : lrdet::recall_grid_100();
  config.range_metric = args.range_metric == "linf" ? lrdet::RangeMetric::kLinf
                                                    : lrdet::RangeMetric::kEuclideanXY;
  config.eval_range = {args.eval_lo, args.eval_hi};

  lrdet::EvalReport report;
  if (args.bins) {
    lrdet::RangeBinning binning =
        args.edges.empty() ? lrdet::default_binning() : lrdet::RangeBinning{args.edges};
    report = lrdet::range_breakdown(gt, set.detections, config, binning);
  } else {
    report = lrdet::mean_ap(gt, set.detections, config);
  }

  lrdet::io::write_json_file(args.out_path, lrdet::io::to_json(report, config));
  lrdet::io::write_manifest(
      fs::path(args.out_path + ".manifest.json"),
      make_manifest("eval",
                    json{{"bins", args.bins},
                         {"range_metric", args.range_metric},
                         {"recall_grid", args.recall_grid},
                         {"eval_range", json::array({args.eval_lo, args.eval_hi})},
                         {"distance_thresholds", config.distance_thresholds}},
                    {args.gt_path, args.detections_path}, {args.out_path}, std::nullopt,
                    timer.seconds()));
  std::cout << lrdet::format_report(report);
  return 0;
}

// --- weights ---

struct WeightsArgs {
  std::vector<std::uint64_t> counts;
  std::string gt_path;
  double r1 = 0.0, r2 = 0.0;
  std::vector<double> edges;
  std::string out_path;
};

int run_weights(const WeightsArgs& args) {
  Stopwatch timer;
  const lrdet::RangeBinning binning =
      args.edges.empty() ? lrdet::default_binning() : lrdet::RangeBinning{args.edges};
  lrdet::validate(binning);

  std::vector<std::uint64_t> counts(binning.num_bins(), 0);
  std::vector<std::string> inputs;
  if (!args.gt_path.empty()) {
    const auto gt = lrdet::io::read_boxes(args.gt_path);
    counts = lrdet::count_labels_per_bin(gt, binning, lrdet::OutOfSpanPolicy::kSkip);
    inputs.push_back(args.gt_path);
  } else if (args.counts.size() == binning.num_bins()) {
    counts = args.counts;
  } else {
    // counts given for the active window only: align them to the bins wholly
    // inside [r1, r2]
    std::vector<std::size_t> active;
    for (std::size_t b = 0; b < binning.num_bins(); ++b) {
      if (binning.edges[b] >= args.r1 && binning.edges[b + 1] <= args.r2) active.push_back(b);
    }
    if (args.counts.size() != active.size()) {
      throw lrdet::LengthMismatch(
          "--counts needs one entry per bin (" + std::to_string(binning.num_bins()) +
          ") or one per active bin (" + std::to_string(active.size()) + "), got " +
          std::to_string(args.counts.size()));
    }
    for (std::size_t i = 0; i < active.size(); ++i) counts[active[i]] = args.counts[i];
  }

  const lrdet::RangeWeights weights =
      lrdet::compute_range_weights(counts, args.r1, args.r2, binning);
  lrdet::io::write_weights(args.out_path, weights, counts);
  lrdet::io::write_manifest(
      fs::path(args.out_path + ".manifest.json"),
      make_manifest("weights",
                    json{{"r1", args.r1}, {"r2", args.r2}, {"edges", binning.edges}}, inputs,
                    {args.out_path}, std::nullopt, timer.seconds()));
  for (std::size_t b = 0; b < weights.weights.size(); ++b) {
    std::cout << "bin [" << binning.edges[b] << ", " << binning.edges[b + 1]
              << "): n=" << counts[b] << " w=" << weights.weights[b] << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"long-range detection toolkit"};
  app.set_version_flag("--version", LRDET_VERSION);
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "generate a deterministic synthetic scene");
  sim->add_option("--out", sim_args.out_dir, "output directory")->required();
  sim->add_option("--seed", sim_args.seed, "scene seed (default 0)");
  sim->add_option("--config", sim_args.config_path, "scene config JSON (flags override it)");
  sim->add_option("--n-objects", sim_args.n_objects, "number of objects");
  sim->add_option("--r-min", sim_args.r_min, "minimum center range");
  sim->add_option("--r-max", sim_args.r_max, "maximum center range");
  sim->add_option("--density-k", sim_args.density_k, "points = density_k * area / r^2");
  sim->add_option("--min-pts-floor", sim_args.min_pts_floor, "minimum points per object");
  sim->add_option("--min-gap", sim_args.min_gap, "footprint clearance in meters");
  sim->add_option("--angular-margin", sim_args.angular_margin,
                  "angular separation factor (<= 0 disables)");
  sim->add_flag("--ground", sim_args.ground, "add ground returns");
  sim->add_flag("--no-cameras", sim_args.no_cameras, "LiDAR-only scene (no masks)");
  sim->add_option("--threads", sim_args.threads, "worker threads (output-identical)");

  UpsampleArgs up_args;
  CLI::App* up = app.add_subcommand("upsample", "add camera-guided virtual points");
  up->add_option("--cloud", up_args.cloud_path, "input cloud.bin")->required();
  up->add_option("--cameras", up_args.cameras_path, "cameras.json")->required();
  up->add_option("--masks", up_args.masks_path, "masks.json")->required();
  up->add_option("--out", up_args.out_path, "fused cloud.bin")->required();
  up->add_option("--s", up_args.s, "pixels sampled per mask (default 50)");
  up->add_option("--seed", up_args.seed, "sampling seed (default 0)");
  up->add_option("--threads", up_args.threads, "worker threads (output-identical)");

  DetectArgs det_args;
  CLI::App* det = app.add_subcommand("detect", "cluster a cloud into detections");
  det->add_option("--cloud", det_args.cloud_path, "input cloud.bin")->required();
  det->add_option("--out", det_args.out_path, "detections.json")->required();
  det->add_option("--voxel-size", det_args.voxel_size, "clustering voxel size (default 0.5)");
  det->add_option("--min-points", det_args.min_points, "minimum cluster size (default 1)");
  det->add_option("--connectivity", det_args.connectivity, "6 or 26 (default 26)");
  CLI::Option* det_r1 = det->add_option("--r1", det_args.r1, "range-expert window start");
  CLI::Option* det_r2 = det->add_option("--r2", det_args.r2, "range-expert window end");
  det_r1->needs(det_r2);
  det_r2->needs(det_r1);

  FuseArgs fuse_args;
  CLI::App* fuse = app.add_subcommand("fuse", "late-fuse mid- and long-range detections");
  fuse->add_option("--mid", fuse_args.mid_path, "mid-range detections.json")->required();
  fuse->add_option("--long", fuse_args.long_path, "long-range detections.json")->required();
  fuse->add_option("--out", fuse_args.out_path, "fused detections.json")->required();
  fuse->add_option("--boundary", fuse_args.boundary, "range split in meters (default 100)");
  fuse->add_flag("--dedupe", fuse_args.dedupe, "suppress near-duplicates after fusing");
  fuse->add_option("--dedupe-dist", fuse_args.dedupe_dist,
                   "duplicate center distance (default 2)");

  EvalArgs eval_args;
  CLI::App* ev = app.add_subcommand("eval", "score detections against ground truth");
  ev->add_option("--gt", eval_args.gt_path, "gt.json")->required();
  ev->add_option("--detections", eval_args.detections_path, "detections.json")->required();
  ev->add_option("--out", eval_args.out_path, "report.json")->required();
  ev->add_flag("--bins", eval_args.bins, "add a per-range-bin breakdown");
  ev->add_option("--edges", eval_args.edges, "bin edges (default 0,50,100,150,200,250)")
      ->delimiter(',');
  ev->add_option("--range-metric", eval_args.range_metric, "euclidean_xy or linf")
      ->check(CLI::IsMember({"euclidean_xy", "linf"}));
  ev->add_option("--recall-grid", eval_args.recall_grid, "100 or 21 (default 100)")
      ->check(CLI::IsMember({100, 21}));
  ev->add_option("--eval-lo", eval_args.eval_lo, "evaluated range interval start (default 0)");
  ev->add_option("--eval-hi", eval_args.eval_hi, "evaluated range interval end (default 250)");
  ev->add_option("--thresholds", eval_args.thresholds,
                 "match distance thresholds (default 0.5,1,2,4)")
      ->delimiter(',');

  WeightsArgs w_args;
  CLI::App* wts = app.add_subcommand("weights", "inverse-frequency range weights");
  CLI::Option_group* w_src = wts->add_option_group("source", "label counts");
  w_src->add_option("--counts", w_args.counts,
                    "per-bin label counts (all bins, or active bins only)")
      ->delimiter(',');
  w_src->add_option("--gt", w_args.gt_path, "count labels from gt.json instead");
  w_src->require_option(1);
  wts->add_option("--r1", w_args.r1, "window start")->required();
  wts->add_option("--r2", w_args.r2, "window end")->required();
  wts->add_option("--edges", w_args.edges, "bin edges (default 0,50,100,150,200,250)")
      ->delimiter(',');
  wts->add_option("--out", w_args.out_path, "weights.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_args);
    if (up->parsed()) return run_upsample(up_args);
    if (det->parsed()) return run_detect(det_args);
    if (fuse->parsed()) return run_fuse(fuse_args);
    if (ev->parsed()) return run_eval(eval_args);
    if (wts->parsed()) return run_weights(w_args);
  } catch (const lrdet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
