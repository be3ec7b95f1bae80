#pragma once

// Range-binned detection evaluation: greedy center-distance matching,
// interpolated average precision over a fixed recall grid, mean AP over
// distance thresholds and classes, and per-range-bin breakdowns.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lrdet/range.hpp"
#include "lrdet/types.hpp"

namespace lrdet {

enum class RangeMetric { kEuclideanXY, kLinf };

double center_range(const Vec3& center, RangeMetric metric);

std::vector<double> recall_grid_100();  // {0.01, 0.02, ..., 1.00}
std::vector<double> recall_grid_21();   // {0.00, 0.05, ..., 1.00}

struct EvalConfig {
  std::vector<double> distance_thresholds = {0.5, 1.0, 2.0, 4.0};  // meters, ascending
  std::vector<double> recall_grid = recall_grid_100();             // in [0,1], ascending
  RangeMetric range_metric = RangeMetric::kEuclideanXY;
  std::pair<double, double> eval_range = {0.0, 250.0};  // closed interval on center range
};

void validate(const EvalConfig& config);

/// Greedy matching at one distance threshold: detections in descending
/// confidence (ties by input order), each taking the nearest unmatched ground
/// truth within `threshold` (3D center distance; gt ties to the lowest index).
/// Returns true-positive flags indexed like `detections`.
std::vector<bool> match_detections(const std::vector<Box3D>& gt,
                                   const std::vector<Detection>& detections, double threshold);

/// Interpolated AP for one class: p(a) = max precision at recall >= a (0 when
/// unattained), averaged over the recall grid, then averaged over the distance
/// thresholds. Throws NoGroundTruth when gt is empty; returns 0 for no
/// detections.
double average_precision(const std::vector<Box3D>& gt, const std::vector<Detection>& detections,
                         const EvalConfig& config = {});

struct ClassEval {
  double ap = 0.0;
  std::size_t num_gt = 0;
  std::size_t num_detections = 0;
};

struct BinReport {
  double lo = 0.0, hi = 0.0;
  std::map<std::string, ClassEval> per_class;
  std::optional<double> map;  // empty when no class has gt in the bin
};

struct EvalReport {
  std::pair<double, double> eval_range;
  std::map<std::string, ClassEval> per_class;
  std::optional<double> map;
  std::vector<BinReport> bins;  // filled by range_breakdown
};

/// Restrict gt and detections to centers inside config.eval_range (closed, by
/// config.range_metric), then AP per class over the classes with >= 1 gt;
/// mAP is their mean. Detection classes absent from gt are ignored.
EvalReport mean_ap(const std::vector<Box3D>& gt, const std::vector<Detection>& detections,
                   const EvalConfig& config = {});

/// mean_ap overall plus one column per bin of `binning` (bin membership via
/// bin_index on the center range; out-of-span centers fall outside every bin).
EvalReport range_breakdown(const std::vector<Box3D>& gt, const std::vector<Detection>& detections,
                           const EvalConfig& config = {},
                           const RangeBinning& binning = default_binning());

/// Fixed-width table, one column per bin plus the overall eval range.
std::string format_report(const EvalReport& report);

}  // namespace lrdet
