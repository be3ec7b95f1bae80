#include "lrdet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

namespace lrdet {

double center_range(const Vec3& center, RangeMetric metric) {
  switch (metric) {
    case RangeMetric::kEuclideanXY:
      return std::hypot(center.x, center.y);
    case RangeMetric::kLinf:
      return linf_range(center);
  }
  return 0.0;
}

std::vector<double> recall_grid_100() {
  std::vector<double> grid(100);
  for (int i = 0; i < 100; ++i) grid[static_cast<std::size_t>(i)] = (i + 1) / 100.0;
  return grid;
}

std::vector<double> recall_grid_21() {
  std::vector<double> grid(21);
  for (int i = 0; i < 21; ++i) grid[static_cast<std::size_t>(i)] = i * 5 / 100.0;
  return grid;
}

void validate(const EvalConfig& config) {
  if (config.distance_thresholds.empty()) throw Error("need at least one distance threshold");
  for (double d : config.distance_thresholds)
    if (!(d > 0.0)) throw Error("distance thresholds must be positive");
  if (!std::is_sorted(config.distance_thresholds.begin(), config.distance_thresholds.end()))
    throw Error("distance thresholds must be ascending");
  if (config.recall_grid.empty()) throw Error("recall grid is empty");
  if (!std::is_sorted(config.recall_grid.begin(), config.recall_grid.end()))
    throw Error("recall grid must be ascending");
  if (config.recall_grid.front() < 0.0 || config.recall_grid.back() > 1.0 ||
      !(config.recall_grid.back() > 0.0))
    throw Error("recall grid must lie in [0, 1] and reach past 0");
  if (!(config.eval_range.first >= 0.0 && config.eval_range.first < config.eval_range.second))
    throw Error("eval range must satisfy 0 <= lo < hi");
}

namespace {

inline double center_dist2(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

// descending confidence, ties by input order
std::vector<std::size_t> ranked_order(const std::vector<Detection>& detections) {
  std::vector<std::size_t> order(detections.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].confidence > detections[b].confidence;
  });
  return order;
}

}  // namespace

std::vector<bool> match_detections(const std::vector<Box3D>& gt,
                                   const std::vector<Detection>& detections, double threshold) {
  std::vector<bool> tp(detections.size(), false);
  std::vector<bool> taken(gt.size(), false);
  const double t2 = threshold * threshold;
  for (std::size_t idx : ranked_order(detections)) {
    const Vec3& c = detections[idx].box.center;
    std::size_t best = gt.size();
    double best_d2 = 0.0;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (taken[g]) continue;
      const double d2 = center_dist2(c, gt[g].center);
      if (d2 <= t2 && (best == gt.size() || d2 < best_d2)) {  // ties keep lowest g
        best = g;
        best_d2 = d2;
      }
    }
    if (best != gt.size()) {
      taken[best] = true;
      tp[idx] = true;
    }
  }
  return tp;
}

double average_precision(const std::vector<Box3D>& gt, const std::vector<Detection>& detections,
                         const EvalConfig& config) {
  validate(config);
  if (gt.empty()) throw NoGroundTruth();

  const auto order = ranked_order(detections);
  double ap_sum = 0.0;
  for (double threshold : config.distance_thresholds) {
    const std::vector<bool> tp = match_detections(gt, detections, threshold);
    // cumulative precision/recall along the ranking
    std::vector<double> precision(order.size()), recall(order.size());
    std::size_t tp_count = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (tp[order[k]]) ++tp_count;
      precision[k] = static_cast<double>(tp_count) / static_cast<double>(k + 1);
      recall[k] = static_cast<double>(tp_count) / static_cast<double>(gt.size());
    }
    // p(a) = max precision at recall >= a. Recall is non-decreasing along the
    // ranking, so those ranks form a suffix; walking the grid from the top
    // grows the suffix leftward and folds each new rank into the running max.
    double grid_sum = 0.0;
    std::size_t k = order.size();  // start of the current suffix
    double best = 0.0;
    for (auto it = config.recall_grid.rbegin(); it != config.recall_grid.rend(); ++it) {
      while (k > 0 && recall[k - 1] >= *it) {
        --k;
        best = std::max(best, precision[k]);
      }
      if (k < order.size()) grid_sum += best;  // empty suffix: recall unattained, 0
    }
    ap_sum += grid_sum / static_cast<double>(config.recall_grid.size());
  }
  return ap_sum / static_cast<double>(config.distance_thresholds.size());
}

namespace {

struct Filtered {
  std::vector<Box3D> gt;
  std::vector<Detection> detections;
};

Filtered restrict_closed(const std::vector<Box3D>& gt, const std::vector<Detection>& detections,
                         RangeMetric metric, double lo, double hi) {
  Filtered out;
  for (const Box3D& b : gt) {
    const double r = center_range(b.center, metric);
    if (r >= lo && r <= hi) out.gt.push_back(b);
  }
  for (const Detection& d : detections) {
    const double r = center_range(d.box.center, metric);
    if (r >= lo && r <= hi) out.detections.push_back(d);
  }
  return out;
}

std::map<std::string, ClassEval> per_class_eval(const std::vector<Box3D>& gt,
                                                const std::vector<Detection>& detections,
                                                const EvalConfig& config) {
  std::set<std::string> classes;
  for (const Box3D& b : gt) classes.insert(b.class_id);  // det-only classes are ignored
  std::map<std::string, ClassEval> out;
  for (const std::string& cls : classes) {
    std::vector<Box3D> cgt;
    std::vector<Detection> cdet;
    for (const Box3D& b : gt)
      if (b.class_id == cls) cgt.push_back(b);
    for (const Detection& d : detections)
      if (d.box.class_id == cls) cdet.push_back(d);
    ClassEval ce;
    ce.num_gt = cgt.size();
    ce.num_detections = cdet.size();
    ce.ap = average_precision(cgt, cdet, config);
    out[cls] = ce;
  }
  return out;
}

std::optional<double> mean_of(const std::map<std::string, ClassEval>& per_class) {
  if (per_class.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& [cls, ce] : per_class) sum += ce.ap;
  return sum / static_cast<double>(per_class.size());
}

}  // namespace

EvalReport mean_ap(const std::vector<Box3D>& gt, const std::vector<Detection>& detections,
                   const EvalConfig& config) {
  validate(config);
  EvalReport report;
  report.eval_range = config.eval_range;
  const Filtered f = restrict_closed(gt, detections, config.range_metric, config.eval_range.first,
                                     config.eval_range.second);
  report.per_class = per_class_eval(f.gt, f.detections, config);
  report.map = mean_of(report.per_class);
  return report;
}

EvalReport range_breakdown(const std::vector<Box3D>& gt, const std::vector<Detection>& detections,
                           const EvalConfig& config, const RangeBinning& binning) {
  validate(binning);
  EvalReport report = mean_ap(gt, detections, config);
  for (std::size_t b = 0; b < binning.num_bins(); ++b) {
    BinReport bin;
    bin.lo = binning.edges[b];
    bin.hi = binning.edges[b + 1];
    // membership via the binning rule: half-open bins, top edge closed
    std::vector<Box3D> bgt;
    std::vector<Detection> bdet;
    for (const Box3D& box : gt) {
      const double r = center_range(box.center, config.range_metric);
      if (r < binning.lo() || r > binning.hi()) continue;
      if (bin_index(r, binning) == b) bgt.push_back(box);
    }
    for (const Detection& det : detections) {
      const double r = center_range(det.box.center, config.range_metric);
      if (r < binning.lo() || r > binning.hi()) continue;
      if (bin_index(r, binning) == b) bdet.push_back(det);
    }
    bin.per_class = per_class_eval(bgt, bdet, config);
    bin.map = mean_of(bin.per_class);
    report.bins.push_back(std::move(bin));
  }
  return report;
}

std::string format_report(const EvalReport& report) {
  const auto fmt_range = [](double lo, double hi) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g-%g", lo, hi);
    return std::string(buf);
  };
  const auto fmt_cell = [](const std::optional<double>& v) {
    char buf[32];
    if (v)
      std::snprintf(buf, sizeof(buf), "%8.4f", *v);
    else
      std::snprintf(buf, sizeof(buf), "%8s", "-");
    return std::string(buf);
  };

  std::set<std::string> classes;
  for (const auto& [cls, ce] : report.per_class) classes.insert(cls);
  for (const auto& bin : report.bins)
    for (const auto& [cls, ce] : bin.per_class) classes.insert(cls);

  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-12s", "class");
  out += buf;
  std::snprintf(buf, sizeof(buf), " | %8s",
                fmt_range(report.eval_range.first, report.eval_range.second).c_str());
  out += buf;
  for (const auto& bin : report.bins) {
    std::snprintf(buf, sizeof(buf), " | %8s", fmt_range(bin.lo, bin.hi).c_str());
    out += buf;
  }
  out += "\n";

  const auto row = [&](const std::string& name, const std::optional<double>& overall,
                       const std::function<std::optional<double>(const BinReport&)>& cell) {
    std::snprintf(buf, sizeof(buf), "%-12s", name.c_str());
    out += buf;
    out += " | " + fmt_cell(overall);
    for (const auto& bin : report.bins) out += " | " + fmt_cell(cell(bin));
    out += "\n";
  };

  row("mAP", report.map, [](const BinReport& bin) { return bin.map; });
  for (const std::string& cls : classes) {
    row(cls,
        report.per_class.count(cls) ? std::optional<double>(report.per_class.at(cls).ap)
                                    : std::nullopt,
        [&](const BinReport& bin) -> std::optional<double> {
          const auto it = bin.per_class.find(cls);
          if (it == bin.per_class.end()) return std::nullopt;
          return it->second.ap;
        });
  }
  return out;
}

}  // namespace lrdet
