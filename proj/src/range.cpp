#include "lrdet/range.hpp"

#include <algorithm>
#include <cstdio>

#include "lrdet/geometry.hpp"
#include "lrdet/kernels.hpp"

namespace lrdet {

RangeBinning default_binning() { return RangeBinning{{0.0, 50.0, 100.0, 150.0, 200.0, 250.0}}; }

void validate(const RangeBinning& binning) {
  if (binning.edges.size() < 2) throw Error("binning needs at least two edges");
  if (binning.edges.front() < 0.0) throw Error("binning edges must be non-negative");
  for (std::size_t i = 1; i < binning.edges.size(); ++i) {
    if (!(binning.edges[i] > binning.edges[i - 1]))
      throw Error("binning edges must be strictly ascending");
  }
}

std::size_t bin_index(double range, const RangeBinning& binning) {
  if (range < binning.lo() || range > binning.hi()) throw OutOfRange();
  if (range == binning.hi()) return binning.num_bins() - 1;  // top edge closed
  // first edge strictly greater than range
  const auto it = std::upper_bound(binning.edges.begin(), binning.edges.end(), range);
  return static_cast<std::size_t>(it - binning.edges.begin()) - 1;
}

std::vector<double> linf_ranges(const PointCloud& cloud) {
  std::vector<double> xs, ys;
  extract_xy(cloud, xs, ys);
  std::vector<double> out(cloud.size());
  if (!out.empty()) kernels::linf_range(xs.data(), ys.data(), out.data(), out.size());
  return out;
}

PointCloud threshold_cloud(const PointCloud& cloud, double r1, double r2) {
  if (!(r1 >= 0.0) || !(r1 < r2)) throw InvalidInterval("threshold needs 0 <= r1 < r2");
  const std::vector<double> ranges = linf_ranges(cloud);
  std::vector<std::uint8_t> keep(cloud.size());
  if (!keep.empty()) kernels::interval_mask(ranges.data(), r1, r2, keep.data(), keep.size());
  PointCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (keep[i]) out.points.push_back(cloud.points[i]);
  }
  return out;
}

std::vector<std::uint64_t> count_labels_per_bin(const std::vector<Box3D>& boxes,
                                                const RangeBinning& binning,
                                                OutOfSpanPolicy policy) {
  validate(binning);
  std::vector<std::uint64_t> counts(binning.num_bins(), 0);
  for (const Box3D& box : boxes) {
    const double r = linf_range(box.center);
    if (r < binning.lo() || r > binning.hi()) {
      if (policy == OutOfSpanPolicy::kFail) throw OutOfRange();
      continue;
    }
    ++counts[bin_index(r, binning)];
  }
  return counts;
}

namespace {

// Active = wholly inside [r1, r2]. A bin meeting the interval at one edge
// point only is NOT active (gives B=2 for (0,100) under the default edges).
std::vector<std::size_t> active_bins(const RangeBinning& binning, double r1, double r2) {
  std::vector<std::size_t> active;
  for (std::size_t b = 0; b < binning.num_bins(); ++b) {
    if (binning.edges[b] >= r1 && binning.edges[b + 1] <= r2) active.push_back(b);
  }
  return active;
}

}  // namespace

void validate(const RangeWeights& w) {
  validate(w.binning);
  if (w.weights.size() != w.binning.num_bins())
    throw LengthMismatch("weights/binning size mismatch");
  const auto active = active_bins(w.binning, w.r1, w.r2);
  std::vector<bool> is_active(w.weights.size(), false);
  for (std::size_t b : active) is_active[b] = true;
  for (std::size_t b = 0; b < w.weights.size(); ++b) {
    if (is_active[b] && !(w.weights[b] > 0.0)) throw Error("active weight must be positive");
    if (!is_active[b] && w.weights[b] != 0.0) throw Error("inactive weight must be exactly 0");
  }
}

RangeWeights compute_range_weights(const std::vector<std::uint64_t>& counts, double r1, double r2,
                                   const RangeBinning& binning) {
  validate(binning);
  if (counts.size() != binning.num_bins())
    throw LengthMismatch("need one count per bin of the binning");
  if (!(r1 >= 0.0) || !(r1 < r2)) throw InvalidInterval("weights need 0 <= r1 < r2");
  const auto active = active_bins(binning, r1, r2);
  if (active.empty()) throw InvalidInterval("no bin lies inside [r1, r2]");

  const double bins_covered = static_cast<double>(active.size());  // B
  std::uint64_t total = 0;                                         // N
  for (std::size_t b : active) {
    if (counts[b] == 0) throw EmptyBin();
    total += counts[b];
  }
  RangeWeights out;
  out.binning = binning;
  out.r1 = r1;
  out.r2 = r2;
  out.weights.assign(binning.num_bins(), 0.0);
  for (std::size_t b : active) {
    out.weights[b] = static_cast<double>(total) / (static_cast<double>(counts[b]) * bins_covered);
  }
  return out;
}

std::string ExpertSpec::label() const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "F%s_%g-%g", weighted ? "w" : "", r1, r2);
  return buf;
}

void validate(const ExpertSpec& spec, const RangeBinning& binning) {
  validate(binning);
  if (!(spec.r1 >= 0.0) || !(spec.r1 < spec.r2)) throw InvalidInterval("expert needs 0 <= r1 < r2");
  const auto is_edge = [&](double v) {
    return std::find(binning.edges.begin(), binning.edges.end(), v) != binning.edges.end();
  };
  if (!is_edge(spec.r1) || !is_edge(spec.r2))
    throw InvalidInterval("expert bounds must be binning edges");
}

}  // namespace lrdet
