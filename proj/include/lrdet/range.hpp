#pragma once

// Range tooling: L-infinity range, closed-interval cloud thresholding,
// half-open binning, per-bin label counts, and inverse-frequency range
// weights  w_b = N / (n_b * B)  over the bins active inside [r1, r2].

#include <cstdint>
#include <utility>
#include <vector>

#include "lrdet/types.hpp"

namespace lrdet {

// max(|x|, |y|) in the ego xy-plane: the square-region range used for
// thresholding and expert assignment (distinct from the Euclidean range the
// evaluator defaults to).
inline double linf_range(double x, double y) {
  return std::max(std::fabs(x), std::fabs(y));
}
inline double linf_range(const Point& p) { return linf_range(p.x, p.y); }
inline double linf_range(const Vec3& v) { return linf_range(v.x, v.y); }

std::vector<double> linf_ranges(const PointCloud& cloud);  // batched via kernels

// Consecutive bins [e0,e1), [e1,e2), ..., [e_{k-1}, e_k]; the top edge is
// closed so the span endpoint has a home.
struct RangeBinning {
  std::vector<double> edges;  // strictly ascending, >= 2 entries, edges[0] >= 0

  std::size_t num_bins() const { return edges.empty() ? 0 : edges.size() - 1; }
  double lo() const { return edges.front(); }
  double hi() const { return edges.back(); }
};

RangeBinning default_binning();  // {0, 50, 100, 150, 200, 250}
void validate(const RangeBinning& binning);

/// Bin index for a range value; throws OutOfRange outside [lo, hi].
std::size_t bin_index(double range, const RangeBinning& binning);

/// Keep exactly the points with r1 <= linf_range <= r2 (closed interval, so
/// expert intervals that share an edge both keep boundary points). Preserves
/// order. Throws InvalidInterval unless 0 <= r1 < r2.
PointCloud threshold_cloud(const PointCloud& cloud, double r1, double r2);

enum class OutOfSpanPolicy { kFail, kSkip };

/// Count ground-truth boxes per bin by the L-inf range of their centers.
/// A box outside the span throws OutOfRange (kFail, default) or is ignored
/// (kSkip).
std::vector<std::uint64_t> count_labels_per_bin(const std::vector<Box3D>& boxes,
                                                const RangeBinning& binning,
                                                OutOfSpanPolicy policy = OutOfSpanPolicy::kFail);

// Per-bin weights plus the interval they were computed for. weights.size() ==
// binning.num_bins(); inactive bins hold exactly 0. Note the active set is the
// bins wholly inside [r1, r2]; a bin that touches the interval at a single
// edge point is inactive (this is what makes B=2 for (0,100) and B=4 for
// (50,250) under the default edges).
struct RangeWeights {
  RangeBinning binning;
  std::vector<double> weights;
  double r1 = 0.0, r2 = 0.0;
};

void validate(const RangeWeights& w);

/// w_b = N / (n_b * B) over active bins, 0 elsewhere. counts must cover every
/// bin of `binning` (LengthMismatch otherwise); an active bin with zero count
/// is a hard EmptyBin error; no active bin at all is InvalidInterval.
RangeWeights compute_range_weights(const std::vector<std::uint64_t>& counts, double r1, double r2,
                                   const RangeBinning& binning);

// A range expert: detect on the sub-cloud thresholded to [r1, r2], optionally
// trained-with-weights in the original method (the flag only affects labels
// here — the stand-in detector has no trainable loss).
struct ExpertSpec {
  double r1 = 0.0, r2 = 0.0;
  bool weighted = false;

  std::string label() const;  // "F_0-100", "Fw_50-250", ...
};

void validate(const ExpertSpec& spec, const RangeBinning& binning);  // r1, r2 must be edges

}  // namespace lrdet
