#include "lrdet/losses.hpp"

#include <cmath>

namespace lrdet {

ScalarLoss focal_loss(double p, int y, const FocalParams& params) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("probability must be in (0, 1)");
  if (y != 0 && y != 1) throw DomainError("label must be 0 or 1");
  if (!(params.alpha >= 0.0 && params.alpha <= 1.0)) throw DomainError("alpha must be in [0, 1]");
  if (!(params.gamma >= 0.0)) throw DomainError("gamma must be >= 0");

  const double pt = (y == 1) ? p : 1.0 - p;
  const double at = (y == 1) ? params.alpha : 1.0 - params.alpha;
  const double one_minus = 1.0 - pt;

  ScalarLoss out;
  out.loss = -at * std::pow(one_minus, params.gamma) * std::log(pt);
  // d/dpt [-at (1-pt)^g log pt] = at (1-pt)^(g-1) [g log pt - (1-pt)/pt]
  const double dpt = at * std::pow(one_minus, params.gamma - 1.0) *
                     (params.gamma * std::log(pt) - one_minus / pt);
  out.dloss_dp = (y == 1) ? dpt : -dpt;
  return out;
}

VectorLoss l1_loss(const std::vector<double>& pred, const std::vector<double>& target) {
  if (pred.size() != target.size()) throw LengthMismatch("l1 inputs differ in length");
  VectorLoss out;
  out.grad.resize(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    out.loss += std::fabs(d);
    out.grad[i] = (d > 0.0) ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  }
  return out;
}

double range_weighted_loss(const std::vector<double>& losses, const std::vector<double>& ranges,
                           const RangeWeights& weights) {
  if (losses.size() != ranges.size()) throw LengthMismatch("losses/ranges differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    total += weights.weights[bin_index(ranges[i], weights.binning)] * losses[i];
  }
  return total;
}

}  // namespace lrdet
