#pragma once

#include <vector>

#include "lrdet/range.hpp"

namespace lrdet {

struct FocalParams {
  double alpha = 0.25;
  double gamma = 2.0;
};

struct ScalarLoss {
  double loss = 0.0;
  double dloss_dp = 0.0;  // analytic gradient wrt the predicted probability
};

/// Focal loss for one binary prediction. p in (0,1) open (DomainError
/// otherwise), y in {0,1}. With gamma=0, alpha=0.5 this is exactly half the
/// binary cross-entropy.
ScalarLoss focal_loss(double p, int y, const FocalParams& params = {});

struct VectorLoss {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d pred_i, sign(0) taken as 0
};

/// Sum of absolute errors with its subgradient.
VectorLoss l1_loss(const std::vector<double>& pred, const std::vector<double>& target);

/// Sum of w[bin(range_i)] * loss_i. Plain pre-sum multiplication, no
/// re-normalization. Ranges outside the binning span propagate OutOfRange.
double range_weighted_loss(const std::vector<double>& losses, const std::vector<double>& ranges,
                           const RangeWeights& weights);

}  // namespace lrdet
