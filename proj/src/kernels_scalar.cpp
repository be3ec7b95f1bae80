#include <algorithm>
#include <cmath>

#include "lrdet/kernels.hpp"

// Reference implementations. The SIMD variants must match these bit for bit;
// keep every floating-point expression in the exact order written here.

namespace lrdet::kernels::scalar {

void linf_range(const double* xs, const double* ys, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = std::max(std::fabs(xs[i]), std::fabs(ys[i]));
  }
}

void interval_mask(const double* r, double lo, double hi, std::uint8_t* keep, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    keep[i] = (lo <= r[i] && r[i] <= hi) ? 1 : 0;
  }
}

void project_points(const ProjectionParams& p, const double* xs, const double* ys,
                    const double* zs, double* u, double* v, double* depth, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    detail::project_one(p, xs[i], ys[i], zs[i], u[i], v[i], depth[i]);
  }
}

std::size_t nearest_pixel(double qu, double qv, const double* pu, const double* pv,
                          std::size_t n) {
  std::size_t best = 0;
  double du = qu - pu[0];
  double dv = qv - pv[0];
  double best_d = du * du + dv * dv;
  for (std::size_t i = 1; i < n; ++i) {
    du = qu - pu[i];
    dv = qv - pv[i];
    const double d = du * du + dv * dv;
    if (d < best_d) {  // strict: the first minimum (lowest index) wins
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace lrdet::kernels::scalar
