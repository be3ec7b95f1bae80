#include "lrdet/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstdint>
#include <limits>

// NEON variants, 2 x f64 lanes. Same contract as the AVX2 TU: no FMA, the
// exact scalar operation order per lane.

namespace lrdet::kernels::neon {

void linf_range(const double* xs, const double* ys, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t ax = vabsq_f64(vld1q_f64(xs + i));
    const float64x2_t ay = vabsq_f64(vld1q_f64(ys + i));
    vst1q_f64(out + i, vmaxq_f64(ax, ay));
  }
  if (i < n) scalar::linf_range(xs + i, ys + i, out + i, n - i);
}

void interval_mask(const double* r, double lo, double hi, std::uint8_t* keep, std::size_t n) {
  const float64x2_t vlo = vdupq_n_f64(lo);
  const float64x2_t vhi = vdupq_n_f64(hi);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vr = vld1q_f64(r + i);
    const uint64x2_t ge = vcgeq_f64(vr, vlo);
    const uint64x2_t le = vcleq_f64(vr, vhi);
    const uint64x2_t both = vandq_u64(ge, le);
    keep[i + 0] = vgetq_lane_u64(both, 0) ? 1 : 0;
    keep[i + 1] = vgetq_lane_u64(both, 1) ? 1 : 0;
  }
  if (i < n) scalar::interval_mask(r + i, lo, hi, keep + i, n - i);
}

void project_points(const ProjectionParams& p, const double* xs, const double* ys,
                    const double* zs, double* u, double* v, double* depth, std::size_t n) {
  const float64x2_t r0 = vdupq_n_f64(p.r[0]), r1 = vdupq_n_f64(p.r[1]), r2 = vdupq_n_f64(p.r[2]),
                    r3 = vdupq_n_f64(p.r[3]), r4 = vdupq_n_f64(p.r[4]), r5 = vdupq_n_f64(p.r[5]),
                    r6 = vdupq_n_f64(p.r[6]), r7 = vdupq_n_f64(p.r[7]), r8 = vdupq_n_f64(p.r[8]);
  const float64x2_t t0 = vdupq_n_f64(p.t[0]), t1 = vdupq_n_f64(p.t[1]), t2 = vdupq_n_f64(p.t[2]);
  const float64x2_t fx = vdupq_n_f64(p.fx), fy = vdupq_n_f64(p.fy);
  const float64x2_t cx = vdupq_n_f64(p.cx), cy = vdupq_n_f64(p.cy);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t x = vld1q_f64(xs + i);
    const float64x2_t y = vld1q_f64(ys + i);
    const float64x2_t z = vld1q_f64(zs + i);
    const float64x2_t camx =
        vaddq_f64(vaddq_f64(vaddq_f64(vmulq_f64(r0, x), vmulq_f64(r1, y)), vmulq_f64(r2, z)), t0);
    const float64x2_t camy =
        vaddq_f64(vaddq_f64(vaddq_f64(vmulq_f64(r3, x), vmulq_f64(r4, y)), vmulq_f64(r5, z)), t1);
    const float64x2_t camz =
        vaddq_f64(vaddq_f64(vaddq_f64(vmulq_f64(r6, x), vmulq_f64(r7, y)), vmulq_f64(r8, z)), t2);
    vst1q_f64(u + i, vaddq_f64(vmulq_f64(fx, vdivq_f64(camx, camz)), cx));
    vst1q_f64(v + i, vaddq_f64(vmulq_f64(fy, vdivq_f64(camy, camz)), cy));
    vst1q_f64(depth + i, camz);
  }
  if (i < n) scalar::project_points(p, xs + i, ys + i, zs + i, u + i, v + i, depth + i, n - i);
}

std::size_t nearest_pixel(double qu, double qv, const double* pu, const double* pv,
                          std::size_t n) {
  if (n < 4) return scalar::nearest_pixel(qu, qv, pu, pv, n);
  const float64x2_t vqu = vdupq_n_f64(qu);
  const float64x2_t vqv = vdupq_n_f64(qv);
  float64x2_t best_d = vdupq_n_f64(std::numeric_limits<double>::infinity());
  uint64x2_t best_i = vdupq_n_u64(0);
  const std::uint64_t idx_init[2] = {0, 1};
  uint64x2_t idx = vld1q_u64(idx_init);
  const uint64x2_t two = vdupq_n_u64(2);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t du = vsubq_f64(vqu, vld1q_f64(pu + i));
    const float64x2_t dv = vsubq_f64(vqv, vld1q_f64(pv + i));
    const float64x2_t d = vaddq_f64(vmulq_f64(du, du), vmulq_f64(dv, dv));
    const uint64x2_t lt = vcltq_f64(d, best_d);
    best_d = vbslq_f64(lt, d, best_d);
    best_i = vbslq_u64(lt, idx, best_i);
    idx = vaddq_u64(idx, two);
  }
  double lane_d[2] = {vgetq_lane_f64(best_d, 0), vgetq_lane_f64(best_d, 1)};
  std::uint64_t lane_i[2] = {vgetq_lane_u64(best_i, 0), vgetq_lane_u64(best_i, 1)};
  double best_dist = lane_d[0];
  std::size_t best = static_cast<std::size_t>(lane_i[0]);
  if (lane_d[1] < best_dist || (lane_d[1] == best_dist && lane_i[1] < best)) {
    best_dist = lane_d[1];
    best = static_cast<std::size_t>(lane_i[1]);
  }
  for (; i < n; ++i) {
    const double du = qu - pu[i];
    const double dv = qv - pv[i];
    const double d = du * du + dv * dv;
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

}  // namespace lrdet::kernels::neon

#endif  // aarch64
