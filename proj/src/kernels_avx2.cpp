#include "lrdet/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstdint>
#include <limits>

// AVX2 variants, 4 x f64 lanes. No FMA anywhere: each lane performs the same
// mul/add/div sequence as the scalar reference, so results are bit-identical.
// This TU is compiled with -mavx2; callers must runtime-check support first.

namespace lrdet::kernels::avx2 {

namespace {

inline __m256d abs_pd(__m256d v) {
  const __m256d sign_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));
  return _mm256_and_pd(v, sign_mask);
}

}  // namespace

void linf_range(const double* xs, const double* ys, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ax = abs_pd(_mm256_loadu_pd(xs + i));
    const __m256d ay = abs_pd(_mm256_loadu_pd(ys + i));
    _mm256_storeu_pd(out + i, _mm256_max_pd(ax, ay));
  }
  if (i < n) scalar::linf_range(xs + i, ys + i, out + i, n - i);
}

void interval_mask(const double* r, double lo, double hi, std::uint8_t* keep, std::size_t n) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vr = _mm256_loadu_pd(r + i);
    const __m256d ge = _mm256_cmp_pd(vr, vlo, _CMP_GE_OQ);
    const __m256d le = _mm256_cmp_pd(vr, vhi, _CMP_LE_OQ);
    const int bits = _mm256_movemask_pd(_mm256_and_pd(ge, le));
    keep[i + 0] = static_cast<std::uint8_t>(bits & 1);
    keep[i + 1] = static_cast<std::uint8_t>((bits >> 1) & 1);
    keep[i + 2] = static_cast<std::uint8_t>((bits >> 2) & 1);
    keep[i + 3] = static_cast<std::uint8_t>((bits >> 3) & 1);
  }
  if (i < n) scalar::interval_mask(r + i, lo, hi, keep + i, n - i);
}

void project_points(const ProjectionParams& p, const double* xs, const double* ys,
                    const double* zs, double* u, double* v, double* depth, std::size_t n) {
  const __m256d r0 = _mm256_set1_pd(p.r[0]), r1 = _mm256_set1_pd(p.r[1]),
                r2 = _mm256_set1_pd(p.r[2]), r3 = _mm256_set1_pd(p.r[3]),
                r4 = _mm256_set1_pd(p.r[4]), r5 = _mm256_set1_pd(p.r[5]),
                r6 = _mm256_set1_pd(p.r[6]), r7 = _mm256_set1_pd(p.r[7]),
                r8 = _mm256_set1_pd(p.r[8]);
  const __m256d t0 = _mm256_set1_pd(p.t[0]), t1 = _mm256_set1_pd(p.t[1]),
                t2 = _mm256_set1_pd(p.t[2]);
  const __m256d fx = _mm256_set1_pd(p.fx), fy = _mm256_set1_pd(p.fy);
  const __m256d cx = _mm256_set1_pd(p.cx), cy = _mm256_set1_pd(p.cy);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(xs + i);
    const __m256d y = _mm256_loadu_pd(ys + i);
    const __m256d z = _mm256_loadu_pd(zs + i);
    // ((r0*x + r1*y) + r2*z) + t0 — mirrors detail::project_one exactly
    const __m256d camx = _mm256_add_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r0, x), _mm256_mul_pd(r1, y)),
                      _mm256_mul_pd(r2, z)),
        t0);
    const __m256d camy = _mm256_add_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r3, x), _mm256_mul_pd(r4, y)),
                      _mm256_mul_pd(r5, z)),
        t1);
    const __m256d camz = _mm256_add_pd(
        _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(r6, x), _mm256_mul_pd(r7, y)),
                      _mm256_mul_pd(r8, z)),
        t2);
    _mm256_storeu_pd(u + i, _mm256_add_pd(_mm256_mul_pd(fx, _mm256_div_pd(camx, camz)), cx));
    _mm256_storeu_pd(v + i, _mm256_add_pd(_mm256_mul_pd(fy, _mm256_div_pd(camy, camz)), cy));
    _mm256_storeu_pd(depth + i, camz);
  }
  if (i < n) scalar::project_points(p, xs + i, ys + i, zs + i, u + i, v + i, depth + i, n - i);
}

std::size_t nearest_pixel(double qu, double qv, const double* pu, const double* pv,
                          std::size_t n) {
  if (n < 8) return scalar::nearest_pixel(qu, qv, pu, pv, n);
  const __m256d vqu = _mm256_set1_pd(qu);
  const __m256d vqv = _mm256_set1_pd(qv);
  __m256d best_d = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256i best_i = _mm256_set1_epi64x(0);
  __m256i idx = _mm256_set_epi64x(3, 2, 1, 0);
  const __m256i four = _mm256_set1_epi64x(4);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d du = _mm256_sub_pd(vqu, _mm256_loadu_pd(pu + i));
    const __m256d dv = _mm256_sub_pd(vqv, _mm256_loadu_pd(pv + i));
    const __m256d d = _mm256_add_pd(_mm256_mul_pd(du, du), _mm256_mul_pd(dv, dv));
    const __m256d lt = _mm256_cmp_pd(d, best_d, _CMP_LT_OQ);  // strict, per lane
    best_d = _mm256_blendv_pd(best_d, d, lt);
    best_i = _mm256_blendv_epi8(best_i, idx, _mm256_castpd_si256(lt));
    idx = _mm256_add_epi64(idx, four);
  }
  alignas(32) double lane_d[4];
  alignas(32) long long lane_i[4];
  _mm256_store_pd(lane_d, best_d);
  _mm256_store_si256(reinterpret_cast<__m256i*>(lane_i), best_i);
  double best_dist = lane_d[0];
  std::size_t best = static_cast<std::size_t>(lane_i[0]);
  for (int k = 1; k < 4; ++k) {
    const auto cand = static_cast<std::size_t>(lane_i[k]);
    if (lane_d[k] < best_dist || (lane_d[k] == best_dist && cand < best)) {
      best_dist = lane_d[k];
      best = cand;
    }
  }
  for (; i < n; ++i) {  // tail indices all exceed the vector ones
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

}  // namespace lrdet::kernels::avx2

#endif  // x86-64
