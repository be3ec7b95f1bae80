#pragma once

// Hot-loop kernels: scalar reference implementations plus SIMD variants
// (AVX2 on x86-64, NEON on aarch64) selected at runtime. All variants are
// bit-exact with the scalar reference — same IEEE operations in the same
// per-element order, no FMA contraction (the build sets -ffp-contract=off) —
// so backend selection can never change an output byte. Equivalence is
// enforced by tests on every available backend.
//
// Selection: highest available backend wins at startup; override with the
// LRDET_KERNELS environment variable (scalar | avx2 | neon | auto) or
// programmatically with set_backend(). Select before spawning worker threads.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace lrdet::kernels {

struct ProjectionParams {
  double r[9];  // ego-to-camera rotation, row-major
  double t[3];  // ego-to-camera translation
  double fx, fy, cx, cy;
};

namespace detail {
// Canonical pinhole math. Single source of truth: the scalar kernel, the AVX2
// and NEON lanes, and the single-point geometry op all follow this exact
// operation order. Behind-camera inputs produce inf/nan pixels; callers mask
// on depth before touching u/v.
inline void project_one(const ProjectionParams& p, double x, double y, double z, double& u,
                        double& v, double& depth) {
  const double camx = ((p.r[0] * x + p.r[1] * y) + p.r[2] * z) + p.t[0];
  const double camy = ((p.r[3] * x + p.r[4] * y) + p.r[5] * z) + p.t[1];
  const double camz = ((p.r[6] * x + p.r[7] * y) + p.r[8] * z) + p.t[2];
  u = p.fx * (camx / camz) + p.cx;
  v = p.fy * (camy / camz) + p.cy;
  depth = camz;
}
}  // namespace detail

enum class Backend { kScalar, kAvx2, kNeon };

const char* backend_name(Backend b);
std::vector<Backend> available_backends();
Backend active_backend();
bool set_backend(Backend b);  // false (and no change) if unavailable

// max(|x|, |y|) per element
void linf_range(const double* xs, const double* ys, double* out, std::size_t n);

// keep[i] = lo <= r[i] && r[i] <= hi
void interval_mask(const double* r, double lo, double hi, std::uint8_t* keep, std::size_t n);

// full pinhole chain per element; writes u, v, depth unconditionally
void project_points(const ProjectionParams& p, const double* xs, const double* ys,
                    const double* zs, double* u, double* v, double* depth, std::size_t n);

// index of the candidate minimizing (qu-pu[i])^2 + (qv-pv[i])^2,
// ties broken toward the lowest index; n >= 1
std::size_t nearest_pixel(double qu, double qv, const double* pu, const double* pv,
                          std::size_t n);

namespace scalar {
void linf_range(const double* xs, const double* ys, double* out, std::size_t n);
void interval_mask(const double* r, double lo, double hi, std::uint8_t* keep, std::size_t n);
void project_points(const ProjectionParams& p, const double* xs, const double* ys,
                    const double* zs, double* u, double* v, double* depth, std::size_t n);
std::size_t nearest_pixel(double qu, double qv, const double* pu, const double* pv,
                          std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void linf_range(const double* xs, const double* ys, double* out, std::size_t n);
void interval_mask(const double* r, double lo, double hi, std::uint8_t* keep, std::size_t n);
void project_points(const ProjectionParams& p, const double* xs, const double* ys,
                    const double* zs, double* u, double* v, double* depth, std::size_t n);
std::size_t nearest_pixel(double qu, double qv, const double* pu, const double* pv,
                          std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void linf_range(const double* xs, const double* ys, double* out, std::size_t n);
void interval_mask(const double* r, double lo, double hi, std::uint8_t* keep, std::size_t n);
void project_points(const ProjectionParams& p, const double* xs, const double* ys,
                    const double* zs, double* u, double* v, double* depth, std::size_t n);
std::size_t nearest_pixel(double qu, double qv, const double* pu, const double* pv,
                          std::size_t n);
}  // namespace neon
#endif

}  // namespace lrdet::kernels
