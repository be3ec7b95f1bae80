#include <cstdlib>
#include <cstring>
#include <mutex>

#include "lrdet/kernels.hpp"

namespace lrdet::kernels {

namespace {

struct Table {
  void (*linf)(const double*, const double*, double*, std::size_t);
  void (*mask)(const double*, double, double, std::uint8_t*, std::size_t);
  void (*proj)(const ProjectionParams&, const double*, const double*, const double*, double*,
               double*, double*, std::size_t);
  std::size_t (*nn)(double, double, const double*, const double*, std::size_t);
};

constexpr Table kScalarTable{scalar::linf_range, scalar::interval_mask, scalar::project_points,
                             scalar::nearest_pixel};

bool backend_usable(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::kNeon:
#if defined(__aarch64__)
      return true;  // baseline on aarch64
#else
      return false;
#endif
  }
  return false;
}

Table table_for(Backend b) {
  switch (b) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::kAvx2:
      return {avx2::linf_range, avx2::interval_mask, avx2::project_points, avx2::nearest_pixel};
#endif
#if defined(__aarch64__)
    case Backend::kNeon:
      return {neon::linf_range, neon::interval_mask, neon::project_points, neon::nearest_pixel};
#endif
    default:
      return kScalarTable;
  }
}

Table g_table = kScalarTable;
Backend g_backend = Backend::kScalar;
std::once_flag g_init;

Backend pick_default() {
  if (const char* env = std::getenv("LRDET_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::kScalar;
    if (std::strcmp(env, "avx2") == 0 && backend_usable(Backend::kAvx2)) return Backend::kAvx2;
    if (std::strcmp(env, "neon") == 0 && backend_usable(Backend::kNeon)) return Backend::kNeon;
    // "auto" or anything unusable falls through to detection
  }
  if (backend_usable(Backend::kAvx2)) return Backend::kAvx2;
  if (backend_usable(Backend::kNeon)) return Backend::kNeon;
  return Backend::kScalar;
}

void ensure_init() {
  std::call_once(g_init, [] {
    g_backend = pick_default();
    g_table = table_for(g_backend);
  });
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
    case Backend::kNeon:
      return "neon";
  }
  return "?";
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::kScalar};
  if (backend_usable(Backend::kAvx2)) out.push_back(Backend::kAvx2);
  if (backend_usable(Backend::kNeon)) out.push_back(Backend::kNeon);
  return out;
}

Backend active_backend() {
  ensure_init();
  return g_backend;
}

bool set_backend(Backend b) {
  ensure_init();
  if (!backend_usable(b)) return false;
  g_backend = b;
  g_table = table_for(b);
  return true;
}

void linf_range(const double* xs, const double* ys, double* out, std::size_t n) {
  ensure_init();
  g_table.linf(xs, ys, out, n);
}

void interval_mask(const double* r, double lo, double hi, std::uint8_t* keep, std::size_t n) {
  ensure_init();
  g_table.mask(r, lo, hi, keep, n);
}

void project_points(const ProjectionParams& p, const double* xs, const double* ys,
                    const double* zs, double* u, double* v, double* depth, std::size_t n) {
  ensure_init();
  g_table.proj(p, xs, ys, zs, u, v, depth, n);
}

std::size_t nearest_pixel(double qu, double qv, const double* pu, const double* pv,
                          std::size_t n) {
  ensure_init();
  return g_table.nn(qu, qv, pu, pv, n);
}

}  // namespace lrdet::kernels
