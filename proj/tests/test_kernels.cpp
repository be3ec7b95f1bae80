#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "lrdet/kernels.hpp"
#include "lrdet/rng.hpp"
#include "support/oracles.hpp"

using lrdet::Rng;
namespace k = lrdet::kernels;

namespace {

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

const std::vector<std::size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 257, 1000};

struct Batch {
  std::vector<double> linf, mask_r;
  std::vector<std::uint8_t> keep;
  std::vector<double> u, v, depth;
};

Batch run_backend(k::Backend b, const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::vector<double>& zs, const k::ProjectionParams& params) {
  REQUIRE(k::set_backend(b));
  const std::size_t n = xs.size();
  Batch out;
  out.linf.resize(n);
  out.keep.resize(n);
  out.u.resize(n);
  out.v.resize(n);
  out.depth.resize(n);
  k::linf_range(xs.data(), ys.data(), out.linf.data(), n);
  k::interval_mask(out.linf.data(), 30.0, 180.0, out.keep.data(), n);
  k::project_points(params, xs.data(), ys.data(), zs.data(), out.u.data(), out.v.data(),
                    out.depth.data(), n);
  return out;
}

}  // namespace

TEST_CASE("scalar kernels match their definitions") {
  Rng rng(101);
  const std::size_t n = 500;
  const auto xs = random_vec(rng, n, -300, 300);
  const auto ys = random_vec(rng, n, -300, 300);
  std::vector<double> out(n);
  k::scalar::linf_range(xs.data(), ys.data(), out.data(), n);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(out[i] == std::max(std::fabs(xs[i]), std::fabs(ys[i])));

  std::vector<std::uint8_t> keep(n);
  k::scalar::interval_mask(out.data(), 50.0, 250.0, keep.data(), n);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(keep[i] == static_cast<std::uint8_t>(out[i] >= 50.0 && out[i] <= 250.0));
}

TEST_CASE("scalar project_points equals the single-point reference") {
  Rng rng(102);
  k::ProjectionParams p{};
  for (int i = 0; i < 9; ++i) p.r[i] = rng.uniform(-1, 1);
  for (int i = 0; i < 3; ++i) p.t[i] = rng.uniform(-3, 3);
  p.fx = 800;
  p.fy = 820;
  p.cx = 1024;
  p.cy = 768;
  const std::size_t n = 333;
  const auto xs = random_vec(rng, n, -200, 200);
  const auto ys = random_vec(rng, n, -200, 200);
  const auto zs = random_vec(rng, n, -5, 5);
  std::vector<double> u(n), v(n), d(n);
  k::scalar::project_points(p, xs.data(), ys.data(), zs.data(), u.data(), v.data(), d.data(), n);
  for (std::size_t i = 0; i < n; ++i) {
    double eu, ev, ed;
    k::detail::project_one(p, xs[i], ys[i], zs[i], eu, ev, ed);
    CHECK(u[i] == eu);
    CHECK(v[i] == ev);
    CHECK(d[i] == ed);
  }
}

TEST_CASE("SIMD backends are bit-exact with scalar") {
  const auto backends = k::available_backends();
  REQUIRE(!backends.empty());
  CHECK(backends.front() == k::Backend::kScalar);
  const k::Backend original = k::active_backend();

  Rng rng(7);
  k::ProjectionParams params{};
  for (int i = 0; i < 9; ++i) params.r[i] = rng.uniform(-1, 1);
  for (int i = 0; i < 3; ++i) params.t[i] = rng.uniform(-2, 2);
  params.fx = 800;
  params.fy = 800;
  params.cx = 1024;
  params.cy = 768;

  for (const std::size_t n : kSizes) {
    auto xs = random_vec(rng, n, -300, 300);
    auto ys = random_vec(rng, n, -300, 300);
    const auto zs = random_vec(rng, n, -4, 4);
    // force exact-equality and boundary cases into the batch
    if (n >= 8) {
      xs[1] = -xs[0];
      ys[1] = ys[0];     // |x| tie
      xs[3] = 30.0;
      ys[3] = -10.0;     // mask boundary lo
      xs[5] = -180.0;
      ys[5] = 2.0;       // mask boundary hi
      xs[6] = 0.0;
      ys[6] = -0.0;      // signed zero
    }
    const Batch ref = run_backend(k::Backend::kScalar, xs, ys, zs, params);
    for (const k::Backend b : backends) {
      if (b == k::Backend::kScalar) continue;
      const Batch got = run_backend(b, xs, ys, zs, params);
      CAPTURE(static_cast<int>(b));
      CAPTURE(n);
      CHECK(bits_equal(got.linf, ref.linf));
      CHECK(got.keep == ref.keep);
      CHECK(bits_equal(got.u, ref.u));
      CHECK(bits_equal(got.v, ref.v));
      CHECK(bits_equal(got.depth, ref.depth));
    }
  }
  REQUIRE(k::set_backend(original));
}

TEST_CASE("nearest_pixel agrees across backends and with the exhaustive oracle") {
  const auto backends = k::available_backends();
  const k::Backend original = k::active_backend();
  Rng rng(8);

  for (const std::size_t n : kSizes) {
    if (n == 0) continue;  // contract requires n >= 1
    std::vector<double> pu = random_vec(rng, n, 0, 2048);
    std::vector<double> pv = random_vec(rng, n, 0, 1536);
    // exact duplicates to exercise the lowest-index tie rule
    if (n >= 9) {
      pu[7] = pu[2];
      pv[7] = pv[2];
      pu[8] = pu[2];
      pv[8] = pv[2];
    }
    for (int q = 0; q < 25; ++q) {
      const double qu = rng.uniform(-10, 2058);
      const double qv = rng.uniform(-10, 1546);
      const std::size_t expected = oracle::nearest_pixel(qu, qv, pu, pv);
      CHECK(k::scalar::nearest_pixel(qu, qv, pu.data(), pv.data(), n) == expected);
      for (const k::Backend b : backends) {
        REQUIRE(k::set_backend(b));
        CHECK(k::nearest_pixel(qu, qv, pu.data(), pv.data(), n) == expected);
      }
    }
    // query exactly on a duplicated candidate: distance 0 tie
    if (n >= 9) {
      const std::size_t expected = oracle::nearest_pixel(pu[2], pv[2], pu, pv);
      CHECK(expected == 2);
      for (const k::Backend b : backends) {
        REQUIRE(k::set_backend(b));
        CHECK(k::nearest_pixel(pu[2], pv[2], pu.data(), pv.data(), n) == expected);
      }
    }
  }
  REQUIRE(k::set_backend(original));
}

TEST_CASE("symmetric equidistant tie breaks to the lower index") {
  // candidates at u = 10 and u = 20; query at 15 is exactly equidistant
  const std::vector<double> pu = {20.0, 10.0};
  const std::vector<double> pv = {5.0, 5.0};
  CHECK(k::scalar::nearest_pixel(15.0, 5.0, pu.data(), pv.data(), 2) == 0);
  const auto backends = k::available_backends();
  const k::Backend original = k::active_backend();
  for (const k::Backend b : backends) {
    REQUIRE(k::set_backend(b));
    CHECK(k::nearest_pixel(15.0, 5.0, pu.data(), pv.data(), 2) == 0);
  }
  REQUIRE(k::set_backend(original));
}

TEST_CASE("backend selection") {
  const k::Backend original = k::active_backend();
  REQUIRE(k::set_backend(k::Backend::kScalar));
  CHECK(k::active_backend() == k::Backend::kScalar);
#if defined(__x86_64__)
  CHECK_FALSE(k::set_backend(k::Backend::kNeon));  // wrong architecture
  CHECK(k::active_backend() == k::Backend::kScalar);
#endif
  CHECK(std::string(k::backend_name(k::Backend::kScalar)) == "scalar");
  CHECK(std::string(k::backend_name(k::Backend::kAvx2)) == "avx2");
  CHECK(std::string(k::backend_name(k::Backend::kNeon)) == "neon");
  REQUIRE(k::set_backend(original));
}
