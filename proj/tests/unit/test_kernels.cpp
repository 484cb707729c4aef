#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "optexec/kernels.hpp"

using namespace optexec::kernels;

namespace {

std::vector<double> randn(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])));
  }
  return m;
}

}  // namespace

TEST_CASE("scalar path is always available and selectable") {
  CHECK(isa_available(Isa::scalar));
  const Isa before = active_isa();
  CHECK(set_isa(Isa::scalar));
  CHECK(active_isa() == Isa::scalar);
  set_isa(before);
}

TEST_CASE("affine step: SIMD matches scalar on ragged lengths") {
  if (!isa_available(Isa::avx2)) {
    MESSAGE("avx2 unavailable; equivalence test skipped");
    return;
  }
  std::mt19937_64 rng(7);
  AffineStep c{-2.5, 1.3, 0.02, 0.05 * 50 * 0.02, 50 * 0.02, 2e-4, 1e-3 * 0.02,
               1 - 0.4 * 0.02, 2e-8 * 5e6 * 0.02, 1e-5, 3e-3};
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 1001u}) {
    auto p = randn(rng, n, 0.01), q = randn(rng, n), z = randn(rng, n), cost = randn(rng, n);
    auto p2 = p, q2 = q, cost2 = cost;
    std::vector<double> u1(n), u2(n);
    scalar::affine_step(c, p, q, z, cost, u1);
    avx2::affine_step(c, p2, q2, z, cost2, u2);
    CHECK(max_rel_diff(p, p2) <= 1e-14);
    CHECK(max_rel_diff(q, q2) <= 1e-14);
    CHECK(max_rel_diff(cost, cost2) <= 1e-14);
    CHECK(max_rel_diff(u1, u2) <= 1e-14);
  }
}

TEST_CASE("affine step matches its defining formula") {
  AffineStep c{-1.0, 2.0, 0.5, 0.3, 0.2, 0.01, 0.4, 0.9, 0.05, 0.001, 0.1};
  std::vector<double> p{0.1}, q{0.8}, z{1.5}, cost{0.0}, u{0.0};
  affine_step(c, p, q, z, cost, u);
  const double uu = -1.0 * 0.1 + 2.0 * 0.8 + 0.5;
  CHECK(u[0] == doctest::Approx(uu));
  CHECK(cost[0] == doctest::Approx(0.3 * uu * uu + 0.2 * (0.1 + 0.01) * uu + 0.4 * 0.64));
  CHECK(p[0] == doctest::Approx(0.9 * 0.1 + 0.05 * uu + 0.001 + 0.1 * 1.5));
  CHECK(q[0] == doctest::Approx(0.8 - 0.2 * uu));
}

TEST_CASE("syr, axpy and dot agree across ISAs") {
  std::mt19937_64 rng(11);
  for (std::size_t m : {1u, 2u, 4u, 7u, 33u}) {
    const std::size_t lda = m + 3;
    auto x = randn(rng, m);
    auto A = randn(rng, m * lda);
    auto A_ref = A;
    scalar::syr(0.7, x, A_ref.data(), lda);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        CHECK(A_ref[i * lda + j] - A[i * lda + j] == doctest::Approx(0.7 * x[i] * x[j]));
      }
    }
    auto y = randn(rng, m);
    auto y_ref = y;
    scalar::axpy(-1.5, x, y_ref);
    const double d_ref = scalar::dot(x, y);
    if (isa_available(Isa::avx2)) {
      auto A2 = A;
      avx2::syr(0.7, x, A2.data(), lda);
      CHECK(max_rel_diff(A_ref, A2) <= 1e-14);
      auto y2 = y;
      avx2::axpy(-1.5, x, y2);
      CHECK(max_rel_diff(y_ref, y2) <= 1e-14);
      CHECK(avx2::dot(x, y) == doctest::Approx(d_ref).epsilon(1e-12));
    }
  }
}
