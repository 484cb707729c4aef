// Compiled with -mavx2 -mfma; only entered after a runtime CPU check.

#include <immintrin.h>

#include "optexec/kernels.hpp"

namespace optexec::kernels::avx2 {

void affine_step(const AffineStep& c, std::span<double> p, std::span<double> q,
                 std::span<const double> z, std::span<double> cost, std::span<double> u_out) {
  const std::size_t n = p.size();
  const bool want_u = !u_out.empty();

  const __m256d kp = _mm256_set1_pd(c.k_p);
  const __m256d kq = _mm256_set1_pd(c.k_q);
  const __m256d f = _mm256_set1_pd(c.f);
  const __m256d aeta = _mm256_set1_pd(c.a_eta_dt);
  const __m256d adt = _mm256_set1_pd(c.a_dt);
  const __m256d s = _mm256_set1_pd(c.s);
  const __m256d bdt = _mm256_set1_pd(c.beta_dt);
  const __m256d decay = _mm256_set1_pd(c.decay);
  const __m256d impact = _mm256_set1_pd(c.impact);
  const __m256d drift = _mm256_set1_pd(c.drift);
  const __m256d sigma = _mm256_set1_pd(c.sigma);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d pi = _mm256_loadu_pd(p.data() + i);
    const __m256d qi = _mm256_loadu_pd(q.data() + i);
    const __m256d u = _mm256_fmadd_pd(kp, pi, _mm256_fmadd_pd(kq, qi, f));

    __m256d stage = _mm256_mul_pd(_mm256_mul_pd(aeta, u), u);
    stage = _mm256_fmadd_pd(_mm256_mul_pd(adt, _mm256_add_pd(pi, s)), u, stage);
    stage = _mm256_fmadd_pd(_mm256_mul_pd(bdt, qi), qi, stage);
    _mm256_storeu_pd(cost.data() + i, _mm256_add_pd(_mm256_loadu_pd(cost.data() + i), stage));

    const __m256d zi = _mm256_loadu_pd(z.data() + i);
    __m256d pn = _mm256_fmadd_pd(decay, pi, _mm256_fmadd_pd(impact, u, drift));
    pn = _mm256_fmadd_pd(sigma, zi, pn);
    _mm256_storeu_pd(p.data() + i, pn);
    _mm256_storeu_pd(q.data() + i, _mm256_fnmadd_pd(adt, u, qi));
    if (want_u) _mm256_storeu_pd(u_out.data() + i, u);
  }
  if (i < n) {
    scalar::affine_step(c, p.subspan(i), q.subspan(i), z.subspan(i), cost.subspan(i),
                        want_u ? u_out.subspan(i) : std::span<double>{});
  }
}

void syr(double alpha, std::span<const double> x, double* A, std::size_t lda) {
  const std::size_t m = x.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double axs = alpha * x[i];
    const __m256d ax = _mm256_set1_pd(axs);
    double* row = A + i * lda;
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
      const __m256d r = _mm256_loadu_pd(row + j);
      _mm256_storeu_pd(row + j, _mm256_fmadd_pd(ax, _mm256_loadu_pd(x.data() + j), r));
    }
    for (; j < m; ++j) row[j] += axs * x[j];
  }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yi = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(y.data() + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x.data() + i), yi));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i), acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) total += x[i] * y[i];
  return total;
}

}  // namespace optexec::kernels::avx2
