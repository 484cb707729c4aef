#include "optexec/kernels.hpp"

namespace optexec::kernels::scalar {

void affine_step(const AffineStep& c, std::span<double> p, std::span<double> q,
                 std::span<const double> z, std::span<double> cost, std::span<double> u_out) {
  const std::size_t n = p.size();
  const bool want_u = !u_out.empty();
  for (std::size_t i = 0; i < n; ++i) {
    const double pi = p[i];
    const double qi = q[i];
    const double u = c.k_p * pi + c.k_q * qi + c.f;
    cost[i] += c.a_eta_dt * u * u + c.a_dt * (pi + c.s) * u + c.beta_dt * qi * qi;
    p[i] = c.decay * pi + c.impact * u + c.drift + c.sigma * z[i];
    q[i] = qi - c.a_dt * u;
    if (want_u) u_out[i] = u;
  }
}

void syr(double alpha, std::span<const double> x, double* A, std::size_t lda) {
  const std::size_t m = x.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double ax = alpha * x[i];
    double* row = A + i * lda;
    for (std::size_t j = 0; j < m; ++j) row[j] += ax * x[j];
  }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

}  // namespace optexec::kernels::scalar
