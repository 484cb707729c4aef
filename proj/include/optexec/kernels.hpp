#pragma once

// Data-parallel inner loops with a scalar reference implementation and an
// AVX2/FMA variant chosen at runtime. The dispatched entry points live in
// `optexec::kernels`; the per-ISA implementations are reachable directly for
// equivalence tests.
//
// Set OPTEXEC_ISA=scalar in the environment to force the reference path.

#include <cstddef>
#include <span>

namespace optexec::kernels {

enum class Isa { scalar, avx2 };

[[nodiscard]] const char* isa_name(Isa isa) noexcept;
[[nodiscard]] bool isa_available(Isa isa) noexcept;
/// ISA used by the dispatched entry points.
[[nodiscard]] Isa active_isa() noexcept;
/// Overrides the dispatch choice; returns false if `isa` is unavailable.
bool set_isa(Isa isa) noexcept;

/// Coefficients of one bucket of an affine policy played on a batch of
/// paths with arrival-price slippage:
///   u     = k_p p + k_q q + f
///   cost += a_eta_dt u^2 + a_dt (p + s) u + beta_dt q^2
///   p'    = decay p + impact u + drift + sigma z
///   q'    = q - a_dt u
struct AffineStep {
  double k_p = 0.0, k_q = 0.0, f = 0.0;
  double a_eta_dt = 0.0, a_dt = 0.0, s = 0.0, beta_dt = 0.0;
  double decay = 1.0, impact = 0.0, drift = 0.0, sigma = 0.0;
};

/// Advances every path by one bucket. `u_out` may be empty.
void affine_step(const AffineStep& c, std::span<double> p, std::span<double> q,
                 std::span<const double> z, std::span<double> cost, std::span<double> u_out);

/// A[i*lda + j] += alpha * x[i] * x[j] for i, j < x.size().
void syr(double alpha, std::span<const double> x, double* A, std::size_t lda);

/// y += alpha * x.
void axpy(double alpha, std::span<const double> x, std::span<double> y);

[[nodiscard]] double dot(std::span<const double> x, std::span<const double> y);

namespace scalar {
void affine_step(const AffineStep& c, std::span<double> p, std::span<double> q,
                 std::span<const double> z, std::span<double> cost, std::span<double> u_out);
void syr(double alpha, std::span<const double> x, double* A, std::size_t lda);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
}  // namespace scalar

namespace avx2 {
// Only callable when isa_available(Isa::avx2).
void affine_step(const AffineStep& c, std::span<double> p, std::span<double> q,
                 std::span<const double> z, std::span<double> cost, std::span<double> u_out);
void syr(double alpha, std::span<const double> x, double* A, std::size_t lda);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
}  // namespace avx2

}  // namespace optexec::kernels
