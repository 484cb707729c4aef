#include <atomic>
#include <cstdlib>
#include <string_view>

#include "optexec/kernels.hpp"

namespace optexec::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(OPTEXEC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() noexcept {
  if (const char* env = std::getenv("OPTEXEC_ISA")) {
    if (std::string_view(env) == "scalar") return Isa::scalar;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  if (isa == Isa::scalar) return true;
  static const bool avx2 = cpu_has_avx2();
  return avx2;
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

bool set_isa(Isa isa) noexcept {
  if (!isa_available(isa)) return false;
  current().store(isa, std::memory_order_relaxed);
  return true;
}

#if defined(OPTEXEC_HAVE_AVX2)
#define OPTEXEC_DISPATCH(fn, ...)                                        \
  (active_isa() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define OPTEXEC_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void affine_step(const AffineStep& c, std::span<double> p, std::span<double> q,
                 std::span<const double> z, std::span<double> cost, std::span<double> u_out) {
  OPTEXEC_DISPATCH(affine_step, c, p, q, z, cost, u_out);
}

void syr(double alpha, std::span<const double> x, double* A, std::size_t lda) {
  OPTEXEC_DISPATCH(syr, alpha, x, A, lda);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  OPTEXEC_DISPATCH(axpy, alpha, x, y);
}

double dot(std::span<const double> x, std::span<const double> y) {
  return OPTEXEC_DISPATCH(dot, x, y);
}

#undef OPTEXEC_DISPATCH

#if !defined(OPTEXEC_HAVE_AVX2)
// Link-time stubs so the avx2 namespace is always declared; never reached
// because isa_available(Isa::avx2) is false.
namespace avx2 {
void affine_step(const AffineStep& c, std::span<double> p, std::span<double> q,
                 std::span<const double> z, std::span<double> cost, std::span<double> u_out) {
  scalar::affine_step(c, p, q, z, cost, u_out);
}
void syr(double alpha, std::span<const double> x, double* A, std::size_t lda) {
  scalar::syr(alpha, x, A, lda);
}
void axpy(double alpha, std::span<const double> x, std::span<double> y) { scalar::axpy(alpha, x, y); }
double dot(std::span<const double> x, std::span<const double> y) { return scalar::dot(x, y); }
}  // namespace avx2
#endif

}  // namespace optexec::kernels
