#pragma once

// Backward Riccati recursion for the unconstrained execution problem with
// mean-reversion and trend signals. The optimal control is affine in the
// state, u_t = k_t . (p, q) + f_t, and the value function is quadratic,
// H(t, X) = X' P_t X + b_t' X + e_t.

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "optexec/core.hpp"

namespace optexec {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

/// How a hard terminal penalty is realized in the recursion.
enum class HardTerminal {
  /// The last bucket is forced to u = q / (a dt); the resulting value
  /// function at T - dt is exact and finite.
  exact,
  /// A large finite beta_T = scale * max(eta) / (min(a) dt^2).
  surrogate,
};

struct LqrOptions {
  HardTerminal hard = HardTerminal::exact;
  double surrogate_scale = 1e4;
  /// g_t at or below g_floor_rel * max(eta) aborts with DegenerateGt.
  double g_floor_rel = 1e-12;
};

struct LqrPolicy {
  std::size_t n = 0;
  double dt = 0.0;
  /// Terminal penalty the recursion was seeded with (+inf for exact hard).
  double beta_T = 0.0;
  bool hard_exact = false;

  // Indexed by bucket 0..n (entry n is the terminal condition).
  std::vector<Mat2> P;
  std::vector<Vec2> b;
  std::vector<double> e;

  // Indexed by bucket 0..n-1. g is +inf at a forced final bucket.
  std::vector<Vec2> k;
  std::vector<double> f;
  std::vector<double> g;
};

/// Throws Error(DegenerateGt) naming the bucket if g_t collapses.
[[nodiscard]] LqrPolicy build_policy(const MarketSpec& spec, const LqrOptions& opts = {});

/// k_t . (p, q) + f_t, unclamped.
[[nodiscard]] double policy_rate(const LqrPolicy& policy, const ExecState& state);

/// X' P_t X + b_t' X + e_t. At t = T with an exact hard terminal this is 0
/// when q = 0 and +inf otherwise.
[[nodiscard]] double value_at(const LqrPolicy& policy, const ExecState& state);

/// Surrogate beta_T used for a hard terminal under HardTerminal::surrogate.
[[nodiscard]] double hard_surrogate(const MarketSpec& spec, double scale = 1e4);

/// CSV with header t,k_p,k_q,f,g,P11,P12,P22,b1,b2,e; one row per bucket
/// 0..n-1 and a final terminal row with empty gain columns.
void write_policy_csv(std::ostream& os, const LqrPolicy& policy);

}  // namespace optexec
