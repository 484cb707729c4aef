#pragma once

// Continuous-trading limit: backward Riccati ODEs for the value function
// H(t, X) = X' P X + b' X + e, closed-form gains for constant coefficients
// without permanent impact, and their beta = 0 limits.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "optexec/core.hpp"
#include "optexec/lqr.hpp"

namespace optexec {

/// Constant-coefficient continuous model. `sigma` is the volatility per unit
/// square-root time; `w1` = Q0 mu.
struct ContinuousSpec {
  double T = 1.0;
  double eta = 0.0;
  double a = 0.0;
  double w1 = 0.0;
  double s = 0.0;
  double sigma = 0.0;
  double kappa = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  TerminalPenalty beta_T;

  /// Parameters of bucket `t`, with sigma rescaled from per bucket to per
  /// square-root time.
  [[nodiscard]] static ContinuousSpec from_market(const MarketSpec& spec, std::size_t t = 0);
};

struct ContinuousPolicy {
  std::vector<double> t;  ///< grid nodes 0..T
  std::vector<Mat2> P;
  std::vector<Vec2> b;
  std::vector<double> e;
  std::vector<Vec2> k;    ///< -(P w + e1 / 2) / eta
  std::vector<double> f;  ///< -(b' w + s) / (2 eta)
  double beta_T = 0.0;    ///< terminal penalty the ODE was seeded with

  /// Gain at time t by linear interpolation between nodes.
  [[nodiscard]] Vec2 gain_at(double time) const;
};

inline constexpr std::size_t kDefaultGrid = 10000;

/// RK4 on grid_n steps. A hard terminal penalty is realized by a sweep over
/// beta_T in {1e2, 1e3, 1e4}; the last policy is returned after checking that
/// the gains converge monotonically along the sweep. Throws StepBlowup if
/// the state overflows and InvalidParameter if eta <= 0.
[[nodiscard]] ContinuousPolicy integrate_riccati(const ContinuousSpec& spec,
                                                 std::size_t grid_n = kDefaultGrid);

struct HardSweep {
  std::vector<double> beta_T;
  std::vector<ContinuousPolicy> policies;
  /// Every gain moves monotonically in beta_T at every node t < T.
  bool monotone = false;
};

[[nodiscard]] HardSweep integrate_riccati_sweep(const ContinuousSpec& spec,
                                                std::vector<double> beta_T = {1e2, 1e3, 1e4},
                                                std::size_t grid_n = kDefaultGrid);

struct ClosedFormParams {
  double eta = 0.0;
  double a = 0.0;
  double kappa = 0.0;
  double beta = 0.0;
  TerminalPenalty beta_T;
  double T = 1.0;
};

struct Gains {
  double k1 = 0.0;  ///< price gain
  double k2 = 0.0;  ///< inventory gain
};

/// (c + beta_T) / (c - beta_T) with c = sqrt(eta beta / a); -1 when hard.
/// Throws ZetaPole when beta_T equals c within 1e-12.
[[nodiscard]] double zeta(const ClosedFormParams& p);

/// chi at calendar time t (non-positive when zeta = -1, zero at T).
[[nodiscard]] double chi(const ClosedFormParams& p, double t);

/// Closed-form gains for beta > 0; beta = 0 is handled by corollary_gains.
[[nodiscard]] Gains closed_form_gains(const ClosedFormParams& p, double t);

/// beta = 0 gains for a finite or hard terminal penalty. In the hard case
/// t = T returns (-1/(2 eta), +inf).
[[nodiscard]] Gains corollary_gains(double eta, double a, double kappa, TerminalPenalty beta_T,
                                    double T, double t);

/// CSV with header t,k1,k2.
void write_gains_csv(std::ostream& os, const std::vector<double>& t, const std::vector<Gains>& g);

}  // namespace optexec
