#pragma once

// Dark venue: orders rest at the lit mid and fill in full with probability
// lambda dt per bucket. The dark problem has state X^D = (p, q^D), where q^D
// is the inventory share handed to the dark venue, and is solved as an LQR.
// The two-step scheduler runs lit MPC first and then sizes the dark order.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "optexec/continuous.hpp"
#include "optexec/core.hpp"
#include "optexec/lqr.hpp"
#include "optexec/mpc.hpp"
#include "optexec/rng.hpp"

namespace optexec {

struct DarkSpec {
  std::vector<double> lambda;  ///< fill intensity per unit time, > 0
  std::vector<double> theta;   ///< adverse-selection impact per share, >= 0
  std::vector<double> beta_D;  ///< dark urgency
  double beta_T_D = 0.0;       ///< terminal penalty on q^D
  double frac_a = 0.0;         ///< share of the post-lit inventory offered to the dark
  /// Makes the theta y mid-price push persist into the next slippage instead
  /// of affecting only the bucket's paid prices.
  bool impact_persistent = false;

  [[nodiscard]] static DarkSpec constant(std::size_t n, double lambda, double theta, double beta_D,
                                         double beta_T_D, double frac_a);
};

/// Throws LengthMismatch, LambdaZero (lambda = 0) or InvalidParameter
/// (lambda dt outside (0, 1], theta < 0, frac_a outside [0, 1]).
void validate(const MarketSpec& spec, const DarkSpec& dark);

/// Buckets where theta v is not well below eta, as human-readable notes.
[[nodiscard]] std::vector<std::string> dark_advisories(const MarketSpec& spec,
                                                        const DarkSpec& dark);

/// Value function and affine order size y = k . (p, q^D) + f in shares, for
/// buckets t_start..n-1. Arrays are indexed by bucket - t_start; P, b, e have
/// one more entry for T.
struct DarkPolicy {
  std::size_t t_start = 0;
  std::size_t n = 0;
  double dt = 0.0;
  double avg_u = 0.0;

  std::vector<Mat2> P;
  std::vector<Vec2> b;
  std::vector<double> e;
  std::vector<Vec2> k;
  std::vector<double> f;
  std::vector<double> g;
};

inline constexpr double kDarkGFloorRel = 1e-12;

/// Backward recursion from T to t_start with the lit average rate `avg_u`
/// frozen. Throws DegenerateGD naming the bucket when g^D collapses.
[[nodiscard]] DarkPolicy build_dark_policy(const MarketSpec& spec, const DarkSpec& dark,
                                           std::size_t t_start, double avg_u);

/// Raw order size k^D . (p, q^D) + f^D at `bucket`; may be negative.
[[nodiscard]] double dark_rate(const DarkPolicy& policy, std::size_t bucket, double p, double q_dark);

/// X' P X + b' X + e at `bucket` (n gives the terminal value).
[[nodiscard]] double dark_value(const DarkPolicy& policy, std::size_t bucket, double p, double q_dark);

/// (1 - frac_a) Q_t / sum_{s >= t} v_s dt with Q_t = q Q0.
[[nodiscard]] double average_lit_rate(const MarketSpec& spec, const DarkSpec& dark,
                                      std::size_t bucket, double q);

struct TwoStepDecision {
  double u = 0.0;       ///< lit participation rate
  double q_dark = 0.0;  ///< frac_a (q - a u dt)
  double avg_u = 0.0;
  double y_raw = 0.0;   ///< unclamped dark size
  double y = 0.0;       ///< target resting size, clamped to [0, q^D Q0]
  double posted = 0.0;  ///< new shares sent on top of the resting order
  double theta_y = 0.0; ///< mid-price push from the resting order
  bool filled = false;
};

/// Lit MPC plus dark LQR. Keeps the resting dark order between buckets: each
/// decision posts only what the new target adds and cancels the excess when
/// the target shrinks; a fill empties the resting order.
class DarkScheduler {
public:
  DarkScheduler(const MarketSpec& spec, DarkSpec dark, MpcConfig cfg, bool warm_start = true);

  /// Both sizes for the bucket at `state`, without drawing the fill.
  TwoStepDecision decide(const ExecState& state);
  /// Records the fill outcome of the last decision.
  void settle(bool filled);
  [[nodiscard]] double pending() const noexcept { return pending_; }
  void reset();

  [[nodiscard]] const MarketSpec& spec() const noexcept { return *spec_; }
  [[nodiscard]] const DarkSpec& dark() const noexcept { return dark_; }

private:
  const MarketSpec* spec_;
  DarkSpec dark_;
  MpcScheduler lit_;
  double pending_ = 0.0;
  double target_ = 0.0;
};

/// Decides, draws the fill with probability lambda dt from `rng`, and settles.
[[nodiscard]] TwoStepDecision two_step(DarkScheduler& sched, const ExecState& state, PathRng& rng);

/// Realized bucket cost: the lit trade pays p + s + eta u + theta y on a u dt,
/// a dark fill pays p + eta u + theta y on y / Q0, plus beta q^2 dt.
[[nodiscard]] double two_step_cost(const MarketSpec& spec, const ExecState& state,
                                   const TwoStepDecision& d);

/// Inventory after both venues: q - a u dt - (filled ? y / Q0 : 0).
[[nodiscard]] double two_step_inventory(const MarketSpec& spec, const ExecState& state,
                                        const TwoStepDecision& d);

/// Constant-coefficient continuous dark model. `sigma` is per square-root time.
struct ContinuousDarkSpec {
  double T = 1.0;
  double eta = 0.0;
  double v = 0.0;
  double q0 = 1.0;
  double kappa = 0.0;
  double alpha = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  double theta = 0.0;
  double beta_D = 0.0;
  double beta_T_D = 0.0;
  double avg_u = 0.0;
};

struct ContinuousDarkPolicy {
  std::vector<double> t;
  std::vector<Mat2> P;
  std::vector<Vec2> b;
  std::vector<double> e;
  std::vector<Vec2> k;
  std::vector<double> f;
  std::vector<double> g;
};

/// RK4 on grid_n steps of the dark Riccati ODEs. Throws StepBlowup,
/// DegenerateGD, LambdaZero.
[[nodiscard]] ContinuousDarkPolicy integrate_dark_riccati(const ContinuousDarkSpec& spec,
                                                          std::size_t grid_n = kDefaultGrid);

/// CSV with header t,k_p,k_q,f,g,P11,P12,P22,b1,b2,e and a terminal row.
void write_dark_policy_csv(std::ostream& os, const DarkPolicy& policy);

}  // namespace optexec
