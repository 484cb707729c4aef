#pragma once

// Domain types and cost functionals for the bucketed execution model.
//
// State is X_t = (p_t, q_t): side-adjusted price slippage against the
// benchmark, and the remaining fraction of the parent order. The control is
// the participation rate u_t = x_t / v_t.

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "optexec/error.hpp"

namespace optexec {

enum class Side { buy, sell };

/// Sign convention: +1 for buys, -1 for sells.
[[nodiscard]] constexpr double side_sign(Side side) noexcept {
  return side == Side::buy ? 1.0 : -1.0;
}

/// Terminal inventory penalty. `hard()` stands for an infinite penalty, i.e.
/// the completion constraint q_T = 0.
class TerminalPenalty {
public:
  constexpr TerminalPenalty() = default;
  constexpr explicit TerminalPenalty(double value) : value_(value) {}

  [[nodiscard]] static constexpr TerminalPenalty hard() {
    TerminalPenalty p;
    p.hard_ = true;
    p.value_ = std::numeric_limits<double>::infinity();
    return p;
  }

  [[nodiscard]] constexpr bool is_hard() const noexcept { return hard_; }
  /// Finite penalty; +inf when hard.
  [[nodiscard]] constexpr double value() const noexcept { return value_; }

  friend constexpr bool operator==(const TerminalPenalty&, const TerminalPenalty&) = default;

private:
  double value_ = 0.0;
  bool hard_ = false;
};

/// Per-bucket market and impact parameters plus the parent order.
struct MarketSpec {
  std::size_t n = 0;     ///< number of buckets
  double dt = 0.0;       ///< bucket length
  double q0 = 0.0;       ///< parent order size Q_0 in shares
  Side side = Side::buy;

  std::vector<double> v;      ///< expected market volume rate
  std::vector<double> eta;    ///< temporary impact
  std::vector<double> mu;     ///< permanent impact per share
  std::vector<double> s;      ///< half-spread
  std::vector<double> sigma;  ///< slippage volatility over one bucket
  std::vector<double> kappa;  ///< mean-reversion signal
  std::vector<double> alpha;  ///< trend signal
  std::vector<double> beta;   ///< inventory (urgency) penalty
  TerminalPenalty beta_T;

  [[nodiscard]] double horizon() const noexcept { return static_cast<double>(n) * dt; }
  /// a_t = v_t / Q_0.
  [[nodiscard]] double a(std::size_t t) const { return v[t] / q0; }
  /// First component of w_t = (Q_0 mu_t, -1).
  [[nodiscard]] double w_price(std::size_t t) const { return q0 * mu[t]; }
  [[nodiscard]] double time_of(std::size_t bucket) const noexcept {
    return static_cast<double>(bucket) * dt;
  }

  /// Flat-profile spec with every per-bucket array set to the given scalar.
  [[nodiscard]] static MarketSpec constant(std::size_t n, double dt, double q0, double v,
                                           double eta, double mu, double s, double sigma,
                                           double kappa, double alpha, double beta,
                                           TerminalPenalty beta_T, Side side = Side::buy);
};

/// Completion tolerance used when beta_T is hard.
inline constexpr double kDefaultCompletionTol = 1e-6;

struct ExecState {
  std::size_t bucket = 0;  ///< clock as a bucket index; time is bucket * dt
  double p = 0.0;
  double q = 1.0;
};

struct BucketRecord {
  std::size_t bucket = 0;
  double t = 0.0;
  double p = 0.0;
  double q = 0.0;
  double u = 0.0;
  double x = 0.0;  ///< executed shares per unit time, u * v
  double stage_cost = 0.0;
  // Dark-pool columns; zero for lit-only runs.
  double y_posted = 0.0;
  bool dark_filled = false;
  double dark_qty = 0.0;
  // Diagnostics not written to the trace CSV.
  double spot = 0.0;       ///< S_t / S_0
  double benchmark = 0.0;  ///< benchmark / S_0
};

struct ExecutionTrace {
  std::vector<BucketRecord> buckets;
  double q_T = 0.0;
  double terminal_cost = 0.0;
  double total_cost = 0.0;
  bool has_dark = false;
  /// First bucket whose post-trade q left [-tol, 1+tol], when overshoot is
  /// only flagged rather than raised.
  std::optional<std::size_t> overshoot_bucket;
};

/// Throws Error(NonPositiveVolume | KappaDtTooLarge | LengthMismatch |
/// InvalidParameter) naming the offending index.
void validate(const MarketSpec& spec);

/// {a eta u^2 + a (p + s) u + beta q^2} dt at the state's bucket.
[[nodiscard]] double stage_cost(const MarketSpec& spec, const ExecState& state, double u);

/// beta_T q_T^2. For a hard terminal penalty: 0 when |q_T| <= tol, else +inf.
[[nodiscard]] double terminal_cost(const MarketSpec& spec, double q_T,
                                   double completion_tol = kDefaultCompletionTol);

/// One step of the linear state transition with standard-normal draw z.
[[nodiscard]] ExecState step_state(const MarketSpec& spec, const ExecState& state, double u,
                                   double z);

/// Sum of stage costs plus terminal cost, recomputed from the records.
[[nodiscard]] double recompute_total(const ExecutionTrace& trace);

}  // namespace optexec
