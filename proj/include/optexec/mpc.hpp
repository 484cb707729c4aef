#pragma once

// Certainty-equivalent receding-horizon scheduling. At each bucket the
// expected cost of the remaining plan (noise set to zero) is a quadratic
// u' A u + b' u + const in the plan; it is minimized under the rate
// constraints and only the first element is played.

#include <cstddef>
#include <optional>

#include <Eigen/Core>

#include "optexec/core.hpp"
#include "optexec/qp.hpp"

namespace optexec {

struct CeCost {
  std::size_t t0 = 0;  ///< first bucket of the plan
  std::size_t k = 0;   ///< plan length
  Eigen::MatrixXd A;   ///< symmetric
  Eigen::VectorXd b;
  /// The plan ends before the last bucket; the ramped urgency stands in for
  /// the terminal condition.
  bool truncated = false;
};

struct MpcConfig {
  double lower = 0.0;              ///< per-bucket lower bound; -inf for none
  std::optional<double> u_max;     ///< per-bucket cap
  /// Adds the completion row sum a u dt = q even for a finite beta_T. A hard
  /// beta_T always implies it.
  bool hard_completion = false;
  std::optional<std::size_t> k_rhc;  ///< look-ahead cap in buckets
  double ramp = 10.0;              ///< urgency ramp factor for truncated windows
  QpOptions qp;
};

/// Quadratic CE cost of the plan u_{t0..t0+k-1} from `state`. For a
/// truncated window the urgency is ramped as beta (1 + (t/T)^2 ramp) and the
/// inventory left at the window end pays one more ramped bucket.
[[nodiscard]] CeCost build_ce_cost(const MarketSpec& spec, const ExecState& state, std::size_t k,
                                   double ramp = 10.0);

struct MpcDecision {
  double rate = 0.0;
  Eigen::VectorXd plan;
  std::size_t iterations = 0;
};

/// Solves the window QP at `state` and returns its first element together
/// with the full plan.
[[nodiscard]] MpcDecision mpc_rate(const MarketSpec& spec, const ExecState& state,
                                   const MpcConfig& cfg,
                                   const std::optional<Eigen::VectorXd>& warm_start = std::nullopt);

/// Expected cost of playing `plan` open-loop from `state` under CE dynamics,
/// by direct roll-out: stage costs plus the terminal cost.
[[nodiscard]] double ce_plan_cost(const MarketSpec& spec, const ExecState& state,
                                  const Eigen::VectorXd& plan);

/// Stateful per-trace scheduler warm-starting each solve from the tail of
/// the previous plan.
class MpcScheduler {
public:
  MpcScheduler(const MarketSpec& spec, MpcConfig cfg, bool warm_start = true);

  MpcDecision decide(const ExecState& state);
  void reset() { last_.reset(); }

private:
  const MarketSpec* spec_;
  MpcConfig cfg_;
  bool warm_;
  std::optional<Eigen::VectorXd> last_;
};

}  // namespace optexec
