#pragma once

// Dense convex QP solver:
//   minimize   1/2 u' H u + c' u
//   subject to lb <= u <= ub,  E u = d,  G u >= h.
// Primal active-set method with optional warm start. Bounds are handled by
// fixing variables; equality and inequality rows enter the KKT system on the
// free variables.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace optexec {

struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd c;
  /// Missing means unbounded; entries may also be +-inf.
  std::optional<Eigen::VectorXd> lb;
  std::optional<Eigen::VectorXd> ub;
  std::optional<Eigen::MatrixXd> E;
  std::optional<Eigen::VectorXd> d;
  std::optional<Eigen::MatrixXd> G;
  std::optional<Eigen::VectorXd> h;

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(c.size()); }
  [[nodiscard]] double objective(const Eigen::VectorXd& u) const;
};

enum class QpStatus { optimal, max_iter, infeasible };

struct QpOptions {
  double kkt_tol = 1e-9;
  double feas_tol = 1e-10;
  /// 0 selects 50 * (number of variables + constraint rows).
  std::size_t max_iter = 0;
  /// Tolerance on the smallest eigenvalue of H on the equality null space.
  double convexity_tol = 1e-8;
  /// Starting point; used when feasible to feas_tol, otherwise ignored.
  std::optional<Eigen::VectorXd> warm_start;
  /// Throw Error(Infeasible | MaxIterations) instead of returning the status.
  bool throw_on_failure = true;
  /// When set, one CSV row per iteration: iter,objective,n_active,step_norm,action,index.
  std::ostream* trace = nullptr;
};

struct QpSolution {
  Eigen::VectorXd u;
  double objective = 0.0;
  QpStatus status = QpStatus::optimal;
  /// Binding constraints: variable index i for an active bound, k + j for
  /// equality row j, k + m_eq + j for inequality row j.
  std::vector<std::size_t> active_set;
  std::size_t iterations = 0;

  // Multipliers: z_lb, z_ub >= 0 for the bounds, nu for E u = d and
  // lambda >= 0 for G u >= h, so that H u + c = z_lb - z_ub + E' nu + G' lambda.
  Eigen::VectorXd z_lb, z_ub, nu, lambda;
  /// max of stationarity, complementarity and dual-feasibility violations.
  double kkt_residual = 0.0;
  double primal_residual = 0.0;
  /// Primal objective minus Wolfe dual objective.
  double duality_gap = 0.0;
};

/// Throws Error(NotConvex) if H is not PSD on the equality null space,
/// Error(Infeasible) for an empty feasible set and Error(MaxIterations),
/// the last two only when opts.throw_on_failure.
[[nodiscard]] QpSolution solve(const QpProblem& problem, const QpOptions& opts = {});

}  // namespace optexec
