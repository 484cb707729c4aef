#include "optexec/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "optexec/kernels.hpp"

namespace optexec {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::size_t window_length(const MarketSpec& spec, std::size_t t, const MpcConfig& cfg) {
  const std::size_t remaining = spec.n - t;
  if (!cfg.k_rhc) return remaining;
  return std::min(remaining, std::max<std::size_t>(*cfg.k_rhc, 1));
}

double ramped_beta(const MarketSpec& spec, std::size_t tau, double ramp) {
  const double x = spec.time_of(tau) / spec.horizon();
  return spec.beta[tau] * (1.0 + x * x * ramp);
}

}  // namespace

CeCost build_ce_cost(const MarketSpec& spec, const ExecState& state, std::size_t k, double ramp) {
  const std::size_t t0 = state.bucket;
  if (t0 >= spec.n || k == 0 || t0 + k > spec.n) {
    throw Error(ErrorCode::InvalidParameter, "mpc", "window outside the horizon", t0);
  }
  CeCost cost;
  cost.t0 = t0;
  cost.k = k;
  cost.truncated = t0 + k < spec.n;
  cost.A = MatrixXd::Zero(k, k);
  cost.b = VectorXd::Zero(k);
  MatrixXd& A = cost.A;
  VectorXd& b = cost.b;
  const double dt = spec.dt;

  // Price and inventory at bucket tau as affine functions of the plan:
  //   p = Yp + lp' u,  q = Yq + lq' u.
  VectorXd lp = VectorXd::Zero(k);
  VectorXd lq = VectorXd::Zero(k);
  double Yp = state.p;
  double Yq = state.q;
  const auto lda = static_cast<std::size_t>(k);

  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t tau = t0 + j;
    const double a = spec.a(tau);
    const double beta = cost.truncated ? ramped_beta(spec, tau, ramp) : spec.beta[tau];
    const auto J = static_cast<Eigen::Index>(j);

    if (beta != 0.0 && j > 0) {
      kernels::syr(beta * dt, {lq.data(), j}, A.data(), lda);
    }
    // a p u: cross term split symmetrically between row and column j.
    for (Eigen::Index i = 0; i < J; ++i) {
      A(i, J) += 0.5 * a * dt * lp(i);
      A(J, i) += 0.5 * a * dt * lp(i);
    }
    A(J, J) += a * spec.eta[tau] * dt;
    b(J) += a * (Yp + spec.s[tau]) * dt;
    if (beta != 0.0 && j > 0) {
      kernels::axpy(2.0 * beta * Yq * dt, {lq.data(), j}, {b.data(), j});
    }

    // Propagate to tau + 1.
    const double decay = 1.0 - spec.kappa[tau] * dt;
    lp *= decay;
    lp(J) += spec.mu[tau] * spec.v[tau] * dt;
    lq(J) -= a * dt;
    Yp = decay * Yp + spec.alpha[tau] * dt;
    // Yq is unchanged: the inventory only moves with the plan.
  }

  double end_weight = 0.0;
  if (cost.truncated) {
    end_weight = ramped_beta(spec, t0 + k, ramp) * dt;
  } else if (!spec.beta_T.is_hard()) {
    end_weight = spec.beta_T.value();
  }
  if (end_weight != 0.0) {
    kernels::syr(end_weight, {lq.data(), k}, A.data(), lda);
    kernels::axpy(2.0 * end_weight * Yq, {lq.data(), k}, {b.data(), k});
  }
  A = 0.5 * (A + A.transpose()).eval();
  return cost;
}

MpcDecision mpc_rate(const MarketSpec& spec, const ExecState& state, const MpcConfig& cfg,
                     const std::optional<VectorXd>& warm_start) {
  if (state.bucket >= spec.n) {
    throw Error(ErrorCode::InvalidParameter, "mpc", "state past the last bucket", state.bucket);
  }
  const std::size_t k = window_length(spec, state.bucket, cfg);
  const CeCost ce = build_ce_cost(spec, state, k, cfg.ramp);
  const auto K = static_cast<Eigen::Index>(k);

  QpProblem qp;
  qp.H = 2.0 * ce.A;
  qp.c = ce.b;
  if (std::isfinite(cfg.lower)) qp.lb = VectorXd::Constant(K, cfg.lower);
  if (cfg.u_max) qp.ub = VectorXd::Constant(K, *cfg.u_max);
  const bool complete = (cfg.hard_completion || spec.beta_T.is_hard()) && !ce.truncated;
  if (complete) {
    MatrixXd E(1, K);
    for (Eigen::Index j = 0; j < K; ++j) E(0, j) = spec.a(state.bucket + j) * spec.dt;
    qp.E = std::move(E);
    qp.d = VectorXd::Constant(1, state.q);
  }

  QpOptions opts = cfg.qp;
  if (warm_start && warm_start->size() == K) opts.warm_start = warm_start;
  const QpSolution sol = solve(qp, opts);

  MpcDecision d;
  d.plan = sol.u;
  d.rate = sol.u(0);
  d.iterations = sol.iterations;
  return d;
}

double ce_plan_cost(const MarketSpec& spec, const ExecState& state, const VectorXd& plan) {
  ExecState x = state;
  double total = 0.0;
  for (Eigen::Index j = 0; j < plan.size() && x.bucket < spec.n; ++j) {
    total += stage_cost(spec, x, plan(j));
    x = step_state(spec, x, plan(j), 0.0);
  }
  if (x.bucket == spec.n) total += terminal_cost(spec, x.q);
  return total;
}

MpcScheduler::MpcScheduler(const MarketSpec& spec, MpcConfig cfg, bool warm_start)
    : spec_(&spec), cfg_(std::move(cfg)), warm_(warm_start) {}

MpcDecision MpcScheduler::decide(const ExecState& state) {
  std::optional<VectorXd> warm;
  if (warm_ && last_ && last_->size() > 1) {
    const std::size_t k = window_length(*spec_, state.bucket, cfg_);
    const auto K = static_cast<Eigen::Index>(k);
    VectorXd w(K);
    const Eigen::Index tail = std::min<Eigen::Index>(last_->size() - 1, K);
    w.head(tail) = last_->tail(last_->size() - 1).head(tail);
    if (tail < K) w.tail(K - tail).setConstant((*last_)(last_->size() - 1));
    warm = std::move(w);
  }
  MpcDecision d = mpc_rate(*spec_, state, cfg_, warm);
  last_ = d.plan;
  return d;
}

}  // namespace optexec
