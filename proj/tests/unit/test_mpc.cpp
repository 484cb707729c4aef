#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "optexec/lqr.hpp"
#include "optexec/mpc.hpp"
#include "support/oracles.hpp"

using namespace optexec;
using Eigen::VectorXd;

namespace {

constexpr double kNoFloor = -std::numeric_limits<double>::infinity();

MarketSpec desk(double kappa, TerminalPenalty bt = TerminalPenalty::hard()) {
  return MarketSpec::constant(30, 1.0 / 30, 1e5, 5e6, 0.05, 2e-8, 2e-4, 3e-3, kappa, 0.0, 1e-3, bt);
}

}  // namespace

TEST_CASE("one-bucket cost matches the hand expansion") {
  const double a = 2.0, eta = 0.3, B = 5.0, dt = 0.5, s = 0.01, p = 0.02, q = 0.8;
  MarketSpec spec = MarketSpec::constant(1, dt, 1.0, a, eta, 0.0, s, 0.0, 0.0, 0.0, 0.0,
                                         TerminalPenalty(B));
  const CeCost ce = build_ce_cost(spec, {0, p, q}, 1);
  CHECK(ce.A(0, 0) == doctest::Approx((a * eta + B * a * a * dt) * dt));
  CHECK(ce.b(0) == doctest::Approx(a * (p + s) * dt - 2.0 * B * a * dt * q));
}

TEST_CASE("zero cost data gives a zero quadratic") {
  MarketSpec spec = MarketSpec::constant(5, 0.2, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.3, 0.0, 0.0,
                                         TerminalPenalty(0.0));
  const CeCost ce = build_ce_cost(spec, {0, 0.0, 1.0}, 5);
  CHECK(ce.A.isZero());
  CHECK(ce.b.isZero());
}

TEST_CASE("quadratic reproduces the direct roll-out cost") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  const MarketSpec spec = oracle::random_spec(rng, 10, TerminalPenalty(20.0));
  const ExecState x{2, 0.004, 0.7};
  const CeCost ce = build_ce_cost(spec, x, 8);
  CHECK((ce.A - ce.A.transpose()).cwiseAbs().maxCoeff() == 0.0);
  // Constant term by evaluating at u = 0.
  const VectorXd zero = VectorXd::Zero(8);
  const double c0 = ce_plan_cost(spec, x, zero);
  for (int rep = 0; rep < 5; ++rep) {
    VectorXd u(8);
    for (int i = 0; i < 8; ++i) u(i) = 0.1 + 0.05 * n01(rng);
    const double quad = u.dot(ce.A * u) + ce.b.dot(u) + c0;
    CHECK(quad == doctest::Approx(ce_plan_cost(spec, x, u)).epsilon(1e-11));
  }
}

TEST_CASE("unconstrained receding horizon coincides with the LQR policy") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const bool hard = rep % 2 == 0;
    const MarketSpec spec = oracle::random_spec(rng, 20, hard ? TerminalPenalty::hard() : TerminalPenalty(30.0));
    const LqrPolicy pol = build_policy(spec);
    MpcConfig cfg;
    cfg.lower = kNoFloor;
    for (int k = 0; k < 8; ++k) {
      const ExecState x{static_cast<std::size_t>(U(rng) * 20), 0.02 * (U(rng) - 0.5), U(rng)};
      const double lqr = policy_rate(pol, x);
      const double mpc = mpc_rate(spec, x, cfg).rate;
      worst = std::max(worst, std::abs(mpc - lqr) / std::max(std::abs(lqr), 1e-12));
    }
  }
  CHECK(worst <= 1e-7);
}

TEST_CASE("positivity floor binds and the plan re-optimizes") {
  // Strong mean reversion and a large favorable-then-adverse excursion push
  // the unconstrained rate below zero.
  MarketSpec spec = desk(8.0);
  const LqrPolicy pol = build_policy(spec);
  const ExecState x{5, 0.05, 0.8};
  REQUIRE(policy_rate(pol, x) < 0.0);
  MpcConfig cfg;
  const MpcDecision d = mpc_rate(spec, x, cfg);
  CHECK(d.rate == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(d.plan.minCoeff() >= -1e-12);
  MpcConfig free_cfg;
  free_cfg.lower = kNoFloor;
  const MpcDecision u = mpc_rate(spec, x, free_cfg);
  CHECK((d.plan - u.plan).lpNorm<Eigen::Infinity>() > 1e-3);
  // Completion row holds at the optimum.
  double done = 0.0;
  for (Eigen::Index j = 0; j < d.plan.size(); ++j) done += spec.a(5 + j) * spec.dt * d.plan(j);
  CHECK(done == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("caps and completion conflict is infeasible") {
  MarketSpec spec = desk(0.5);
  MpcConfig cfg;
  cfg.u_max = 1e-4;
  try {
    (void)mpc_rate(spec, {0, 0.0, 1.0}, cfg);
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
  }
}

TEST_CASE("closed-loop MPC completes, stays nonnegative and beats simple competitors") {
  MarketSpec spec = desk(6.0);
  const LqrPolicy pol = build_policy(spec);
  MpcConfig cfg;
  MpcScheduler sched(spec, cfg);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  ExecState x{0, 0.0, 1.0};
  double q_prev = x.q;
  for (std::size_t t = 0; t < spec.n; ++t) {
    const MpcDecision d = sched.decide(x);
    CHECK(d.rate >= -1e-12);
    const double mpc_cost = ce_plan_cost(spec, x, d.plan);
    // Clipped LQR played in closed loop under CE dynamics.
    VectorXd clipped(static_cast<Eigen::Index>(spec.n - t));
    ExecState y = x;
    for (Eigen::Index j = 0; j < clipped.size(); ++j) {
      clipped(j) = std::max(policy_rate(pol, y), 0.0);
      y = step_state(spec, y, clipped(j), 0.0);
    }
    CHECK(mpc_cost <= ce_plan_cost(spec, x, clipped) + 1e-12);
    double rem = 0.0;
    for (std::size_t j = t; j < spec.n; ++j) rem += spec.a(j) * spec.dt;
    const VectorXd uniform = VectorXd::Constant(clipped.size(), x.q / rem);
    CHECK(mpc_cost <= ce_plan_cost(spec, x, uniform) + 1e-12);

    x = step_state(spec, x, d.rate, 0.01 * n01(rng));
    CHECK(x.q <= q_prev + 1e-15);
    q_prev = x.q;
  }
  CHECK(std::abs(x.q) <= 1e-10);
}

TEST_CASE("full look-ahead cap reproduces the full-horizon solve") {
  MarketSpec spec = desk(3.0);
  MpcConfig full;
  MpcConfig capped;
  capped.k_rhc = spec.n;
  for (std::size_t t : {0u, 7u, 29u}) {
    const ExecState x{t, 0.01, 0.5};
    const auto a = mpc_rate(spec, x, full);
    const auto b = mpc_rate(spec, x, capped);
    CHECK(a.plan == b.plan);
  }
}

TEST_CASE("truncated windows still complete under a ramped urgency") {
  MarketSpec spec = desk(1.0);
  MpcConfig cfg;
  cfg.k_rhc = 5;
  MpcScheduler sched(spec, cfg);
  ExecState x{0, 0.0, 1.0};
  for (std::size_t t = 0; t < spec.n; ++t) {
    const MpcDecision d = sched.decide(x);
    CHECK(d.plan.size() == static_cast<Eigen::Index>(std::min<std::size_t>(5, spec.n - t)));
    x = step_state(spec, x, d.rate, 0.0);
  }
  CHECK(std::abs(x.q) <= 1e-10);
}

TEST_CASE("warm start does not increase the median iteration count") {
  MarketSpec spec = desk(6.0);
  MpcConfig cfg;
  std::vector<std::size_t> warm_it, cold_it;
  for (int pass = 0; pass < 2; ++pass) {
    MpcScheduler sched(spec, cfg, pass == 0);
    std::mt19937_64 rng(77);
    std::normal_distribution<double> n01;
    ExecState x{0, 0.0, 1.0};
    for (std::size_t t = 0; t < spec.n; ++t) {
      const MpcDecision d = sched.decide(x);
      (pass == 0 ? warm_it : cold_it).push_back(d.iterations);
      x = step_state(spec, x, d.rate, 0.01 * n01(rng));
    }
  }
  std::sort(warm_it.begin(), warm_it.end());
  std::sort(cold_it.begin(), cold_it.end());
  CHECK(warm_it[warm_it.size() / 2] <= cold_it[cold_it.size() / 2]);
}
