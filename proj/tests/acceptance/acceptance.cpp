// Acceptance run: one PASS/FAIL line per criterion.
//
// Some sub-checks are known to fail against the formulas as stated; they
// are tagged `known` and still print FAIL. The exit status is nonzero only
// for failures that are not tagged.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "optexec/calib.hpp"
#include "optexec/continuous.hpp"
#include "optexec/darkpool.hpp"
#include "optexec/kernels.hpp"
#include "optexec/lqr.hpp"
#include "optexec/mpc.hpp"
#include "optexec/qp.hpp"
#include "optexec/scenario.hpp"
#include "optexec/sim.hpp"
#include "support/oracles.hpp"
#include "support/scenarios.hpp"

using namespace optexec;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const std::filesystem::path kConfigs = std::filesystem::path(OPTEXEC_SOURCE_DIR) / "configs";

struct Check {
  std::string what;
  bool ok;
  bool known;  // expected to fail
};

class Report {
public:
  void check(std::string what, bool ok, bool known = false) {
    checks_.push_back({std::move(what), ok, known});
  }
  template <class... A>
  void checkf(bool ok, const char* fmt, A... args) {
    check(format(fmt, args...), ok);
  }
  template <class... A>
  void knownf(bool ok, const char* fmt, A... args) {
    check(format(fmt, args...), ok, true);
  }
  [[nodiscard]] const std::vector<Check>& checks() const { return checks_; }

  template <class... A>
  static std::string format(const char* fmt, A... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
  }

private:
  std::vector<Check> checks_;
};

double rel(double x, double ref, double floor = 1e-300) {
  return std::abs(x - ref) / std::max(std::abs(ref), floor);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ContinuousSpec plain(double eta, double a, double kappa, double beta, TerminalPenalty bt, double T = 1.0) {
  ContinuousSpec cs;
  cs.T = T;
  cs.eta = eta;
  cs.a = a;
  cs.kappa = kappa;
  cs.beta = beta;
  cs.beta_T = bt;
  return cs;
}

ClosedFormParams params_of(const ContinuousSpec& cs) {
  return {cs.eta, cs.a, cs.kappa, cs.beta, cs.beta_T, cs.T};
}

// ---------------------------------------------------------------------------

void mpc_lqr_equivalence(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 10 + static_cast<std::size_t>(U(rng) * 21);
    const TerminalPenalty bt = rep % 2 == 0 ? TerminalPenalty::hard() : TerminalPenalty(10.0 + 90.0 * U(rng));
    const MarketSpec spec = oracle::random_spec(rng, n, bt);
    const LqrPolicy pol = build_policy(spec);
    MpcConfig cfg;
    cfg.lower = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 20; ++k) {
      const ExecState x{std::min(n - 1, static_cast<std::size_t>(U(rng) * n)), 0.02 * (U(rng) - 0.5),
                        0.05 + 0.95 * U(rng)};
      const double lqr = policy_rate(pol, x);
      const double mpc = mpc_rate(spec, x, cfg).rate;
      worst = std::max(worst, rel(mpc, lqr, 1e-12));
    }
  }
  const double secs = seconds_since(t0);
  r.checkf(worst <= 1e-7, "1000 states: max rel err %.2e (<= 1e-7)", worst);
  r.checkf(secs <= 30.0, "%.2f s (<= 30 s)", secs);
}

void closed_form_vs_ode(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const ContinuousSpec sets[] = {
      plain(0.5, 1.2, 2.0, 0.8, TerminalPenalty(3.0)),
      plain(0.1, 2.0, 0.5, 0.3, TerminalPenalty(10.0)),
      plain(1.0, 0.7, 5.0, 2.0, TerminalPenalty(0.5)),
      plain(0.3, 1.0, 1.0, 0.05, TerminalPenalty(0.0)),
      plain(0.2, 3.0, 0.1, 1.5, TerminalPenalty(50.0), 2.0),
  };
  double worst = 0.0;
  for (const auto& cs : sets) {
    const auto pol = integrate_riccati(cs, kDefaultGrid);
    for (int j = 0; j < 20; ++j) {
      const std::size_t i = static_cast<std::size_t>(j) * kDefaultGrid / 19;
      const Gains g = closed_form_gains(params_of(cs), pol.t[i]);
      worst = std::max({worst, rel(pol.k[i](0), g.k1), rel(pol.k[i](1), g.k2)});
    }
  }
  r.checkf(worst <= 1e-6, "5 sets x 20 points: max rel err %.2e (<= 1e-6)", worst);

  double lo = 1e300, hi = 0.0, prev = 0.0;
  for (std::size_t N : {40u, 80u, 160u, 320u}) {
    const auto pol = integrate_riccati(sets[0], N);
    double err = 0.0;
    for (std::size_t i = 0; i <= N; ++i) {
      const Gains g = closed_form_gains(params_of(sets[0]), pol.t[i]);
      err = std::max({err, std::abs(pol.k[i](0) - g.k1), std::abs(pol.k[i](1) - g.k2)});
    }
    if (prev > 0.0) {
      lo = std::min(lo, prev / err);
      hi = std::max(hi, prev / err);
    }
    prev = err;
  }
  r.checkf(lo >= 12.0 && hi <= 20.0, "halving ratios in [%.2f, %.2f] (within [12, 20])", lo, hi);
  const double secs = seconds_since(t0);
  r.checkf(secs <= 10.0, "%.2f s (<= 10 s)", secs);
}

void discrete_to_continuous(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const double T = 1.0, eta = 0.5, a = 1.2, kappa = 2.0, beta = 0.8, B = 3.0;
  const auto cont = integrate_riccati(plain(eta, a, kappa, beta, TerminalPenalty(B)), kDefaultGrid);
  std::vector<double> errs;
  for (std::size_t n : {50u, 100u, 200u, 400u}) {
    const MarketSpec spec = MarketSpec::constant(n, T / static_cast<double>(n), 1.0, a, eta, 0.0, 0.0,
                                                 0.0, kappa, 0.0, beta, TerminalPenalty(B));
    const LqrPolicy pol = build_policy(spec);
    double err = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      const std::size_t bucket = j * n / 4;
      const Vec2 kc = cont.gain_at(T * static_cast<double>(bucket) / static_cast<double>(n));
      err = std::max({err, std::abs(pol.k[bucket](0) - kc(0)), std::abs(pol.k[bucket](1) - kc(1))});
    }
    errs.push_back(err);
  }
  bool ok = true;
  std::string ratios;
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double q = errs[i - 1] / errs[i];
    ok = ok && q >= 1.6 && q <= 2.4;
    ratios += Report::format(i == 1 ? "%.3f" : ", %.3f", q);
  }
  r.check("n = 50..400 error ratios " + ratios + " (2 within 20%)", ok);
  const double secs = seconds_since(t0);
  r.checkf(secs <= 20.0, "%.2f s (<= 20 s)", secs);
}

void hard_limit_gains(Report& r) {
  double k2_err = 0.0, k1_printed = 0.0, k1_ode = 0.0;
  const double eta = 0.4, a = 1.5, kappa = 1.3, T = 1.0;
  const ContinuousSpec cs = plain(eta, a, kappa, 0.0, TerminalPenalty::hard(), T);
  const auto ode = integrate_riccati(cs, 4000);
  for (int i = 0; i < 20; ++i) {
    const double t = T * i / 20.0;
    const double tau = T - t, x = kappa * tau;
    const Gains g = corollary_gains(eta, a, kappa, TerminalPenalty::hard(), T, t);
    k2_err = std::max(k2_err, rel(g.k2, 1.0 / (a * tau)));
    const double printed = -(std::exp(x) - (std::exp(x) - 1.0) / x) / (2.0 * eta);
    k1_printed = std::max(k1_printed, rel(g.k1, printed));
    const std::size_t node = static_cast<std::size_t>(i) * 200;
    if (i < 15) k1_ode = std::max(k1_ode, rel(ode.k[node](0), g.k1));
  }
  r.checkf(k2_err <= 4e-16, "k2 = 1/(a(T-t)): max rel err %.1e", k2_err);
  r.knownf(k1_printed <= 4e-16, "k1 = stated hard-limit formula: max rel err %.2e", k1_printed);
  r.checkf(k1_ode <= 1e-3, "k1 vs terminal-penalty sweep of the ODE: max rel err %.2e (<= 1e-3)", k1_ode);

  const double small = corollary_gains(1.0, 1.0, 1e-4, TerminalPenalty::hard(), 1.0, 0.0).k1;
  const double stated = -1e-4 / 2.0;
  r.knownf(rel(small, stated) <= 0.01, "weak signal kappa(T-t) = 1e-4: k1 = %.4e vs %.4e (1%%)", small,
           stated);
}

void no_signal_reduction(Report& r) {
  MarketSpec spec = scenario::desk();
  spec.kappa.assign(spec.n, 0.0);
  spec.s.assign(spec.n, 0.0);
  spec.alpha.assign(spec.n, 0.0);
  spec.mu.assign(spec.n, 0.0);
  const LqrPolicy pol = build_policy(spec);
  double kp = 0.0;
  for (std::size_t t = 0; t < spec.n; ++t) kp = std::max(kp, std::abs(pol.k[t](0)));
  r.checkf(kp == 0.0, "max |k_p| = %.1e", kp);

  LqrScheduler lqr(pol, false);
  const PriceModel model = PriceModel::from_spec(spec);
  const ExecutionTrace ref = simulate(spec, lqr, model, 1);
  double diff = 0.0;
  for (std::uint64_t seed = 2; seed <= 20; ++seed) {
    const ExecutionTrace tr = simulate(spec, lqr, model, seed, 3);
    for (std::size_t t = 0; t < spec.n; ++t) diff = std::max(diff, std::abs(tr.buckets[t].u - ref.buckets[t].u));
  }
  r.checkf(diff == 0.0, "curve over 20 seeds: max |du| = %.1e", diff);
}

void brute_force_oracles(Report& r) {
  // One bucket, analytic argmin.
  {
    const double eta = 1.0, B = 3.0, dt = 0.5;
    const MarketSpec s = MarketSpec::constant(1, dt, 1.0, 1.0, eta, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                                              TerminalPenalty(B));
    const LqrPolicy pol = build_policy(s);
    double worst = 0.0;
    for (double p : {-0.2, 0.0, 0.15}) {
      for (double q : {0.3, 1.0}) {
        const double u_star = (2.0 * B * dt * q - p * dt) / (2.0 * (eta * dt + B * dt * dt));
        worst = std::max(worst, rel(policy_rate(pol, {0, p, q}), u_star));
      }
    }
    r.checkf(worst <= 1e-6, "LQR one bucket vs analytic argmin: %.2e", worst);
  }
  // Three buckets, numerically solved dynamic program.
  {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int rep = 0; rep < 6; ++rep) {
      const TerminalPenalty bt = rep % 2 ? TerminalPenalty::hard() : TerminalPenalty(20.0);
      const MarketSpec spec = oracle::random_spec(rng, 3, bt);
      const LqrPolicy pol = build_policy(spec);
      const oracle::LqrDp dp(spec);
      for (std::size_t t = 0; t < 3; ++t) {
        for (double p : {-0.008, 0.0, 0.005}) {
          for (double q : {0.25, 0.9}) {
            const double ref = dp.argmin(t, p, q);
            worst = std::max(worst, std::abs(policy_rate(pol, {t, p, q}) - ref) / std::max(std::abs(ref), 1e-3));
          }
        }
      }
    }
    r.checkf(worst <= 1e-6, "LQR three buckets vs solved dynamic program: %.2e", worst);
  }
  // Dark order size against the two-outcome enumeration.
  {
    const MarketSpec s1 = MarketSpec::constant(1, 0.1, 100.0, 200.0, 0.3, 0.0, 0.01, 0.0, 0.0, 0.0,
                                               0.1, TerminalPenalty::hard());
    const DarkSpec d1 = DarkSpec::constant(1, 0.8, 2e-4, 0.05, 0.4, 0.5);
    const DarkPolicy p1 = build_dark_policy(s1, d1, 0, 0.2);
    const oracle::DarkDp dp1{s1, d1, 0.2};
    double worst = 0.0;
    for (double p : {-0.02, 0.0, 0.015})
      for (double qd : {0.05, 0.3, 0.6}) worst = std::max(worst, rel(dark_rate(p1, 0, p, qd), dp1.argmin(0, p, qd)));

    MarketSpec s3 = MarketSpec::constant(3, 0.1, 100.0, 200.0, 0.3, 0.0, 0.01, 0.01, 2.0, -0.05, 0.1,
                                         TerminalPenalty::hard());
    s3.eta = {0.3, 0.25, 0.4};
    s3.v = {150.0, 250.0, 180.0};
    DarkSpec d3 = DarkSpec::constant(3, 0.6, 1e-4, 0.02, 0.3, 0.5);
    d3.lambda = {0.5, 1.2, 0.9};
    d3.theta = {1e-4, 3e-4, 2e-4};
    const DarkPolicy p3 = build_dark_policy(s3, d3, 0, 0.15);
    const oracle::DarkDp dp3{s3, d3, 0.15};
    for (std::size_t t = 0; t < 3; ++t)
      for (double p : {-0.01, 0.004})
        for (double qd : {0.1, 0.45}) worst = std::max(worst, rel(dark_rate(p3, t, p, qd), dp3.argmin(t, p, qd)));
    r.checkf(worst <= 1e-6, "dark y* one and three buckets vs Bernoulli DP: %.2e", worst);
  }
}

void mpc_positivity(Report& r) {
  const ScenarioConfig cfg = load_scenario((kConfigs / "figure3.json").string());
  const MarketSpec& spec = cfg.market;
  const auto clipped = make_clipped_lqr(spec, cfg.lqr);
  const std::size_t n_paths = 100;
  double u_min = 1e300, q_T = 0.0, excess = -1e300;
  std::size_t binding = 0;
  PathRng dummy(0, 0);
  for (std::size_t path = 0; path < n_paths; ++path) {
    MpcScheduler mpc(spec, cfg.mpc);
    PathRng rng(cfg.seed, path);
    ExecState x;
    double scale = 0.0;
    for (std::size_t t = 0; t < spec.n; ++t) {
      const MpcDecision d = mpc.decide(x);
      if (t == 0) scale = std::abs(ce_plan_cost(spec, x, d.plan));
      u_min = std::min(u_min, d.plan.minCoeff());
      binding += d.plan.minCoeff() <= 1e-12;
      VectorXd comp(d.plan.size());
      ExecState y = x;
      for (Eigen::Index j = 0; j < comp.size(); ++j) {
        comp(j) = clipped->decide(y, dummy).u;
        y = step_state(spec, y, comp(j), 0.0);
      }
      const double mine = ce_plan_cost(spec, x, d.plan), theirs = ce_plan_cost(spec, x, comp);
      // Late in the order both costs fall below round-off of the t = 0 cost.
      excess = std::max(excess, (mine - theirs) / scale);
      x = step_state(spec, x, d.rate, rng.normal());
    }
    q_T = std::max(q_T, std::abs(x.q));
  }
  r.checkf(u_min >= -1e-12, "min planned u = %.2e (>= -1e-12)", u_min);
  r.checkf(q_T <= 1e-10, "max |q_T| = %.2e (<= 1e-10)", q_T);
  r.checkf(excess <= 1e-12, "CE cost minus clipped LQR over path t=0 cost, worst = %.2e (<= 1e-12)", excess);
  r.checkf(binding > 0, "floor binds in %zu plans", binding);
}

void qp_correctness(Report& r) {
  std::mt19937_64 rng(2025);
  std::normal_distribution<double> n01;
  double err = 0.0, kkt = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const MatrixXd H = oracle::random_spd(rng, 6);
    VectorXd c(6);
    for (int i = 0; i < 6; ++i) c(i) = 2.0 * n01(rng);
    QpProblem p;
    p.H = H;
    p.c = c;
    p.lb = VectorXd::Zero(6);
    const QpSolution s = solve(p);
    err = std::max(err, (s.u - oracle::brute_force_nonneg_qp(H, c)).lpNorm<Eigen::Infinity>());
    kkt = std::max(kkt, s.kkt_residual);
  }
  r.checkf(err <= 1e-8, "200 QPs vs enumeration: max err %.2e (<= 1e-8)", err);
  r.checkf(kkt <= 1e-9, "max KKT residual %.2e (<= 1e-9)", kkt);
}

void value_monte_carlo(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const MarketSpec spec = scenario::desk();
  const LqrPolicy pol = build_policy(spec);
  const McSummary mc = monte_carlo_lqr(spec, pol, PriceModel::from_spec(spec), 100000, 20240);
  const double v0 = value_at(pol, ExecState{0, 0.0, 1.0});
  const double z = (mc.mean_cost - v0) / mc.std_error;
  const double secs = seconds_since(t0);
  r.checkf(std::abs(z) <= 3.0, "1e5 paths: mean %.6e, value %.6e, %.2f SE (<= 3)", mc.mean_cost, v0, z);
  r.checkf(secs <= 60.0, "%.2f s (<= 60 s), simd %s", secs, kernels::isa_name(kernels::active_isa()));
}

void calibration_round_trip(Report& r) {
  const std::array<double, 4> b{-4.0, 0.8, -0.6, 0.3};
  std::vector<DesignCell> cells;
  for (double k : {0.05, 0.1, 0.2, 0.4, 0.8})
    for (double nu : {0.5, 1.0, 2.0})
      for (double m : {0.01, 0.02, 0.05})
        cells.push_back({k, nu, m, std::exp(b[0] + b[1] * std::log(k) + b[2] * std::log(nu) + b[3] * std::log(m))});
  const KappaRegression exact = fit_log_linear(cells);
  double coef = 0.0;
  for (int i = 0; i < 4; ++i) coef = std::max(coef, std::abs(exact.b[i] - b[static_cast<std::size_t>(i)]));
  r.checkf(coef <= 1e-8, "zero-noise OLS recovery: max coef err %.2e (<= 1e-8)", coef);

  double inv = 0.0;
  for (double k : {0.03, 0.3, 3.0})
    for (double nu : {0.7, 1.4})
      inv = std::max(inv, rel(invert_for_kappa(exact, predict_delta(exact, k, nu, 0.02), nu, 0.02), k));
  r.checkf(inv <= 1e-8, "invert o forward: max rel err %.2e (<= 1e-8)", inv);

  ScenarioConfig cfg = load_scenario((kConfigs / "figure4.json").string());
  MarketSpec base = cfg.market;
  base.kappa.assign(base.n, 0.0);
  DesignGrid grid = cfg.calibration->grid;
  const KappaRegression mid = fit_kappa_regression(base, cfg.price_model, grid);
  r.knownf(mid.r2 >= 0.8, "simulated design, midpoint statistic: R2 = %.3f on %zu cells (>= 0.8)", mid.r2,
           mid.n_cells);
  grid.measure = DeviationMeasure::half_range;
  const KappaRegression half = fit_kappa_regression(base, cfg.price_model, grid);
  r.checkf(half.r2 >= 0.8, "simulated design, half-range statistic: R2 = %.3f on %zu cells", half.r2,
           half.n_cells);
}

void dark_conservation(Report& r) {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioConfig cfg = load_scenario((kConfigs / "figure5.json").string());
  const MarketSpec& spec = cfg.market;
  const std::size_t n_paths = 10000;
  double clamp = 0.0, conserve = 0.0, q_T = 0.0;
  std::size_t fills = 0, posts = 0;
  DarkScheduler ds(spec, *cfg.dark, cfg.mpc);
  for (std::size_t path = 0; path < n_paths; ++path) {
    ds.reset();
    PathRng price(cfg.seed, path);
    PathRng fill(stream_seed(cfg.seed, 0xda4c0f11), path);
    ExecState s;
    double lit = 0.0, dark = 0.0;
    for (std::size_t t = 0; t < spec.n; ++t) {
      const TwoStepDecision d = two_step(ds, s, fill);
      // Distance outside [0, q^D Q0].
      clamp = std::max({clamp, -d.y, d.y - std::max(d.q_dark, 0.0) * spec.q0});
      posts += d.y > 0.0;
      lit += spec.a(t) * d.u * spec.dt;
      if (d.filled) {
        dark += d.y / spec.q0;
        ++fills;
      }
      const double q_next = two_step_inventory(spec, s, d);
      ExecState next = step_state(spec, s, d.u, price.normal());
      next.q = q_next;
      s = next;
    }
    conserve = std::max(conserve, std::abs(lit + dark + s.q - 1.0));
    q_T = std::max(q_T, std::abs(s.q));
  }
  r.checkf(clamp <= 0.0, "1e4 paths: max excursion outside [0, qD Q0] = %.2e", clamp);
  r.checkf(conserve <= 1e-10, "lit + dark + q_T - 1: max %.2e (<= 1e-10)", conserve);
  r.checkf(fills > 0, "%zu dark fills over %zu postings; max |q_T| %.1e; %.1f s", fills, posts, q_T,
           seconds_since(t0));
}

void chi_shape(Report& r) {
  bool sign = true, mono = true, k1 = true;
  double end = 0.0;
  for (double kappa : {0.3, 2.0, 8.0}) {
    const ClosedFormParams p{0.5, 1.2, kappa, 0.8, TerminalPenalty::hard(), 1.0};
    double prev = -1e300;
    for (int i = 0; i <= 1000; ++i) {
      const double t = i / 1000.0;
      const double c = chi(p, t);
      sign = sign && c <= 0.0;
      mono = mono && c >= prev;
      prev = c;
      if (i < 1000) k1 = k1 && closed_form_gains(p, t).k1 < 0.0;
    }
    end = std::max(end, std::abs(chi(p, 1.0)));
  }
  r.check("chi <= 0 on 1000 points", sign);
  r.check("chi nondecreasing", mono);
  r.checkf(end == 0.0, "chi(T) = %.1e", end);
  r.check("k1 < 0 for t < T", k1);
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Report&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> all{
      {1, "receding horizon equals LQR", mpc_lqr_equivalence},
      {2, "closed form vs Riccati ODE", closed_form_vs_ode},
      {3, "discrete gains converge to continuous", discrete_to_continuous},
      {4, "hard-completion limits without inventory cost", hard_limit_gains},
      {5, "no-signal reduction", no_signal_reduction},
      {6, "brute-force oracles", brute_force_oracles},
      {7, "MPC positivity and completion", mpc_positivity},
      {8, "QP correctness", qp_correctness},
      {9, "value function by Monte Carlo", value_monte_carlo},
      {10, "calibration round trip", calibration_round_trip},
      {11, "dark clamp and conservation", dark_conservation},
      {12, "chi shape", chi_shape},
  };
  int unexpected = 0, known = 0;
  for (const auto& c : all) {
    Report rep;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(rep);
    } catch (const std::exception& e) {
      rep.check(std::string("threw: ") + e.what(), false);
    }
    bool ok = true, only_known = true;
    for (const auto& ch : rep.checks()) {
      ok = ok && ch.ok;
      if (!ch.ok && !ch.known) only_known = false;
    }
    std::printf("[%s] criterion %2d: %s (%.2f s)%s\n", ok ? "PASS" : "FAIL", c.id, c.name, seconds_since(t0),
                ok ? "" : only_known ? "  known failure" : "");
    for (const auto& ch : rep.checks()) {
      std::printf("    %s %s%s\n", ch.ok ? "ok  " : "FAIL", ch.what.c_str(), !ch.ok && ch.known ? "  [known]" : "");
      if (!ch.ok) (ch.known ? known : unexpected)++;
    }
    std::fflush(stdout);
  }
  std::printf("%d unexpected and %d known failing checks\n", unexpected, known);
  return unexpected == 0 ? 0 : 1;
}
