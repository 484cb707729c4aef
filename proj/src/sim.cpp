#include "optexec/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

#include "optexec/kernels.hpp"
#include "optexec/spec_io.hpp"

namespace optexec {

namespace {

constexpr std::uint64_t kFillStream = 0xda4c'0f11ULL;

void check_len(const std::vector<double>& arr, std::size_t n, const char* name) {
  if (arr.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "sim",
                std::string(name) + " has length " + std::to_string(arr.size()) + ", expected " +
                    std::to_string(n),
                std::min(arr.size(), n));
  }
}

unsigned resolve_threads(unsigned threads, std::size_t work) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(work, 1)));
}

// Runs body(i) for i in [0, count) on `threads` workers, rethrowing the first
// failure.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  threads = resolve_threads(threads, count);
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i, 0u);
    return;
  }
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += threads) body(i, w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

McSummary summarize(std::vector<double> costs, double q_T_max, std::uint64_t seed) {
  McSummary s;
  s.n_paths = costs.size();
  s.seed = seed;
  s.q_T_max = q_T_max;
  double sum = 0.0;
  for (double c : costs) sum += c;
  s.mean_cost = s.n_paths ? sum / static_cast<double>(s.n_paths) : 0.0;
  double ss = 0.0;
  for (double c : costs) ss += (c - s.mean_cost) * (c - s.mean_cost);
  s.std = s.n_paths > 1 ? std::sqrt(ss / static_cast<double>(s.n_paths - 1)) : 0.0;
  s.std_error = s.n_paths ? s.std / std::sqrt(static_cast<double>(s.n_paths)) : 0.0;
  s.costs = std::move(costs);
  return s;
}

}  // namespace

PriceModel PriceModel::from_spec(const MarketSpec& spec) {
  PriceModel m;
  m.kappa = spec.kappa;
  m.alpha = spec.alpha;
  m.sigma = spec.sigma;
  const bool mr = std::any_of(m.kappa.begin(), m.kappa.end(), [](double k) { return k != 0.0; });
  const bool tr = std::any_of(m.alpha.begin(), m.alpha.end(), [](double a) { return a != 0.0; });
  m.kind = mr ? PriceKind::mean_reverting : tr ? PriceKind::trending : PriceKind::arithmetic;
  return m;
}

PriceModel PriceModel::arithmetic(const MarketSpec& spec) {
  PriceModel m;
  m.kind = PriceKind::arithmetic;
  m.kappa.assign(spec.n, 0.0);
  m.alpha.assign(spec.n, 0.0);
  m.sigma = spec.sigma;
  return m;
}

PriceModel PriceModel::mean_reverting(const MarketSpec& spec, double kappa) {
  PriceModel m = arithmetic(spec);
  m.kind = PriceKind::mean_reverting;
  m.kappa.assign(spec.n, kappa);
  return m;
}

PriceModel PriceModel::trending(const MarketSpec& spec, double alpha) {
  PriceModel m = arithmetic(spec);
  m.kind = PriceKind::trending;
  m.alpha.assign(spec.n, alpha);
  return m;
}

void validate(const MarketSpec& spec, const PriceModel& model) {
  check_len(model.kappa, spec.n, "price_model.kappa");
  check_len(model.alpha, spec.n, "price_model.alpha");
  check_len(model.sigma, spec.n, "price_model.sigma");
  for (std::size_t t = 0; t < spec.n; ++t) {
    if (!(model.kappa[t] * spec.dt < 1.0) || !(model.kappa[t] >= 0.0))
      throw Error(ErrorCode::KappaDtTooLarge, "sim", "true kappa*dt must lie in [0, 1)", t);
    if (!(model.sigma[t] >= 0.0) || !std::isfinite(model.alpha[t]))
      throw Error(ErrorCode::InvalidParameter, "sim", "true sigma must be >= 0 and alpha finite", t);
  }
}

const char* benchmark_name(BenchmarkKind kind) noexcept {
  switch (kind) {
    case BenchmarkKind::arrival: return "arrival";
    case BenchmarkKind::vwap: return "vwap";
    case BenchmarkKind::twap: return "twap";
  }
  return "unknown";
}

BenchmarkKind benchmark_from_name(const std::string& name) {
  if (name == "arrival") return BenchmarkKind::arrival;
  if (name == "vwap") return BenchmarkKind::vwap;
  if (name == "twap") return BenchmarkKind::twap;
  throw Error(ErrorCode::ConfigError, "sim", "unknown benchmark '" + name + "'");
}

std::vector<double> vwap_kappa(const MarketSpec& spec, double a_tuning) {
  std::vector<double> kappa(spec.v.size());
  double V = 0.0;
  for (std::size_t t = 0; t < spec.v.size(); ++t) {
    V += spec.v[t] * spec.dt;
    kappa[t] = a_tuning * spec.v[t] / V;
  }
  return kappa;
}

double vwap_recursion_residual(const MarketSpec& spec, const std::vector<double>& spot) {
  const std::size_t n = std::min(spot.size(), spec.v.size());
  if (n == 0) return 0.0;
  double V = spec.v[0] * spec.dt;
  double weighted = V * spot[0];
  double p_rec = spot[0] - weighted / V;
  double worst = 0.0;
  for (std::size_t t = 1; t < n; ++t) {
    const double vdt = spec.v[t] * spec.dt;
    V += vdt;
    weighted += vdt * spot[t];
    const double p_def = spot[t] - weighted / V;
    const double r = vdt / V;
    p_rec = (1.0 - r) * (p_rec + spot[t] - spot[t - 1]);
    worst = std::max(worst, std::abs(p_def - p_rec));
  }
  return worst;
}

LqrScheduler::LqrScheduler(LqrPolicy policy, bool clip, std::string name, std::vector<double> a_dt)
    : policy_(std::move(policy)), clip_(clip), name_(std::move(name)), a_dt_(std::move(a_dt)) {}

SchedulerDecision LqrScheduler::decide(const ExecState& state, PathRng&) {
  double u = policy_rate(policy_, state);
  if (clip_) {
    u = std::max(u, 0.0);
    if (!a_dt_.empty()) u = std::min(u, std::max(state.q, 0.0) / a_dt_.at(state.bucket));
  }
  return {u, std::nullopt};
}

SchedulerDecision MpcPlayer::decide(const ExecState& state, PathRng&) {
  return {mpc_.decide(state).rate, std::nullopt};
}

SchedulerDecision DarkPlayer::decide(const ExecState& state, PathRng& fill_rng) {
  const TwoStepDecision d = two_step(sched_, state, fill_rng);
  return {d.u, d, sched_.dark().impact_persistent ? d.theta_y : 0.0};
}

SchedulerDecision FixedCurve::decide(const ExecState& state, PathRng&) {
  if (state.bucket >= u_.size()) {
    throw Error(ErrorCode::SchedulerError, "sim", "fixed curve shorter than the horizon",
                state.bucket);
  }
  return {u_[state.bucket], std::nullopt};
}

std::unique_ptr<LqrScheduler> make_clipped_lqr(const MarketSpec& spec, const LqrOptions& opts) {
  std::vector<double> a_dt(spec.n);
  for (std::size_t t = 0; t < spec.n; ++t) a_dt[t] = spec.a(t) * spec.dt;
  return std::make_unique<LqrScheduler>(build_policy(spec, opts), true, "lqr_clipped", std::move(a_dt));
}

std::vector<double> vwap_curve(const MarketSpec& spec) {
  double M = 0.0;
  for (double v : spec.v) M += v * spec.dt;
  return std::vector<double>(spec.n, spec.q0 / M);
}

std::vector<double> twap_curve(const MarketSpec& spec) {
  std::vector<double> u(spec.n);
  for (std::size_t t = 0; t < spec.n; ++t) u[t] = 1.0 / (spec.a(t) * spec.horizon());
  return u;
}

std::unique_ptr<Scheduler> make_ac_scheduler(const MarketSpec& spec, const LqrOptions& opts) {
  MarketSpec ac = spec;
  ac.kappa.assign(spec.n, 0.0);
  ac.alpha.assign(spec.n, 0.0);
  return std::make_unique<LqrScheduler>(build_policy(ac, opts), false, "ac");
}

ExecutionTrace simulate(const MarketSpec& spec, Scheduler& scheduler, const PriceModel& model,
                        std::uint64_t seed, std::uint64_t path, const SimOptions& opts) {
  validate(spec);
  validate(spec, model);
  scheduler.reset();
  PathRng price_rng(seed, path);
  PathRng fill_rng(stream_seed(seed, kFillStream), path);

  const double sg = side_sign(spec.side);
  const double dt = spec.dt;
  ExecutionTrace trace;
  trace.buckets.reserve(spec.n);

  double d = 0.0;  // side-adjusted spot deviation from arrival
  double spot = 1.0;
  double vol_cum = spec.v[0] * dt, weighted = vol_cum * spot;  // VWAP accumulators
  double spot_sum = spot;                                      // TWAP accumulator
  ExecState st{0, 0.0, 1.0};

  for (std::size_t t = 0; t < spec.n; ++t) {
    st.bucket = t;
    double bench = 1.0;
    switch (opts.benchmark) {
      case BenchmarkKind::arrival: st.p = d; break;
      case BenchmarkKind::vwap:
        bench = weighted / vol_cum;
        st.p = sg * (spot - bench);
        break;
      case BenchmarkKind::twap:
        bench = spot_sum / static_cast<double>(t + 1);
        st.p = sg * (spot - bench);
        break;
    }

    SchedulerDecision dec;
    try {
      dec = scheduler.decide(st, fill_rng);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::SchedulerError, "sim", scheduler.name() + ": " + e.what(), t);
    }
    const double u = dec.u;

    BucketRecord rec;
    rec.bucket = t;
    rec.t = spec.time_of(t);
    rec.p = st.p;
    rec.q = st.q;
    rec.u = u;
    rec.x = u * spec.v[t];
    rec.spot = spot;
    rec.benchmark = bench;
    double q_next = st.q - spec.a(t) * u * dt;
    double shares = u * spec.v[t] * dt;
    const double persistent = dec.price_push;
    if (dec.dark) {
      const TwoStepDecision& dk = *dec.dark;
      trace.has_dark = true;
      rec.stage_cost = two_step_cost(spec, st, dk);
      rec.y_posted = dk.posted;
      rec.dark_filled = dk.filled;
      rec.dark_qty = dk.filled ? dk.y : 0.0;
      q_next = two_step_inventory(spec, st, dk);
      if (dk.filled) shares += dk.y;
    } else {
      rec.stage_cost = stage_cost(spec, st, u);
    }
    trace.buckets.push_back(rec);

    d = (1.0 - model.kappa[t] * dt) * d + spec.mu[t] * shares + model.alpha[t] * dt +
        model.sigma[t] * price_rng.normal() + persistent;
    spot = 1.0 + sg * d;
    if (t + 1 < spec.n) {
      const double vdt = spec.v[t + 1] * dt;
      vol_cum += vdt;
      weighted += vdt * spot;
      spot_sum += spot;
    }

    if (!(q_next >= -opts.overshoot_tol && q_next <= 1.0 + opts.overshoot_tol)) {
      if (opts.overshoot_raises) {
        throw Error(ErrorCode::Overshoot, "sim",
                    scheduler.name() + " left q = " + std::to_string(q_next), t);
      }
      if (!trace.overshoot_bucket) trace.overshoot_bucket = t;
    }
    st.q = q_next;
  }
  trace.q_T = st.q;
  trace.terminal_cost = terminal_cost(spec, st.q);
  trace.total_cost = recompute_total(trace);
  return trace;
}

McSummary run_paths(const MarketSpec& spec, const std::function<std::unique_ptr<Scheduler>()>& make,
                    const PriceModel& model, std::size_t n_paths, std::uint64_t seed,
                    const SimOptions& opts, unsigned threads, const TraceSink& on_trace) {
  threads = resolve_threads(threads, n_paths);
  std::vector<std::unique_ptr<Scheduler>> scheds(threads);
  for (auto& s : scheds) s = make();
  std::vector<double> costs(n_paths), qT(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i, unsigned w) {
    const ExecutionTrace tr = simulate(spec, *scheds[w], model, seed, i, opts);
    costs[i] = tr.total_cost;
    qT[i] = std::abs(tr.q_T);
    if (on_trace) on_trace(i, tr);
  });
  const double q_T_max = n_paths ? *std::max_element(qT.begin(), qT.end()) : 0.0;
  return summarize(std::move(costs), q_T_max, seed);
}

McSummary monte_carlo_lqr(const MarketSpec& spec, const LqrPolicy& policy, const PriceModel& model,
                          std::size_t n_paths, std::uint64_t seed, unsigned threads) {
  validate(spec);
  validate(spec, model);
  if (policy.n != spec.n) {
    throw Error(ErrorCode::LengthMismatch, "sim", "policy length differs from the spec");
  }
  constexpr std::size_t kBatch = 1024;
  const std::size_t n_batches = (n_paths + kBatch - 1) / kBatch;
  std::vector<double> costs(n_paths), qT(n_paths);
  const double dt = spec.dt;

  parallel_for(n_batches, threads, [&](std::size_t bidx, unsigned) {
    const std::size_t lo = bidx * kBatch;
    const std::size_t m = std::min(kBatch, n_paths - lo);
    std::vector<PathRng> rngs;
    rngs.reserve(m);
    for (std::size_t j = 0; j < m; ++j) rngs.emplace_back(seed, lo + j);
    std::vector<double> p(m, 0.0), q(m, 1.0), z(m), cost(m, 0.0);
    for (std::size_t t = 0; t < spec.n; ++t) {
      for (std::size_t j = 0; j < m; ++j) z[j] = rngs[j].normal();
      kernels::AffineStep c;
      c.k_p = policy.k[t](0);
      c.k_q = policy.k[t](1);
      c.f = policy.f[t];
      const double a = spec.a(t);
      c.a_eta_dt = a * spec.eta[t] * dt;
      c.a_dt = a * dt;
      c.s = spec.s[t];
      c.beta_dt = spec.beta[t] * dt;
      c.decay = 1.0 - model.kappa[t] * dt;
      c.impact = spec.mu[t] * spec.v[t] * dt;
      c.drift = model.alpha[t] * dt;
      c.sigma = model.sigma[t];
      kernels::affine_step(c, p, q, z, cost, {});
    }
    for (std::size_t j = 0; j < m; ++j) {
      costs[lo + j] = cost[j] + terminal_cost(spec, q[j]);
      qT[lo + j] = std::abs(q[j]);
    }
  });
  const double q_T_max = n_paths ? *std::max_element(qT.begin(), qT.end()) : 0.0;
  return summarize(std::move(costs), q_T_max, seed);
}

void write_trace_csv(std::ostream& os, const ExecutionTrace& trace) {
  const auto old = os.precision(17);
  os << "t,p,q,u,x,stage_cost";
  if (trace.has_dark) os << ",y_posted,dark_filled,dark_qty";
  os << '\n';
  for (const auto& r : trace.buckets) {
    os << r.t << ',' << r.p << ',' << r.q << ',' << r.u << ',' << r.x << ',' << r.stage_cost;
    if (trace.has_dark) os << ',' << r.y_posted << ',' << (r.dark_filled ? 1 : 0) << ',' << r.dark_qty;
    os << '\n';
  }
  os.precision(old);
}

void write_summary_json(std::ostream& os, const McSummary& s) {
  Json j;
  j["mean_cost"] = s.mean_cost;
  j["std"] = s.std;
  j["q_T_max"] = s.q_T_max;
  j["n_paths"] = s.n_paths;
  j["seed"] = s.seed;
  os << j.dump(2) << '\n';
}

}  // namespace optexec
