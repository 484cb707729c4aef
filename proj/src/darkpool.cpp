#include "optexec/darkpool.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "ode.hpp"

namespace optexec {

DarkSpec DarkSpec::constant(std::size_t n, double lambda, double theta, double beta_D,
                            double beta_T_D, double frac_a) {
  DarkSpec d;
  d.lambda.assign(n, lambda);
  d.theta.assign(n, theta);
  d.beta_D.assign(n, beta_D);
  d.beta_T_D = beta_T_D;
  d.frac_a = frac_a;
  return d;
}

void validate(const MarketSpec& spec, const DarkSpec& dark) {
  validate(spec);
  auto check_len = [&](const std::vector<double>& arr, const char* name) {
    if (arr.size() != spec.n) {
      throw Error(ErrorCode::LengthMismatch, "darkpool",
                  std::string(name) + " has length " + std::to_string(arr.size()) +
                      ", expected " + std::to_string(spec.n),
                  std::min(arr.size(), spec.n));
    }
  };
  check_len(dark.lambda, "lambda");
  check_len(dark.theta, "theta");
  check_len(dark.beta_D, "beta_D");
  for (std::size_t t = 0; t < spec.n; ++t) {
    if (dark.lambda[t] == 0.0) throw Error(ErrorCode::LambdaZero, "darkpool", "lambda = 0", t);
    const double ldt = dark.lambda[t] * spec.dt;
    if (!(ldt > 0.0 && ldt <= 1.0)) {
      throw Error(ErrorCode::InvalidParameter, "darkpool",
                  "lambda*dt = " + std::to_string(ldt) + " must lie in (0, 1]", t);
    }
    if (!(dark.theta[t] >= 0.0) || !std::isfinite(dark.theta[t]))
      throw Error(ErrorCode::InvalidParameter, "darkpool", "theta must be >= 0", t);
    if (!(dark.beta_D[t] >= 0.0) || !std::isfinite(dark.beta_D[t]))
      throw Error(ErrorCode::InvalidParameter, "darkpool", "beta_D must be >= 0", t);
  }
  if (!(dark.beta_T_D >= 0.0) || !std::isfinite(dark.beta_T_D))
    throw Error(ErrorCode::InvalidParameter, "darkpool", "beta_T_D must be finite and >= 0");
  if (!(dark.frac_a >= 0.0 && dark.frac_a <= 1.0))
    throw Error(ErrorCode::InvalidParameter, "darkpool", "frac_a must lie in [0, 1]");
}

std::vector<std::string> dark_advisories(const MarketSpec& spec, const DarkSpec& dark) {
  std::vector<std::string> notes;
  for (std::size_t t = 0; t < spec.n && t < dark.theta.size(); ++t) {
    if (dark.theta[t] * spec.v[t] > spec.eta[t]) {
      std::ostringstream os;
      os << "bucket " << t << ": theta*v = " << dark.theta[t] * spec.v[t] << " exceeds eta = "
         << spec.eta[t];
      notes.push_back(os.str());
    }
  }
  return notes;
}

DarkPolicy build_dark_policy(const MarketSpec& spec, const DarkSpec& dark, std::size_t t_start,
                             double avg_u) {
  validate(spec, dark);
  if (t_start >= spec.n) {
    throw Error(ErrorCode::InvalidParameter, "darkpool", "t_start must be < n", t_start);
  }
  const std::size_t m = spec.n - t_start;
  const double dt = spec.dt;
  const double c = 1.0 / spec.q0;  // a / v

  DarkPolicy pol;
  pol.t_start = t_start;
  pol.n = spec.n;
  pol.dt = dt;
  pol.avg_u = avg_u;
  pol.P.assign(m + 1, Mat2::Zero());
  pol.b.assign(m + 1, Vec2::Zero());
  pol.e.assign(m + 1, 0.0);
  pol.k.assign(m, Vec2::Zero());
  pol.f.assign(m, 0.0);
  pol.g.assign(m, 0.0);
  pol.P[m](1, 1) = dark.beta_T_D;

  const double theta_max = *std::max_element(dark.theta.begin(), dark.theta.end());
  const double g_floor = kDarkGFloorRel * std::max(theta_max, c * dark.beta_T_D);

  const Vec2 e1(1.0, 0.0);
  for (std::size_t i = m; i-- > 0;) {
    const std::size_t t = t_start + i;
    const Mat2& Pn = pol.P[i + 1];
    const Vec2& bn = pol.b[i + 1];
    const double lam = dark.lambda[t];
    const double th = dark.theta[t];
    const double al = spec.alpha[t];
    Mat2 A = Mat2::Identity();
    A(0, 0) = 1.0 - spec.kappa[t] * dt;

    const double g = th + c * Pn(1, 1);
    if (!(g > g_floor) || !std::isfinite(g)) {
      throw Error(ErrorCode::DegenerateGD, "darkpool", "g^D = " + std::to_string(g), t);
    }
    const Vec2 PA_row2 = A * Pn.col(1);  // (e2' P A)'
    const Vec2 k = -(0.5 * e1 - PA_row2) / g;
    const double f = -(-bn(1) - 2.0 * al * dt * Pn(0, 1) +
                       (spec.v[t] * th / lam + spec.eta[t]) * avg_u) /
                     (2.0 * g);
    const double clg = c * lam * g;

    Mat2 Delta = Mat2::Zero();
    Delta(1, 1) = dark.beta_D[t];
    Mat2 P = A * Pn * A + (Delta - clg * k * k.transpose()) * dt;
    P(0, 1) = P(1, 0) = 0.5 * (P(0, 1) + P(1, 0));
    Vec2 Jb(bn(0), 0.0);
    const Vec2 b = bn - (2.0 * clg * f * k + spec.kappa[t] * Jb - 2.0 * al * A * Pn * e1) * dt;
    const double sig = spec.sigma[t];
    const double e = pol.e[i + 1] + (sig * sig + al * al * dt * dt) * Pn(0, 0) +
                     (al * bn(0) - clg * f * f) * dt;

    pol.P[i] = P;
    pol.b[i] = b;
    pol.e[i] = e;
    pol.k[i] = k;
    pol.f[i] = f;
    pol.g[i] = g;
  }
  return pol;
}

namespace {

std::size_t offset_of(const DarkPolicy& pol, std::size_t bucket, std::size_t limit) {
  if (bucket < pol.t_start || bucket - pol.t_start >= limit) {
    throw Error(ErrorCode::InvalidParameter, "darkpool", "bucket outside the policy", bucket);
  }
  return bucket - pol.t_start;
}

}  // namespace

double dark_rate(const DarkPolicy& policy, std::size_t bucket, double p, double q_dark) {
  const std::size_t i = offset_of(policy, bucket, policy.k.size());
  return policy.k[i].dot(Vec2(p, q_dark)) + policy.f[i];
}

double dark_value(const DarkPolicy& policy, std::size_t bucket, double p, double q_dark) {
  const std::size_t i = offset_of(policy, bucket, policy.P.size());
  const Vec2 X(p, q_dark);
  return X.dot(policy.P[i] * X) + policy.b[i].dot(X) + policy.e[i];
}

double average_lit_rate(const MarketSpec& spec, const DarkSpec& dark, std::size_t bucket, double q) {
  double volume = 0.0;
  for (std::size_t s = bucket; s < spec.n; ++s) volume += spec.v[s] * spec.dt;
  return (1.0 - dark.frac_a) * q * spec.q0 / volume;
}

DarkScheduler::DarkScheduler(const MarketSpec& spec, DarkSpec dark, MpcConfig cfg, bool warm_start)
    : spec_(&spec), dark_(std::move(dark)), lit_(spec, std::move(cfg), warm_start) {
  validate(spec, dark_);
}

TwoStepDecision DarkScheduler::decide(const ExecState& state) {
  const MarketSpec& spec = *spec_;
  const std::size_t t = state.bucket;
  TwoStepDecision d;
  d.u = lit_.decide(state).rate;
  d.q_dark = dark_.frac_a * (state.q - spec.a(t) * d.u * spec.dt);
  d.avg_u = average_lit_rate(spec, dark_, t, state.q);
  if (dark_.frac_a > 0.0) {
    const DarkPolicy pol = build_dark_policy(spec, dark_, t, d.avg_u);
    d.y_raw = dark_rate(pol, t, state.p, d.q_dark);
    d.y = std::clamp(d.y_raw, 0.0, std::max(d.q_dark, 0.0) * spec.q0);
    d.theta_y = dark_.theta[t] * d.y;
  }
  d.posted = std::max(d.y - pending_, 0.0);
  target_ = d.y;
  return d;
}

void DarkScheduler::settle(bool filled) {
  // A fill consumes the resting order; otherwise the target stays posted.
  pending_ = filled ? 0.0 : target_;
}

void DarkScheduler::reset() {
  lit_.reset();
  pending_ = 0.0;
  target_ = 0.0;
}

TwoStepDecision two_step(DarkScheduler& sched, const ExecState& state, PathRng& rng) {
  TwoStepDecision d = sched.decide(state);
  const double prob = sched.dark().lambda[state.bucket] * sched.spec().dt;
  // Draw on every bucket so the random stream does not depend on y.
  d.filled = rng.bernoulli(prob) && d.y > 0.0;
  sched.settle(d.filled);
  return d;
}

double two_step_cost(const MarketSpec& spec, const ExecState& state, const TwoStepDecision& d) {
  const std::size_t t = state.bucket;
  const double dt = spec.dt;
  const double mid = state.p + spec.eta[t] * d.u + d.theta_y;
  double cost = spec.a(t) * d.u * dt * (mid + spec.s[t]) + spec.beta[t] * state.q * state.q * dt;
  if (d.filled) cost += d.y / spec.q0 * mid;
  return cost;
}

double two_step_inventory(const MarketSpec& spec, const ExecState& state, const TwoStepDecision& d) {
  double q = state.q - spec.a(state.bucket) * d.u * spec.dt;
  if (d.filled) q -= d.y / spec.q0;
  return q;
}

ContinuousDarkPolicy integrate_dark_riccati(const ContinuousDarkSpec& cs, std::size_t grid_n) {
  if (cs.lambda == 0.0) throw Error(ErrorCode::LambdaZero, "darkpool", "lambda = 0");
  if (!(cs.lambda > 0.0) || !(cs.q0 > 0.0) || !(cs.theta >= 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "darkpool", "need lambda > 0, q0 > 0 and theta >= 0");
  }
  const double c = 1.0 / cs.q0;
  const double lam = cs.lambda, kappa = cs.kappa, alpha = cs.alpha;
  const double sig2 = cs.sigma * cs.sigma;
  const double lit_term = (cs.v * cs.theta / lam + cs.eta) * cs.avg_u;
  const double g_floor = kDarkGFloorRel * std::max(cs.theta, c * cs.beta_T_D);
  const Vec2 e1(1.0, 0.0);

  struct Gain {
    double g;
    Vec2 k;
    double f;
  };
  auto gains = [&](const detail::Riccati6& y) {
    Mat2 P;
    P << y(0), y(1), y(1), y(2);
    const double g = cs.theta + c * P(1, 1);
    if (!(g > g_floor)) throw Error(ErrorCode::DegenerateGD, "darkpool", "g^D = " + std::to_string(g));
    const Vec2 k = -(0.5 * e1 - P.col(1)) / g;
    const double f = -(-y(4) + lit_term) / (2.0 * g);
    return Gain{g, k, f};
  };
  auto rhs = [&](double, const detail::Riccati6& y) {
    const Gain gk = gains(y);
    const double clg = c * lam * gk.g;
    const Vec2& k = gk.k;
    detail::Riccati6 d;
    d(0) = -2.0 * kappa * y(0) - clg * k(0) * k(0);
    d(1) = -kappa * y(1) - clg * k(0) * k(1);
    d(2) = cs.beta_D - clg * k(1) * k(1);
    d(3) = -2.0 * clg * gk.f * k(0) - kappa * y(3) + 2.0 * alpha * y(0);
    d(4) = -2.0 * clg * gk.f * k(1) + 2.0 * alpha * y(1);
    d(5) = sig2 * y(0) + alpha * y(3) - clg * gk.f * gk.f;
    return d;
  };
  auto stiffness = [&](const detail::Riccati6& y) {
    const double g = std::max(cs.theta + c * y(2), 1e-300);
    return 2.0 * lam * (1.0 + c * y.head<3>().cwiseAbs().maxCoeff() / g) + 2.0 * std::abs(kappa);
  };

  detail::Riccati6 yT = detail::Riccati6::Zero();
  yT(2) = cs.beta_T_D;
  const double guard = 1e8 * std::max({1.0, cs.beta_T_D, cs.q0 * cs.theta});
  const auto ys = detail::integrate_backward(rhs, stiffness, yT, cs.T, grid_n, "darkpool", guard);

  ContinuousDarkPolicy pol;
  const std::size_t N = ys.size();
  pol.t.resize(N);
  pol.P.resize(N);
  pol.b.resize(N);
  pol.e.resize(N);
  pol.k.resize(N);
  pol.f.resize(N);
  pol.g.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const auto& y = ys[i];
    pol.t[i] = cs.T * static_cast<double>(i) / static_cast<double>(N - 1);
    pol.P[i] << y(0), y(1), y(1), y(2);
    pol.b[i] << y(3), y(4);
    pol.e[i] = y(5);
    const Gain gk = gains(y);
    pol.g[i] = gk.g;
    pol.k[i] = gk.k;
    pol.f[i] = gk.f;
  }
  return pol;
}

void write_dark_policy_csv(std::ostream& os, const DarkPolicy& pol) {
  const auto old_prec = os.precision(17);
  os << "t,k_p,k_q,f,g,P11,P12,P22,b1,b2,e\n";
  const std::size_t m = pol.k.size();
  for (std::size_t i = 0; i <= m; ++i) {
    const Mat2& P = pol.P[i];
    os << static_cast<double>(pol.t_start + i) * pol.dt << ',';
    if (i < m) {
      os << pol.k[i](0) << ',' << pol.k[i](1) << ',' << pol.f[i] << ',' << pol.g[i] << ',';
    } else {
      os << ",,,,";
    }
    os << P(0, 0) << ',' << P(0, 1) << ',' << P(1, 1) << ',' << pol.b[i](0) << ',' << pol.b[i](1)
       << ',' << pol.e[i] << '\n';
  }
  os.precision(old_prec);
}

}  // namespace optexec
