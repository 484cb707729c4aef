#include "optexec/lqr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace optexec {

double hard_surrogate(const MarketSpec& spec, double scale) {
  const double eta_max = *std::max_element(spec.eta.begin(), spec.eta.end());
  const double v_min = *std::min_element(spec.v.begin(), spec.v.end());
  const double a_min = v_min / spec.q0;
  // Zero temporary impact would collapse the surrogate; keep it positive.
  const double eta_ref = eta_max > 0.0 ? eta_max : 1.0;
  return scale * eta_ref / (a_min * spec.dt * spec.dt);
}

LqrPolicy build_policy(const MarketSpec& spec, const LqrOptions& opts) {
  validate(spec);
  const std::size_t n = spec.n;
  const double dt = spec.dt;
  constexpr double inf = std::numeric_limits<double>::infinity();

  LqrPolicy pol;
  pol.n = n;
  pol.dt = dt;
  pol.P.assign(n + 1, Mat2::Zero());
  pol.b.assign(n + 1, Vec2::Zero());
  pol.e.assign(n + 1, 0.0);
  pol.k.assign(n, Vec2::Zero());
  pol.f.assign(n, 0.0);
  pol.g.assign(n, 0.0);

  const double eta_max = *std::max_element(spec.eta.begin(), spec.eta.end());
  const double g_floor = opts.g_floor_rel * eta_max;

  std::size_t last = n;  // first bucket handled by the generic recursion is last - 1
  if (spec.beta_T.is_hard() && opts.hard == HardTerminal::exact) {
    pol.hard_exact = true;
    pol.beta_T = inf;
    pol.P[n] << 0.0, 0.0, 0.0, inf;
    // Final bucket: u = q / (a dt) empties the inventory; its stage cost is
    // eta q^2 / (a dt) + (p + s) q + beta q^2 dt.
    const std::size_t t = n - 1;
    const double adt = spec.a(t) * dt;
    pol.k[t] << 0.0, 1.0 / adt;
    pol.f[t] = 0.0;
    pol.g[t] = inf;
    pol.P[t] << 0.0, 0.5, 0.5, spec.eta[t] / adt + spec.beta[t] * dt;
    pol.b[t] << 0.0, spec.s[t];
    pol.e[t] = 0.0;
    last = t;
  } else {
    pol.beta_T = spec.beta_T.is_hard() ? hard_surrogate(spec, opts.surrogate_scale)
                                       : spec.beta_T.value();
    pol.P[n] << 0.0, 0.0, 0.0, pol.beta_T;
  }

  const Vec2 e1(1.0, 0.0);
  for (std::size_t t = last; t-- > 0;) {
    const Mat2& Pn = pol.P[t + 1];
    const Vec2& bn = pol.b[t + 1];
    const double en = pol.e[t + 1];
    const double a = spec.a(t);
    const double kdt = spec.kappa[t] * dt;
    const double al = spec.alpha[t];
    const Vec2 w(spec.w_price(t), -1.0);
    Mat2 A = Mat2::Identity();
    A(0, 0) = 1.0 - kdt;

    const double g = spec.eta[t] + a * dt * w.dot(Pn * w);
    if (!(g > g_floor) || !std::isfinite(g)) {
      throw Error(ErrorCode::DegenerateGt, "lqr", "g_t = " + std::to_string(g), t);
    }
    const Vec2 Pe1 = Pn * e1;
    const Vec2 k = -(A * Pn.transpose() * w + 0.5 * e1) / g;
    const double f = -((bn + 2.0 * al * dt * Pe1).dot(w) + spec.s[t]) / (2.0 * g);

    Mat2 Delta = Mat2::Zero();
    Delta(1, 1) = spec.beta[t];
    Mat2 P = A * Pn * A + (Delta - a * g * k * k.transpose()) * dt;
    P = 0.5 * (P + P.transpose()).eval();
    Vec2 Jb(bn(0), 0.0);
    const Vec2 b = bn - (2.0 * a * g * f * k + spec.kappa[t] * Jb - 2.0 * al * (A * Pe1)) * dt;
    const double sig = spec.sigma[t];
    const double e = en + (sig * sig + al * al * dt * dt) * Pn(0, 0) +
                     (al * bn(0) - a * g * f * f) * dt;

    pol.k[t] = k;
    pol.f[t] = f;
    pol.g[t] = g;
    pol.P[t] = P;
    pol.b[t] = b;
    pol.e[t] = e;
  }
  return pol;
}

double policy_rate(const LqrPolicy& policy, const ExecState& state) {
  const Vec2& k = policy.k.at(state.bucket);
  return k(0) * state.p + k(1) * state.q + policy.f[state.bucket];
}

double value_at(const LqrPolicy& policy, const ExecState& state) {
  const std::size_t t = state.bucket;
  if (t == policy.n && policy.hard_exact) {
    return std::abs(state.q) <= kDefaultCompletionTol ? 0.0 : std::numeric_limits<double>::infinity();
  }
  const Vec2 X(state.p, state.q);
  return X.dot(policy.P.at(t) * X) + policy.b[t].dot(X) + policy.e[t];
}

void write_policy_csv(std::ostream& os, const LqrPolicy& policy) {
  const auto old_prec = os.precision(17);
  os << "t,k_p,k_q,f,g,P11,P12,P22,b1,b2,e\n";
  for (std::size_t i = 0; i <= policy.n; ++i) {
    os << static_cast<double>(i) * policy.dt << ',';
    if (i < policy.n) {
      os << policy.k[i](0) << ',' << policy.k[i](1) << ',' << policy.f[i] << ',' << policy.g[i];
    } else {
      os << ",,,";
    }
    const Mat2& P = policy.P[i];
    os << ',' << P(0, 0) << ',' << P(0, 1) << ',' << P(1, 1) << ',' << policy.b[i](0) << ','
       << policy.b[i](1) << ',' << policy.e[i] << '\n';
  }
  os.precision(old_prec);
}

}  // namespace optexec
