#include "optexec/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ode.hpp"

namespace optexec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// phi(x) = 1 - (1 - e^{-x}) / x, with its series near 0.
double phi(double x) {
  if (std::abs(x) < 1e-3) {
    return x / 2.0 - x * x / 6.0 + x * x * x / 24.0 - x * x * x * x / 120.0;
  }
  return 1.0 + std::expm1(-x) / x;
}

// (e^{x tau} - 1) / x, equal to tau at x = 0.
double growth(double x, double tau) { return x == 0.0 ? tau : std::expm1(x * tau) / x; }

ContinuousPolicy integrate_finite(const ContinuousSpec& cs, double beta_T, std::size_t grid_n) {
  if (!(cs.eta > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "continuous", "eta must be positive");
  }
  const double eta = cs.eta, a = cs.a, kappa = cs.kappa, alpha = cs.alpha, beta = cs.beta;
  const double s = cs.s, sig2 = cs.sigma * cs.sigma;
  const Vec2 w(cs.w1, -1.0);

  auto rhs = [&](double, const detail::Riccati6& y) {
    Mat2 P;
    P << y(0), y(1), y(1), y(2);
    const Vec2 b(y(3), y(4));
    const Vec2 k = -(P * w + Vec2(0.5, 0.0)) / eta;
    const double f = -(b.dot(w) + s) / (2.0 * eta);
    const double aeta = a * eta;
    detail::Riccati6 d;
    d(0) = -2.0 * kappa * P(0, 0) - aeta * k(0) * k(0);
    d(1) = -kappa * P(0, 1) - aeta * k(0) * k(1);
    d(2) = beta - aeta * k(1) * k(1);
    d(3) = -2.0 * aeta * f * k(0) - kappa * b(0) + 2.0 * alpha * P(0, 0);
    d(4) = -2.0 * aeta * f * k(1) + 2.0 * alpha * P(1, 0);
    d(5) = alpha * b(0) + sig2 * P(0, 0) - aeta * f * f;
    return d;
  };
  const double wn = 1.0 + cs.w1 * cs.w1;
  auto stiffness = [&](const detail::Riccati6& y) {
    return 2.0 * a * wn * y.head<3>().cwiseAbs().maxCoeff() / eta + 2.0 * std::abs(kappa);
  };

  detail::Riccati6 yT = detail::Riccati6::Zero();
  yT(2) = beta_T;
  const double guard = 1e8 * std::max({1.0, beta_T, std::sqrt(eta * beta / std::max(a, 1e-300))});
  const auto ys = detail::integrate_backward(rhs, stiffness, yT, cs.T, grid_n, "continuous", guard);

  ContinuousPolicy pol;
  pol.beta_T = beta_T;
  const std::size_t N = ys.size();
  pol.t.resize(N);
  pol.P.resize(N);
  pol.b.resize(N);
  pol.e.resize(N);
  pol.k.resize(N);
  pol.f.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const auto& y = ys[i];
    pol.t[i] = cs.T * static_cast<double>(i) / static_cast<double>(N - 1);
    pol.P[i] << y(0), y(1), y(1), y(2);
    pol.b[i] = Vec2(y(3), y(4));
    pol.e[i] = y(5);
    pol.k[i] = -(pol.P[i] * w + Vec2(0.5, 0.0)) / eta;
    pol.f[i] = -(pol.b[i].dot(w) + s) / (2.0 * eta);
  }
  return pol;
}

}  // namespace

ContinuousSpec ContinuousSpec::from_market(const MarketSpec& spec, std::size_t t) {
  ContinuousSpec cs;
  cs.T = spec.horizon();
  cs.eta = spec.eta.at(t);
  cs.a = spec.a(t);
  cs.w1 = spec.w_price(t);
  cs.s = spec.s[t];
  cs.sigma = spec.sigma[t] / std::sqrt(spec.dt);
  cs.kappa = spec.kappa[t];
  cs.alpha = spec.alpha[t];
  cs.beta = spec.beta[t];
  cs.beta_T = spec.beta_T;
  return cs;
}

Vec2 ContinuousPolicy::gain_at(double time) const {
  const std::size_t N = t.size() - 1;
  const double T = t.back();
  const double x = std::clamp(time / T, 0.0, 1.0) * static_cast<double>(N);
  const std::size_t i = std::min(static_cast<std::size_t>(x), N - 1);
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * k[i] + w * k[i + 1];
}

HardSweep integrate_riccati_sweep(const ContinuousSpec& spec, std::vector<double> beta_T,
                                  std::size_t grid_n) {
  HardSweep sweep;
  std::sort(beta_T.begin(), beta_T.end());
  sweep.beta_T = beta_T;
  for (double bt : beta_T) sweep.policies.push_back(integrate_finite(spec, bt, grid_n));
  sweep.monotone = true;
  const std::size_t m = sweep.policies.size();
  for (std::size_t i = 0; i + 1 < grid_n + 1 && m >= 3; ++i) {
    for (int c = 0; c < 2; ++c) {
      int sign = 0;
      for (std::size_t j = 0; j + 1 < m; ++j) {
        const double d = sweep.policies[j + 1].k[i](c) - sweep.policies[j].k[i](c);
        const double tol = 1e-12 * std::max(1.0, std::abs(sweep.policies[j].k[i](c)));
        if (std::abs(d) <= tol) continue;
        const int sg = d > 0 ? 1 : -1;
        if (sign != 0 && sg != sign) sweep.monotone = false;
        sign = sg;
      }
    }
  }
  return sweep;
}

ContinuousPolicy integrate_riccati(const ContinuousSpec& spec, std::size_t grid_n) {
  if (!spec.beta_T.is_hard()) return integrate_finite(spec, spec.beta_T.value(), grid_n);
  HardSweep sweep = integrate_riccati_sweep(spec, {1e2, 1e3, 1e4}, grid_n);
  if (!sweep.monotone) {
    throw Error(ErrorCode::StepBlowup, "continuous",
                "terminal-penalty sweep does not converge monotonically");
  }
  return std::move(sweep.policies.back());
}

double zeta(const ClosedFormParams& p) {
  if (p.beta_T.is_hard()) return -1.0;
  const double c = std::sqrt(p.eta * p.beta / p.a);
  const double B = p.beta_T.value();
  if (std::abs(c - B) <= 1e-12 * std::max(1.0, c)) {
    throw Error(ErrorCode::ZetaPole, "continuous", "beta_T equals sqrt(eta beta / a)");
  }
  return (c + B) / (c - B);
}

double chi(const ClosedFormParams& p, double t) {
  const double tau = p.T - t;
  const double r = std::sqrt(p.a * p.beta / p.eta);
  const double z = zeta(p);
  return growth(p.kappa - r, tau) + z * growth(p.kappa + r, tau);
}

Gains closed_form_gains(const ClosedFormParams& p, double t) {
  if (!(p.beta > 0.0)) return corollary_gains(p.eta, p.a, p.kappa, p.beta_T, p.T, t);
  const double tau = p.T - t;
  const double r = std::sqrt(p.a * p.beta / p.eta);
  const double z = zeta(p);
  const double D = std::exp(-r * tau) + z * std::exp(r * tau);
  Gains g;
  g.k1 = -(1.0 + z + p.kappa * chi(p, t)) / (2.0 * p.eta * std::exp(p.kappa * tau) * D);
  const double em = std::exp(-2.0 * r * tau);
  g.k2 = std::sqrt(p.beta / (p.a * p.eta)) * (z - em) / (z + em);
  return g;
}

Gains corollary_gains(double eta, double a, double kappa, TerminalPenalty beta_T, double T,
                      double t) {
  const double tau = T - t;
  const double x = kappa * tau;
  Gains g;
  if (beta_T.is_hard()) {
    if (tau <= 0.0) return {-1.0 / (2.0 * eta), kInf};
    g.k1 = -phi(x) / (2.0 * eta);
    g.k2 = 1.0 / (a * tau);
    return g;
  }
  const double B = beta_T.value();
  const double aBt = a * B * tau;
  g.k1 = -(1.0 + aBt / eta * phi(x)) / (2.0 * (eta + aBt));
  g.k2 = B / (eta + aBt);
  return g;
}

void write_gains_csv(std::ostream& os, const std::vector<double>& t, const std::vector<Gains>& g) {
  const auto old = os.precision(17);
  os << "t,k1,k2\n";
  for (std::size_t i = 0; i < t.size(); ++i) os << t[i] << ',' << g[i].k1 << ',' << g[i].k2 << '\n';
  os.precision(old);
}

}  // namespace optexec
