#include "optexec/core.hpp"

#include <cmath>
#include <string>

namespace optexec {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveVolume: return "NonPositiveVolume";
    case ErrorCode::KappaDtTooLarge: return "KappaDtTooLarge";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::DegenerateGt: return "DegenerateGt";
    case ErrorCode::DegenerateGD: return "DegenerateGD";
    case ErrorCode::LambdaZero: return "LambdaZero";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::NotConvex: return "NotConvex";
    case ErrorCode::StepBlowup: return "StepBlowup";
    case ErrorCode::ZetaPole: return "ZetaPole";
    case ErrorCode::Overshoot: return "Overshoot";
    case ErrorCode::SchedulerError: return "SchedulerError";
    case ErrorCode::DegenerateDesign: return "DegenerateDesign";
    case ErrorCode::ZeroSlope: return "ZeroSlope";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& module, const std::string& detail,
                           std::optional<std::size_t> index) {
  std::string msg = module + ": " + std::string(to_string(code));
  if (index) msg += " at index " + std::to_string(*index);
  if (!detail.empty()) msg += " (" + detail + ")";
  return msg;
}

}  // namespace

Error::Error(ErrorCode code, std::string module, std::string detail,
             std::optional<std::size_t> index)
    : std::runtime_error(format_message(code, module, detail, index)),
      code_(code),
      module_(std::move(module)),
      index_(index) {}

MarketSpec MarketSpec::constant(std::size_t n, double dt, double q0, double v, double eta,
                                double mu, double s, double sigma, double kappa, double alpha,
                                double beta, TerminalPenalty beta_T, Side side) {
  MarketSpec spec;
  spec.n = n;
  spec.dt = dt;
  spec.q0 = q0;
  spec.side = side;
  spec.v.assign(n, v);
  spec.eta.assign(n, eta);
  spec.mu.assign(n, mu);
  spec.s.assign(n, s);
  spec.sigma.assign(n, sigma);
  spec.kappa.assign(n, kappa);
  spec.alpha.assign(n, alpha);
  spec.beta.assign(n, beta);
  spec.beta_T = beta_T;
  return spec;
}

void validate(const MarketSpec& spec) {
  auto fail = [](ErrorCode code, const std::string& what, std::optional<std::size_t> idx = {}) {
    throw Error(code, "core", what, idx);
  };
  if (spec.n == 0) fail(ErrorCode::InvalidParameter, "n must be positive");
  if (!(spec.dt > 0.0) || !std::isfinite(spec.dt)) fail(ErrorCode::InvalidParameter, "dt must be > 0");
  if (!(spec.q0 > 0.0) || !std::isfinite(spec.q0)) fail(ErrorCode::InvalidParameter, "q0 must be > 0");

  const auto check_len = [&](const std::vector<double>& arr, const char* name) {
    if (arr.size() != spec.n) {
      fail(ErrorCode::LengthMismatch,
           std::string(name) + " has length " + std::to_string(arr.size()) + ", expected " +
               std::to_string(spec.n),
           std::min(arr.size(), spec.n));
    }
  };
  check_len(spec.v, "v");
  check_len(spec.eta, "eta");
  check_len(spec.mu, "mu");
  check_len(spec.s, "s");
  check_len(spec.sigma, "sigma");
  check_len(spec.kappa, "kappa");
  check_len(spec.alpha, "alpha");
  check_len(spec.beta, "beta");

  for (std::size_t t = 0; t < spec.n; ++t) {
    if (!(spec.v[t] > 0.0) || !std::isfinite(spec.v[t]))
      fail(ErrorCode::NonPositiveVolume, "v must be > 0", t);
    if (!(spec.kappa[t] * spec.dt < 1.0))
      fail(ErrorCode::KappaDtTooLarge,
           "kappa*dt = " + std::to_string(spec.kappa[t] * spec.dt) + " must be < 1", t);
    if (!(spec.eta[t] >= 0.0)) fail(ErrorCode::InvalidParameter, "eta must be >= 0", t);
    if (!(spec.mu[t] >= 0.0)) fail(ErrorCode::InvalidParameter, "mu must be >= 0", t);
    if (!(spec.s[t] >= 0.0)) fail(ErrorCode::InvalidParameter, "s must be >= 0", t);
    if (!(spec.sigma[t] >= 0.0)) fail(ErrorCode::InvalidParameter, "sigma must be >= 0", t);
    if (!(spec.beta[t] >= 0.0)) fail(ErrorCode::InvalidParameter, "beta must be >= 0", t);
    if (!std::isfinite(spec.kappa[t]) || !std::isfinite(spec.alpha[t]))
      fail(ErrorCode::InvalidParameter, "kappa and alpha must be finite", t);
  }
  if (!spec.beta_T.is_hard() && !(spec.beta_T.value() >= 0.0 && std::isfinite(spec.beta_T.value())))
    fail(ErrorCode::InvalidParameter, "beta_T must be >= 0 or hard");
}

double stage_cost(const MarketSpec& spec, const ExecState& state, double u) {
  const std::size_t t = state.bucket;
  const double a = spec.a(t);
  return (a * spec.eta[t] * u * u + a * (state.p + spec.s[t]) * u +
          spec.beta[t] * state.q * state.q) *
         spec.dt;
}

double terminal_cost(const MarketSpec& spec, double q_T, double completion_tol) {
  if (spec.beta_T.is_hard()) {
    return std::abs(q_T) <= completion_tol ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return spec.beta_T.value() * q_T * q_T;
}

ExecState step_state(const MarketSpec& spec, const ExecState& state, double u, double z) {
  const std::size_t t = state.bucket;
  const double dt = spec.dt;
  const double x = u * spec.v[t];
  ExecState next;
  next.bucket = t + 1;
  next.p = (1.0 - spec.kappa[t] * dt) * state.p + spec.mu[t] * x * dt + spec.alpha[t] * dt +
           spec.sigma[t] * z;
  next.q = state.q - spec.a(t) * u * dt;
  return next;
}

double recompute_total(const ExecutionTrace& trace) {
  double total = 0.0;
  for (const auto& rec : trace.buckets) total += rec.stage_cost;
  return total + trace.terminal_cost;
}

}  // namespace optexec
