#include "optexec/calib.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <tuple>

#include <Eigen/Dense>

#include "optexec/spec_io.hpp"

namespace optexec {

double nearest_rank_quantile(std::vector<double> sample, double level) {
  if (sample.empty()) throw Error(ErrorCode::InvalidParameter, "calib", "empty sample");
  const double N = static_cast<double>(sample.size());
  std::size_t rank = static_cast<std::size_t>(std::ceil(level * N));
  rank = std::clamp<std::size_t>(rank, 1, sample.size());
  std::nth_element(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(rank - 1), sample.end());
  return sample[rank - 1];
}

DeviationStat deviation_from_sample(std::vector<double> deviations, double a) {
  if (!(a > 0.0 && a < 0.5)) {
    throw Error(ErrorCode::InvalidParameter, "calib", "quantile level must lie in (0, 1/2)");
  }
  DeviationStat s;
  s.a = a;
  s.n = deviations.size();
  s.q_lo = nearest_rank_quantile(deviations, a);
  s.q_hi = nearest_rank_quantile(std::move(deviations), 1.0 - a);
  s.delta = 0.5 * (s.q_lo + s.q_hi);
  s.half_range = 0.5 * (s.q_hi - s.q_lo);
  return s;
}

const char* measure_name(DeviationMeasure m) noexcept {
  return m == DeviationMeasure::midpoint ? "midpoint" : "half_range";
}

DeviationMeasure measure_from_name(const std::string& name) {
  if (name == "midpoint") return DeviationMeasure::midpoint;
  if (name == "half_range") return DeviationMeasure::half_range;
  throw Error(ErrorCode::ConfigError, "calib", "unknown deviation measure '" + name + "'");
}

namespace {

void append_deviations(const MarketSpec& spec_kappa, const MarketSpec& spec_ac,
                       const LqrPolicy& pk, const LqrPolicy& pa, const PriceModel& model,
                       std::uint64_t seed, std::uint64_t path, std::vector<double>& out) {
  SimOptions opts;
  opts.overshoot_raises = false;
  LqrScheduler lk(pk, false), la(pa, false);
  const ExecutionTrace tk = simulate(spec_kappa, lk, model, seed, path, opts);
  const ExecutionTrace ta = simulate(spec_ac, la, model, seed, path, opts);
  for (std::size_t t = 0; t < tk.buckets.size(); ++t) out.push_back(tk.buckets[t].u - ta.buckets[t].u);
}

}  // namespace

DeviationStat deviation_stat(const MarketSpec& spec_kappa, const MarketSpec& spec_ac,
                             const PriceModel& model, std::uint64_t seed, std::uint64_t path,
                             double a) {
  std::vector<double> dev;
  append_deviations(spec_kappa, spec_ac, build_policy(spec_kappa), build_policy(spec_ac), model,
                    seed, path, dev);
  return deviation_from_sample(std::move(dev), a);
}

DeviationStat deviation_stat_paths(const MarketSpec& spec_kappa, const MarketSpec& spec_ac,
                                   const PriceModel& model, std::uint64_t seed,
                                   std::size_t n_paths, double a) {
  const LqrPolicy pk = build_policy(spec_kappa), pa = build_policy(spec_ac);
  std::vector<double> dev;
  dev.reserve(n_paths * spec_kappa.n);
  for (std::size_t i = 0; i < n_paths; ++i) {
    append_deviations(spec_kappa, spec_ac, pk, pa, model, seed, i, dev);
  }
  return deviation_from_sample(std::move(dev), a);
}

double expected_volume(const MarketSpec& spec) {
  double M = 0.0;
  for (double v : spec.v) M += v * spec.dt;
  return M;
}

MarketSpec scale_impact(const MarketSpec& base, double nu) {
  MarketSpec s = base;
  for (auto& m : s.mu) m *= nu;
  for (auto& e : s.eta) e *= nu;
  return s;
}

KappaRegression fit_log_linear(const std::vector<DesignCell>& cells) {
  KappaRegression reg;
  std::vector<const DesignCell*> kept;
  std::set<std::tuple<double, double, double>> distinct;
  for (const auto& c : cells) {
    if (!(c.delta > 0.0) || !std::isfinite(c.delta)) {
      reg.warnings.push_back("dropped cell kappa=" + std::to_string(c.kappa) +
                             " nu=" + std::to_string(c.nu) +
                             " q0/M=" + std::to_string(c.q0_over_m) +
                             ": delta=" + std::to_string(c.delta));
      continue;
    }
    kept.push_back(&c);
    distinct.emplace(c.kappa, c.nu, c.q0_over_m);
  }
  if (distinct.size() < 4) {
    throw Error(ErrorCode::DegenerateDesign, "calib",
                std::to_string(distinct.size()) + " distinct cells with delta > 0, need 4");
  }
  const Eigen::Index N = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd X(N, 4);
  Eigen::VectorXd y(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const DesignCell& c = *kept[static_cast<std::size_t>(i)];
    X.row(i) << 1.0, std::log(c.kappa), std::log(c.nu), std::log(c.q0_over_m);
    y(i) = std::log(c.delta);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < 4) {
    throw Error(ErrorCode::DegenerateDesign, "calib",
                "design matrix has rank " + std::to_string(qr.rank()) + " < 4");
  }
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - X * beta;
  const double ss_res = resid.squaredNorm();
  const double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
  for (int j = 0; j < 4; ++j) reg.b[j] = beta(j);
  reg.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  reg.n_cells = static_cast<std::size_t>(N);
  const double dof = static_cast<double>(N - 4);
  reg.resid_sd = dof > 0 ? std::sqrt(ss_res / dof) : 0.0;
  if (dof > 0) {
    const Eigen::MatrixXd cov = (X.transpose() * X).inverse() * (ss_res / dof);
    for (int j = 0; j < 4; ++j) reg.se[j] = std::sqrt(cov(j, j));
  }
  return reg;
}

KappaRegression fit_kappa_regression(const MarketSpec& base, const PriceModel& model,
                                     const DesignGrid& grid, std::vector<DesignCell>* cells_out) {
  validate(base);
  const double M = expected_volume(base);
  std::vector<DesignCell> cells;
  for (double k : grid.kappa) {
    for (double nu : grid.nu) {
      for (double r : grid.q0_over_m) {
        MarketSpec spec = scale_impact(base, nu);
        spec.q0 = r * M;
        MarketSpec ac = spec;
        spec.kappa.assign(spec.n, k);
        ac.kappa.assign(spec.n, 0.0);
        DesignCell c{k, nu, r, 0.0};
        const DeviationStat st = deviation_stat_paths(
            spec, ac, model, stream_seed(grid.seed, cells.size()), grid.paths_per_cell, grid.a);
        c.delta = grid.measure == DeviationMeasure::midpoint ? st.delta : st.half_range;
        cells.push_back(c);
      }
    }
  }
  if (cells_out) *cells_out = cells;
  return fit_log_linear(cells);
}

double predict_delta(const KappaRegression& reg, double kappa, double nu, double q0_over_m) {
  const auto& b = reg.b;
  return std::exp(b[0] + b[1] * std::log(kappa) + b[2] * std::log(nu) + b[3] * std::log(q0_over_m));
}

double invert_for_kappa(const KappaRegression& reg, double target_delta, double nu,
                        double q0_over_m, std::optional<double> dt) {
  const auto& b = reg.b;
  if (b[1] == 0.0) throw Error(ErrorCode::ZeroSlope, "calib", "b1 = 0");
  if (!(target_delta > 0.0) || !(nu > 0.0) || !(q0_over_m > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "calib", "delta, nu and Q0/M must be positive");
  }
  const double log_k = std::log(target_delta) / b[1] - b[0] / b[1] - b[2] / b[1] * std::log(nu) -
                       b[3] / b[1] * std::log(q0_over_m);
  const double kappa = std::exp(log_k);
  if (dt && !(kappa * *dt < 1.0)) {
    throw Error(ErrorCode::KappaDtTooLarge, "calib",
                "kappa = " + std::to_string(kappa) + " gives kappa*dt >= 1");
  }
  return kappa;
}

void write_regression_json(std::ostream& os, const KappaRegression& reg) {
  Json j;
  j["b0"] = reg.b[0];
  j["b1"] = reg.b[1];
  j["b2"] = reg.b[2];
  j["b3"] = reg.b[3];
  j["r2"] = reg.r2;
  j["n_cells"] = reg.n_cells;
  os << j.dump(2) << '\n';
}

}  // namespace optexec
