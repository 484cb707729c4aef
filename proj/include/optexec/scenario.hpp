#pragma once

// Scenario files: one JSON document describing the market, the true price
// dynamics, the benchmark, which schedulers to run and where outputs go.
// The functions here back the command-line subcommands.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "optexec/calib.hpp"
#include "optexec/darkpool.hpp"
#include "optexec/lqr.hpp"
#include "optexec/mpc.hpp"
#include "optexec/sim.hpp"
#include "optexec/spec_io.hpp"

namespace optexec {

struct CalibrationConfig {
  DesignGrid grid;
  std::optional<double> target_delta;  ///< inverted at nu = 1 and the market's Q0/M
};

struct ScenarioConfig {
  std::string name = "scenario";
  MarketSpec market;
  /// When set, market.kappa is replaced by vwap_kappa(market, value).
  std::optional<double> kappa_from_vwap;
  PriceModel price_model;
  BenchmarkKind benchmark = BenchmarkKind::arrival;
  /// Any of ac, lqr, lqr_clipped, mpc, dark, twap, vwap.
  std::vector<std::string> schedulers{"lqr"};
  LqrOptions lqr;
  MpcConfig mpc;
  std::optional<DarkSpec> dark;
  std::optional<CalibrationConfig> calibration;
  std::size_t n_paths = 1;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
};

/// Parses and validates. Throws Error(ConfigError) naming the field.
[[nodiscard]] ScenarioConfig scenario_from_json(const Json& j);
[[nodiscard]] ScenarioConfig load_scenario(const std::string& path);
[[nodiscard]] Json to_json(const ScenarioConfig& cfg);

/// Checks cross-field requirements (a dark block for the dark scheduler,
/// a calibration block when asked for, model arrays of length n). Numerical
/// validation of the market itself raises the core error codes.
void validate(const ScenarioConfig& cfg, bool need_calibration = false);

[[nodiscard]] std::unique_ptr<Scheduler> make_scheduler(const ScenarioConfig& cfg,
                                                        const std::string& name);

struct SchedulerStats {
  std::string name;
  McSummary summary;
  double q_T_mean = 0.0;
  double u_min = 0.0;
  double frac_negative = 0.0;  ///< buckets with u < -1e-12
  double frac_zero = 0.0;      ///< buckets with |u| <= 1e-12
  double dark_fraction = 0.0;  ///< mean share of the order filled in the dark
};

/// Runs n_paths seeded paths for one scheduler.
[[nodiscard]] SchedulerStats evaluate_scheduler(const ScenarioConfig& cfg, const std::string& name,
                                                unsigned threads = 0);

/// `run`: per scheduler, trace_<name>.csv for path 0 and summary_<name>.json;
/// MPC-based schedulers also write plans_<name>.json with {t, u, plan} per
/// bucket; dumps the LQR policy. Prints one line per scheduler to `log`.
void run_scenario(const ScenarioConfig& cfg, std::ostream& log);

/// `compare`: evaluates each scheduler on identical seeded paths, prints a
/// table and writes compare.csv.
[[nodiscard]] std::vector<SchedulerStats> compare_schedulers(const ScenarioConfig& cfg,
                                                             const std::vector<std::string>& names,
                                                             std::ostream& log);

/// `calibrate`: regression.json and cells.csv; prints the fit and, with a
/// target, the inverted kappa.
[[nodiscard]] KappaRegression calibrate_scenario(const ScenarioConfig& cfg, std::ostream& log);

/// `policy-dump`: policy_lqr.csv, gains_continuous.csv and, with a dark
/// block, policy_dark.csv (from t = 0).
void dump_policies(const ScenarioConfig& cfg, std::ostream& log);

}  // namespace optexec
