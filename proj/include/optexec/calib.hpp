#pragma once

// Tuning kappa for a target aggressiveness. The deviation of the LQR curve
// from its kappa = 0 counterpart is summarized by a quantile statistic, fitted
// log-linearly against (kappa, impact scale nu, Q0 / M) over a simulated
// design, and the fit is inverted for kappa.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "optexec/core.hpp"
#include "optexec/sim.hpp"

namespace optexec {

/// Nearest-rank quantile: the ceil(level N)-th smallest sample (at least the first).
[[nodiscard]] double nearest_rank_quantile(std::vector<double> sample, double level);

struct DeviationStat {
  double a = 0.0;
  double q_lo = 0.0;   ///< a-quantile
  double q_hi = 0.0;   ///< (1 - a)-quantile
  double delta = 0.0;  ///< (q_lo + q_hi) / 2
  double half_range = 0.0;  ///< (q_hi - q_lo) / 2
  std::size_t n = 0;
};

/// Which summary of the deviation sample the regression explains. The
/// midpoint is the defining statistic; the half range measures the size of
/// the excursions rather than their asymmetry.
enum class DeviationMeasure { midpoint, half_range };

[[nodiscard]] const char* measure_name(DeviationMeasure m) noexcept;
[[nodiscard]] DeviationMeasure measure_from_name(const std::string& name);

inline constexpr double kDefaultQuantile = 0.05;

/// Statistic of an explicit deviation sample. Throws InvalidParameter unless
/// 0 < a < 1/2 and the sample is non-empty.
[[nodiscard]] DeviationStat deviation_from_sample(std::vector<double> deviations, double a);

/// Plays the LQR of `spec_kappa` and of `spec_ac` (the same spec with kappa
/// = 0) on the same seeded price path and summarizes u_kappa - u_ac over all
/// buckets.
[[nodiscard]] DeviationStat deviation_stat(const MarketSpec& spec_kappa, const MarketSpec& spec_ac,
                                           const PriceModel& model, std::uint64_t seed,
                                           std::uint64_t path, double a = kDefaultQuantile);

/// Pools the deviations of paths 0..n_paths-1 before taking quantiles.
[[nodiscard]] DeviationStat deviation_stat_paths(const MarketSpec& spec_kappa,
                                                 const MarketSpec& spec_ac, const PriceModel& model,
                                                 std::uint64_t seed, std::size_t n_paths,
                                                 double a = kDefaultQuantile);

/// Total expected volume M = sum v dt.
[[nodiscard]] double expected_volume(const MarketSpec& spec);

/// Copy of `base` with mu and eta multiplied by nu.
[[nodiscard]] MarketSpec scale_impact(const MarketSpec& base, double nu);

struct DesignCell {
  double kappa = 0.0;
  double nu = 1.0;
  double q0_over_m = 0.0;
  double delta = 0.0;  ///< filled by the simulation; used as data by the fit
};

struct KappaRegression {
  std::array<double, 4> b{};   ///< log delta = b0 + b1 log kappa + b2 log nu + b3 log(Q0/M)
  std::array<double, 4> se{};  ///< coefficient standard errors
  double r2 = 0.0;
  double resid_sd = 0.0;
  std::size_t n_cells = 0;
  std::vector<std::string> warnings;  ///< cells dropped for delta <= 0
};

/// OLS on logs of the given cells. Cells with delta <= 0 are dropped with a
/// warning; throws DegenerateDesign if fewer than 4 distinct cells survive
/// or the design matrix is rank deficient.
[[nodiscard]] KappaRegression fit_log_linear(const std::vector<DesignCell>& cells);

struct DesignGrid {
  std::vector<double> kappa;
  std::vector<double> nu;
  std::vector<double> q0_over_m;
  std::size_t paths_per_cell = 20;
  double a = kDefaultQuantile;
  DeviationMeasure measure = DeviationMeasure::midpoint;
  std::uint64_t seed = 1;
};

/// Simulates every cell of the grid from `base` (Q0 is set from Q0/M with the
/// volumes kept) and fits the regression. Cell i draws its paths from its own
/// stream stream_seed(seed, i). `cells_out` receives the
/// simulated cells when given.
[[nodiscard]] KappaRegression fit_kappa_regression(const MarketSpec& base, const PriceModel& model,
                                                   const DesignGrid& grid,
                                                   std::vector<DesignCell>* cells_out = nullptr);

/// log kappa = (log delta - b0 - b2 log nu - b3 log(Q0/M)) / b1. Throws
/// ZeroSlope when b1 = 0 and, when `dt` is given, KappaDtTooLarge if the
/// result violates kappa dt < 1.
[[nodiscard]] double invert_for_kappa(const KappaRegression& reg, double target_delta, double nu,
                                      double q0_over_m, std::optional<double> dt = std::nullopt);

/// Forward model exp(b0 + b1 log kappa + b2 log nu + b3 log(Q0/M)).
[[nodiscard]] double predict_delta(const KappaRegression& reg, double kappa, double nu,
                                   double q0_over_m);

/// {"b0", "b1", "b2", "b3", "r2", "n_cells"}.
void write_regression_json(std::ostream& os, const KappaRegression& reg);

}  // namespace optexec
