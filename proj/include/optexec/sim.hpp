#pragma once

// Market simulator. The true price dynamics live in PriceModel and are kept
// apart from the signal parameters the schedulers believe in, so a scheduler
// tuned for mean reversion can be run against a random walk.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "optexec/core.hpp"
#include "optexec/darkpool.hpp"
#include "optexec/lqr.hpp"
#include "optexec/mpc.hpp"
#include "optexec/rng.hpp"

namespace optexec {

enum class PriceKind { arithmetic, mean_reverting, trending };

/// True dynamics of the side-adjusted spot deviation d_t = +-(S_t - S_0)/S_0:
///   d' = (1 - kappa dt) d + mu x dt + alpha dt + sigma z.
/// Permanent impact mu comes from the market spec.
struct PriceModel {
  PriceKind kind = PriceKind::arithmetic;
  std::vector<double> kappa;
  std::vector<double> alpha;
  std::vector<double> sigma;  ///< per bucket

  /// Dynamics equal to the spec's own beliefs.
  [[nodiscard]] static PriceModel from_spec(const MarketSpec& spec);
  /// Random walk with the spec's volatility.
  [[nodiscard]] static PriceModel arithmetic(const MarketSpec& spec);
  [[nodiscard]] static PriceModel mean_reverting(const MarketSpec& spec, double kappa);
  [[nodiscard]] static PriceModel trending(const MarketSpec& spec, double alpha);
};

/// Throws LengthMismatch or InvalidParameter.
void validate(const MarketSpec& spec, const PriceModel& model);

enum class BenchmarkKind { arrival, vwap, twap };

[[nodiscard]] const char* benchmark_name(BenchmarkKind kind) noexcept;
[[nodiscard]] BenchmarkKind benchmark_from_name(const std::string& name);

/// kappa_t = a v_t / V with V = sum_{s <= t} v_s dt.
[[nodiscard]] std::vector<double> vwap_kappa(const MarketSpec& spec, double a_tuning);

/// Max gap between the VWAP slippage computed from its definition on the
/// spot path `spot` (S_t / S_0, t = 0..n-1) and the one-step recursion
///   p' = (1 - r) (p + S' - S),  r = v_{t+1} dt / V_{t+1}.
[[nodiscard]] double vwap_recursion_residual(const MarketSpec& spec, const std::vector<double>& spot);

struct SchedulerDecision {
  double u = 0.0;
  std::optional<TwoStepDecision> dark;
  double price_push = 0.0;  ///< added to the next slippage
};

class Scheduler {
public:
  virtual ~Scheduler() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  /// Rate for the bucket at `state`. Dark schedulers draw their fill from
  /// `fill_rng`.
  virtual SchedulerDecision decide(const ExecState& state, PathRng& fill_rng) = 0;
  virtual void reset() {}
};

/// Affine LQR play, optionally clipped below at zero. With `a_dt` (a_t dt per
/// bucket) the clip also caps u at the remaining inventory, so the clipped
/// player never overshoots and stays feasible under hard completion.
class LqrScheduler final : public Scheduler {
public:
  LqrScheduler(LqrPolicy policy, bool clip, std::string name = "lqr",
               std::vector<double> a_dt = {});
  [[nodiscard]] std::string name() const override { return name_; }
  SchedulerDecision decide(const ExecState& state, PathRng&) override;
  [[nodiscard]] const LqrPolicy& policy() const noexcept { return policy_; }

private:
  LqrPolicy policy_;
  bool clip_;
  std::string name_;
  std::vector<double> a_dt_;
};

/// LQR clipped into [0, q / (a_t dt)], named "lqr_clipped".
[[nodiscard]] std::unique_ptr<LqrScheduler> make_clipped_lqr(const MarketSpec& spec,
                                                             const LqrOptions& opts = {});

class MpcPlayer final : public Scheduler {
public:
  MpcPlayer(const MarketSpec& spec, MpcConfig cfg) : mpc_(spec, std::move(cfg)) {}
  [[nodiscard]] std::string name() const override { return "mpc"; }
  SchedulerDecision decide(const ExecState& state, PathRng&) override;
  void reset() override { mpc_.reset(); }

private:
  MpcScheduler mpc_;
};

class DarkPlayer final : public Scheduler {
public:
  DarkPlayer(const MarketSpec& spec, DarkSpec dark, MpcConfig cfg) : sched_(spec, std::move(dark), std::move(cfg)) {}
  [[nodiscard]] std::string name() const override { return "dark"; }
  SchedulerDecision decide(const ExecState& state, PathRng& fill_rng) override;
  void reset() override { sched_.reset(); }

private:
  DarkScheduler sched_;
};

/// Plays a precomputed rate per bucket.
class FixedCurve final : public Scheduler {
public:
  FixedCurve(std::vector<double> u, std::string name) : u_(std::move(u)), name_(std::move(name)) {}
  [[nodiscard]] std::string name() const override { return name_; }
  SchedulerDecision decide(const ExecState& state, PathRng&) override;

private:
  std::vector<double> u_;
  std::string name_;
};

/// Constant participation Q0 / M with M = sum v dt: trades in proportion to volume.
[[nodiscard]] std::vector<double> vwap_curve(const MarketSpec& spec);
/// Equal shares per bucket.
[[nodiscard]] std::vector<double> twap_curve(const MarketSpec& spec);

/// Almgren-Chriss schedule: the LQR of the spec with the signals removed.
[[nodiscard]] std::unique_ptr<Scheduler> make_ac_scheduler(const MarketSpec& spec,
                                                           const LqrOptions& opts = {});

struct SimOptions {
  BenchmarkKind benchmark = BenchmarkKind::arrival;
  /// q outside [-tol, 1 + tol] after a bucket.
  double overshoot_tol = 1e-9;
  /// Raise Overshoot; otherwise only flag it in the trace.
  bool overshoot_raises = true;
};

/// One path. Price noise comes from PathRng(seed, path) and dark fills from
/// an independent stream, so schedulers see identical prices.
[[nodiscard]] ExecutionTrace simulate(const MarketSpec& spec, Scheduler& scheduler,
                                      const PriceModel& model, std::uint64_t seed,
                                      std::uint64_t path = 0, const SimOptions& opts = {});

struct McSummary {
  double mean_cost = 0.0;
  double std = 0.0;
  double std_error = 0.0;
  double q_T_max = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  std::vector<double> costs;  ///< per path, in path order
};

using TraceSink = std::function<void(std::size_t path, const ExecutionTrace&)>;

/// Monte Carlo over paths 0..n_paths-1 with `simulate`; per-path costs are
/// reduced in path order so the result does not depend on `threads`.
/// `on_trace` is called concurrently, once per path.
[[nodiscard]] McSummary run_paths(const MarketSpec& spec,
                                  const std::function<std::unique_ptr<Scheduler>()>& make,
                                  const PriceModel& model, std::size_t n_paths, std::uint64_t seed,
                                  const SimOptions& opts = {}, unsigned threads = 0,
                                  const TraceSink& on_trace = {});

/// Batched LQR play under arrival slippage with the vectorized kernel. Draws
/// the same normals as `simulate` path by path.
[[nodiscard]] McSummary monte_carlo_lqr(const MarketSpec& spec, const LqrPolicy& policy,
                                        const PriceModel& model, std::size_t n_paths,
                                        std::uint64_t seed, unsigned threads = 0);

/// CSV with header t,p,q,u,x,stage_cost and, for dark runs,
/// y_posted,dark_filled,dark_qty.
void write_trace_csv(std::ostream& os, const ExecutionTrace& trace);

/// {"mean_cost", "std", "q_T_max", "n_paths", "seed"}.
void write_summary_json(std::ostream& os, const McSummary& summary);

}  // namespace optexec
