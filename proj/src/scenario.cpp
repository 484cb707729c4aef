#include "optexec/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "optexec/continuous.hpp"

namespace optexec {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigError, "config", "field '" + path + "': " + what);
}

const Json* find(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return nullptr;
  return &j.at(key);
}

const Json& require(const Json& j, const char* key, const std::string& path) {
  const Json* v = find(j, key);
  if (!v) config_error(path + "." + key, "missing");
  return *v;
}

double number(const Json& v, const std::string& path) {
  if (!v.is_number()) config_error(path, "expected a number");
  return v.get<double>();
}

std::optional<double> opt_number(const Json& j, const char* key, const std::string& path) {
  if (const Json* v = find(j, key)) return number(*v, path + "." + key);
  return std::nullopt;
}

std::size_t count(const Json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) config_error(path, "expected a non-negative integer");
  return v.get<std::size_t>();
}

bool boolean(const Json& v, const std::string& path) {
  if (!v.is_boolean()) config_error(path, "expected true or false");
  return v.get<bool>();
}

std::string text(const Json& v, const std::string& path) {
  if (!v.is_string()) config_error(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const Json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) config_error(path, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

const char* price_kind_name(PriceKind k) {
  switch (k) {
    case PriceKind::arithmetic: return "arithmetic";
    case PriceKind::mean_reverting: return "mean_reverting";
    case PriceKind::trending: return "trending";
  }
  return "arithmetic";
}

PriceModel price_model_from_json(const Json& j, const MarketSpec& spec, const std::string& path) {
  if (!j.is_object()) config_error(path, "expected an object");
  const std::string kind = text(require(j, "kind", path), path + ".kind");
  PriceModel m;
  if (kind == "spec") {
    m = PriceModel::from_spec(spec);
  } else if (kind == "arithmetic") {
    m = PriceModel::arithmetic(spec);
  } else if (kind == "mean_reverting") {
    m = PriceModel::arithmetic(spec);
    m.kind = PriceKind::mean_reverting;
  } else if (kind == "trending") {
    m = PriceModel::arithmetic(spec);
    m.kind = PriceKind::trending;
  } else {
    config_error(path + ".kind", "unknown price model '" + kind + "'");
  }
  if (const Json* v = find(j, "kappa")) m.kappa = bucket_array_from_json(*v, spec.n, path + ".kappa");
  if (const Json* v = find(j, "alpha")) m.alpha = bucket_array_from_json(*v, spec.n, path + ".alpha");
  if (const Json* v = find(j, "sigma")) m.sigma = bucket_array_from_json(*v, spec.n, path + ".sigma");
  return m;
}

Json to_json(const PriceModel& m) {
  return Json{{"kind", price_kind_name(m.kind)}, {"kappa", m.kappa}, {"alpha", m.alpha}, {"sigma", m.sigma}};
}

MpcConfig mpc_from_json(const Json& j, const std::string& path) {
  MpcConfig c;
  if (!j.is_object()) config_error(path, "expected an object");
  if (const Json* v = find(j, "lower")) {
    c.lower = v->is_string() && v->get<std::string>() == "none" ? -std::numeric_limits<double>::infinity()
                                                                : number(*v, path + ".lower");
  }
  c.u_max = opt_number(j, "u_max", path);
  if (const Json* v = find(j, "hard_completion")) c.hard_completion = boolean(*v, path + ".hard_completion");
  if (const Json* v = find(j, "k_rhc")) c.k_rhc = count(*v, path + ".k_rhc");
  if (auto r = opt_number(j, "ramp", path)) c.ramp = *r;
  return c;
}

Json to_json(const MpcConfig& c) {
  Json j;
  if (std::isinf(c.lower)) j["lower"] = "none";
  else j["lower"] = c.lower;
  j["u_max"] = c.u_max ? Json(*c.u_max) : Json(nullptr);
  j["hard_completion"] = c.hard_completion;
  j["k_rhc"] = c.k_rhc ? Json(*c.k_rhc) : Json(nullptr);
  j["ramp"] = c.ramp;
  return j;
}

DarkSpec dark_from_json(const Json& j, std::size_t n, const std::string& path) {
  if (!j.is_object()) config_error(path, "expected an object");
  DarkSpec d;
  d.lambda = bucket_array_from_json(require(j, "lambda", path), n, path + ".lambda");
  d.theta = bucket_array_from_json(require(j, "theta", path), n, path + ".theta");
  d.beta_D = find(j, "beta_D") ? bucket_array_from_json(j.at("beta_D"), n, path + ".beta_D")
                               : std::vector<double>(n, 0.0);
  d.beta_T_D = number(require(j, "beta_T_D", path), path + ".beta_T_D");
  d.frac_a = number(require(j, "frac_a", path), path + ".frac_a");
  if (const Json* v = find(j, "impact_persistent")) d.impact_persistent = boolean(*v, path + ".impact_persistent");
  return d;
}

Json to_json(const DarkSpec& d) {
  return Json{{"lambda", d.lambda},     {"theta", d.theta},   {"beta_D", d.beta_D},
              {"beta_T_D", d.beta_T_D}, {"frac_a", d.frac_a}, {"impact_persistent", d.impact_persistent}};
}

CalibrationConfig calibration_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) config_error(path, "expected an object");
  CalibrationConfig c;
  c.grid.kappa = numbers(require(j, "kappa", path), path + ".kappa");
  c.grid.nu = numbers(require(j, "nu", path), path + ".nu");
  c.grid.q0_over_m = numbers(require(j, "q0_over_m", path), path + ".q0_over_m");
  if (const Json* v = find(j, "paths_per_cell")) c.grid.paths_per_cell = count(*v, path + ".paths_per_cell");
  if (auto a = opt_number(j, "a", path)) c.grid.a = *a;
  if (const Json* v = find(j, "measure")) {
    try {
      c.grid.measure = measure_from_name(text(*v, path + ".measure"));
    } catch (const Error&) {
      config_error(path + ".measure", "expected \"midpoint\" or \"half_range\"");
    }
  }
  if (const Json* v = find(j, "seed")) c.grid.seed = count(*v, path + ".seed");
  c.target_delta = opt_number(j, "target_delta", path);
  if (!(c.grid.a > 0.0 && c.grid.a < 0.5)) config_error(path + ".a", "must lie in (0, 1/2)");
  return c;
}

Json to_json(const CalibrationConfig& c) {
  Json j{{"kappa", c.grid.kappa},
         {"nu", c.grid.nu},
         {"q0_over_m", c.grid.q0_over_m},
         {"paths_per_cell", c.grid.paths_per_cell},
         {"a", c.grid.a},
         {"measure", measure_name(c.grid.measure)},
         {"seed", c.grid.seed}};
  j["target_delta"] = c.target_delta ? Json(*c.target_delta) : Json(nullptr);
  return j;
}

const std::vector<std::string>& known_schedulers() {
  static const std::vector<std::string> names{"ac", "lqr", "lqr_clipped", "mpc", "dark", "twap", "vwap"};
  return names;
}

fs::path out_path(const ScenarioConfig& cfg, const std::string& file) {
  fs::create_directories(cfg.output_dir);
  return fs::path(cfg.output_dir) / file;
}

std::ofstream open_out(const ScenarioConfig& cfg, const std::string& file) {
  const fs::path p = out_path(cfg, file);
  std::ofstream os(p);
  if (!os) throw Error(ErrorCode::ConfigError, "config", "cannot write " + p.string());
  return os;
}

SimOptions sim_options(const ScenarioConfig& cfg) {
  SimOptions o;
  o.benchmark = cfg.benchmark;
  // Unconstrained LQR may round-trip through q < 0; that is reported, not fatal.
  o.overshoot_raises = false;
  return o;
}

// MPC play that keeps each bucket's plan.
class RecordingMpc final : public Scheduler {
public:
  RecordingMpc(const MarketSpec& spec, MpcConfig cfg) : mpc_(spec, std::move(cfg)) {}
  [[nodiscard]] std::string name() const override { return "mpc"; }
  SchedulerDecision decide(const ExecState& state, PathRng&) override {
    const MpcDecision d = mpc_.decide(state);
    Json rec{{"t", state.bucket}, {"u", d.rate}};
    rec["plan"] = std::vector<double>(d.plan.data(), d.plan.data() + d.plan.size());
    plans.push_back(std::move(rec));
    return {d.rate, std::nullopt};
  }
  void reset() override {
    mpc_.reset();
    plans = Json::array();
  }
  Json plans = Json::array();

private:
  MpcScheduler mpc_;
};

}  // namespace

ScenarioConfig scenario_from_json(const Json& j) {
  if (!j.is_object()) config_error("$", "expected an object");
  ScenarioConfig cfg;
  if (const Json* v = find(j, "name")) cfg.name = text(*v, "name");
  cfg.market = market_spec_from_json(require(j, "market", "$"), "market");
  cfg.kappa_from_vwap = opt_number(j, "kappa_from_vwap", "$");
  if (cfg.kappa_from_vwap) cfg.market.kappa = vwap_kappa(cfg.market, *cfg.kappa_from_vwap);
  cfg.price_model = find(j, "price_model")
                        ? price_model_from_json(j.at("price_model"), cfg.market, "price_model")
                        : PriceModel::from_spec(cfg.market);
  if (const Json* v = find(j, "benchmark")) {
    try {
      cfg.benchmark = benchmark_from_name(text(*v, "benchmark"));
    } catch (const Error&) {
      config_error("benchmark", "expected \"arrival\", \"vwap\" or \"twap\"");
    }
  }
  if (const Json* v = find(j, "schedulers")) {
    if (!v->is_array() || v->empty()) config_error("schedulers", "expected a non-empty array");
    cfg.schedulers.clear();
    for (std::size_t i = 0; i < v->size(); ++i) cfg.schedulers.push_back(text((*v)[i], "schedulers[" + std::to_string(i) + "]"));
  }
  if (const Json* v = find(j, "lqr")) {
    if (const Json* h = find(*v, "hard")) {
      const std::string mode = text(*h, "lqr.hard");
      if (mode == "exact") cfg.lqr.hard = HardTerminal::exact;
      else if (mode == "surrogate") cfg.lqr.hard = HardTerminal::surrogate;
      else config_error("lqr.hard", "expected \"exact\" or \"surrogate\"");
    }
    if (auto s = opt_number(*v, "surrogate_scale", "lqr")) cfg.lqr.surrogate_scale = *s;
  }
  if (const Json* v = find(j, "mpc")) cfg.mpc = mpc_from_json(*v, "mpc");
  if (const Json* v = find(j, "dark")) cfg.dark = dark_from_json(*v, cfg.market.n, "dark");
  if (const Json* v = find(j, "calibration")) cfg.calibration = calibration_from_json(*v, "calibration");
  if (const Json* v = find(j, "n_paths")) cfg.n_paths = count(*v, "n_paths");
  if (const Json* v = find(j, "seed")) cfg.seed = count(*v, "seed");
  if (const Json* v = find(j, "output_dir")) cfg.output_dir = text(*v, "output_dir");
  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::ConfigError, "config", "cannot open " + path);
  Json j;
  try {
    is >> j;
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, "config", path + ": " + e.what());
  }
  return scenario_from_json(j);
}

Json to_json(const ScenarioConfig& cfg) {
  Json j;
  j["name"] = cfg.name;
  j["market"] = to_json(cfg.market);
  j["kappa_from_vwap"] = cfg.kappa_from_vwap ? Json(*cfg.kappa_from_vwap) : Json(nullptr);
  j["price_model"] = to_json(cfg.price_model);
  j["benchmark"] = benchmark_name(cfg.benchmark);
  j["schedulers"] = cfg.schedulers;
  j["lqr"] = Json{{"hard", cfg.lqr.hard == HardTerminal::exact ? "exact" : "surrogate"},
                  {"surrogate_scale", cfg.lqr.surrogate_scale}};
  j["mpc"] = to_json(cfg.mpc);
  j["dark"] = cfg.dark ? to_json(*cfg.dark) : Json(nullptr);
  j["calibration"] = cfg.calibration ? to_json(*cfg.calibration) : Json(nullptr);
  j["n_paths"] = cfg.n_paths;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  return j;
}

void validate(const ScenarioConfig& cfg, bool need_calibration) {
  for (std::size_t i = 0; i < cfg.schedulers.size(); ++i) {
    const auto& s = cfg.schedulers[i];
    const auto& known = known_schedulers();
    if (std::find(known.begin(), known.end(), s) == known.end()) {
      config_error("schedulers[" + std::to_string(i) + "]", "unknown scheduler '" + s + "'");
    }
    if (s == "dark" && !cfg.dark) config_error("dark", "required by scheduler 'dark'");
  }
  if (need_calibration && !cfg.calibration) config_error("calibration", "missing");
  if (cfg.n_paths == 0) config_error("n_paths", "must be positive");
  if (cfg.output_dir.empty()) config_error("output_dir", "must not be empty");
  validate(cfg.market);
  validate(cfg.market, cfg.price_model);
  if (cfg.dark) validate(cfg.market, *cfg.dark);
}

std::unique_ptr<Scheduler> make_scheduler(const ScenarioConfig& cfg, const std::string& name) {
  if (name == "ac") return make_ac_scheduler(cfg.market, cfg.lqr);
  if (name == "lqr") return std::make_unique<LqrScheduler>(build_policy(cfg.market, cfg.lqr), false, "lqr");
  if (name == "lqr_clipped") return make_clipped_lqr(cfg.market, cfg.lqr);
  if (name == "mpc") return std::make_unique<MpcPlayer>(cfg.market, cfg.mpc);
  if (name == "dark") {
    if (!cfg.dark) config_error("dark", "required by scheduler 'dark'");
    return std::make_unique<DarkPlayer>(cfg.market, *cfg.dark, cfg.mpc);
  }
  if (name == "twap") return std::make_unique<FixedCurve>(twap_curve(cfg.market), "twap");
  if (name == "vwap") return std::make_unique<FixedCurve>(vwap_curve(cfg.market), "vwap");
  config_error("schedulers", "unknown scheduler '" + name + "'");
}

SchedulerStats evaluate_scheduler(const ScenarioConfig& cfg, const std::string& name,
                                  unsigned threads) {
  const std::size_t n = cfg.n_paths;
  std::vector<double> qT(n), umin(n), neg(n), zero(n), dark(n);
  // Build the policy once; each worker gets its own copy.
  std::unique_ptr<Scheduler> proto = make_scheduler(cfg, name);
  std::function<std::unique_ptr<Scheduler>()> make = [&] { return make_scheduler(cfg, name); };
  if (dynamic_cast<LqrScheduler*>(proto.get())) {
    std::shared_ptr<const LqrScheduler> shared(static_cast<LqrScheduler*>(proto.release()));
    make = [shared] { return std::make_unique<LqrScheduler>(*shared); };
  }
  SchedulerStats st;
  st.name = name;
  st.summary = run_paths(cfg.market, make, cfg.price_model, n, cfg.seed, sim_options(cfg), threads,
                         [&](std::size_t i, const ExecutionTrace& tr) {
                           qT[i] = tr.q_T;
                           double lo = std::numeric_limits<double>::infinity(), nn = 0, zz = 0, dk = 0;
                           for (const auto& r : tr.buckets) {
                             lo = std::min(lo, r.u);
                             nn += r.u < -1e-12;
                             zz += std::abs(r.u) <= 1e-12;
                             dk += r.dark_qty / cfg.market.q0;
                           }
                           const double b = static_cast<double>(tr.buckets.size());
                           umin[i] = lo;
                           neg[i] = nn / b;
                           zero[i] = zz / b;
                           dark[i] = dk;
                         });
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    st.q_T_mean += qT[i] / dn;
    st.frac_negative += neg[i] / dn;
    st.frac_zero += zero[i] / dn;
    st.dark_fraction += dark[i] / dn;
  }
  st.u_min = *std::min_element(umin.begin(), umin.end());
  return st;
}

void run_scenario(const ScenarioConfig& cfg, std::ostream& log) {
  validate(cfg);
  {
    std::ofstream os = open_out(cfg, "policy_lqr.csv");
    write_policy_csv(os, build_policy(cfg.market, cfg.lqr));
  }
  for (const auto& name : cfg.schedulers) {
    std::unique_ptr<Scheduler> sched;
    RecordingMpc* rec = nullptr;
    if (name == "mpc") {
      auto r = std::make_unique<RecordingMpc>(cfg.market, cfg.mpc);
      rec = r.get();
      sched = std::move(r);
    } else {
      sched = make_scheduler(cfg, name);
    }
    const ExecutionTrace tr = simulate(cfg.market, *sched, cfg.price_model, cfg.seed, 0, sim_options(cfg));
    {
      std::ofstream os = open_out(cfg, "trace_" + name + ".csv");
      write_trace_csv(os, tr);
    }
    if (rec) {
      std::ofstream os = open_out(cfg, "plans_" + name + ".json");
      os << rec->plans.dump(1) << '\n';
    }
    const SchedulerStats st = cfg.n_paths > 1 ? evaluate_scheduler(cfg, name) : SchedulerStats{};
    const McSummary summary = cfg.n_paths > 1 ? st.summary : McSummary{tr.total_cost, 0.0, 0.0, std::abs(tr.q_T), 1, cfg.seed, {tr.total_cost}};
    {
      std::ofstream os = open_out(cfg, "summary_" + name + ".json");
      write_summary_json(os, summary);
    }
    log << cfg.name << ' ' << name << ": mean_cost=" << summary.mean_cost << " std=" << summary.std
        << " q_T_max=" << summary.q_T_max << " paths=" << summary.n_paths;
    if (tr.overshoot_bucket) log << " overshoot_at=" << *tr.overshoot_bucket;
    log << '\n';
  }
}

std::vector<SchedulerStats> compare_schedulers(const ScenarioConfig& cfg,
                                               const std::vector<std::string>& names,
                                               std::ostream& log) {
  validate(cfg);
  ScenarioConfig probe = cfg;
  probe.schedulers = names;
  validate(probe);
  std::vector<SchedulerStats> rows;
  for (const auto& n : names) rows.push_back(evaluate_scheduler(cfg, n));

  std::ofstream csv = open_out(cfg, "compare.csv");
  csv << std::setprecision(17);
  csv << "scheduler,mean_cost,std,std_error,q_T_mean,q_T_max,u_min,frac_negative_u,frac_zero_u,dark_fraction\n";
  log << std::left << std::setw(12) << "scheduler" << std::right << std::setw(14) << "mean_cost"
      << std::setw(14) << "std" << std::setw(14) << "q_T_max" << std::setw(14) << "u_min"
      << std::setw(9) << "neg_u" << std::setw(9) << "zero_u" << std::setw(9) << "dark" << '\n';
  for (const auto& r : rows) {
    csv << r.name << ',' << r.summary.mean_cost << ',' << r.summary.std << ',' << r.summary.std_error
        << ',' << r.q_T_mean << ',' << r.summary.q_T_max << ',' << r.u_min << ',' << r.frac_negative
        << ',' << r.frac_zero << ',' << r.dark_fraction << '\n';
    log << std::left << std::setw(12) << r.name << std::right << std::setprecision(6)
        << std::setw(14) << r.summary.mean_cost << std::setw(14) << r.summary.std << std::setw(14)
        << r.summary.q_T_max << std::setw(14) << r.u_min << std::setprecision(3) << std::setw(9)
        << r.frac_negative << std::setw(9) << r.frac_zero << std::setw(9) << r.dark_fraction << '\n';
  }
  return rows;
}

KappaRegression calibrate_scenario(const ScenarioConfig& cfg, std::ostream& log) {
  validate(cfg, true);
  const CalibrationConfig& cal = *cfg.calibration;
  std::vector<DesignCell> cells;
  MarketSpec base = cfg.market;
  base.kappa.assign(base.n, 0.0);
  const KappaRegression reg = fit_kappa_regression(base, cfg.price_model, cal.grid, &cells);
  {
    std::ofstream os = open_out(cfg, "regression.json");
    write_regression_json(os, reg);
  }
  {
    std::ofstream os = open_out(cfg, "cells.csv");
    os << std::setprecision(17) << "kappa,nu,q0_over_m,delta\n";
    for (const auto& c : cells) os << c.kappa << ',' << c.nu << ',' << c.q0_over_m << ',' << c.delta << '\n';
  }
  for (const auto& w : reg.warnings) log << "warning: " << w << '\n';
  log << cfg.name << " calibrate (" << measure_name(cal.grid.measure) << "): b0=" << reg.b[0]
      << " b1=" << reg.b[1] << " b2=" << reg.b[2] << " b3=" << reg.b[3] << " r2=" << reg.r2
      << " n_cells=" << reg.n_cells << '\n';
  if (cal.target_delta) {
    const double r = cfg.market.q0 / expected_volume(cfg.market);
    const double kappa = invert_for_kappa(reg, *cal.target_delta, 1.0, r, cfg.market.dt);
    log << "kappa for delta=" << *cal.target_delta << ": " << kappa << '\n';
  }
  return reg;
}

void dump_policies(const ScenarioConfig& cfg, std::ostream& log) {
  validate(cfg);
  {
    std::ofstream os = open_out(cfg, "policy_lqr.csv");
    write_policy_csv(os, build_policy(cfg.market, cfg.lqr));
  }
  {
    const ContinuousSpec cs = ContinuousSpec::from_market(cfg.market, 0);
    const ContinuousPolicy pol = integrate_riccati(cs);
    std::vector<double> t;
    std::vector<Gains> g;
    const std::size_t stride = std::max<std::size_t>(1, (pol.t.size() - 1) / 1000);
    for (std::size_t i = 0; i < pol.t.size(); i += stride) {
      t.push_back(pol.t[i]);
      g.push_back({pol.k[i](0), pol.k[i](1)});
    }
    std::ofstream os = open_out(cfg, "gains_continuous.csv");
    write_gains_csv(os, t, g);
  }
  if (cfg.dark) {
    const double avg_u = average_lit_rate(cfg.market, *cfg.dark, 0, 1.0);
    std::ofstream os = open_out(cfg, "policy_dark.csv");
    write_dark_policy_csv(os, build_dark_policy(cfg.market, *cfg.dark, 0, avg_u));
  }
  log << cfg.name << " policy-dump: " << cfg.output_dir << '\n';
}

}  // namespace optexec
