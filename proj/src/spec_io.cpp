#include "optexec/spec_io.hpp"

#include <numeric>

namespace optexec {

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigError, "config", "field '" + path + "': " + what);
}

const Json& require(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) config_error(path + "." + key, "missing");
  return j.at(key);
}

double number_at(const Json& j, const char* key, const std::string& path) {
  const Json& v = require(j, key, path);
  if (!v.is_number()) config_error(path + "." + key, "expected a number");
  return v.get<double>();
}

}  // namespace

std::vector<double> u_shaped_profile(std::size_t n, double mean) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(n) - 0.5;
    out[i] = 1.0 + 4.0 * x * x;  // 1 at mid-day, 2 at the edges
  }
  const double avg = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(n);
  for (double& x : out) x *= mean / avg;
  return out;
}

std::vector<double> bucket_array_from_json(const Json& j, std::size_t n, const std::string& path) {
  if (j.is_number()) return std::vector<double>(n, j.get<double>());
  if (j.is_array()) {
    if (j.size() != n)
      config_error(path, "array has length " + std::to_string(j.size()) + ", expected " +
                             std::to_string(n));
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!j[i].is_number()) config_error(path + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(j[i].get<double>());
    }
    return out;
  }
  if (j.is_object() && j.contains("profile")) {
    const std::string kind = j.at("profile").get<std::string>();
    const double mean = number_at(j, "mean", path);
    if (kind == "flat") return std::vector<double>(n, mean);
    if (kind == "u_shaped") return u_shaped_profile(n, mean);
    config_error(path + ".profile", "unknown profile '" + kind + "'");
  }
  config_error(path, "expected an array, a number or a profile object");
}

TerminalPenalty terminal_penalty_from_json(const Json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "hard") return TerminalPenalty::hard();
    config_error(path, "expected a number or \"hard\"");
  }
  if (!j.is_number()) config_error(path, "expected a number or \"hard\"");
  return TerminalPenalty(j.get<double>());
}

Json to_json(TerminalPenalty penalty) {
  if (penalty.is_hard()) return "hard";
  return penalty.value();
}

MarketSpec market_spec_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) config_error(path, "expected an object");
  MarketSpec spec;
  const Json& n = require(j, "n", path);
  if (!n.is_number_integer() || n.get<long long>() <= 0) config_error(path + ".n", "expected a positive integer");
  spec.n = n.get<std::size_t>();
  spec.dt = number_at(j, "dt", path);
  spec.q0 = number_at(j, "q0", path);
  if (j.contains("side")) {
    const std::string side = j.at("side").get<std::string>();
    if (side == "buy") spec.side = Side::buy;
    else if (side == "sell") spec.side = Side::sell;
    else config_error(path + ".side", "expected \"buy\" or \"sell\"");
  }
  const auto arr = [&](const char* key) {
    return bucket_array_from_json(require(j, key, path), spec.n, path + "." + key);
  };
  spec.v = arr("v");
  spec.eta = arr("eta");
  spec.mu = arr("mu");
  spec.s = arr("s");
  spec.sigma = arr("sigma");
  spec.kappa = arr("kappa");
  spec.alpha = arr("alpha");
  spec.beta = arr("beta");
  spec.beta_T = terminal_penalty_from_json(require(j, "beta_T", path), path + ".beta_T");
  if (j.contains("T")) {
    const double T = number_at(j, "T", path);
    if (std::abs(T - spec.horizon()) > 1e-9 * std::max(1.0, T))
      config_error(path + ".T", "does not equal n*dt");
  }
  return spec;
}

Json to_json(const MarketSpec& spec) {
  Json j;
  j["n"] = spec.n;
  j["dt"] = spec.dt;
  j["q0"] = spec.q0;
  j["side"] = spec.side == Side::buy ? "buy" : "sell";
  j["v"] = spec.v;
  j["eta"] = spec.eta;
  j["mu"] = spec.mu;
  j["s"] = spec.s;
  j["sigma"] = spec.sigma;
  j["kappa"] = spec.kappa;
  j["alpha"] = spec.alpha;
  j["beta"] = spec.beta;
  j["beta_T"] = to_json(spec.beta_T);
  return j;
}

}  // namespace optexec
