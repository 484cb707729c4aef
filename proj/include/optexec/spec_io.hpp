#pragma once

// JSON mapping for MarketSpec. Field names match the struct; `beta_T`
// accepts a number or the string "hard". Per-bucket fields may be given as
// an array of length n or a scalar (broadcast); they are always written back
// as arrays.

#include <string>

#include "json.hpp"
#include "optexec/core.hpp"

namespace optexec {

using Json = nlohmann::json;

/// Throws Error(ConfigError) naming the offending field, prefixed by `path`.
[[nodiscard]] MarketSpec market_spec_from_json(const Json& j, const std::string& path = "market");
[[nodiscard]] Json to_json(const MarketSpec& spec);

[[nodiscard]] TerminalPenalty terminal_penalty_from_json(const Json& j, const std::string& path);
[[nodiscard]] Json to_json(TerminalPenalty penalty);

/// Reads a per-bucket array field: array of length n, scalar, or
/// {"profile": "flat" | "u_shaped", "mean": x}.
[[nodiscard]] std::vector<double> bucket_array_from_json(const Json& j, std::size_t n,
                                                         const std::string& path);

/// U-shaped intraday volume profile with the given mean; symmetric
/// quadratic in bucket time, twice as heavy at the edges as at mid-day.
[[nodiscard]] std::vector<double> u_shaped_profile(std::size_t n, double mean);

}  // namespace optexec
