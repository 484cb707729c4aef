#pragma once

// Desk-scale parameter sets shared by unit and acceptance tests.

#include <cmath>

#include "optexec/core.hpp"
#include "optexec/darkpool.hpp"

namespace scenario {

/// One trading day in n buckets: 1e5 shares against 5e6 shares per day.
inline optexec::MarketSpec desk(std::size_t n = 50, double kappa = 0.3,
                                optexec::TerminalPenalty beta_T = optexec::TerminalPenalty::hard()) {
  const double dt = 1.0 / static_cast<double>(n);
  return optexec::MarketSpec::constant(n, dt, 1e5, 5e6, 0.05, 2e-8, 2e-4, 0.02 * std::sqrt(dt),
                                       kappa, 0.0, 1e-3, beta_T);
}

/// Dark venue with lambda dt = 1/30, half the remainder offered, light
/// adverse selection and an almost free terminal.
inline optexec::DarkSpec desk_dark(const optexec::MarketSpec& spec, double frac_a = 0.5) {
  return optexec::DarkSpec::constant(spec.n, 1.0 / (30.0 * spec.dt),
                                     0.01 * spec.eta[0] / spec.v[0], 0.0, 1e-6, frac_a);
}

}  // namespace scenario
