#pragma once

// Backward integration of the 6-dimensional Riccati state
// y = (P11, P12, P22, b1, b2, e) in time-to-go tau = T - t with classical
// RK4 on a fixed grid. Steps whose stiffness estimate exceeds the explicit
// stability region are split into equal substeps.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "optexec/error.hpp"

namespace optexec::detail {

using Riccati6 = Eigen::Matrix<double, 6, 1>;

/// `rhs(t, y)` returns dy/dtau at calendar time t; `stiffness(y)` bounds the
/// Jacobian norm. Returns the N+1 node values ordered by calendar time, so
/// out[i] is the state at t_i = i T / N.
template <class Rhs, class Stiffness>
std::vector<Riccati6> integrate_backward(Rhs&& rhs, Stiffness&& stiffness, const Riccati6& y_T,
                                         double T, std::size_t N, const char* module,
                                         double guard) {
  if (N == 0) throw Error(ErrorCode::InvalidParameter, module, "grid_n must be positive");
  std::vector<Riccati6> out(N + 1);
  out[N] = y_T;
  Riccati6 y = y_T;
  const double h = T / static_cast<double>(N);
  for (std::size_t i = N; i-- > 0;) {
    const double t_hi = static_cast<double>(i + 1) * h;
    const double lam = stiffness(y);
    const std::size_t m = lam * h > 2.0 ? static_cast<std::size_t>(std::ceil(lam * h / 2.0)) : 1;
    const double hs = h / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double t = t_hi - static_cast<double>(j) * hs;  // tau increases as t decreases
      const Riccati6 k1 = rhs(t, y);
      const Riccati6 k2 = rhs(t - 0.5 * hs, (y + 0.5 * hs * k1).eval());
      const Riccati6 k3 = rhs(t - 0.5 * hs, (y + 0.5 * hs * k2).eval());
      const Riccati6 k4 = rhs(t - hs, (y + hs * k3).eval());
      y += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!y.allFinite() || y.head<3>().cwiseAbs().maxCoeff() > guard) {
      throw Error(ErrorCode::StepBlowup, module,
                  "Riccati state left the overflow guard at t = " +
                      std::to_string(static_cast<double>(i) * h),
                  i);
    }
    out[i] = y;
  }
  return out;
}

}  // namespace optexec::detail
