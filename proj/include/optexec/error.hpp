#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace optexec {

enum class ErrorCode {
  // core
  NonPositiveVolume,
  KappaDtTooLarge,
  LengthMismatch,
  InvalidParameter,
  // lqr / darkpool
  DegenerateGt,
  DegenerateGD,
  LambdaZero,
  // qp
  Infeasible,
  MaxIterations,
  NotConvex,
  // continuous
  StepBlowup,
  ZetaPole,
  // sim
  Overshoot,
  SchedulerError,
  // calib
  DegenerateDesign,
  ZeroSlope,
  // cli
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Error raised by every module. `module()` names the origin ("core", "qp",
/// ...) and `index()` carries the offending bucket or array index when one
/// exists.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string module, std::string detail,
        std::optional<std::size_t> index = std::nullopt);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] const std::string& module() const noexcept { return module_; }
  [[nodiscard]] std::optional<std::size_t> index() const noexcept { return index_; }

private:
  ErrorCode code_;
  std::string module_;
  std::optional<std::size_t> index_;
};

}  // namespace optexec
