#pragma once

// Reproducible per-path random streams. Path i of a run seeded with `seed`
// draws the same numbers regardless of how paths are scheduled.

#include <cstdint>
#include <random>

namespace optexec {

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Mixes (seed, stream) into an independent 64-bit engine seed.
[[nodiscard]] std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

class PathRng {
public:
  PathRng(std::uint64_t seed, std::uint64_t path);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  bool bernoulli(double p) { return uniform() < p; }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace optexec
