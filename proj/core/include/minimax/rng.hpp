#pragma once

#include "minimax/types.hpp"

#include <cstdint>
#include <string_view>

namespace minimax {

/// Deterministic 64-bit generator (splitmix64) with a Box-Muller normal
/// transform. The same seed yields the same stream on every run; no global
/// state is involved.
class SeededRng {
public:
  static constexpr std::string_view kAlgorithm = "splitmix64/box-muller";

  explicit SeededRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t seed_state() const { return state_; }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1).
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal draw via Box-Muller; draws are produced in pairs and the
  /// spare is cached.
  double next_normal();

  /// Uniform on [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_uniform();
  }

private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// len i.i.d. standard normal draws. len must be >= 1.
Vec standard_normal_vector(SeededRng& rng, Eigen::Index len);

}  // namespace minimax
