#include "minimax/rng.hpp"

#include <cmath>
#include <numbers>

namespace minimax {

double SeededRng::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 =
      (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

Vec standard_normal_vector(SeededRng& rng, Eigen::Index len) {
  if (len < 1)
    throw ConfigError("standard_normal_vector: len must be >= 1");
  Vec out(len);
  for (Eigen::Index i = 0; i < len; ++i) out[i] = rng.next_normal();
  return out;
}

}  // namespace minimax
