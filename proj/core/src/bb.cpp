#include "minimax/bb.hpp"

#include <cmath>

namespace minimax {

namespace {
constexpr double kDegenerate = 1e-30;
}

double bb_step(const Vec& u, const Vec& v, BbVariant variant, double eta_min,
               double eta_max) {
  if (u.size() != v.size())
    throw ConfigError("bb_step: u and v must have equal length");
  if (!(eta_min < eta_max) || !(eta_min > 0.0))
    throw ConfigError("bb_step: need 0 < eta_min < eta_max");

  double quotient;
  if (variant == BbVariant::BB1) {
    const double den = std::abs(u.dot(v));
    if (den < kDegenerate) return eta_max;
    quotient = u.squaredNorm() / den;
  } else {
    const double den = v.squaredNorm();
    if (den < kDegenerate) return eta_max;
    quotient = std::abs(u.dot(v)) / den;
  }
  if (!std::isfinite(quotient)) return eta_max;
  return std::min(eta_max, std::max(quotient, eta_min));
}

std::pair<double, double> bb_pair_for_iteration(
    BbMemory& mem, const JointPoint& z_k, const Vec& grad_y_zk,
    const Vec& grad_x_half, BbVariant variant, const BbBounds& bounds_y,
    const BbBounds& bounds_x) {
  const double eta_y = mem.eta_y(z_k.y, grad_y_zk, variant, bounds_y);
  const double eta_x = mem.eta_x(z_k.x, grad_x_half, variant, bounds_x);
  mem.store(z_k.x, z_k.y, grad_y_zk, grad_x_half);
  return {eta_y, eta_x};
}

}  // namespace minimax
