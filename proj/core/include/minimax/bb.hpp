#pragma once

#include "minimax/types.hpp"

#include <utility>

namespace minimax {

enum class BbVariant { BB1, BB2 };

/// Barzilai-Borwein quotient from an iterate difference u and gradient
/// difference v, clipped to [eta_min, eta_max]:
///   BB1 = ||u||^2 / |<u, v>|,   BB2 = |<u, v>| / ||v||^2.
/// Denominators below 1e-30 yield eta_max.
double bb_step(const Vec& u, const Vec& v, BbVariant variant, double eta_min,
               double eta_max);

/// Clip bounds for one axis.
struct BbBounds {
  double eta_min = 1e-6;
  double eta_max = 1e6;
};

/// State carried between iterations of the alternating GDA scheme:
///   u_y = y_k - y_{k-1},  v_y = grad_y f(z_k) - grad_y f(z_{k-1}),
///   u_x = x_k - x_{k-1},  v_x = grad_x f(x_k, y_{k+1}) - grad_x f(x_{k-1}, y_k).
/// The x-axis gradients are the half-point gradients the scheme evaluates
/// anyway, so forming v_x costs no extra oracle work. Until the first store
/// the memory is invalid and both initial steps are eta_max.
class BbMemory {
public:
  bool valid() const { return valid_; }

  double eta_y(const Vec& y_k, const Vec& grad_y_zk, BbVariant variant,
               const BbBounds& b) const {
    if (!valid_) return b.eta_max;
    return bb_step(y_k - prev_y_, grad_y_zk - prev_grad_y_, variant, b.eta_min,
                   b.eta_max);
  }

  double eta_x(const Vec& x_k, const Vec& grad_x_half, BbVariant variant,
               const BbBounds& b) const {
    if (!valid_) return b.eta_max;
    return bb_step(x_k - prev_x_, grad_x_half - prev_grad_x_half_, variant,
                   b.eta_min, b.eta_max);
  }

  void store(const Vec& x_k, const Vec& y_k, const Vec& grad_y_zk,
             const Vec& grad_x_half) {
    prev_x_ = x_k;
    prev_y_ = y_k;
    prev_grad_y_ = grad_y_zk;
    prev_grad_x_half_ = grad_x_half;
    valid_ = true;
  }

private:
  Vec prev_x_;
  Vec prev_y_;
  Vec prev_grad_y_;
  Vec prev_grad_x_half_;
  bool valid_ = false;
};

/// Both initial steps for iteration k, then updates the memory. Returns
/// (eta_max, eta_max) at k = 0 (invalid memory).
std::pair<double, double> bb_pair_for_iteration(
    BbMemory& mem, const JointPoint& z_k, const Vec& grad_y_zk,
    const Vec& grad_x_half, BbVariant variant, const BbBounds& bounds_y,
    const BbBounds& bounds_x);

}  // namespace minimax
