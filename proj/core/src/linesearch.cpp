#include "minimax/linesearch.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace minimax {

namespace {

// Shared backtracking core. Accepts the first eta = eta_init * alpha^j with
//   h(trial(eta)) <= threshold - fixed_term - slope_coeff * eta * grad_sq
// plus the optional gradient clamp on the trial point. The comparison allows
// rounding slack: near stationarity the required decrease drops below the
// resolution of h and an exact test would drive eta to a bitwise fixed point.
SearchOutcome backtrack(
    const std::function<MeritBundle(double)>& trial, double threshold,
    double fixed_term, double slope_coeff, double grad_sq, double eta_init,
    const LineSearchConfig& cfg, const GradClamp* clamp, const char* stage) {
  const double slack = 16.0 * std::numeric_limits<double>::epsilon() *
                       (1.0 + std::abs(threshold));
  double eta = eta_init;
  MeritBundle last{};
  for (int j = 0; j < cfg.max_backtracks; ++j) {
    last = trial(eta);
    const double required =
        threshold - fixed_term - slope_coeff * eta * grad_sq;
    bool ok = last.h <= required + slack;
    if (ok && clamp)
      ok = last.grad_y_sq <= clamp->gamma_sq - clamp->slope * eta;
    if (ok) return {eta, j + 1, std::move(last)};
    eta *= cfg.alpha;
  }
  throw LineSearchError(std::string(stage) +
                            " line search exhausted max_backtracks",
                        eta / cfg.alpha, last.h, cfg.max_backtracks);
}

}  // namespace

SearchOutcome search_y(RegularizedObjective& reg, const Vec& x, const Vec& y,
                       const Vec& grad_y_f, double threshold,
                       double decrease_coeff, double eta_init,
                       const LineSearchConfig& cfg, const GradClamp* clamp) {
  const double grad_sq = grad_y_f.squaredNorm();
  return backtrack(
      [&](double eta) { return reg.value_bundle(x, y + eta * grad_y_f); },
      threshold, 0.0, decrease_coeff, grad_sq, eta_init, cfg, clamp, "y");
}

SearchOutcome search_x(RegularizedObjective& reg, const Vec& x,
                       const Vec& y_next, const Vec& d_x, const Vec& grad_x_f,
                       double threshold, double y_decrease_term,
                       double x_decrease_coeff, double eta_init,
                       const LineSearchConfig& cfg, const GradClamp* clamp) {
  const double grad_sq = grad_x_f.squaredNorm();
  return backtrack(
      [&](double eta) { return reg.value_bundle(x + eta * d_x, y_next); },
      threshold, y_decrease_term, x_decrease_coeff, grad_sq, eta_init, cfg,
      clamp, "x");
}

}  // namespace minimax
