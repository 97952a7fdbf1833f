#pragma once

#include "minimax/oracle.hpp"
#include "minimax/types.hpp"

namespace minimax {

/// Result of one backtracking search. step is eta_init * alpha^j for the
/// smallest j >= 0 that satisfies the acceptance condition; trial_count is
/// j + 1. accepted keeps the merit bundle at the accepted point so callers
/// can reuse the objective value and y-gradient there.
struct SearchOutcome {
  double step = 0.0;
  int trial_count = 0;
  MeritBundle accepted;

  double accepted_value() const { return accepted.h; }
};

/// Optional cap on the y-gradient at trial points:
///   ||grad_y f(trial)||^2 <= gamma_sq - slope * eta.
struct GradClamp {
  double gamma_sq;
  double slope = 0.0;
};

/// Ascent search in y: largest eta in {eta_init * alpha^j} with
///   h_beta(x, y + eta * grad_y_f) <= threshold - decrease_coeff * eta *
///   ||grad_y_f||^2.
/// Each trial charges one f_eval. Throws LineSearchError after
/// cfg.max_backtracks failed trials.
SearchOutcome search_y(RegularizedObjective& reg, const Vec& x, const Vec& y,
                       const Vec& grad_y_f, double threshold,
                       double decrease_coeff, double eta_init,
                       const LineSearchConfig& cfg,
                       const GradClamp* clamp = nullptr);

/// Descent search in x at the half-point (x, y_next): largest eta with
///   h_beta(x + eta * d_x, y_next) <= threshold - y_decrease_term
///                                    - x_decrease_coeff * eta * ||grad_x_f||^2.
/// y_decrease_term carries the already-earned y-stage decrease.
SearchOutcome search_x(RegularizedObjective& reg, const Vec& x,
                       const Vec& y_next, const Vec& d_x, const Vec& grad_x_f,
                       double threshold, double y_decrease_term,
                       double x_decrease_coeff, double eta_init,
                       const LineSearchConfig& cfg,
                       const GradClamp* clamp = nullptr);

}  // namespace minimax
