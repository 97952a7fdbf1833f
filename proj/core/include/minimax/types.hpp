#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace minimax {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Configuration problem: bad parameters, incompatible solver/problem combos.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An oracle produced a non-finite value, or an iterate left the representable
/// range. Carries the offending point when it is known.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
  NumericError(const std::string& what, Vec x, Vec y)
      : std::runtime_error(what), x_(std::move(x)), y_(std::move(y)) {}

  const std::optional<Vec>& point_x() const { return x_; }
  const std::optional<Vec>& point_y() const { return y_; }

private:
  std::optional<Vec> x_;
  std::optional<Vec> y_;
};

/// Backtracking exhausted max_backtracks without satisfying the acceptance
/// condition. Keeps the last trial so callers can report where it got stuck.
class LineSearchError : public std::runtime_error {
public:
  LineSearchError(const std::string& what, double last_step, double last_value,
                  int trials)
      : std::runtime_error(what), last_step_(last_step),
        last_value_(last_value), trials_(trials) {}

  double last_step() const { return last_step_; }
  double last_value() const { return last_value_; }
  int trials() const { return trials_; }

private:
  double last_step_;
  double last_value_;
  int trials_;
};

/// An iterative subroutine (e.g. the inner maximization) ran out of its
/// iteration budget before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const { return residual_; }

private:
  double residual_;
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }

/// A primal/dual iterate pair (x, y). Lengths are fixed at construction and
/// entries must be finite.
struct JointPoint {
  Vec x;
  Vec y;

  JointPoint() = default;
  JointPoint(Vec x_in, Vec y_in) : x(std::move(x_in)), y(std::move(y_in)) {
    if (x.size() < 1 || y.size() < 1)
      throw ConfigError("JointPoint: both blocks must be nonempty");
    if (!all_finite(x) || !all_finite(y))
      throw NumericError("JointPoint: non-finite entry", x, y);
  }

  Eigen::Index dim_x() const { return x.size(); }
  Eigen::Index dim_y() const { return y.size(); }
};

/// Work counters for one solver run. Charging policy:
///   - one merit evaluation (objective value plus the y-gradient it needs)
///     adds 1 to f_evals,
///   - one gradient evaluation, full or a single partial block, adds 1 to
///     g_evals,
///   - one y-direction second-derivative action adds 1 to hvp_evals.
/// Counters never decrease and are never reset within a run.
struct EvalCounters {
  std::int64_t f_evals = 0;
  std::int64_t g_evals = 0;
  std::int64_t hvp_evals = 0;
  double wall_time = 0.0;
};

/// Parameters shared by all backtracking searches.
///
/// tau is the Zhang-Hager mixing weight used for every iteration; tau == 1
/// recovers the classic monotone Armijo rule.
struct LineSearchConfig {
  double alpha = 0.5;
  double gamma_x = 1e-12;
  double gamma_y = 1e-5;
  double tau = 1e-3;
  double eta_min_x = 1e-6;
  double eta_max_x = 1e6;
  double eta_min_y = 1e-6;
  double eta_max_y = 1e6;
  double eta_init_x = 1.0;
  double eta_init_y = 1.0;
  int max_backtracks = 60;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw ConfigError("LineSearchConfig: alpha must lie in (0,1)");
    if (!(gamma_x >= 0.0 && gamma_x < gamma_y && gamma_y < 1.0))
      throw ConfigError("LineSearchConfig: need 0 <= gamma_x < gamma_y < 1");
    if (!(tau > 0.0 && tau <= 1.0))
      throw ConfigError("LineSearchConfig: tau must lie in (0,1]");
    if (!(eta_min_x > 0.0 && eta_min_x < eta_max_x) ||
        !(eta_min_y > 0.0 && eta_min_y < eta_max_y))
      throw ConfigError("LineSearchConfig: need 0 < eta_min < eta_max");
    if (!(eta_init_x > 0.0) || !(eta_init_y > 0.0))
      throw ConfigError("LineSearchConfig: initial steps must be positive");
    if (max_backtracks < 1)
      throw ConfigError("LineSearchConfig: max_backtracks must be >= 1");
  }
};

/// Termination rule: stop once ||grad f(x_k, y_k)|| <= grad_tol, or when the
/// iteration/time budget runs out.
struct StopRule {
  double grad_tol = 1e-7;
  std::int64_t max_iters = 100000;
  std::optional<double> max_wall_time;

  void validate() const {
    if (!(grad_tol > 0.0)) throw ConfigError("StopRule: grad_tol must be > 0");
    if (max_iters < 1) throw ConfigError("StopRule: max_iters must be >= 1");
    if (max_wall_time && !(*max_wall_time > 0.0))
      throw ConfigError("StopRule: max_wall_time must be > 0");
  }
};

/// Weighted merit average H_{k+1} = (1 - tau_k) H_k + tau_k h_new.
/// The result always lies between the two inputs.
inline double zh_average(double h_prev, double h_new, double tau_k) {
  if (!(tau_k > 0.0 && tau_k <= 1.0))
    throw ConfigError("zh_average: tau_k must lie in (0,1]");
  if (!std::isfinite(h_prev) || !std::isfinite(h_new))
    throw NumericError("zh_average: non-finite merit value");
  return (1.0 - tau_k) * h_prev + tau_k * h_new;
}

}  // namespace minimax
