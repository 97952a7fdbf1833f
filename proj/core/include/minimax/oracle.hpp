#pragma once

#include "minimax/types.hpp"

#include <optional>
#include <utility>

namespace minimax {

/// Action of the second derivative of f along a y-direction v:
/// xy = d/dt grad_x f(x, y + t v) at t = 0, yy = d/dt grad_y f(x, y + t v).
struct SecondOrderAction {
  Vec xy;
  Vec yy;
};

struct FullGradient {
  Vec x;
  Vec y;

  double norm() const { return std::sqrt(x.squaredNorm() + y.squaredNorm()); }
};

struct ValueAndGradY {
  double value;
  Vec grad_y;
};

/// Contract for a smooth minimax objective f(x, y) that is mu-strongly
/// concave in y for some mu > 0 independent of x. Implementations must be
/// safe for concurrent read-only evaluation.
class ProblemOracle {
public:
  virtual ~ProblemOracle() = default;

  virtual Eigen::Index dim_x() const = 0;
  virtual Eigen::Index dim_y() const = 0;

  virtual double value(const Vec& x, const Vec& y) const = 0;
  virtual Vec grad_x(const Vec& x, const Vec& y) const = 0;
  virtual Vec grad_y(const Vec& x, const Vec& y) const = 0;

  /// Directional derivative of the full gradient along (0, v); v has the
  /// y-dimension and the action is linear in v.
  virtual SecondOrderAction y_dir_second(const Vec& x, const Vec& y,
                                         const Vec& v) const = 0;

  /// Strong-concavity modulus when known.
  virtual std::optional<double> mu_hint() const { return std::nullopt; }

  /// Fused evaluations; the defaults just chain the primitives, concrete
  /// problems override them to share intermediate work.
  virtual ValueAndGradY value_and_grad_y(const Vec& x, const Vec& y) const {
    return {value(x, y), grad_y(x, y)};
  }
  virtual FullGradient grad(const Vec& x, const Vec& y) const {
    return {grad_x(x, y), grad_y(x, y)};
  }
};

/// One merit evaluation: h = f + (beta/2)||grad_y f||^2 together with the
/// pieces it computed on the way. grad_y belongs to the trial point, so a
/// solver accepting the trial can reuse it without another oracle call.
struct MeritBundle {
  double h;
  double f;
  double grad_y_sq;
  Vec grad_y;
};

struct MeritGradient {
  Vec x;
  Vec y;

  double norm() const { return std::sqrt(x.squaredNorm() + y.squaredNorm()); }
};

/// The regularized objective h_beta paired with the run's work counters.
/// One instance is confined to a single solver run.
class RegularizedObjective {
public:
  RegularizedObjective(const ProblemOracle& oracle, double beta)
      : oracle_(&oracle), beta_(beta) {
    if (!(beta > 0.0)) throw ConfigError("RegularizedObjective: beta must be > 0");
  }

  const ProblemOracle& oracle() const { return *oracle_; }
  double beta() const { return beta_; }
  void set_beta(double beta) {
    if (!(beta > 0.0)) throw ConfigError("set_beta: beta must be > 0");
    beta_ = beta;
  }

  EvalCounters& counters() { return counters_; }
  const EvalCounters& counters() const { return counters_; }

  /// h_beta(x, y); charges one f_eval.
  double value(const Vec& x, const Vec& y) { return value_bundle(x, y).h; }
  double value(const JointPoint& z) { return value(z.x, z.y); }

  /// h_beta plus the objective value and y-gradient behind it; one f_eval.
  MeritBundle value_bundle(const Vec& x, const Vec& y);

  /// grad h_beta via the exact formulas
  ///   grad_x h = grad_x f + beta * (d^2_{xy} f) grad_y f,
  ///   grad_y h = grad_y f + beta * (d^2_{yy} f) grad_y f;
  /// charges one g_eval and one hvp_eval.
  MeritGradient grad(const Vec& x, const Vec& y);
  MeritGradient grad(const JointPoint& z) { return grad(z.x, z.y); }

private:
  const ProblemOracle* oracle_;
  double beta_;
  EvalCounters counters_;
};

/// Inner-maximization settings for the value-function oracle.
struct PhiOracleConfig {
  double inner_tol = 1e-11;
  std::int64_t inner_max_iters = 100000;
  bool warm_start = true;

  void validate() const {
    if (!(inner_tol > 0.0))
      throw ConfigError("PhiOracleConfig: inner_tol must be > 0");
    if (inner_max_iters < 1)
      throw ConfigError("PhiOracleConfig: inner_max_iters must be >= 1");
  }
};

/// High-accuracy oracle for the value function Phi(x) = max_y f(x, y) and its
/// gradient grad Phi(x) = grad_x f(x, y*(x)). The inner maximization runs
/// gradient ascent with Armijo backtracking, warm-started between calls.
class PhiOracle {
public:
  PhiOracle(const ProblemOracle& oracle, PhiOracleConfig cfg = {});

  /// Returns (Phi(x) approximation, y+ with ||grad_y f(x, y+)|| <= inner_tol).
  std::pair<double, Vec> eval(const Vec& x);

  /// grad Phi(x) by Danskin's theorem.
  Vec grad(const Vec& x);

private:
  const ProblemOracle* oracle_;
  PhiOracleConfig cfg_;
  std::optional<Vec> warm_;
};

std::pair<double, Vec> phi_eval(const ProblemOracle& oracle, const Vec& x,
                                const PhiOracleConfig& cfg = {});
Vec phi_grad(const ProblemOracle& oracle, const Vec& x,
             const PhiOracleConfig& cfg = {});

enum class DerivativeCheck { GradF, GradH, YDirSecond };

/// Compares an analytic derivative against central finite differences with
/// step eps^(1/3) * (1 + ||z||_inf) and returns the worst componentwise
/// relative error |a_i - fd_i| / (1 + |a_i|).
double fd_check(RegularizedObjective& reg, const JointPoint& z,
                DerivativeCheck which);

/// Same scheme for grad Phi against differences of phi_eval.
double fd_check_phi_grad(const ProblemOracle& oracle, const Vec& x,
                         const PhiOracleConfig& cfg = {});

/// Local surrogate for the Lipschitz modulus of grad f at z: the largest
/// second-derivative action over the y-coordinate directions and the
/// normalized y-gradient, inflated by 1.1.
double estimate_local_lipschitz(const ProblemOracle& oracle,
                                const JointPoint& z);

}  // namespace minimax
