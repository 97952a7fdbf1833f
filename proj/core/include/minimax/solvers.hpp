#pragma once

#include "minimax/bb.hpp"
#include "minimax/linesearch.hpp"
#include "minimax/oracle.hpp"
#include "minimax/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace minimax {

/// Search directions for the x-stage. constants() certifies (a1, a2) with
///   ||d|| <= a1 ||grad_x f||  and  <d, grad_x f> <= -a2 ||grad_x f||^2
/// for every emitted direction; the solver checks both per call.
class DirectionProvider {
public:
  virtual ~DirectionProvider() = default;
  virtual Vec direction(const Vec& x, const Vec& y_next,
                        const Vec& grad_x_f) const = 0;
  virtual std::pair<double, double> constants() const = 0;
};

/// d = -grad_x f, the alternating GDA direction (a1 = a2 = 1).
class GdaDirection final : public DirectionProvider {
public:
  Vec direction(const Vec&, const Vec&, const Vec& grad_x_f) const override {
    return -grad_x_f;
  }
  std::pair<double, double> constants() const override { return {1.0, 1.0}; }
};

enum class RunStatus {
  Converged,
  IterLimit,
  TimeLimit,
  Diverged,
  LineSearchFailed,
};

const char* to_string(RunStatus s);

/// One row per iteration, recorded at the top of the iteration before any
/// update: the merit h at z_k, the threshold average H_k (max-safeguarded
/// for the parameter-free method), ||grad f(z_k)||, the accepted step sizes
/// of the iteration, and the regularization in effect. A final row captures
/// the terminal iterate with zero steps.
struct TraceRow {
  std::int64_t k = 0;
  double h = 0.0;
  double merit = 0.0;
  double grad_norm = 0.0;
  double eta_y = 0.0;
  double eta_x = 0.0;
  double beta = 0.0;
};

struct RunReport {
  RunStatus status = RunStatus::IterLimit;
  std::int64_t iters = 0;
  EvalCounters counters;
  double final_f = 0.0;
  double final_grad_x_norm = 0.0;
  double final_grad_y_norm = 0.0;
  std::optional<double> final_phi_grad_norm;
  double min_eta_y = 0.0;
  double min_eta_x = 0.0;
  Vec final_x;
  Vec final_y;
  std::vector<TraceRow> trace;
  std::string notes;

  bool converged() const { return status == RunStatus::Converged; }
};

struct Alg1Params {
  double mu = 0.0;    // strong-concavity modulus; must be > 0
  double beta = 0.0;  // regularization; 0 selects 2 / mu
  LineSearchConfig ls;

  double resolved_beta() const { return beta > 0.0 ? beta : 2.0 / mu; }
};

/// Line-search framework: y-ascent along grad_y f under the nonmonotone
/// condition with threshold H_k and coefficient gamma_y * (beta*mu - 1),
/// then a certified descent direction in x under the carried-decrease
/// condition, then the weighted-average update of H.
RunReport run_alg1(const ProblemOracle& oracle, const Alg1Params& params,
                   const DirectionProvider& dir, const StopRule& stop,
                   const JointPoint& z0);

/// Extra acceptance conditions capping ||grad_y f|| at trial points, with
/// Gamma = gamma0 * ||grad_y f(z0)|| + gamma1.
struct GradClampParams {
  double gamma0 = 10.0;
  double gamma1 = 1.0;
};

struct Alg2Params {
  double beta0 = 1.0;
  double c = 1.0;
  /// Period of the beta-doubling test: 1 = every iteration, 0 = never.
  std::int64_t beta_check_period = 20;
  BbVariant variant = BbVariant::BB1;
  LineSearchConfig ls;
  std::optional<GradClampParams> clamp;
};

/// Parameter-free GDA: doubles beta until
///   <grad_y h_beta(z_k), grad_y f(z_k)> <= -c ||grad_y f(z_k)||^2
/// (each test charges one g_eval and one hvp_eval), keeps separate averages
/// F_k of f and G_k of ||grad_y f||^2, combines H_k = F_k + beta_k G_k / 2,
/// searches against Xi_k = max(H_k, h_{beta_k}(z_k)) with BB initial steps,
/// and takes d = -grad_x f at the half-point.
RunReport run_alg2(const ProblemOracle& oracle, const Alg2Params& params,
                   const StopRule& stop, const JointPoint& z0);

struct TtgdaParams {
  double eta_y = 0.1;
  double eta_x = 0.01;
};

/// Two-timescale GDA with fixed steps: y-ascent at z_k, x-descent at the
/// half-point. Two g_evals per executed iteration, no merit evaluations.
RunReport run_ttgda(const ProblemOracle& oracle, const TtgdaParams& params,
                    const StopRule& stop, const JointPoint& z0);

struct GdbbParams {
  double mu = 0.0;
  double beta = 0.0;  // 0 selects 2 / mu
  double gamma = 1e-4;
  BbVariant variant = BbVariant::BB1;
  LineSearchConfig ls;

  double resolved_beta() const { return beta > 0.0 ? beta : 2.0 / mu; }
};

/// Joint gradient descent on h_beta over w = (x, y): direction -grad h_beta
/// (one g_eval plus one hvp_eval per iteration), BB initial step on the
/// joint vectors, nonmonotone Armijo with a single descent factor gamma.
RunReport run_gdbb(const ProblemOracle& oracle, const GdbbParams& params,
                   const StopRule& stop, const JointPoint& z0);

/// Runs every (eta_y, theta * eta_y) combination and returns the converged
/// run with the fewest iterations; ties go to the earlier combination.
/// Throws ConvergenceError when no combination converges.
RunReport ttgda_grid_search(const ProblemOracle& oracle,
                            std::span<const double> eta_y_set,
                            std::span<const double> theta_set,
                            const StopRule& stop, const JointPoint& z0);

/// Curvature-based seed beta0 = ||y - y'||^2 / (2 [f(x,y) - f(x,y')
/// + <grad_y f(x,y), y' - y>]); lands in (0, 1/mu] for strongly concave
/// problems.
double estimate_beta0(const ProblemOracle& oracle, const Vec& x, const Vec& y,
                      const Vec& y_prime);

}  // namespace minimax
