#pragma once

#include "minimax/oracle.hpp"
#include "minimax/problems.hpp"
#include "minimax/solvers.hpp"
#include "minimax/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace minimax {

/// Stationarity transfer between the minimax problem and its regularized
/// minimization: an eps-first-order minimax point is a (1 + beta L) eps
/// stationary point of the reformulation, and an eps-stationary point of the
/// reformulation is a sqrt(2 [1 + (beta L)^2 / (beta mu - 1)^2]) eps minimax
/// point.
struct TransferBound {
  double eps_in;
  double bound_min_to_rm;
  double bound_rm_to_min;
  double L_used;
};

TransferBound transfer_bounds(double eps, double beta, double mu, double L);

/// One inequality evaluated at a point; slack = rhs - lhs, negative slack
/// beyond -1e-8 * scale means a violation.
struct InequalityRecord {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;

  double scale() const { return 1.0 + std::abs(lhs) + std::abs(rhs); }
  bool violated() const { return slack < -1e-8 * scale(); }
};

/// Evaluates the six gradient-bound inequalities relating grad h_beta and
/// grad f at z, using L_hat as the local Lipschitz surrogate (the lower
/// bound uses C = 2). The two inequalities requiring beta > 1/mu are the
/// descent inner product and the y-gradient lower bound.
std::vector<InequalityRecord> check_point_lemmas(const ProblemOracle& oracle,
                                                 double mu, double beta,
                                                 const JointPoint& z,
                                                 double L_hat);

/// At the closed-form solution of a quadratic problem, forms the Hessian
/// blocks of h_beta (third-derivative terms vanish there), reduces the
/// x-block by the Schur complement, and returns the Frobenius distance to
/// the Phi-Hessian A + BB'/mu.
double quadratic_second_order_check(const QuadraticNcsc& q, double beta);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares of ys against xs; requires >= 3 points and
/// non-constant xs.
std::optional<LinearFit> linear_fit(std::span<const double> xs,
                                    std::span<const double> ys);

/// Estimated Lojasiewicz exponent: the least-squares slope of log(grad_norm)
/// against log(gap) over the points with gap > 10 * eps * |h_inf|, where
/// gaps[i] = h_i - h_inf. Needs at least 10 qualifying points and
/// non-degenerate gaps; returns nullopt otherwise.
std::optional<double> kl_exponent_probe(std::span<const double> gaps,
                                        std::span<const double> grad_norms,
                                        double h_inf);

/// Convenience overload reading (h_k, ||grad f||_k) off a run trace, with
/// h_inf taken as the final trace value.
std::optional<double> kl_exponent_probe(const RunReport& report);

}  // namespace minimax
