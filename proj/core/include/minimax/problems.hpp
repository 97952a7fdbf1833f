#pragma once

#include "minimax/oracle.hpp"
#include "minimax/rng.hpp"
#include "minimax/types.hpp"

#include <memory>

namespace minimax {

/// Analytically solvable NC-SC benchmark
///   f(x, y) = 1/2 x'Ax + x'By - mu/2 ||y||^2 + c'x
/// with A symmetric (possibly indefinite) and A + BB'/mu positive definite,
/// so Phi(x) = 1/2 x'(A + BB'/mu)x + c'x and y*(x) = B'x / mu.
struct QuadraticNcsc {
  Mat A;
  Mat B;
  double mu = 1.0;
  Vec c;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }

  void validate() const;

  /// Hessian of Phi: A + BB'/mu.
  Mat phi_hessian() const { return A + B * B.transpose() / mu; }
  double phi_value(const Vec& x) const {
    return 0.5 * x.dot(phi_hessian() * x) + c.dot(x);
  }
};

class QuadraticOracle : public ProblemOracle {
public:
  explicit QuadraticOracle(QuadraticNcsc q) : q_(std::move(q)) { q_.validate(); }

  const QuadraticNcsc& problem() const { return q_; }

  Eigen::Index dim_x() const override { return q_.n(); }
  Eigen::Index dim_y() const override { return q_.m(); }
  double value(const Vec& x, const Vec& y) const override;
  Vec grad_x(const Vec& x, const Vec& y) const override;
  Vec grad_y(const Vec& x, const Vec& y) const override;
  SecondOrderAction y_dir_second(const Vec& x, const Vec& y,
                                 const Vec& v) const override;
  std::optional<double> mu_hint() const override { return q_.mu; }

private:
  QuadraticNcsc q_;
};

/// Unique first-order minimax point: x* = -(A + BB'/mu)^{-1} c, y* = B'x*/mu.
JointPoint quadratic_solution(const QuadraticNcsc& q);

/// Seeded NC-SC quadratic with Phi-curvature eigenvalues in [0.75, 2.5] and
/// an indefinite A (the coupling term dominates its top eigenvalue).
QuadraticNcsc make_random_quadratic(SeededRng& rng, Eigen::Index n,
                                    Eigen::Index m);

/// Smooth biweight loss theta^2 / (1 + theta^2) with first and second
/// derivatives.
struct Biweight {
  double value;
  double d1;
  double d2;
};
Biweight biweight(double theta);

/// Robust regression with per-sample adversarial feature perturbations:
///   f(x, {y_i}) = 1/N sum_i [ phi(<w_i + y_i, x> - v_i)
///                             + rho_x/2 ||x||^2 - rho_y/2 ||y_i||^2 ]
/// The adversarial block y lives in R^{N*d}, stored row-major as N blocks of
/// length d so each sample's perturbation is contiguous. Requires rho_y > 2;
/// the strong-concavity modulus used for solver configuration is
/// (rho_y - 2) / N, which bounds the y-curvature whenever ||x|| <= 1.
struct RobustRegression {
  Mat W;     // N x d design matrix, rows w_i
  Vec v;     // N labels
  double rho_x = 0.0;
  double rho_y = 3.0;

  Eigen::Index n_samples() const { return W.rows(); }
  Eigen::Index dim() const { return W.cols(); }
  double mu() const { return (rho_y - 2.0) / static_cast<double>(n_samples()); }

  void validate() const;
};

class RobustRegressionOracle : public ProblemOracle {
public:
  explicit RobustRegressionOracle(RobustRegression p) : p_(std::move(p)) {
    p_.validate();
  }

  const RobustRegression& problem() const { return p_; }

  Eigen::Index dim_x() const override { return p_.dim(); }
  Eigen::Index dim_y() const override { return p_.n_samples() * p_.dim(); }
  double value(const Vec& x, const Vec& y) const override;
  Vec grad_x(const Vec& x, const Vec& y) const override;
  Vec grad_y(const Vec& x, const Vec& y) const override;
  SecondOrderAction y_dir_second(const Vec& x, const Vec& y,
                                 const Vec& v) const override;
  std::optional<double> mu_hint() const override { return p_.mu(); }

  ValueAndGradY value_and_grad_y(const Vec& x, const Vec& y) const override;
  FullGradient grad(const Vec& x, const Vec& y) const override;

private:
  // Residuals r_i = <w_i + y_i, x> - v_i for all samples.
  Vec residuals(const Vec& x, const Vec& y) const;

  RobustRegression p_;
};

inline std::unique_ptr<ProblemOracle> rr_oracle(RobustRegression p) {
  return std::make_unique<RobustRegressionOracle>(std::move(p));
}

/// Synthetic dataset with w_i ~ N(0, I_d) and v_i ~ N(0, 1), drawn
/// deterministically from the seed (all of W row-major first, then v).
RobustRegression gen_synthetic(SeededRng& rng, Eigen::Index d, Eigen::Index n,
                               double rho_x, double rho_y);

}  // namespace minimax
