#include "minimax/problems.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>

namespace minimax {

void QuadraticNcsc::validate() const {
  if (A.rows() != A.cols()) throw ConfigError("QuadraticNcsc: A must be square");
  if (!A.isApprox(A.transpose(), 1e-12))
    throw ConfigError("QuadraticNcsc: A must be symmetric");
  if (B.rows() != A.rows()) throw ConfigError("QuadraticNcsc: B rows mismatch");
  if (c.size() != A.rows()) throw ConfigError("QuadraticNcsc: c size mismatch");
  if (!(mu > 0.0)) throw ConfigError("QuadraticNcsc: mu must be > 0");
  Eigen::LLT<Mat> llt(phi_hessian());
  if (llt.info() != Eigen::Success)
    throw ConfigError("QuadraticNcsc: A + BB'/mu must be positive definite");
}

double QuadraticOracle::value(const Vec& x, const Vec& y) const {
  return 0.5 * x.dot(q_.A * x) + x.dot(q_.B * y) - 0.5 * q_.mu * y.squaredNorm() +
         q_.c.dot(x);
}

Vec QuadraticOracle::grad_x(const Vec& x, const Vec& y) const {
  return q_.A * x + q_.B * y + q_.c;
}

Vec QuadraticOracle::grad_y(const Vec& x, const Vec& y) const {
  return q_.B.transpose() * x - q_.mu * y;
}

SecondOrderAction QuadraticOracle::y_dir_second(const Vec&, const Vec&,
                                                const Vec& v) const {
  return {q_.B * v, -q_.mu * v};
}

JointPoint quadratic_solution(const QuadraticNcsc& q) {
  q.validate();
  const Mat S = q.phi_hessian();
  Eigen::LDLT<Mat> ldlt(S);
  if (ldlt.info() != Eigen::Success)
    throw ConfigError("quadratic_solution: singular system");
  Vec x_star = ldlt.solve(-q.c);
  Vec y_star = q.B.transpose() * x_star / q.mu;
  return {std::move(x_star), std::move(y_star)};
}

QuadraticNcsc make_random_quadratic(SeededRng& rng, Eigen::Index n,
                                    Eigen::Index m) {
  if (n < 1 || m < 1)
    throw ConfigError("make_random_quadratic: dimensions must be >= 1");
  // Draw the Phi-curvature S directly with eigenvalues in [0.75, 2.5] and
  // back out A = S - BB'/mu. The coupling B is concentrated along the
  // eigendirection of S's smallest eigenvalue and scaled so that direction
  // sees BB'/mu curvature 1.5, which leaves A indefinite.
  Mat G(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    G.row(i) = standard_normal_vector(rng, n).transpose();
  Eigen::HouseholderQR<Mat> qr(G);
  Mat Q = qr.householderQ();
  Vec eigs(n);
  eigs[0] = 0.75;
  for (Eigen::Index i = 1; i < n; ++i) eigs[i] = rng.next_uniform(0.75, 2.5);
  const Mat S = Q * eigs.asDiagonal() * Q.transpose();

  const double mu = rng.next_uniform(0.5, 2.0);
  Vec b0 = standard_normal_vector(rng, m);
  b0.normalize();
  Mat noise(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    noise.col(j) = standard_normal_vector(rng, n);
  Mat B = Q.col(0) * b0.transpose() +
          0.2 / std::sqrt(static_cast<double>(n)) * noise;
  const double top = (B * B.transpose() / mu).selfadjointView<Eigen::Lower>()
                         .eigenvalues()
                         .maxCoeff();
  B *= std::sqrt(1.5 / std::max(top, 1e-12));

  QuadraticNcsc q;
  q.B = B;
  q.mu = mu;
  q.A = S - B * B.transpose() / mu;
  q.A = 0.5 * (q.A + q.A.transpose());
  q.c = standard_normal_vector(rng, n);
  return q;
}

Biweight biweight(double theta) {
  const double t2 = theta * theta;
  const double den = 1.0 + t2;
  const double den2 = den * den;
  return {t2 / den, 2.0 * theta / den2, (2.0 - 6.0 * t2) / (den2 * den)};
}

void RobustRegression::validate() const {
  if (W.rows() < 1 || W.cols() < 1)
    throw ConfigError("RobustRegression: empty design matrix");
  if (v.size() != W.rows())
    throw ConfigError("RobustRegression: label count mismatch");
  if (!(rho_x >= 0.0)) throw ConfigError("RobustRegression: rho_x must be >= 0");
  if (!(rho_y > 2.0))
    throw ConfigError("RobustRegression: rho_y must be > 2 so mu > 0");
}

Vec RobustRegressionOracle::residuals(const Vec& x, const Vec& y) const {
  const Eigen::Index N = p_.n_samples();
  const Eigen::Index d = p_.dim();
  Vec r = p_.W * x - p_.v;
  for (Eigen::Index i = 0; i < N; ++i) r[i] += y.segment(i * d, d).dot(x);
  return r;
}

double RobustRegressionOracle::value(const Vec& x, const Vec& y) const {
  const Eigen::Index N = p_.n_samples();
  const Vec r = residuals(x, y);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const double t2 = r[i] * r[i];
    sum += t2 / (1.0 + t2);
  }
  sum += static_cast<double>(N) * 0.5 * p_.rho_x * x.squaredNorm();
  sum -= 0.5 * p_.rho_y * y.squaredNorm();
  return sum / static_cast<double>(N);
}

Vec RobustRegressionOracle::grad_x(const Vec& x, const Vec& y) const {
  const Eigen::Index N = p_.n_samples();
  const Eigen::Index d = p_.dim();
  const Vec r = residuals(x, y);
  Vec g = Vec::Zero(d);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double d1 = biweight(r[i]).d1;
    g += d1 * (p_.W.row(i).transpose() + y.segment(i * d, d));
  }
  g /= static_cast<double>(N);
  g += p_.rho_x * x;
  return g;
}

Vec RobustRegressionOracle::grad_y(const Vec& x, const Vec& y) const {
  const Eigen::Index N = p_.n_samples();
  const Eigen::Index d = p_.dim();
  const Vec r = residuals(x, y);
  Vec g(N * d);
  const double inv_n = 1.0 / static_cast<double>(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double d1 = biweight(r[i]).d1;
    g.segment(i * d, d) = inv_n * (d1 * x - p_.rho_y * y.segment(i * d, d));
  }
  return g;
}

SecondOrderAction RobustRegressionOracle::y_dir_second(const Vec& x,
                                                       const Vec& y,
                                                       const Vec& v) const {
  const Eigen::Index N = p_.n_samples();
  const Eigen::Index d = p_.dim();
  const Vec r = residuals(x, y);
  Vec out_x = Vec::Zero(d);
  Vec out_y(N * d);
  const double inv_n = 1.0 / static_cast<double>(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto vi = v.segment(i * d, d);
    const Biweight b = biweight(r[i]);
    const double vx = vi.dot(x);
    out_x += b.d2 * vx * (p_.W.row(i).transpose() + y.segment(i * d, d)) +
             b.d1 * vi;
    out_y.segment(i * d, d) = inv_n * (b.d2 * vx * x - p_.rho_y * vi);
  }
  out_x *= inv_n;
  return {std::move(out_x), std::move(out_y)};
}

ValueAndGradY RobustRegressionOracle::value_and_grad_y(const Vec& x,
                                                       const Vec& y) const {
  const Eigen::Index N = p_.n_samples();
  const Eigen::Index d = p_.dim();
  const Vec r = residuals(x, y);
  double sum = 0.0;
  Vec g(N * d);
  const double inv_n = 1.0 / static_cast<double>(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const Biweight b = biweight(r[i]);
    sum += b.value;
    g.segment(i * d, d) = inv_n * (b.d1 * x - p_.rho_y * y.segment(i * d, d));
  }
  sum += static_cast<double>(N) * 0.5 * p_.rho_x * x.squaredNorm();
  sum -= 0.5 * p_.rho_y * y.squaredNorm();
  return {sum * inv_n, std::move(g)};
}

FullGradient RobustRegressionOracle::grad(const Vec& x, const Vec& y) const {
  const Eigen::Index N = p_.n_samples();
  const Eigen::Index d = p_.dim();
  const Vec r = residuals(x, y);
  Vec gx = Vec::Zero(d);
  Vec gy(N * d);
  const double inv_n = 1.0 / static_cast<double>(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double d1 = biweight(r[i]).d1;
    gx += d1 * (p_.W.row(i).transpose() + y.segment(i * d, d));
    gy.segment(i * d, d) = inv_n * (d1 * x - p_.rho_y * y.segment(i * d, d));
  }
  gx *= inv_n;
  gx += p_.rho_x * x;
  return {std::move(gx), std::move(gy)};
}

RobustRegression gen_synthetic(SeededRng& rng, Eigen::Index d, Eigen::Index n,
                               double rho_x, double rho_y) {
  if (d < 1 || n < 1)
    throw ConfigError("gen_synthetic: dimensions must be >= 1");
  RobustRegression p;
  p.W = Mat(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    p.W.row(i) = standard_normal_vector(rng, d).transpose();
  p.v = standard_normal_vector(rng, n);
  p.rho_x = rho_x;
  p.rho_y = rho_y;
  p.validate();
  return p;
}

}  // namespace minimax
