#include "minimax/diagnostics.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace minimax {

TransferBound transfer_bounds(double eps, double beta, double mu, double L) {
  if (!(mu > 0.0) || !(beta > 1.0 / mu))
    throw ConfigError("transfer_bounds: need beta > 1/mu");
  if (!(L > 0.0)) throw ConfigError("transfer_bounds: L must be > 0");
  if (!(eps >= 0.0)) throw ConfigError("transfer_bounds: eps must be >= 0");
  const double bl = beta * L;
  const double b1 = beta * mu - 1.0;
  TransferBound out;
  out.eps_in = eps;
  out.L_used = L;
  out.bound_min_to_rm = (1.0 + bl) * eps;
  out.bound_rm_to_min = std::sqrt(2.0 * (1.0 + (bl * bl) / (b1 * b1))) * eps;
  return out;
}

std::vector<InequalityRecord> check_point_lemmas(const ProblemOracle& oracle,
                                                 double mu, double beta,
                                                 const JointPoint& z,
                                                 double L_hat) {
  if (!(mu > 0.0) || !(beta > 1.0 / mu))
    throw ConfigError("check_point_lemmas: need beta > 1/mu");

  const FullGradient g = oracle.grad(z.x, z.y);
  const SecondOrderAction act = oracle.y_dir_second(z.x, z.y, g.y);
  const Vec hx = g.x + beta * act.xy;
  const Vec hy = g.y + beta * act.yy;

  const double gx_n = g.x.norm();
  const double gy_n = g.y.norm();
  const double gx_sq = g.x.squaredNorm();
  const double gy_sq = g.y.squaredNorm();
  const double bl = beta * L_hat;
  const double b1 = beta * mu - 1.0;

  std::vector<InequalityRecord> out;
  auto add = [&out](const char* name, double lhs, double rhs) {
    out.push_back({name, lhs, rhs, rhs - lhs});
  };

  add("grad_y_h_upper", hy.norm(), (1.0 + bl) * gy_n);
  add("grad_x_h_upper", hx.norm(), gx_n + bl * gy_n);
  add("young_cross_upper", 2.0 * hx.dot(-g.x) + gx_sq, bl * bl * gy_sq);
  add("grad_x_h_lower", 0.5 * gx_sq - bl * bl * gy_sq, hx.squaredNorm());
  add("descent_inner_y", hy.dot(g.y), -b1 * gy_sq);
  add("grad_y_h_lower", b1 * gy_n, hy.norm());
  return out;
}

double quadratic_second_order_check(const QuadraticNcsc& q, double beta) {
  if (!(beta > 1.0 / q.mu))
    throw ConfigError("quadratic_second_order_check: need beta > 1/mu");

  // At the solution grad_y f = 0, so the third-derivative terms of the
  // h_beta Hessian drop out (and vanish identically for a quadratic):
  //   Hxx = A + beta BB',  Hxy = (1 - beta mu) B,  Hyy = mu (beta mu - 1) I.
  const Mat bbt = q.B * q.B.transpose();
  const Mat hxx = q.A + beta * bbt;
  const Mat hxy = (1.0 - beta * q.mu) * q.B;
  const double hyy_diag = q.mu * (beta * q.mu - 1.0);
  if (!(hyy_diag > 0.0))
    throw NumericError("quadratic_second_order_check: singular y-block");

  const Mat schur = hxx - hxy * hxy.transpose() / hyy_diag;
  return (schur - q.phi_hessian()).norm();
}

std::optional<LinearFit> linear_fit(std::span<const double> xs,
                                    std::span<const double> ys) {
  const std::size_t n = xs.size();
  if (n != ys.size() || n < 3) return std::nullopt;
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) return std::nullopt;

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    rss += r * r;
  }
  fit.stderr_slope =
      std::sqrt(rss / (static_cast<double>(n) - 2.0) / sxx);
  fit.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  return fit;
}

std::optional<double> kl_exponent_probe(std::span<const double> gaps,
                                        std::span<const double> grad_norms,
                                        double h_inf) {
  if (gaps.size() != grad_norms.size()) return std::nullopt;

  const double floor =
      10.0 * std::numeric_limits<double>::epsilon() * std::abs(h_inf);

  std::vector<double> log_gap, log_grad;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] > floor && grad_norms[i] > 0.0 &&
        std::isfinite(grad_norms[i])) {
      log_gap.push_back(std::log(gaps[i]));
      log_grad.push_back(std::log(grad_norms[i]));
    }
  }
  if (log_gap.size() < 10) return std::nullopt;
  const auto [lo, hi] = std::minmax_element(log_gap.begin(), log_gap.end());
  if (*hi - *lo < 1e-9) return std::nullopt;  // no usable gap variation
  const auto fit = linear_fit(log_gap, log_grad);
  if (!fit) return std::nullopt;
  return fit->slope;
}

std::optional<double> kl_exponent_probe(const RunReport& report) {
  if (report.trace.size() < 2) return std::nullopt;
  const double h_inf = report.trace.back().h;
  std::vector<double> gaps, grads;
  gaps.reserve(report.trace.size() - 1);
  for (std::size_t i = 0; i + 1 < report.trace.size(); ++i) {
    gaps.push_back(report.trace[i].h - h_inf);
    grads.push_back(report.trace[i].grad_norm);
  }
  return kl_exponent_probe(gaps, grads, h_inf);
}

}  // namespace minimax
