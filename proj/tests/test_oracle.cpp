#include "minimax/oracle.hpp"
#include "minimax/problems.hpp"
#include "minimax/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace minimax;

namespace {

// 1-D instance f(x,y) = -0.25 x^2 + x y - 0.5 y^2 + x with mu = 1; the
// stationary point is (-2, -2) and Phi(x) = 0.25 x^2 + x.
QuadraticNcsc scalar_instance() {
  QuadraticNcsc q;
  q.A = Mat::Constant(1, 1, -0.5);
  q.B = Mat::Constant(1, 1, 1.0);
  q.mu = 1.0;
  q.c = Vec::Constant(1, 1.0);
  return q;
}

Vec scalar(double v) { return Vec::Constant(1, v); }

}  // namespace

TEST_CASE("merit value on the scalar quadratic") {
  QuadraticOracle oracle(scalar_instance());
  RegularizedObjective reg(oracle, 2.0);
  CHECK(reg.value(scalar(0.0), scalar(1.0)) == doctest::Approx(0.5));
  CHECK(reg.value(scalar(0.0), scalar(0.0)) == doctest::Approx(0.0));
  CHECK(reg.counters().f_evals == 2);
}

TEST_CASE("merit equals the objective where grad_y vanishes") {
  QuadraticOracle oracle(scalar_instance());
  RegularizedObjective reg(oracle, 2.0);
  // y*(x) = x for this instance.
  const Vec x = scalar(3.0), y = scalar(3.0);
  CHECK(oracle.grad_y(x, y).norm() == doctest::Approx(0.0));
  CHECK(reg.value(x, y) == doctest::Approx(oracle.value(x, y)));
  const MeritGradient g = reg.grad(x, y);
  CHECK(g.x[0] == doctest::Approx(oracle.grad_x(x, y)[0]));
  CHECK(g.y.norm() == doctest::Approx(0.0));
}

TEST_CASE("merit gradient formula blocks on the scalar quadratic") {
  QuadraticOracle oracle(scalar_instance());
  RegularizedObjective reg(oracle, 2.0);
  const MeritGradient g = reg.grad(scalar(0.0), scalar(1.0));
  CHECK(g.x[0] == doctest::Approx(0.0));
  CHECK(g.y[0] == doctest::Approx(1.0));
  CHECK(reg.counters().g_evals == 1);
  CHECK(reg.counters().hvp_evals == 1);
  CHECK(reg.counters().f_evals == 0);
}

TEST_CASE("merit gradient matches finite differences on robust regression") {
  SeededRng rng(5);
  RobustRegressionOracle oracle(gen_synthetic(rng, 4, 6, 0.1, 10.0));
  RegularizedObjective reg(oracle, 2.0 / oracle.problem().mu());
  for (int i = 0; i < 5; ++i) {
    const JointPoint z(standard_normal_vector(rng, oracle.dim_x()),
                       standard_normal_vector(rng, oracle.dim_y()));
    CHECK(fd_check(reg, z, DerivativeCheck::GradH) <= 1e-6);
  }
}

TEST_CASE("finite differences on the quadratic are near exact") {
  SeededRng rng(11);
  QuadraticOracle oracle(make_random_quadratic(rng, 5, 3));
  RegularizedObjective reg(oracle, 2.0 / oracle.problem().mu);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const JointPoint z(standard_normal_vector(rng, 5),
                       standard_normal_vector(rng, 3));
    worst = std::max(worst, fd_check(reg, z, DerivativeCheck::GradF));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("second-derivative action is linear in the direction") {
  SeededRng rng(9);
  RobustRegressionOracle oracle(gen_synthetic(rng, 3, 5, 0.1, 8.0));
  const Vec x = standard_normal_vector(rng, oracle.dim_x());
  const Vec y = standard_normal_vector(rng, oracle.dim_y());
  const Vec v1 = standard_normal_vector(rng, oracle.dim_y());
  const Vec v2 = standard_normal_vector(rng, oracle.dim_y());
  const SecondOrderAction sum = oracle.y_dir_second(x, y, v1 + v2);
  const SecondOrderAction a = oracle.y_dir_second(x, y, v1);
  const SecondOrderAction b = oracle.y_dir_second(x, y, v2);
  CHECK((sum.xy - a.xy - b.xy).norm() <= 1e-10 * (1.0 + sum.xy.norm()));
  CHECK((sum.yy - a.yy - b.yy).norm() <= 1e-10 * (1.0 + sum.yy.norm()));
}

TEST_CASE("value-function oracle on the scalar quadratic") {
  QuadraticOracle oracle(scalar_instance());
  PhiOracle phi(oracle);

  auto [v0, y0] = phi.eval(scalar(0.0));
  CHECK(v0 == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(y0[0] == doctest::Approx(0.0).epsilon(1e-10));

  auto [v2, y2] = phi.eval(scalar(-2.0));
  CHECK(v2 == doctest::Approx(-1.0));
  CHECK(y2[0] == doctest::Approx(-2.0));
  CHECK(oracle.grad_y(scalar(-2.0), y2).norm() <= 1e-11);

  CHECK(phi.grad(scalar(0.0))[0] == doctest::Approx(1.0));
  CHECK(phi.grad(scalar(-2.0))[0] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("value-function gradient matches finite differences") {
  SeededRng rng(13);
  RobustRegressionOracle oracle(gen_synthetic(rng, 4, 7, 0.1, 9.0));
  for (int i = 0; i < 3; ++i) {
    const Vec x = standard_normal_vector(rng, oracle.dim_x());
    CHECK(fd_check_phi_grad(oracle, x) <= 1e-5);
  }
}

TEST_CASE("inner maximization reports its residual when starved") {
  QuadraticOracle oracle(scalar_instance());
  PhiOracleConfig cfg;
  cfg.inner_max_iters = 1;
  cfg.inner_tol = 1e-14;
  PhiOracle phi(oracle, cfg);
  CHECK_THROWS_AS((void)phi.eval(scalar(5.0)), ConvergenceError);
}

TEST_CASE("regularized objective validates beta and reports non-finite") {
  QuadraticOracle oracle(scalar_instance());
  CHECK_THROWS_AS(RegularizedObjective(oracle, 0.0), ConfigError);
  RegularizedObjective reg(oracle, 2.0);
  Vec huge = scalar(1e200);
  CHECK_THROWS_AS((void)reg.value(huge, huge), NumericError);
}

TEST_CASE("merit dominates the value function with quadratic margin") {
  SeededRng rng(21);
  QuadraticOracle oracle(make_random_quadratic(rng, 4, 3));
  const double mu = oracle.problem().mu;
  const double beta = 2.0 / mu;
  RegularizedObjective reg(oracle, beta);
  PhiOracle phi(oracle);
  for (int i = 0; i < 40; ++i) {
    const Vec x = standard_normal_vector(rng, 4);
    const Vec y = standard_normal_vector(rng, 3);
    const double h = reg.value(x, y);
    const double phi_v = phi.eval(x).first;
    const double margin =
        (0.5 * beta - 0.5 / mu) * oracle.grad_y(x, y).squaredNorm();
    CHECK(h - phi_v >= margin - 1e-8 * (1.0 + std::abs(h)));
    CHECK(phi_v <= h + 1e-8 * (1.0 + std::abs(h)));
  }
}

TEST_CASE("y-gradient inequalities from strong concavity") {
  SeededRng rng(23);
  QuadraticOracle oracle(make_random_quadratic(rng, 5, 4));
  const double mu = oracle.problem().mu;
  const double beta = 2.0 / mu;
  RegularizedObjective reg(oracle, beta);
  const double b1 = beta * mu - 1.0;
  for (int i = 0; i < 40; ++i) {
    const Vec x = standard_normal_vector(rng, 5);
    const Vec y = standard_normal_vector(rng, 4);
    const Vec gy = oracle.grad_y(x, y);
    const MeritGradient gh = reg.grad(x, y);
    CHECK(gh.y.dot(gy) <= -b1 * gy.squaredNorm() + 1e-10);
    CHECK(gh.y.norm() >= b1 * gy.norm() - 1e-10);
  }
}

TEST_CASE("local modulus estimate dominates the lemma bounds") {
  SeededRng rng(29);
  RobustRegressionOracle oracle(gen_synthetic(rng, 4, 6, 0.1, 10.0));
  const double beta = 2.0 / oracle.problem().mu();
  RegularizedObjective reg(oracle, beta);
  for (int i = 0; i < 20; ++i) {
    Vec x = standard_normal_vector(rng, oracle.dim_x());
    x *= rng.next_uniform(0.0, 1.0) / std::max(x.norm(), 1e-12);
    const Vec y = standard_normal_vector(rng, oracle.dim_y());
    const JointPoint z(x, y);
    const double l_hat = estimate_local_lipschitz(oracle, z);
    const FullGradient g = oracle.grad(x, y);
    const MeritGradient gh = reg.grad(x, y);
    CHECK(gh.y.norm() <= (1.0 + beta * l_hat) * g.y.norm() + 1e-10);
    CHECK(gh.x.norm() <= g.x.norm() + beta * l_hat * g.y.norm() + 1e-10);
  }
}
