#include "minimax/oracle.hpp"
#include "minimax/problems.hpp"
#include "minimax/rng.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace minimax;

TEST_CASE("quadratic closed-form solution") {
  QuadraticNcsc q;
  q.A = Mat::Constant(1, 1, -0.5);
  q.B = Mat::Constant(1, 1, 1.0);
  q.mu = 1.0;
  q.c = Vec::Constant(1, 1.0);
  const JointPoint z = quadratic_solution(q);
  CHECK(z.x[0] == doctest::Approx(-2.0));
  CHECK(z.y[0] == doctest::Approx(-2.0));

  q.c.setZero();
  const JointPoint zz = quadratic_solution(q);
  CHECK(zz.x.norm() == doctest::Approx(0.0));
  CHECK(zz.y.norm() == doctest::Approx(0.0));
}

TEST_CASE("closed-form solution is stationary on random instances") {
  SeededRng rng(31);
  QuadraticNcsc q = make_random_quadratic(rng, 5, 3);
  QuadraticOracle oracle(q);
  const JointPoint z = quadratic_solution(q);
  const FullGradient g = oracle.grad(z.x, z.y);
  CHECK(g.norm() <= 1e-10 * (1.0 + q.c.norm()));
}

TEST_CASE("random instances are nonconvex in x with convex value function") {
  SeededRng rng(33);
  for (int i = 0; i < 10; ++i) {
    const QuadraticNcsc q = make_random_quadratic(rng, 7, 4);
    const Vec eig_a = q.A.selfadjointView<Eigen::Lower>().eigenvalues();
    const Vec eig_s =
        q.phi_hessian().selfadjointView<Eigen::Lower>().eigenvalues();
    CHECK(eig_a.minCoeff() < 0.0);
    CHECK(eig_s.minCoeff() >= 0.7);
  }
}

TEST_CASE("value-function oracle agrees with the closed form") {
  SeededRng rng(37);
  const QuadraticNcsc q = make_random_quadratic(rng, 5, 3);
  QuadraticOracle oracle(q);
  PhiOracle phi(oracle);
  for (int i = 0; i < 100; ++i) {
    const Vec x = standard_normal_vector(rng, 5);
    const double expected = q.phi_value(x);
    const double got = phi.eval(x).first;
    CHECK(std::abs(got - expected) <= 1e-9 * (1.0 + std::abs(expected)));
  }
}

TEST_CASE("biweight values and derivatives") {
  const Biweight at0 = biweight(0.0);
  CHECK(at0.value == doctest::Approx(0.0));
  CHECK(at0.d1 == doctest::Approx(0.0));
  CHECK(at0.d2 == doctest::Approx(2.0));

  const Biweight at1 = biweight(1.0);
  CHECK(at1.value == doctest::Approx(0.5));
  CHECK(at1.d1 == doctest::Approx(0.5));
  CHECK(at1.d2 == doctest::Approx(-0.5));

  CHECK(biweight(1e9).value == doctest::Approx(1.0));

  // Central differences confirm the derivative formulas.
  const double h = 1e-5;
  SeededRng rng(41);
  for (int i = 0; i < 50; ++i) {
    const double t = rng.next_uniform(-4.0, 4.0);
    const double fd1 = (biweight(t + h).value - biweight(t - h).value) / (2 * h);
    const double fd2 = (biweight(t + h).d1 - biweight(t - h).d1) / (2 * h);
    CHECK(biweight(t).d1 == doctest::Approx(fd1).epsilon(1e-6));
    CHECK(biweight(t).d2 == doctest::Approx(fd2).epsilon(1e-6));
  }
}

TEST_CASE("robust regression oracle at the origin") {
  SeededRng rng(43);
  const RobustRegression p = gen_synthetic(rng, 3, 5, 0.0, 5.0);
  RobustRegressionOracle oracle(p);
  const Eigen::Index n = p.n_samples();
  const Vec x = Vec::Zero(p.dim());
  const Vec y = Vec::Zero(n * p.dim());

  double f_expected = 0.0;
  Vec gx_expected = Vec::Zero(p.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Biweight b = biweight(-p.v[i]);
    f_expected += b.value;
    gx_expected += b.d1 * p.W.row(i).transpose();
  }
  f_expected /= static_cast<double>(n);
  gx_expected /= static_cast<double>(n);

  CHECK(oracle.value(x, y) == doctest::Approx(f_expected));
  CHECK((oracle.grad_x(x, y) - gx_expected).norm() <= 1e-14);
  CHECK(oracle.grad_y(x, y).norm() == doctest::Approx(0.0));
}

TEST_CASE("robust regression scalar example") {
  RobustRegression p;
  p.W = Mat::Constant(1, 1, 1.0);
  p.v = Vec::Constant(1, 0.0);
  p.rho_x = 0.0;
  p.rho_y = 3.0;
  RobustRegressionOracle oracle(p);
  const Vec x = Vec::Constant(1, 1.0);
  const Vec y = Vec::Constant(1, 0.0);
  CHECK(oracle.value(x, y) == doctest::Approx(0.5));
  CHECK(oracle.grad_x(x, y)[0] == doctest::Approx(0.5));
  CHECK(oracle.grad_y(x, y)[0] == doctest::Approx(0.5));
}

TEST_CASE("robust regression derivatives pass finite differences") {
  SeededRng rng(47);
  RobustRegressionOracle oracle(gen_synthetic(rng, 4, 6, 0.2, 7.0));
  RegularizedObjective reg(oracle, 2.0 / oracle.problem().mu());
  for (int i = 0; i < 5; ++i) {
    const JointPoint z(standard_normal_vector(rng, oracle.dim_x()),
                       standard_normal_vector(rng, oracle.dim_y()));
    CHECK(fd_check(reg, z, DerivativeCheck::GradF) <= 1e-6);
    CHECK(fd_check(reg, z, DerivativeCheck::YDirSecond) <= 1e-5);
  }
}

TEST_CASE("robust regression strong concavity inside the unit x-ball") {
  SeededRng rng(53);
  RobustRegressionOracle oracle(gen_synthetic(rng, 4, 8, 0.1, 10.0));
  const double mu = oracle.problem().mu();
  for (int i = 0; i < 50; ++i) {
    Vec x = standard_normal_vector(rng, oracle.dim_x());
    x *= rng.next_uniform(0.0, 1.0) / std::max(x.norm(), 1e-12);
    const Vec y = standard_normal_vector(rng, oracle.dim_y());
    Vec v = standard_normal_vector(rng, oracle.dim_y());
    v.normalize();
    const SecondOrderAction act = oracle.y_dir_second(x, y, v);
    CHECK(v.dot(act.yy) <= -mu + 1e-12);
  }
}

TEST_CASE("synthetic generation is deterministic with the right shape") {
  SeededRng a(1), b(1);
  const RobustRegression pa = gen_synthetic(a, 2, 4, 0.1, 10.0);
  const RobustRegression pb = gen_synthetic(b, 2, 4, 0.1, 10.0);
  CHECK(pa.W == pb.W);
  CHECK(pa.v == pb.v);
  CHECK(pa.W.rows() == 4);
  CHECK(pa.W.cols() == 2);
}

TEST_CASE("synthetic sample moments") {
  SeededRng rng(1);
  const RobustRegression p = gen_synthetic(rng, 50, 75, 0.1, 10.0);
  const double mean = p.W.mean();
  const double var =
      (p.W.array() - mean).square().sum() / (p.W.size() - 1.0);
  CHECK(std::abs(mean) <= 0.05);
  CHECK(std::abs(var - 1.0) <= 0.1);
}

TEST_CASE("problem validation rejects bad moduli") {
  RobustRegression p;
  p.W = Mat::Ones(2, 2);
  p.v = Vec::Ones(2);
  p.rho_y = 2.0;  // mu would be zero
  CHECK_THROWS_AS(p.validate(), ConfigError);

  QuadraticNcsc q;
  q.A = Mat::Constant(1, 1, -1.0);
  q.B = Mat::Constant(1, 1, 0.5);
  q.mu = 1.0;  // A + BB'/mu = -0.75, not PD
  q.c = Vec::Zero(1);
  CHECK_THROWS_AS(q.validate(), ConfigError);
}
