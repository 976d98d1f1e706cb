#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rwapg/problem.hpp"
#include "rwapg/rng.hpp"

using namespace rwapg;

namespace {

// 1-D smooth part f(x) = 0.5 (x - 4)^2 with L = 1, paired with g = |x|.
CompositeProblem shifted_scalar_problem() {
  return CompositeProblem(
      1, 1.0, 0.0,
      [](const Eigen::VectorXd& x) { return 0.5 * (x[0] - 4.0) * (x[0] - 4.0); },
      [](const Eigen::VectorXd& x) {
        return Eigen::VectorXd::Constant(1, x[0] - 4.0).eval();
      },
      l1_value(1.0), soft_threshold_prox(1.0));
}

// Diagonal quadratic f(x) = 0.5 x' diag(d) x with g = lambda ||x||_1.
CompositeProblem diag_l1_problem(const Eigen::VectorXd& d, double mu, double L,
                                 double lambda) {
  return CompositeProblem(
      d.size(), L, mu,
      [d](const Eigen::VectorXd& x) { return 0.5 * x.dot(d.cwiseProduct(x)); },
      [d](const Eigen::VectorXd& x) { return d.cwiseProduct(x).eval(); },
      l1_value(lambda), soft_threshold_prox(lambda));
}

Eigen::VectorXd random_point(std::uint64_t stream, Eigen::Index n) {
  return rng::normal_vector(99, stream, n);
}

}  // namespace

TEST_CASE("construction rejects invalid shapes and constants") {
  auto f = zero_value();
  auto grad = [](const Eigen::VectorXd& x) { return x; };
  CHECK_THROWS_AS(CompositeProblem(0, 1.0, 0.0, f, grad, zero_value(), identity_prox()),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompositeProblem(2, 0.0, 0.0, f, grad, zero_value(), identity_prox()),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompositeProblem(2, -1.0, 0.0, f, grad, zero_value(), identity_prox()),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      CompositeProblem(2, std::numeric_limits<double>::infinity(), 0.0, f, grad,
                       zero_value(), identity_prox()),
      std::invalid_argument);
  CHECK_THROWS_AS(CompositeProblem(2, 1.0, -0.5, f, grad, zero_value(), identity_prox()),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompositeProblem(2, 1.0, 1.0, f, grad, zero_value(), identity_prox()),
                  std::invalid_argument);  // mu must stay below L
  CHECK_THROWS_AS(CompositeProblem(2, 1.0, 0.0, nullptr, grad, zero_value(), identity_prox()),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompositeProblem(2, 1.0, 0.0, f, nullptr, zero_value(), identity_prox()),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompositeProblem(2, 1.0, 0.0, f, grad, nullptr, identity_prox()),
                  std::invalid_argument);
  CHECK_THROWS_AS(CompositeProblem(2, 1.0, 0.0, f, grad, zero_value(), nullptr),
                  std::invalid_argument);
}

TEST_CASE("soft threshold hits the frozen values and resolves ties to zero") {
  auto prox = soft_threshold_prox(1.0);
  Eigen::VectorXd v(5);
  v << 3.0, -3.0, 0.5, -1.0, 1.0;
  const Eigen::VectorXd p = prox(v, 1.0);
  CHECK(p[0] == 2.0);
  CHECK(p[1] == -2.0);
  CHECK(p[2] == 0.0);
  CHECK(p[3] == 0.0);  // |v| = lambda exactly: the kink resolves to 0
  CHECK(p[4] == 0.0);

  const Eigen::VectorXd q = prox(v, 0.25);  // threshold shrinks with the scale
  CHECK(q[0] == 2.75);
  CHECK(q[3] == -0.75);

  auto value = l1_value(0.5);
  CHECK(value(v) == 0.5 * 8.5);
  CHECK_THROWS_AS(soft_threshold_prox(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(l1_value(-0.5), std::invalid_argument);
}

TEST_CASE("soft threshold output satisfies the subgradient inclusion") {
  const double lambda = 0.7;
  auto prox = soft_threshold_prox(lambda);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::VectorXd v = 3.0 * random_point(10 + rep, 8);
    const double scale = 0.1 + 0.3 * (rep % 5);
    const Eigen::VectorXd p = prox(v, scale);
    const Eigen::VectorXd s = (v - p) / scale;  // must lie in lambda * d||p||_1
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      CHECK(std::abs(s[i]) <= lambda + 1e-10);
      if (p[i] != 0.0) {
        CHECK(std::abs(s[i] - lambda * (p[i] > 0 ? 1.0 : -1.0)) <= 1e-10);
      }
    }
  }
}

TEST_CASE("prox-grad step and gradient mapping on the shifted scalar") {
  const CompositeProblem p = shifted_scalar_problem();
  Eigen::VectorXd y(1);
  y << 1.0;
  const Eigen::VectorXd t = prox_grad_step(p, y, 1.0);
  CHECK(t[0] == 3.0);  // forward point 4, threshold 1
  const Eigen::VectorXd g = gradient_mapping(p, y, 1.0);
  CHECK(g[0] == -2.0);

  // x = 3 minimizes F = 0.5 (x-4)^2 + |x|, so the mapping vanishes there.
  y << 3.0;
  CHECK(gradient_mapping(p, y, 1.0).norm() == 0.0);

  CHECK_THROWS_AS(prox_grad_step(p, y, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(prox_grad_step(p, y, -2.0), std::invalid_argument);
  Eigen::VectorXd wrong(2);
  wrong << 1.0, 2.0;
  CHECK_THROWS_AS(prox_grad_step(p, wrong, 1.0), std::invalid_argument);
}

TEST_CASE("non-finite gradients are reported with their coordinate") {
  CompositeProblem p(
      2, 1.0, 0.0, zero_value(),
      [](const Eigen::VectorXd&) {
        Eigen::VectorXd g(2);
        g << 0.0, std::numeric_limits<double>::quiet_NaN();
        return g;
      },
      zero_value(), identity_prox());
  Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_WITH_AS(prox_grad_step(p, y, 1.0), doctest::Contains("coordinate 1"),
                       std::domain_error);

  Eigen::VectorXd bad(2);
  bad << std::numeric_limits<double>::infinity(), 0.0;
  CHECK_THROWS_WITH_AS(prox_grad_step(p, bad, 1.0), doctest::Contains("coordinate 0"),
                       std::domain_error);
}

TEST_CASE("bregman divergence of a quadratic is its exact second-order form") {
  Eigen::VectorXd d(3);
  d << 0.2, 0.6, 1.0;
  const CompositeProblem p = diag_l1_problem(d, 0.2, 1.0, 0.3);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::VectorXd x = random_point(30 + rep, 3);
    const Eigen::VectorXd y = random_point(50 + rep, 3);
    const double expected = 0.5 * (x - y).dot(d.cwiseProduct(x - y));
    CHECK(std::abs(bregman(p, x, y) - expected) <= 1e-12 * (1.0 + std::abs(expected)));
    CHECK(bregman(p, x, x) == 0.0);
  }
}

TEST_CASE("the two step models differ by exactly the bregman divergence") {
  Eigen::VectorXd d(4);
  d << 0.0, 0.4, 0.7, 1.0;
  const CompositeProblem p = diag_l1_problem(d, 0.0, 1.0, 0.5);
  for (int rep = 0; rep < 25; ++rep) {
    const Eigen::VectorXd x = 2.0 * random_point(70 + rep, 4);
    const Eigen::VectorXd y = 2.0 * random_point(95 + rep, 4);
    const double L_used = 0.5 + 0.25 * (rep % 7);
    const double lhs = prox_grad_model(p, x, y, L_used);
    const double rhs = prox_point_model(p, x, y, L_used) - bregman(p, x, y);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("regret is nonnegative and infinite outside the domain of g") {
  Eigen::VectorXd d(3);
  d << 0.1, 0.5, 1.0;
  const CompositeProblem p = diag_l1_problem(d, 0.1, 1.0, 0.4);
  for (int rep = 0; rep < 15; ++rep) {
    const Eigen::VectorXd x = random_point(120 + rep, 3);
    const Eigen::VectorXd y = random_point(140 + rep, 3);
    const StepQuantities sq = regret_and_linearization(p, x, y, 1.0);
    CHECK(!sq.infinite_regret);
    CHECK(sq.epsilon >= -1e-10 * (1.0 + std::abs(p.objective(x))));
    CHECK(std::abs(sq.lin_at_x + sq.epsilon - p.objective(x)) <=
          1e-10 * (1.0 + std::abs(p.objective(x))));
    // The mapping agrees with the standalone helper.
    CHECK((sq.grad_map - gradient_mapping(p, y, 1.0)).norm() == 0.0);
    CHECK((sq.x_plus - prox_grad_step(p, y, 1.0)).norm() == 0.0);
  }

  // Indicator of the nonnegative half-line: the regret against an infeasible
  // x is infinite and flagged.
  CompositeProblem half(
      1, 1.0, 0.0,
      [](const Eigen::VectorXd& x) { return 0.5 * x[0] * x[0]; },
      [](const Eigen::VectorXd& x) { return x; },
      [](const Eigen::VectorXd& x) {
        return x[0] >= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      },
      [](const Eigen::VectorXd& v, double) {
        return Eigen::VectorXd::Constant(1, std::max(v[0], 0.0)).eval();
      });
  Eigen::VectorXd x_bad(1), y0(1);
  x_bad << -1.0;
  y0 << 2.0;
  const StepQuantities sq = regret_and_linearization(half, x_bad, y0, 1.0);
  CHECK(sq.infinite_regret);
  CHECK(std::isinf(sq.epsilon));
}

TEST_CASE("strengthened descent residual stays nonnegative over random pairs") {
  Eigen::VectorXd d(6);
  d << 0.05, 0.2, 0.4, 0.6, 0.8, 1.0;
  const double mu = 0.05;

  SUBCASE("with the exact strong convexity constant") {
    const CompositeProblem p = diag_l1_problem(d, mu, 1.0, 0.3);
    for (int rep = 0; rep < 200; ++rep) {
      const Eigen::VectorXd x = 2.5 * random_point(200 + rep, 6);
      const Eigen::VectorXd y = 2.5 * random_point(500 + rep, 6);
      CHECK(proximal_inequality_residual(p, x, y, 1.0) >= -1e-10);
    }
  }
  SUBCASE("with understated strong convexity") {
    const CompositeProblem p = diag_l1_problem(d, 0.0, 1.0, 0.3);
    for (int rep = 0; rep < 200; ++rep) {
      const Eigen::VectorXd x = 2.5 * random_point(200 + rep, 6);
      const Eigen::VectorXd y = 2.5 * random_point(500 + rep, 6);
      CHECK(proximal_inequality_residual(p, x, y, 1.0) >= -1e-10);
    }
  }
  SUBCASE("with an overstated step constant") {
    const CompositeProblem p = diag_l1_problem(d, mu, 1.0, 0.3);
    for (int rep = 0; rep < 100; ++rep) {
      const Eigen::VectorXd x = 2.5 * random_point(200 + rep, 6);
      const Eigen::VectorXd y = 2.5 * random_point(500 + rep, 6);
      CHECK(proximal_inequality_residual(p, x, y, 4.0) >= -1e-10);
    }
  }
}

TEST_CASE("counting view tallies the three oracle families") {
  const CompositeProblem base = shifted_scalar_problem();
  CountingProblem counted(base);
  const CompositeProblem& view = counted.problem();
  Eigen::VectorXd y(1);
  y << 1.0;

  CHECK(counted.counts().f_evals == 0);
  view.smooth_value(y);
  view.smooth_value(y);
  CHECK(counted.counts().f_evals == 2);
  view.smooth_gradient(y);
  CHECK(counted.counts().grad_evals == 1);
  view.prox(y, 1.0);
  view.prox(y, 0.5);
  view.prox(y, 2.0);
  CHECK(counted.counts().prox_evals == 3);

  // The nonsmooth value is bookkeeping, not a counted oracle.
  view.nonsmooth_value(y);
  CHECK(counted.counts().f_evals == 2);

  // One composite step spends one gradient and one prox on the view.
  prox_grad_step(view, y, 1.0);
  CHECK(counted.counts().grad_evals == 2);
  CHECK(counted.counts().prox_evals == 4);

  // The view reproduces the base values exactly.
  CHECK(view.objective(y) == base.objective(y));
  CHECK(view.lipschitz() == base.lipschitz());
  CHECK(view.dim() == base.dim());
}
