#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

#include "rwapg/problem.hpp"

namespace rwapg {

/**
 * Diagonal quadratic test problem f(x) = (1/2) x' A x, g = 0. The default
 * spectrum is
 *   diag(0, mu + (L - mu)/(N-1), mu + 2(L - mu)/(N-1), ..., L),
 * which has a zero eigenvalue: its true strong convexity modulus is 0 even
 * though `mu` shapes the rest of the spectrum. With `shifted` set the
 * diagonal is linspace(mu, L, N) instead, making the problem genuinely
 * mu-strongly convex.
 */
struct QuadraticSpec {
  Eigen::Index n = 16;
  double mu = 0.0;
  double L = 1.0;
  std::uint64_t seed = 0;
  bool shifted = false;
};

// Which modulus the handed-out problem advertises as its strong convexity.
// Solvers and certificates consume what the problem states, so `spectrum`
// reproduces published runs that feed the spectrum parameter to solvers,
// while `true_modulus` keeps every certified inequality sound.
enum class ModulusChoice { true_modulus, spectrum };

struct QuadraticProblem {
  CompositeProblem problem;
  Eigen::VectorXd diagonal;
  double spectrum_mu = 0.0;   // the mu parameter of the spec
  double true_modulus = 0.0;  // smallest eigenvalue actually present
  Eigen::VectorXd x_star;     // the zero vector
  double F_star = 0.0;
  QuadraticSpec spec;
};

QuadraticProblem make_quadratic(const QuadraticSpec& spec,
                                ModulusChoice choice = ModulusChoice::true_modulus);

/**
 * f(x) = (1/2)||Ax - b||^2, g = lambda ||x||_1 with A an m-by-n standard
 * normal matrix and b = A x_dagger for the alternating-sign vector
 * x_dagger = (1, -1, 1, ...). L is the largest eigenvalue of A'A found by
 * power iteration; mu is its smallest eigenvalue for m >= n and 0 otherwise.
 */
struct LassoSpec {
  Eigen::Index m = 64;
  Eigen::Index n = 256;
  double lambda = 1.0;
  std::uint64_t seed = 0;
};

struct LassoProblem {
  CompositeProblem problem;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd x_dagger;
  double L_est = 0.0;
  double mu_est = 0.0;
  LassoSpec spec;
};

LassoProblem make_lasso(const LassoSpec& spec);

// Standard normal initial iterate for the given repetition index; a fixed
// function of (seed, repetition), independent of call order.
Eigen::VectorXd draw_initial(const QuadraticSpec& spec, long repetition);
Eigen::VectorXd draw_initial(const LassoSpec& spec, long repetition);

/**
 * Largest eigenvalue of a symmetric PSD operator by power iteration, run to
 * the given relative tolerance between successive Rayleigh quotients. The
 * start vector is drawn from (seed, fixed stream) so results are
 * reproducible.
 */
double power_iteration_largest(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply, Eigen::Index n,
    std::uint64_t seed, double rel_tol = 1e-8, long max_iter = 100000);

}  // namespace rwapg
