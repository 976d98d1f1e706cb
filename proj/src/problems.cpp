#include "rwapg/problems.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

#include "rwapg/rng.hpp"

namespace rwapg {

QuadraticProblem make_quadratic(const QuadraticSpec& spec, ModulusChoice choice) {
  if (spec.n < 2) throw std::invalid_argument("quadratic spec needs n >= 2");
  if (!(spec.L > 0.0) || !(spec.mu >= 0.0) || !(spec.mu < spec.L)) {
    throw std::invalid_argument("quadratic spec needs 0 <= mu < L");
  }
  Eigen::VectorXd d(spec.n);
  const double gap = (spec.L - spec.mu) / static_cast<double>(spec.n - 1);
  if (spec.shifted) {
    for (Eigen::Index i = 0; i < spec.n; ++i) {
      d[i] = spec.mu + static_cast<double>(i) * gap;
    }
  } else {
    d[0] = 0.0;
    for (Eigen::Index i = 1; i < spec.n; ++i) {
      d[i] = spec.mu + static_cast<double>(i) * gap;
    }
  }
  d[spec.n - 1] = spec.L;  // exact top eigenvalue regardless of round-off

  const double true_modulus = spec.shifted ? spec.mu : 0.0;
  const double advertised =
      choice == ModulusChoice::spectrum ? spec.mu : true_modulus;

  CompositeProblem problem(
      spec.n, spec.L, advertised,
      [d](const Eigen::VectorXd& x) { return 0.5 * x.dot(d.cwiseProduct(x)); },
      [d](const Eigen::VectorXd& x) { return d.cwiseProduct(x).eval(); },
      zero_value(), identity_prox());

  QuadraticProblem out{std::move(problem), d,      spec.mu, true_modulus,
                       Eigen::VectorXd::Zero(spec.n), 0.0,  spec};
  return out;
}

double power_iteration_largest(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply, Eigen::Index n,
    std::uint64_t seed, double rel_tol, long max_iter) {
  Eigen::VectorXd v = rng::normal_vector(seed, rng::kStreamPowerIteration, n);
  v.normalize();
  double lambda = 0.0;
  for (long it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = apply(v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;  // started in the kernel of a PSD operator
    v = w / norm;
    if (it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) {
      return next;
    }
    lambda = next;
  }
  return lambda;
}

LassoProblem make_lasso(const LassoSpec& spec) {
  if (spec.m < 1 || spec.n < 1) throw std::invalid_argument("lasso spec needs m, n >= 1");
  if (!(spec.lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");

  Eigen::MatrixXd A(spec.m, spec.n);
  {
    // Column-major fill from one stream keeps the instance a pure function
    // of the seed.
    Eigen::VectorXd entries =
        rng::normal_vector(spec.seed, rng::kStreamMatrix, spec.m * spec.n);
    Eigen::Index idx = 0;
    for (Eigen::Index j = 0; j < spec.n; ++j) {
      for (Eigen::Index i = 0; i < spec.m; ++i) A(i, j) = entries[idx++];
    }
  }
  Eigen::VectorXd x_dagger(spec.n);
  for (Eigen::Index i = 0; i < spec.n; ++i) x_dagger[i] = (i % 2 == 0) ? 1.0 : -1.0;
  Eigen::VectorXd b = A * x_dagger;

  const double L_est = power_iteration_largest(
      [&A](const Eigen::VectorXd& v) { return (A.transpose() * (A * v)).eval(); },
      spec.n, spec.seed);
  double mu_est = 0.0;
  if (spec.m >= spec.n) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.transpose() * A);
    mu_est = std::max(0.0, es.eigenvalues().minCoeff());
  }

  // The advertised modulus must sit strictly below L; fall back to 0 in the
  // degenerate case of a flat spectrum.
  const double advertised = mu_est < L_est ? mu_est : 0.0;

  CompositeProblem problem(
      spec.n, L_est, advertised,
      [A, b](const Eigen::VectorXd& x) { return 0.5 * (A * x - b).squaredNorm(); },
      [A, b](const Eigen::VectorXd& x) {
        return (A.transpose() * (A * x - b)).eval();
      },
      l1_value(spec.lambda), soft_threshold_prox(spec.lambda));

  LassoProblem out{std::move(problem), std::move(A), std::move(b),
                   std::move(x_dagger), L_est,        mu_est,
                   spec};
  return out;
}

Eigen::VectorXd draw_initial(const QuadraticSpec& spec, long repetition) {
  if (repetition < 0) throw std::invalid_argument("repetition must be nonnegative");
  return rng::normal_vector(spec.seed,
                            rng::kStreamInitialBase + static_cast<std::uint64_t>(repetition),
                            spec.n);
}

Eigen::VectorXd draw_initial(const LassoSpec& spec, long repetition) {
  if (repetition < 0) throw std::invalid_argument("repetition must be nonnegative");
  return rng::normal_vector(spec.seed,
                            rng::kStreamInitialBase + static_cast<std::uint64_t>(repetition),
                            spec.n);
}

}  // namespace rwapg
