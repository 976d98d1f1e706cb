#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>

namespace rwapg {

/**
 * A composite objective F = f + g given through first-order oracles.
 *
 * f is differentiable with an L-Lipschitz gradient and is mu-strongly convex
 * (mu = 0 means plain convexity). g is proper, closed, convex and is accessed
 * only through its value and its proximal map. Instances are immutable after
 * construction and safe to share across threads.
 */
class CompositeProblem {
 public:
  using ValueFn = std::function<double(const Eigen::VectorXd&)>;
  using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  // prox(point, scale) = argmin_x { scale * g(x) + 0.5 * ||x - point||^2 }
  using ProxFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;

  CompositeProblem(Eigen::Index dim, double lipschitz, double strong_convexity,
                   ValueFn smooth_value, GradFn smooth_gradient,
                   ValueFn nonsmooth_value, ProxFn prox);

  double smooth_value(const Eigen::VectorXd& x) const { return f_(x); }
  Eigen::VectorXd smooth_gradient(const Eigen::VectorXd& x) const { return grad_(x); }
  double nonsmooth_value(const Eigen::VectorXd& x) const { return g_(x); }
  Eigen::VectorXd prox(const Eigen::VectorXd& point, double scale) const {
    return prox_(point, scale);
  }

  // F(x) = f(x) + g(x); may be +infinity where g is.
  double objective(const Eigen::VectorXd& x) const { return f_(x) + g_(x); }

  double lipschitz() const { return lipschitz_; }
  double strong_convexity() const { return strong_convexity_; }
  Eigen::Index dim() const { return dim_; }

 private:
  Eigen::Index dim_;
  double lipschitz_;
  double strong_convexity_;
  ValueFn f_;
  GradFn grad_;
  ValueFn g_;
  ProxFn prox_;
};

// Oracles for the g = 0 and g = lambda*||.||_1 cases.
CompositeProblem::ValueFn zero_value();
CompositeProblem::ProxFn identity_prox();
CompositeProblem::ValueFn l1_value(double lambda);
// Componentwise sign(v) * max(|v| - lambda*scale, 0); ties at the kink go to 0.
CompositeProblem::ProxFn soft_threshold_prox(double lambda);

/**
 * One proximal gradient step at y with step constant L_used:
 *   T(y) = prox(y - grad f(y)/L_used, 1/L_used).
 * Throws std::domain_error naming the first offending coordinate if the
 * gradient (or y itself) is not finite.
 */
Eigen::VectorXd prox_grad_step(const CompositeProblem& p, const Eigen::VectorXd& y,
                               double L_used);

// G(y) = L_used * (y - T(y)). Zero exactly at minimizers of F.
Eigen::VectorXd gradient_mapping(const CompositeProblem& p, const Eigen::VectorXd& y,
                                 double L_used);

// Bregman divergence of the smooth part: f(x) - f(y) - <grad f(y), x - y>.
double bregman(const CompositeProblem& p, const Eigen::VectorXd& x,
               const Eigen::VectorXd& y);

// Upper model of F at y: g(x) + f(y) + <grad f(y), x - y> + (L/2)||x - y||^2.
double prox_grad_model(const CompositeProblem& p, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& y, double L_used);

// Proximal point model: F(x) + (L/2)||x - y||^2. The two models differ by
// exactly the Bregman divergence of f.
double prox_point_model(const CompositeProblem& p, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y, double L_used);

/**
 * Quantities attached to one prox-grad step from y_k, evaluated against the
 * current iterate x_k:
 *   grad_map    G(y_k)
 *   x_plus      T(y_k)
 *   lin_at_x    F(T(y_k)) + <G(y_k), x_k - y_k> + (1/(2 L_used))||G(y_k)||^2
 *   epsilon     F(x_k) - lin_at_x, the one-step regret (>= 0 for convex f)
 * epsilon is +infinity (and infinite_regret set) when g(x_k) = +infinity.
 */
struct StepQuantities {
  Eigen::VectorXd grad_map;
  Eigen::VectorXd x_plus;
  double lin_at_x = 0.0;
  double epsilon = 0.0;
  bool infinite_regret = false;
};

StepQuantities regret_and_linearization(const CompositeProblem& p,
                                        const Eigen::VectorXd& x_k,
                                        const Eigen::VectorXd& y_k, double L_used);

/**
 * Residual of the strengthened prox-grad descent inequality at (x, y):
 *   F(x) - F(T(y)) - <G(y), x - y> - (1/(2L))||G(y)||^2 - (mu/2)||x - y||^2.
 * Nonnegative (up to round-off) whenever L_used dominates the curvature of f
 * and mu understates its strong convexity.
 */
double proximal_inequality_residual(const CompositeProblem& p, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y, double L_used);

// Call totals for the three oracle families that dominate solver cost.
struct OracleCounters {
  long f_evals = 0;
  long grad_evals = 0;
  long prox_evals = 0;
};

/**
 * A counting view over a problem: problem() exposes the same objective with
 * every smooth value / gradient / prox call tallied. One view per run; the
 * underlying problem stays untouched.
 */
class CountingProblem {
 public:
  explicit CountingProblem(const CompositeProblem& base);

  const CompositeProblem& problem() const { return view_; }
  const OracleCounters& counts() const { return *counters_; }

 private:
  std::shared_ptr<OracleCounters> counters_;
  CompositeProblem view_;
};

}  // namespace rwapg
