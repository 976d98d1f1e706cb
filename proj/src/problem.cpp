#include "rwapg/problem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace rwapg {

namespace {

// Index of the first non-finite entry, or -1 when all entries are finite.
Eigen::Index first_non_finite(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return i;
  }
  return -1;
}

void check_dim(const CompositeProblem& p, const Eigen::VectorXd& v, const char* name) {
  if (v.size() != p.dim()) {
    throw std::invalid_argument(std::string(name) + " has size " +
                                std::to_string(v.size()) + ", problem dimension is " +
                                std::to_string(p.dim()));
  }
}

void check_step_constant(double L_used) {
  if (!(L_used > 0.0) || !std::isfinite(L_used)) {
    throw std::invalid_argument("step constant must be positive and finite, got " +
                                std::to_string(L_used));
  }
}

}  // namespace

CompositeProblem::CompositeProblem(Eigen::Index dim, double lipschitz,
                                   double strong_convexity, ValueFn smooth_value,
                                   GradFn smooth_gradient, ValueFn nonsmooth_value,
                                   ProxFn prox)
    : dim_(dim),
      lipschitz_(lipschitz),
      strong_convexity_(strong_convexity),
      f_(std::move(smooth_value)),
      grad_(std::move(smooth_gradient)),
      g_(std::move(nonsmooth_value)),
      prox_(std::move(prox)) {
  if (dim_ < 1) throw std::invalid_argument("problem dimension must be at least 1");
  if (!std::isfinite(lipschitz_) || lipschitz_ <= 0.0) {
    throw std::invalid_argument("Lipschitz constant must be positive and finite");
  }
  if (!(strong_convexity_ >= 0.0) || strong_convexity_ >= lipschitz_) {
    throw std::invalid_argument("strong convexity must satisfy 0 <= mu < L");
  }
  if (!f_ || !grad_ || !g_ || !prox_) {
    throw std::invalid_argument("all four oracles must be provided");
  }
}

CompositeProblem::ValueFn zero_value() {
  return [](const Eigen::VectorXd&) { return 0.0; };
}

CompositeProblem::ProxFn identity_prox() {
  return [](const Eigen::VectorXd& point, double) { return point; };
}

namespace {

void require_valid_weight(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("l1 weight must be finite and nonnegative");
  }
}

}  // namespace

CompositeProblem::ValueFn l1_value(double lambda) {
  require_valid_weight(lambda);
  return [lambda](const Eigen::VectorXd& x) { return lambda * x.lpNorm<1>(); };
}

CompositeProblem::ProxFn soft_threshold_prox(double lambda) {
  require_valid_weight(lambda);
  return [lambda](const Eigen::VectorXd& point, double scale) {
    const double t = lambda * scale;
    Eigen::VectorXd out(point.size());
    for (Eigen::Index i = 0; i < point.size(); ++i) {
      const double v = point[i];
      const double m = std::abs(v) - t;
      out[i] = m > 0.0 ? (v > 0.0 ? m : -m) : 0.0;
    }
    return out;
  };
}

Eigen::VectorXd prox_grad_step(const CompositeProblem& p, const Eigen::VectorXd& y,
                               double L_used) {
  check_dim(p, y, "y");
  check_step_constant(L_used);
  if (Eigen::Index i = first_non_finite(y); i >= 0) {
    throw std::domain_error("base point not finite at coordinate " + std::to_string(i));
  }
  const Eigen::VectorXd grad = p.smooth_gradient(y);
  if (Eigen::Index i = first_non_finite(grad); i >= 0) {
    throw std::domain_error("smooth gradient not finite at coordinate " +
                            std::to_string(i));
  }
  return p.prox(y - grad / L_used, 1.0 / L_used);
}

Eigen::VectorXd gradient_mapping(const CompositeProblem& p, const Eigen::VectorXd& y,
                                 double L_used) {
  return L_used * (y - prox_grad_step(p, y, L_used));
}

double bregman(const CompositeProblem& p, const Eigen::VectorXd& x,
               const Eigen::VectorXd& y) {
  check_dim(p, x, "x");
  check_dim(p, y, "y");
  return p.smooth_value(x) - p.smooth_value(y) - p.smooth_gradient(y).dot(x - y);
}

double prox_grad_model(const CompositeProblem& p, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& y, double L_used) {
  check_dim(p, x, "x");
  check_dim(p, y, "y");
  check_step_constant(L_used);
  return p.nonsmooth_value(x) + p.smooth_value(y) + p.smooth_gradient(y).dot(x - y) +
         0.5 * L_used * (x - y).squaredNorm();
}

double prox_point_model(const CompositeProblem& p, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& y, double L_used) {
  check_dim(p, x, "x");
  check_dim(p, y, "y");
  check_step_constant(L_used);
  return p.objective(x) + 0.5 * L_used * (x - y).squaredNorm();
}

StepQuantities regret_and_linearization(const CompositeProblem& p,
                                        const Eigen::VectorXd& x_k,
                                        const Eigen::VectorXd& y_k, double L_used) {
  check_dim(p, x_k, "x_k");
  StepQuantities q;
  q.x_plus = prox_grad_step(p, y_k, L_used);
  q.grad_map = L_used * (y_k - q.x_plus);
  q.lin_at_x = p.objective(q.x_plus) + q.grad_map.dot(x_k - y_k) +
               q.grad_map.squaredNorm() / (2.0 * L_used);
  const double F_x = p.objective(x_k);
  if (std::isinf(F_x) && F_x > 0.0) {
    q.epsilon = std::numeric_limits<double>::infinity();
    q.infinite_regret = true;
  } else {
    q.epsilon = F_x - q.lin_at_x;
  }
  return q;
}

double proximal_inequality_residual(const CompositeProblem& p, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y, double L_used) {
  check_dim(p, x, "x");
  const Eigen::VectorXd x_plus = prox_grad_step(p, y, L_used);
  const Eigen::VectorXd g = L_used * (y - x_plus);
  return p.objective(x) - p.objective(x_plus) - g.dot(x - y) -
         g.squaredNorm() / (2.0 * L_used) -
         0.5 * p.strong_convexity() * (x - y).squaredNorm();
}

CountingProblem::CountingProblem(const CompositeProblem& base)
    : counters_(std::make_shared<OracleCounters>()),
      view_(base.dim(), base.lipschitz(), base.strong_convexity(),
            [&base, c = counters_](const Eigen::VectorXd& x) {
              ++c->f_evals;
              return base.smooth_value(x);
            },
            [&base, c = counters_](const Eigen::VectorXd& x) {
              ++c->grad_evals;
              return base.smooth_gradient(x);
            },
            [&base](const Eigen::VectorXd& x) { return base.nonsmooth_value(x); },
            [&base, c = counters_](const Eigen::VectorXd& v, double s) {
              ++c->prox_evals;
              return base.prox(v, s);
            }) {}

}  // namespace rwapg
