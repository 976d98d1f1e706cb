#include "rwapg/solvers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace rwapg {

namespace {

void check_run_config(const CompositeProblem& p, const Eigen::VectorXd& x1, double eps,
                      long max_iter) {
  if (x1.size() != p.dim()) {
    throw std::invalid_argument("x1 has size " + std::to_string(x1.size()) +
                                ", problem dimension is " + std::to_string(p.dim()));
  }
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
}

// Shared admissibility guard for step index k >= 1.
double admissible_alpha(const Schedule& s, const CompositeProblem& p, long k) {
  const double a = s.alpha(k);
  const double q = p.strong_convexity() / p.lipschitz();
  if (!(a > q && a < 1.0)) {
    throw std::domain_error("alpha_" + std::to_string(k) + " = " + std::to_string(a) +
                            " outside (mu/L, 1); step is undefined");
  }
  return a;
}

// y_k of the aggregated form: weights gamma_k and gamma_{k+1} over (v_k, x_k).
Eigen::VectorXd canonical_y(const CompositeProblem& p, const Schedule& s, long k,
                            const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                            double* gamma_out = nullptr,
                            double* gamma_hat_out = nullptr) {
  const double L = p.lipschitz();
  const double mu = p.strong_convexity();
  const double a = admissible_alpha(s, p, k);
  const double a_prev = s.alpha(k - 1);
  const double gamma = s.rho(k - 1) * L * a_prev * a_prev;
  const double gamma_hat = (1.0 - a) * gamma + mu * a;
  if (gamma_out) *gamma_out = gamma;
  if (gamma_hat_out) *gamma_hat_out = gamma_hat;
  return (a * gamma * v + gamma_hat * x) / (gamma + a * mu);
}

// y_k of the two-weight forms: convex combination with tau_k.
Eigen::VectorXd triangle_y(const CompositeProblem& p, const Schedule& s, long k,
                           const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
  const double L = p.lipschitz();
  const double mu = p.strong_convexity();
  const double a = admissible_alpha(s, p, k);
  const double tau = (L - L * a) / (L * a - mu);
  return (v + tau * x) / (1.0 + tau);
}

}  // namespace

const char* form_name(SolverForm f) {
  switch (f) {
    case SolverForm::canonical: return "canonical";
    case SolverForm::intermediate: return "intermediate";
    case SolverForm::similar_triangle: return "similar_triangle";
    case SolverForm::momentum: return "momentum";
  }
  return "unknown";
}

SolverForm form_from_name(const std::string& name) {
  if (name == "canonical") return SolverForm::canonical;
  if (name == "intermediate") return SolverForm::intermediate;
  if (name == "similar_triangle") return SolverForm::similar_triangle;
  if (name == "momentum") return SolverForm::momentum;
  throw std::invalid_argument("unknown solver form: " + name);
}

SolverState make_initial_state(const CompositeProblem& p, const Schedule&,
                               SolverForm form, const Eigen::VectorXd& x1) {
  if (x1.size() != p.dim()) {
    throw std::invalid_argument("x1 has size " + std::to_string(x1.size()) +
                                ", problem dimension is " + std::to_string(p.dim()));
  }
  SolverState st;
  st.k = 1;
  st.x = x1;
  st.v = x1;
  st.y = x1;  // v_1 = x_1 puts the extrapolation point at x_1 for every form
  st.form = form;
  return st;
}

SolverState step_canonical(const CompositeProblem& p, const Schedule& s,
                           const SolverState& st, StepDetail* detail) {
  const double L = p.lipschitz();
  const double mu = p.strong_convexity();
  const double a = s.alpha(st.k);
  double gamma = 0.0, gamma_hat = 0.0;
  const Eigen::VectorXd y = canonical_y(p, s, st.k, st.x, st.v, &gamma, &gamma_hat);
  const Eigen::VectorXd x_plus = prox_grad_step(p, y, L);
  const Eigen::VectorXd g = L * (y - x_plus);

  SolverState next;
  next.k = st.k + 1;
  next.form = st.form;
  next.x = x_plus;
  next.v = (gamma * (1.0 - a) * st.v - a * g + mu * a * y) / gamma_hat;
  if (s.max_alpha_index() >= next.k) {
    next.y = canonical_y(p, s, next.k, next.x, next.v);
  }

  if (detail) {
    detail->y = y;
    detail->grad_map = g;
    detail->x_plus = x_plus;
    detail->alpha = a;
    detail->rho_prev = s.rho(st.k - 1);
    detail->gamma = gamma;
    detail->gamma_hat_next = gamma_hat;
  }
  return next;
}

SolverState step_intermediate(const CompositeProblem& p, const Schedule& s,
                              const SolverState& st, StepDetail* detail) {
  const double L = p.lipschitz();
  const double mu = p.strong_convexity();
  const double a = s.alpha(st.k);
  const Eigen::VectorXd y = triangle_y(p, s, st.k, st.x, st.v);
  const Eigen::VectorXd x_plus = prox_grad_step(p, y, L);
  const Eigen::VectorXd g = L * (y - x_plus);
  const double xi = mu / (L * a - mu);

  SolverState next;
  next.k = st.k + 1;
  next.form = st.form;
  next.x = x_plus;
  next.v = (st.v + xi * y) / (1.0 + xi) - g / (L * a);
  if (s.max_alpha_index() >= next.k) {
    next.y = triangle_y(p, s, next.k, next.x, next.v);
  }

  if (detail) {
    detail->y = y;
    detail->grad_map = g;
    detail->x_plus = x_plus;
    detail->alpha = a;
    detail->rho_prev = s.rho(st.k - 1);
  }
  return next;
}

SolverState step_similar_triangle(const CompositeProblem& p, const Schedule& s,
                                  const SolverState& st, StepDetail* detail) {
  const double L = p.lipschitz();
  const double a = s.alpha(st.k);
  const Eigen::VectorXd y = triangle_y(p, s, st.k, st.x, st.v);
  const Eigen::VectorXd x_plus = prox_grad_step(p, y, L);
  const Eigen::VectorXd g = L * (y - x_plus);

  SolverState next;
  next.k = st.k + 1;
  next.form = st.form;
  next.x = x_plus;
  next.v = x_plus + (1.0 / a - 1.0) * (x_plus - st.x);
  if (s.max_alpha_index() >= next.k) {
    next.y = triangle_y(p, s, next.k, next.x, next.v);
  }

  if (detail) {
    detail->y = y;
    detail->grad_map = g;
    detail->x_plus = x_plus;
    detail->alpha = a;
    detail->rho_prev = s.rho(st.k - 1);
  }
  return next;
}

SolverState step_momentum(const CompositeProblem& p, const Schedule& s,
                          const SolverState& st, StepDetail* detail) {
  const double L = p.lipschitz();
  const double a = admissible_alpha(s, p, st.k);
  const Eigen::VectorXd x_plus = prox_grad_step(p, st.y, L);
  const Eigen::VectorXd g = L * (st.y - x_plus);
  const double theta = momentum_coefficient(a, s.alpha(st.k + 1), s.rho(st.k));

  SolverState next;
  next.k = st.k + 1;
  next.form = st.form;
  next.x = x_plus;
  next.y = x_plus + theta * (x_plus - st.x);
  // The form carries no aggregated point; expose the two-point reconstruction.
  next.v = x_plus + (1.0 / a - 1.0) * (x_plus - st.x);

  if (detail) {
    detail->y = st.y;
    detail->grad_map = g;
    detail->x_plus = x_plus;
    detail->alpha = a;
    detail->rho_prev = s.rho(st.k - 1);
    detail->theta = theta;
  }
  return next;
}

Trace run_rwapg(const CompositeProblem& p, const Schedule& s, SolverForm form,
                const RunConfig& cfg) {
  check_run_config(p, cfg.x1, cfg.eps, cfg.max_iter);
  const double q_problem = p.strong_convexity() / p.lipschitz();
  if (std::abs(s.q() - q_problem) > 1e-12 * std::max(1.0, q_problem)) {
    throw std::invalid_argument("schedule built for q = " + std::to_string(s.q()) +
                                " but problem has mu/L = " + std::to_string(q_problem));
  }
  if (s.max_alpha_index() < cfg.max_iter + 1) {
    throw std::invalid_argument("schedule horizon must reach max_iter + 1 = " +
                                std::to_string(cfg.max_iter + 1));
  }

  CountingProblem counted(p);
  const CompositeProblem& cp = counted.problem();
  auto step = [&](const SolverState& st, StepDetail* d) {
    switch (form) {
      case SolverForm::canonical: return step_canonical(cp, s, st, d);
      case SolverForm::intermediate: return step_intermediate(cp, s, st, d);
      case SolverForm::similar_triangle: return step_similar_triangle(cp, s, st, d);
      case SolverForm::momentum: return step_momentum(cp, s, st, d);
    }
    throw std::logic_error("unreachable solver form");
  };

  Trace trace;
  SolverState st = make_initial_state(p, s, form, cfg.x1);
  std::optional<double> carried_theta;
  for (;;) {
    StepDetail d;
    SolverState next = step(st, &d);

    IterationRecord row;
    row.k = st.k;
    row.F = p.objective(st.x);  // monitoring; not an algorithmic oracle call
    row.grad_map_norm = d.grad_map.norm();
    row.alpha = d.alpha;
    row.rho = d.rho_prev;
    row.theta = carried_theta;
    row.f_evals = counted.counts().f_evals;
    row.grad_evals = counted.counts().grad_evals;
    row.prox_evals = counted.counts().prox_evals;
    trace.rows.push_back(row);
    if (cfg.record_iterates) {
      trace.xs.push_back(st.x);
      trace.ys.push_back(d.y);
      if (form != SolverForm::momentum) trace.vs.push_back(st.v);
    }

    if (row.grad_map_norm < cfg.eps) {
      trace.converged = true;
      break;
    }
    if (st.k >= cfg.max_iter) break;
    carried_theta = d.theta;
    st = std::move(next);
  }
  return trace;
}

Trace run_fista(const CompositeProblem& p, const RunConfig& cfg) {
  check_run_config(p, cfg.x1, cfg.eps, cfg.max_iter);
  CountingProblem counted(p);
  const CompositeProblem& cp = counted.problem();
  const double L = p.lipschitz();

  Trace trace;
  Eigen::VectorXd x = cfg.x1;
  Eigen::VectorXd y = cfg.x1;
  double t = 0.5 * (1.0 + std::sqrt(5.0));  // t_1, one recursion step past t_0 = 1
  std::optional<double> carried_theta;
  for (long k = 1;; ++k) {
    const Eigen::VectorXd x_plus = prox_grad_step(cp, y, L);
    const Eigen::VectorXd g = L * (y - x_plus);

    IterationRecord row;
    row.k = k;
    row.F = p.objective(x);
    row.grad_map_norm = g.norm();
    row.theta = carried_theta;
    row.f_evals = counted.counts().f_evals;
    row.grad_evals = counted.counts().grad_evals;
    row.prox_evals = counted.counts().prox_evals;
    trace.rows.push_back(row);
    if (cfg.record_iterates) {
      trace.xs.push_back(x);
      trace.ys.push_back(y);
    }

    if (row.grad_map_norm < cfg.eps) {
      trace.converged = true;
      break;
    }
    if (k >= cfg.max_iter) break;

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double theta = (t - 1.0) / t_next;
    y = x_plus + theta * (x_plus - x);
    x = x_plus;
    t = t_next;
    carried_theta = theta;
  }
  return trace;
}

Trace run_vfista(const CompositeProblem& p, const RunConfig& cfg,
                 std::optional<double> mu_override) {
  check_run_config(p, cfg.x1, cfg.eps, cfg.max_iter);
  const double mu = mu_override.value_or(p.strong_convexity());
  if (!(mu > 0.0)) {
    throw std::invalid_argument(
        "this solver needs strong convexity mu > 0; pass an estimate explicitly for "
        "problems reporting modulus zero");
  }
  if (!(mu < p.lipschitz())) {
    throw std::invalid_argument("mu must be smaller than L");
  }
  CountingProblem counted(p);
  const CompositeProblem& cp = counted.problem();
  const double L = p.lipschitz();
  const double root_kappa = std::sqrt(L / mu);
  const double theta = (root_kappa - 1.0) / (root_kappa + 1.0);

  Trace trace;
  Eigen::VectorXd x = cfg.x1;
  Eigen::VectorXd y = cfg.x1;
  for (long k = 1;; ++k) {
    const Eigen::VectorXd x_plus = prox_grad_step(cp, y, L);
    const Eigen::VectorXd g = L * (y - x_plus);

    IterationRecord row;
    row.k = k;
    row.F = p.objective(x);
    row.grad_map_norm = g.norm();
    if (k > 1) row.theta = theta;
    row.f_evals = counted.counts().f_evals;
    row.grad_evals = counted.counts().grad_evals;
    row.prox_evals = counted.counts().prox_evals;
    trace.rows.push_back(row);
    if (cfg.record_iterates) {
      trace.xs.push_back(x);
      trace.ys.push_back(y);
    }

    if (row.grad_map_norm < cfg.eps) {
      trace.converged = true;
      break;
    }
    if (k >= cfg.max_iter) break;

    y = x_plus + theta * (x_plus - x);
    x = x_plus;
  }
  return trace;
}

Trace run_mfista(const CompositeProblem& p, const RunConfig& cfg) {
  check_run_config(p, cfg.x1, cfg.eps, cfg.max_iter);
  CountingProblem counted(p);
  const CompositeProblem& cp = counted.problem();
  const double L = p.lipschitz();

  Trace trace;
  Eigen::VectorXd x = cfg.x1;
  Eigen::VectorXd y = cfg.x1;
  double F_x = cp.objective(x);  // incumbent value, maintained across iterations
  double t = 0.5 * (1.0 + std::sqrt(5.0));
  for (long k = 1;; ++k) {
    const Eigen::VectorXd z = prox_grad_step(cp, y, L);
    const Eigen::VectorXd g = L * (y - z);

    IterationRecord row;
    row.k = k;
    row.F = p.objective(x);
    row.grad_map_norm = g.norm();
    row.f_evals = counted.counts().f_evals;
    row.grad_evals = counted.counts().grad_evals;
    row.prox_evals = counted.counts().prox_evals;
    trace.rows.push_back(row);
    if (cfg.record_iterates) {
      trace.xs.push_back(x);
      trace.ys.push_back(y);
    }

    if (row.grad_map_norm < cfg.eps) {
      trace.converged = true;
      break;
    }
    if (k >= cfg.max_iter) break;

    // Keep the candidate only if it does not increase the objective.
    const double F_z = cp.objective(z);
    const Eigen::VectorXd x_next = (F_z <= F_x) ? z : x;
    const double F_next = std::min(F_z, F_x);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_next + (t / t_next) * (z - x_next) + ((t - 1.0) / t_next) * (x_next - x);
    x = x_next;
    F_x = F_next;
    t = t_next;
  }
  return trace;
}

Trace run_free_rwapg(const CompositeProblem& p, const FreeRunConfig& cfg) {
  check_run_config(p, cfg.x1, cfg.eps, cfg.max_iter);
  if (!(cfg.initial_L > 0.0)) throw std::invalid_argument("initial_L must be positive");
  if (!(cfg.initial_mu >= 0.0)) {
    throw std::invalid_argument("initial_mu must be nonnegative");
  }
  CountingProblem counted(p);
  const CompositeProblem& cp = counted.problem();

  Trace trace;
  Eigen::VectorXd x = cfg.x1;
  Eigen::VectorXd y = cfg.x1;
  double L_hat = cfg.initial_L;
  double mu_hat = cfg.initial_mu;
  double alpha = 1.0;
  double f_y = cp.smooth_value(y);
  double f_x = f_y;  // x_1 = y_1
  std::optional<double> carried_theta;

  for (long k = 1;; ++k) {
    const Eigen::VectorXd grad = cp.smooth_gradient(y);
    Eigen::VectorXd x_plus = cp.prox(y - grad / L_hat, 1.0 / L_hat);
    double f_plus = cp.smooth_value(x_plus);
    // Double L_hat until the quadratic upper model is valid at the step taken.
    long doublings = 0;
    while (0.5 * L_hat * (x_plus - y).squaredNorm() <
           f_plus - f_y - grad.dot(x_plus - y)) {
      if (++doublings > 200) {
        trace.line_search_failed = true;
        break;
      }
      L_hat *= 2.0;
      x_plus = cp.prox(y - grad / L_hat, 1.0 / L_hat);
      f_plus = cp.smooth_value(x_plus);
    }
    const Eigen::VectorXd g = L_hat * (y - x_plus);

    IterationRecord row;
    row.k = k;
    row.F = f_x + p.nonsmooth_value(x);
    row.grad_map_norm = g.norm();
    row.alpha = alpha;
    row.theta = carried_theta;
    row.mu_hat = mu_hat;
    row.L_hat = L_hat;
    row.f_evals = counted.counts().f_evals;
    row.grad_evals = counted.counts().grad_evals;
    row.prox_evals = counted.counts().prox_evals;
    trace.rows.push_back(row);
    if (cfg.record_iterates) {
      trace.xs.push_back(x);
      trace.ys.push_back(y);
    }

    if (trace.line_search_failed) break;
    if (row.grad_map_norm < cfg.eps) {
      trace.converged = true;
      break;
    }
    if (k >= cfg.max_iter) break;

    const double alpha_next = free_alpha_update(alpha, mu_hat / L_hat);
    const double theta = alpha * (1.0 - alpha) / (alpha * alpha + alpha_next);
    const Eigen::VectorXd y_next = x_plus + theta * (x_plus - x);
    const double f_y_next = cp.smooth_value(y_next);
    const double dy2 = (y_next - y).squaredNorm();
    if (dy2 < 1e-24) {
      // Consecutive extrapolation points collided; the curvature ratio is
      // uninformative, so let the estimate decay instead.
      mu_hat = 0.5 * mu_hat;
    } else {
      const double bregman_y = f_y_next - f_y - grad.dot(y_next - y);
      mu_hat = bregman_y / dy2 + 0.5 * mu_hat;
    }
    mu_hat = std::min(std::max(mu_hat, 0.0), 0.5 * L_hat);

    x = x_plus;
    f_x = f_plus;
    y = y_next;
    f_y = f_y_next;
    alpha = alpha_next;
    carried_theta = theta;
  }
  return trace;
}

}  // namespace rwapg
