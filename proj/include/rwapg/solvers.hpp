#pragma once

#include <Eigen/Dense>

#include <optional>

#include "rwapg/problem.hpp"
#include "rwapg/schedule.hpp"
#include "rwapg/trace.hpp"

namespace rwapg {

/**
 * The four provably equivalent realizations of one accelerated step. Started
 * from the same x_1 = v_1 (= y_1) with the same schedule they generate the
 * same iterates up to round-off; they differ in which auxiliary point is
 * carried between iterations and hence in what can be certified from their
 * traces.
 */
enum class SolverForm { canonical, intermediate, similar_triangle, momentum };

const char* form_name(SolverForm f);
SolverForm form_from_name(const std::string& name);

/**
 * Iterate triple at index k. `y` is the extrapolation point y_k at which the
 * gradient step of iteration k is evaluated. For the momentum form y is the
 * genuine carried state; for the other forms it is recomputed from (x, v) by
 * the step and stored here for inspection.
 */
struct SolverState {
  long k = 1;
  Eigen::VectorXd x;
  Eigen::VectorXd v;
  Eigen::VectorXd y;
  SolverForm form = SolverForm::canonical;
};

// Initial state at k = 1 with x_1 = v_1 = x1 and y_1 derived for the form.
SolverState make_initial_state(const CompositeProblem& p, const Schedule& s,
                               SolverForm form, const Eigen::VectorXd& x1);

/**
 * Scalars and vectors produced while advancing one step; handed back to the
 * caller for monitoring and for the per-step identities checked in the test
 * suite. `theta` is set by the momentum form only, `gamma`/`gamma_hat_next`
 * by the canonical form only.
 */
struct StepDetail {
  Eigen::VectorXd y;
  Eigen::VectorXd grad_map;
  Eigen::VectorXd x_plus;
  double alpha = 0.0;
  double rho_prev = 0.0;
  std::optional<double> theta;
  std::optional<double> gamma;
  std::optional<double> gamma_hat_next;
};

// The aggregated form: y_k mixes v_k and x_k through the weights gamma_k =
// rho_{k-1} L alpha_{k-1}^2 and gamma_{k+1} = (1 - alpha_k) gamma_k + mu
// alpha_k, and v is updated from the gradient mapping.
SolverState step_canonical(const CompositeProblem& p, const Schedule& s,
                           const SolverState& st, StepDetail* detail = nullptr);

// Same step written with the weights tau_k = (L - L alpha_k)/(L alpha_k - mu)
// and xi_k = mu/(L alpha_k - mu); v is updated by a damped gradient-mapping
// step of size 1/(L alpha_k).
SolverState step_intermediate(const CompositeProblem& p, const Schedule& s,
                              const SolverState& st, StepDetail* detail = nullptr);

// Two-point form: v_{k+1} = x_{k+1} + (1/alpha_k - 1)(x_{k+1} - x_k).
SolverState step_similar_triangle(const CompositeProblem& p, const Schedule& s,
                                  const SolverState& st, StepDetail* detail = nullptr);

// Extrapolation form: y_{k+1} = x_{k+1} + theta_{k+1}(x_{k+1} - x_k) with the
// momentum coefficient derived from the schedule. Carries no genuine v; the
// state's v is filled with the reconstruction used by the two-point form.
SolverState step_momentum(const CompositeProblem& p, const Schedule& s,
                          const SolverState& st, StepDetail* detail = nullptr);

struct RunConfig {
  double eps = 1e-8;     // stop when ||G(y_k)|| < eps
  long max_iter = 10000; // hard cap on the iteration index k
  Eigen::VectorXd x1;
  bool record_iterates = false;
};

/**
 * Runs the chosen form from x_1 = v_1 until the gradient-mapping norm drops
 * below eps or max_iter is reached. The schedule's q must match mu/L of the
 * problem. The trace records F(x_k), ||G(y_k)||, the schedule values consumed
 * at step k (alpha_k and rho_{k-1}), and cumulative oracle counts.
 */
Trace run_rwapg(const CompositeProblem& p, const Schedule& s, SolverForm form,
                const RunConfig& cfg);

// Momentum baseline with t_0 = 1, t_{k+1} = (1 + sqrt(1 + 4 t_k^2))/2 and
// theta_{k+1} = (t_k - 1)/t_{k+1}; equals the momentum form driven by the
// inverted-FISTA schedule.
Trace run_fista(const CompositeProblem& p, const RunConfig& cfg);

// Constant-momentum baseline theta = (sqrt(kappa) - 1)/(sqrt(kappa) + 1) with
// kappa = L/mu. Requires mu > 0; mu_override substitutes the problem's mu
// (used when a problem reports modulus zero but an estimate is available).
Trace run_vfista(const CompositeProblem& p, const RunConfig& cfg,
                 std::optional<double> mu_override = std::nullopt);

// Monotone variant: the prox-grad candidate is kept only when it does not
// increase F, and the extrapolation blends the candidate and the incumbent.
Trace run_mfista(const CompositeProblem& p, const RunConfig& cfg);

struct FreeRunConfig {
  double eps = 1e-8;
  long max_iter = 10000;
  Eigen::VectorXd x1;
  bool record_iterates = false;
  // Warm starts for the two online estimates. The defaults are the cold
  // start; pass the true constants when known to skip the early doublings.
  double initial_L = 1.0;
  double initial_mu = 0.5;
};

/**
 * Parameter-free solver: estimates L by a doubling line search on the descent
 * condition (L/2)||x+ - y||^2 >= D_f(x+, y) and mu by averaging local
 * curvature ratios, clamped to [0, L_hat/2]. Uses only the problem's oracles,
 * never its stated L or mu. Per non-backtracking iteration it spends exactly
 * 2 smooth-value, 1 gradient and 1 prox evaluation; each doubling adds one
 * smooth value and one prox call. The trace rows carry alpha_k, mu_hat, L_hat
 * and the cumulative counters.
 */
Trace run_free_rwapg(const CompositeProblem& p, const FreeRunConfig& cfg);

}  // namespace rwapg
