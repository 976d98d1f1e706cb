#include "rwapg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rwapg {

double kahan_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("kahan_dot: size mismatch");
  double sum = 0.0, comp = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double term = a[i] * b[i] - comp;
    const double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  return sum;
}

double kahan_squared_norm(const Eigen::VectorXd& a) { return kahan_dot(a, a); }

LyapunovRecord lyapunov_step(const CompositeProblem& p, const Schedule& s,
                             const SolverState& state_k, const SolverState& state_next,
                             double R_k, const Eigen::VectorXd& x_star) {
  if (state_next.k != state_k.k + 1) {
    throw std::invalid_argument("state_next must be the successor of state_k");
  }
  const long k = state_k.k;
  const double L = p.lipschitz();
  const double mu = p.strong_convexity();
  const double a = s.alpha(k);
  const double a_prev = s.alpha(k - 1);
  const double gamma = s.rho(k - 1) * L * a_prev * a_prev;
  const double gamma_hat = (1.0 - a) * gamma + mu * a;

  const StepQuantities q = regret_and_linearization(p, state_k.x, state_k.y, L);
  const double g_sq = kahan_squared_norm(q.grad_map);

  LyapunovRecord rec;
  rec.k = k;
  rec.R_k = R_k;
  rec.epsilon_k = q.epsilon;
  rec.g_term = 0.5 * (1.0 / L - a * a / gamma_hat) * g_sq;
  const double carried =
      (1.0 - a) * (q.epsilon + R_k +
                   mu * a * gamma / (2.0 * gamma_hat) *
                       kahan_squared_norm(state_k.v - state_k.y));
  rec.R_next = rec.g_term + carried;
  rec.R_next_reduced = carried;

  const double F_star = p.objective(x_star);
  const double F_next = p.objective(state_next.x);
  const double F_curr = p.objective(state_k.x);
  rec.lhs = F_next - F_star + rec.R_next +
            0.5 * gamma_hat * kahan_squared_norm(state_next.v - x_star);
  rec.rhs = (1.0 - a) * (F_curr - F_star + R_k +
                         0.5 * gamma * kahan_squared_norm(state_k.v - x_star));
  rec.slack = rec.rhs - rec.lhs;

  rec.descent_at_ref = F_next - F_star + kahan_dot(q.grad_map, x_star - state_k.y) +
                       0.5 * mu * kahan_squared_norm(state_k.y - x_star) +
                       g_sq / (2.0 * L);
  const double dist2 = kahan_squared_norm(state_k.y - x_star);
  rec.observed_curvature = dist2 > 0.0 ? 2.0 * bregman(p, x_star, state_k.y) / dist2 : 0.0;
  return rec;
}

CertificateReport convergence_certificate(const Trace& trace, const Schedule& s,
                                          const CompositeProblem& p,
                                          const Eigen::VectorXd& x_star, double F_star,
                                          double tol_scale) {
  if (trace.xs.empty() || trace.vs.empty()) {
    throw std::invalid_argument(
        "convergence certificate needs recorded iterates (xs and vs)");
  }
  if (trace.xs.size() != trace.vs.size()) {
    throw std::invalid_argument("trace xs/vs length mismatch");
  }
  const double L = p.lipschitz();
  const double a0 = s.alpha(0);

  CertificateReport rep;
  rep.initial_energy = p.objective(trace.xs[0]) - F_star +
                       0.5 * L * a0 * a0 * kahan_squared_norm(trace.vs[0] - x_star);
  rep.worst_slack = std::numeric_limits<double>::infinity();

  const std::size_t steps = trace.xs.size();
  for (std::size_t i = 1; i < steps; ++i) {
    // Entry i holds x_{k+1}, v_{k+1} for k = i in the 1-based trace indexing.
    const long k = static_cast<long>(i);
    const double a = s.alpha(k);
    CertificateRow row;
    row.k = k;
    row.lhs = p.objective(trace.xs[i]) - F_star +
              0.5 * L * a * a * kahan_squared_norm(trace.vs[i] - x_star);
    row.bound = bound_factor(s, k).value * rep.initial_energy;
    row.slack = row.bound - row.lhs;
    row.pass = row.slack >= -tol_scale * (1.0 + std::abs(rep.initial_energy));
    if (row.slack < rep.worst_slack) rep.worst_slack = row.slack;
    if (!row.pass) rep.all_pass = false;
    rep.rows.push_back(row);
  }
  if (rep.rows.empty()) rep.worst_slack = 0.0;
  return rep;
}

NogSeries nog(const Trace& trace, double F_star) {
  NogSeries out;
  if (trace.rows.empty()) {
    out.defined = false;
    return out;
  }
  const double gap0 = trace.rows.front().F - F_star;
  if (!(gap0 > 0.0)) {
    out.defined = false;
    return out;
  }
  out.delta.reserve(trace.rows.size());
  for (const auto& row : trace.rows) {
    out.delta.push_back(std::log2((row.F - F_star) / gap0));
  }
  return out;
}

std::vector<RibbonRow> aggregate_ribbon(const std::vector<std::vector<double>>& curves) {
  if (curves.empty()) {
    throw std::invalid_argument("ribbon aggregation needs at least one curve");
  }
  std::vector<RibbonRow> out;
  std::size_t longest = 0;
  for (const auto& c : curves) {
    if (c.empty()) throw std::invalid_argument("ribbon aggregation over an empty curve");
    longest = std::max(longest, c.size());
  }

  out.resize(longest);
  std::vector<double> column(curves.size());
  for (std::size_t i = 0; i < longest; ++i) {
    for (std::size_t j = 0; j < curves.size(); ++j) {
      // Shorter curves are padded with their terminal value.
      column[j] = i < curves[j].size() ? curves[j][i] : curves[j].back();
    }
    std::sort(column.begin(), column.end());
    RibbonRow row;
    row.min = column.front();
    row.max = column.back();
    const std::size_t n = column.size();
    row.median = (n % 2 == 1) ? column[n / 2]
                              : 0.5 * (column[n / 2 - 1] + column[n / 2]);
    out[i] = row;
  }
  return out;
}

}  // namespace rwapg
