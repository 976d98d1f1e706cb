#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace rwapg {

/**
 * One monitored iteration. `F` and `grad_map_norm` are always present; the
 * remaining fields are filled only by solvers that produce them and stay
 * empty otherwise (empty, never zero, in the CSV output). Oracle counters are
 * cumulative totals at the time the row was recorded.
 */
struct IterationRecord {
  long k = 0;
  double F = 0.0;
  double grad_map_norm = 0.0;
  std::optional<double> alpha;
  std::optional<double> rho;
  std::optional<double> theta;
  std::optional<double> mu_hat;
  std::optional<double> L_hat;
  std::optional<long> f_evals;
  std::optional<long> grad_evals;
  std::optional<long> prox_evals;
};

/**
 * The record of one solver run. Row r (0-based) describes iteration k = r+1;
 * row k holds F(x_k) and ||G(y_k)|| for the extrapolation point y_k used at
 * that iteration. When iterate recording is on, xs/ys (and vs for forms that
 * maintain the aggregated dual point) hold the full vectors, indexed like
 * rows.
 */
struct Trace {
  std::vector<IterationRecord> rows;
  bool converged = false;
  bool line_search_failed = false;

  std::vector<Eigen::VectorXd> xs;
  std::vector<Eigen::VectorXd> vs;
  std::vector<Eigen::VectorXd> ys;

  long iterations() const { return static_cast<long>(rows.size()); }
  double final_F() const { return rows.empty() ? 0.0 : rows.back().F; }
};

}  // namespace rwapg
