#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "rwapg/analysis.hpp"
#include "rwapg/config.hpp"
#include "rwapg/problem.hpp"
#include "rwapg/schedule.hpp"
#include "rwapg/solvers.hpp"
#include "rwapg/trace.hpp"

namespace rwapg {

// Shortest round-trip decimal rendering; the basis of byte-deterministic
// output. Infinities and NaN render as inf/-inf/nan.
std::string format_double(double v);
std::string format_long(long v);

// The stable trace schema. Unavailable columns are empty fields, never zeros.
inline constexpr const char* kTraceHeader =
    "k,F,gap,nog,grad_map_norm,alpha,rho,theta,mu_hat,L_hat,"
    "f_evals,grad_evals,prox_evals";

/**
 * Writes one solver run: one row per recorded iteration plus the header.
 * `gap` is F - F_star and `nog` the base-2 digit gain relative to the first
 * row; the nog column is empty throughout when the initial gap is not
 * positive. Iterate columns do not go here (see the iterates file).
 */
void write_trace_csv(const std::string& path, const Trace& trace,
                     double F_star);

/**
 * A trace read back from disk: the records plus the derived columns as
 * stored. check* helpers and the certifier consume this form.
 */
struct ParsedTrace {
  Trace trace;
  std::vector<std::optional<double>> gap;
  std::vector<std::optional<double>> nog;
};

// Parse failures name the file and 1-based line.
ParsedTrace read_trace_csv(const std::string& path);

/**
 * Iterate storage: header `k` then coordinate blocks x_0.. plus v_0.. and
 * y_0.. when the run recorded them, one row per iteration, indexed like the
 * trace rows (row r holds the vectors at iteration k = r+1).
 */
void write_iterates_csv(const std::string& path, const Trace& trace);

struct IteratesFile {
  std::vector<long> ks;
  std::vector<Eigen::VectorXd> xs;
  std::vector<Eigen::VectorXd> vs;
  std::vector<Eigen::VectorXd> ys;
};

IteratesFile read_iterates_csv(const std::string& path);

// Ribbon rows over a solver's repetitions; header `k,min,median,max`, k
// starting at 1.
void write_ribbon_csv(const std::string& path,
                      const std::vector<RibbonRow>& rows);
std::vector<RibbonRow> read_ribbon_csv(const std::string& path);

/**
 * One certification finding. `family` is one of trace, iterates, lyapunov,
 * bound, ribbon, manifest; status is pass, fail or skipped (skips carry the
 * reason in `note`). Slack is the worst (most negative is worst) inequality
 * slack observed, meaningful for the two inequality families.
 */
struct CertifyFinding {
  std::string run;
  std::string family;
  std::string status;
  std::optional<double> worst_slack;
  std::string note;
};

struct CertifyReport {
  std::vector<CertifyFinding> findings;
  bool all_pass = true;  // no finding with status fail
};

std::string render_report(const CertifyReport& report);

/**
 * Inequality certificates for one run: the stepwise energy-decay chain
 * (needs x, v and y iterates; skipped with a notice for the momentum form,
 * whose aggregated point is instead reconstructed from x differences for the
 * decay-product bound) and the decay-product bound itself. `x_star` may be
 * null when no reference minimizer is known; both families are then skipped.
 */
std::vector<CertifyFinding> certify_trace(const CompositeProblem& p,
                                          const Schedule& s, SolverForm form,
                                          const Trace& trace,
                                          const Eigen::VectorXd* x_star,
                                          const std::string& run_name);

/**
 * Executes every (solver, repetition) cell of the configuration and writes
 * into output_dir: per-cell trace CSVs `<label>_rep<NNN>.csv`, iterate CSVs
 * `<label>_rep<NNN>_iterates.csv` when recording is on, one
 * `<label>_ribbon.csv` per solver, `certificates.txt`, and `metadata.ini`
 * (written last). Deterministic: a rerun produces byte-identical files.
 */
struct RunSummary {
  std::string output_dir;
  std::vector<std::string> files;   // relative names, in write order
  double F_star = 0.0;
  bool F_star_exact = false;
  CertifyReport certificates;
};

RunSummary run_experiment(const ExperimentConfig& config);

/**
 * Reads a result directory back: rebuilds the problem and schedules from
 * metadata.ini, re-parses every CSV, checks the stored derived columns and
 * ribbons against recomputation, and re-runs the inequality certificates
 * from the stored iterates.
 */
CertifyReport certify_directory(const std::string& dir);

}  // namespace rwapg
