#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rwapg/problems.hpp"
#include "rwapg/schedule.hpp"
#include "rwapg/solvers.hpp"

namespace rwapg {

/**
 * Minimal key = value configuration format with [section] headers. A header
 * opens a new section even when the name repeats, so ordered multi-entry
 * groups (one [solver] block per solver) work naturally. '#' and ';' start
 * comments. Keys before any header land in an unnamed leading section. Parse
 * failures report 1-based line numbers.
 */
struct ConfigSection {
  std::string name;
  long line = 0;  // line of the header (0 for the unnamed leading section)
  std::map<std::string, std::string> entries;
  std::map<std::string, long> entry_lines;
};

std::vector<ConfigSection> parse_ini(std::istream& in);
std::vector<ConfigSection> parse_ini_file(const std::string& path);

/**
 * Declarative schedule description as read from configuration:
 *   kind = chambolle_dossal | constant | inverted_fista | custom
 * with `a` for the first, `r` (and optional `q`) for the second and an
 * `alpha` list for the last. `q` is validated against the problem when the
 * schedule is built for a run.
 */
struct ScheduleSpec {
  std::string kind;
  std::optional<double> a;
  std::optional<double> r;
  std::optional<double> q;
  std::vector<double> alphas;

  // Builds the schedule for a problem with ratio q_problem. `horizon` sizes
  // the precomputed kinds.
  Schedule build(double q_problem, long horizon) const;
  std::string tag() const;  // short deterministic label fragment, e.g. "cd3"
};

ScheduleSpec schedule_spec_from_section(const ConfigSection& section);

enum class SolverKind { rwapg, free_rwapg, fista, vfista, mfista };

const char* solver_kind_name(SolverKind k);

struct SolverEntry {
  SolverKind kind = SolverKind::rwapg;
  SolverForm form = SolverForm::canonical;     // rwapg only
  std::optional<ScheduleSpec> schedule;        // rwapg only
  std::optional<double> mu_override;           // vfista on modulus-zero problems
  std::optional<double> initial_L;             // free_rwapg warm starts
  std::optional<double> initial_mu;
  std::string label;
};

struct ExperimentConfig {
  std::variant<QuadraticSpec, LassoSpec> problem;
  ModulusChoice modulus = ModulusChoice::true_modulus;  // quadratic only
  std::vector<SolverEntry> solvers;
  long repetitions = 1;
  double eps = 1e-8;
  long max_iter = 10000;
  std::string output_dir;
  bool record_iterates = true;  // needed for certification of schedule-driven runs
};

/**
 * Loads and validates an experiment configuration. Unknown sections or keys
 * are errors naming the offender and its line. The RWAPG_OUTPUT_DIR
 * environment variable, when set, overrides [run] output_dir.
 */
ExperimentConfig load_experiment_config(const std::string& path);

// Interprets already parsed [problem]/[run]/[solver] sections; `context`
// names the source in diagnostics. Shared between the config loader and the
// output-manifest reader, which strips its extra sections first.
ExperimentConfig interpret_config_sections(
    const std::vector<ConfigSection>& sections, const std::string& context,
    bool apply_env_override);

// Loads a schedule spec from a file holding the keys at top level (an
// optional [schedule] header is accepted), plus an optional horizon key.
struct ScheduleFileContents {
  ScheduleSpec spec;
  long horizon = 1000;
};

ScheduleFileContents load_schedule_spec(const std::string& path);

}  // namespace rwapg
