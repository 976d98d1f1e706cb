#include "rwapg/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <utility>
#include <variant>

#include "rwapg/problems.hpp"
#include "rwapg/version.hpp"

namespace fs = std::filesystem;

namespace rwapg {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_long(long v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string opt_cell(const std::optional<double>& v) {
  return v.has_value() ? format_double(*v) : std::string();
}

std::string opt_cell(const std::optional<long>& v) {
  return v.has_value() ? format_long(*v) : std::string();
}

[[noreturn]] void fail_at(const std::string& path, long line,
                          const std::string& message) {
  std::ostringstream os;
  os << path << ":" << line << ": " << message;
  throw std::runtime_error(os.str());
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(begin));
      return fields;
    }
    fields.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
}

double parse_field_double(const std::string& path, long line,
                          const std::string& column, const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    fail_at(path, line, "column '" + column + "' is not a number: " + text);
  }
  return v;
}

long parse_field_long(const std::string& path, long line,
                      const std::string& column, const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
    fail_at(path, line, "column '" + column + "' is not an integer: " + text);
  }
  return v;
}

std::optional<double> parse_opt_double(const std::string& path, long line,
                                       const std::string& column,
                                       const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_field_double(path, line, column, text);
}

std::optional<long> parse_opt_long(const std::string& path, long line,
                                   const std::string& column,
                                   const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_field_long(path, line, column, text);
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::runtime_error(path + ": write failed");
}

// Same-machine reproducibility comparison: exact for non-finite values,
// relative for finite ones.
bool matches(double stored, double expected, double rel) {
  if (std::isnan(stored) || std::isnan(expected)) {
    return std::isnan(stored) && std::isnan(expected);
  }
  if (std::isinf(stored) || std::isinf(expected)) return stored == expected;
  const double scale =
      std::max(1.0, std::max(std::abs(stored), std::abs(expected)));
  return std::abs(stored - expected) <= rel * scale;
}

std::string rep_tag(long rep) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%03ld", rep);
  return buf;
}

std::string trace_file_name(const std::string& label, long rep) {
  return label + "_rep" + rep_tag(rep) + ".csv";
}

std::string iterates_file_name(const std::string& label, long rep) {
  return label + "_rep" + rep_tag(rep) + "_iterates.csv";
}

std::string ribbon_file_name(const std::string& label) {
  return label + "_ribbon.csv";
}

std::string run_display_name(const std::string& label, long rep) {
  return label + " rep " + rep_tag(rep);
}

}  // namespace

void write_trace_csv(const std::string& path, const Trace& trace,
                     double F_star) {
  const NogSeries series = nog(trace, F_star);
  std::ofstream out = open_for_write(path);
  out << kTraceHeader << "\n";
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const IterationRecord& r = trace.rows[i];
    out << format_long(r.k) << ',' << format_double(r.F) << ','
        << format_double(r.F - F_star) << ','
        << (series.defined ? format_double(series.delta[i]) : std::string())
        << ',' << format_double(r.grad_map_norm) << ',' << opt_cell(r.alpha)
        << ',' << opt_cell(r.rho) << ',' << opt_cell(r.theta) << ','
        << opt_cell(r.mu_hat) << ',' << opt_cell(r.L_hat) << ','
        << opt_cell(r.f_evals) << ',' << opt_cell(r.grad_evals) << ','
        << opt_cell(r.prox_evals) << "\n";
  }
  finish_write(out, path);
}

ParsedTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line)) fail_at(path, 1, "missing header");
  if (line != kTraceHeader) fail_at(path, 1, "unexpected header: " + line);

  ParsedTrace out;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 13) {
      fail_at(path, line_no,
              "expected 13 fields, got " + format_long(static_cast<long>(f.size())));
    }
    IterationRecord r;
    r.k = parse_field_long(path, line_no, "k", f[0]);
    r.F = parse_field_double(path, line_no, "F", f[1]);
    out.gap.push_back(parse_opt_double(path, line_no, "gap", f[2]));
    out.nog.push_back(parse_opt_double(path, line_no, "nog", f[3]));
    r.grad_map_norm = parse_field_double(path, line_no, "grad_map_norm", f[4]);
    r.alpha = parse_opt_double(path, line_no, "alpha", f[5]);
    r.rho = parse_opt_double(path, line_no, "rho", f[6]);
    r.theta = parse_opt_double(path, line_no, "theta", f[7]);
    r.mu_hat = parse_opt_double(path, line_no, "mu_hat", f[8]);
    r.L_hat = parse_opt_double(path, line_no, "L_hat", f[9]);
    r.f_evals = parse_opt_long(path, line_no, "f_evals", f[10]);
    r.grad_evals = parse_opt_long(path, line_no, "grad_evals", f[11]);
    r.prox_evals = parse_opt_long(path, line_no, "prox_evals", f[12]);
    out.trace.rows.push_back(std::move(r));
  }
  return out;
}

void write_iterates_csv(const std::string& path, const Trace& trace) {
  if (trace.xs.empty()) {
    throw std::invalid_argument("trace recorded no iterates to write");
  }
  const std::size_t rows = trace.rows.size();
  if (trace.xs.size() != rows || trace.ys.size() != rows ||
      (!trace.vs.empty() && trace.vs.size() != rows)) {
    throw std::invalid_argument("iterate arrays do not match the trace rows");
  }
  const long n = static_cast<long>(trace.xs.front().size());
  const bool has_v = !trace.vs.empty();

  std::ofstream out = open_for_write(path);
  out << "k";
  for (long j = 0; j < n; ++j) out << ",x_" << format_long(j);
  if (has_v) {
    for (long j = 0; j < n; ++j) out << ",v_" << format_long(j);
  }
  for (long j = 0; j < n; ++j) out << ",y_" << format_long(j);
  out << "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    out << format_long(trace.rows[i].k);
    for (long j = 0; j < n; ++j) out << ',' << format_double(trace.xs[i][j]);
    if (has_v) {
      for (long j = 0; j < n; ++j) out << ',' << format_double(trace.vs[i][j]);
    }
    for (long j = 0; j < n; ++j) out << ',' << format_double(trace.ys[i][j]);
    out << "\n";
  }
  finish_write(out, path);
}

IteratesFile read_iterates_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::string line;
  if (!std::getline(in, line)) fail_at(path, 1, "missing header");
  const std::vector<std::string> names = split_fields(line);
  if (names.empty() || names[0] != "k") {
    fail_at(path, 1, "header must start with column 'k'");
  }

  // Header layout: contiguous blocks x_0..x_{n-1} [v_0..] y_0..y_{n-1}.
  long n = 0;
  while (1 + n < static_cast<long>(names.size()) &&
         names[1 + n] == "x_" + format_long(n)) {
    ++n;
  }
  if (n == 0) fail_at(path, 1, "header lacks an x_0 column");
  std::size_t pos = 1 + static_cast<std::size_t>(n);
  bool has_v = pos < names.size() && names[pos] == "v_0";
  if (has_v) {
    for (long j = 0; j < n; ++j, ++pos) {
      if (pos >= names.size() || names[pos] != "v_" + format_long(j)) {
        fail_at(path, 1, "malformed v block in header");
      }
    }
  }
  for (long j = 0; j < n; ++j, ++pos) {
    if (pos >= names.size() || names[pos] != "y_" + format_long(j)) {
      fail_at(path, 1, "malformed y block in header");
    }
  }
  if (pos != names.size()) fail_at(path, 1, "trailing columns after y block");

  const std::size_t expected = pos;
  IteratesFile out;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != expected) {
      fail_at(path, line_no,
              "expected " + format_long(static_cast<long>(expected)) +
                  " fields, got " + format_long(static_cast<long>(f.size())));
    }
    out.ks.push_back(parse_field_long(path, line_no, "k", f[0]));
    std::size_t at = 1;
    Eigen::VectorXd x(n), v(n), y(n);
    for (long j = 0; j < n; ++j, ++at) {
      x[j] = parse_field_double(path, line_no, "x_" + format_long(j), f[at]);
    }
    if (has_v) {
      for (long j = 0; j < n; ++j, ++at) {
        v[j] = parse_field_double(path, line_no, "v_" + format_long(j), f[at]);
      }
    }
    for (long j = 0; j < n; ++j, ++at) {
      y[j] = parse_field_double(path, line_no, "y_" + format_long(j), f[at]);
    }
    out.xs.push_back(std::move(x));
    if (has_v) out.vs.push_back(std::move(v));
    out.ys.push_back(std::move(y));
  }
  return out;
}

void write_ribbon_csv(const std::string& path,
                      const std::vector<RibbonRow>& rows) {
  std::ofstream out = open_for_write(path);
  out << "k,min,median,max\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << format_long(static_cast<long>(i) + 1) << ','
        << format_double(rows[i].min) << ',' << format_double(rows[i].median)
        << ',' << format_double(rows[i].max) << "\n";
  }
  finish_write(out, path);
}

std::vector<RibbonRow> read_ribbon_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::string line;
  if (!std::getline(in, line)) fail_at(path, 1, "missing header");
  if (line != "k,min,median,max") fail_at(path, 1, "unexpected header: " + line);
  std::vector<RibbonRow> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 4) fail_at(path, line_no, "expected 4 fields");
    const long k = parse_field_long(path, line_no, "k", f[0]);
    if (k != static_cast<long>(rows.size()) + 1) {
      fail_at(path, line_no, "non-contiguous k column");
    }
    RibbonRow row;
    row.min = parse_field_double(path, line_no, "min", f[1]);
    row.median = parse_field_double(path, line_no, "median", f[2]);
    row.max = parse_field_double(path, line_no, "max", f[3]);
    rows.push_back(row);
  }
  return rows;
}

std::string render_report(const CertifyReport& report) {
  std::ostringstream os;
  for (const CertifyFinding& f : report.findings) {
    os << f.run << " | " << f.family << " | " << f.status;
    if (f.worst_slack.has_value()) {
      os << " | worst slack " << format_double(*f.worst_slack);
    }
    if (!f.note.empty()) os << " | " << f.note;
    os << "\n";
  }
  os << (report.all_pass ? "summary: all checks pass"
                         : "summary: failures present")
     << "\n";
  return os.str();
}

std::vector<CertifyFinding> certify_trace(const CompositeProblem& p,
                                          const Schedule& s, SolverForm form,
                                          const Trace& trace,
                                          const Eigen::VectorXd* x_star,
                                          const std::string& run_name) {
  std::vector<CertifyFinding> out;
  CertifyFinding lya{run_name, "lyapunov", "skipped", std::nullopt, ""};
  CertifyFinding bnd{run_name, "bound", "skipped", std::nullopt, ""};

  if (trace.xs.empty()) {
    lya.note = bnd.note =
        "run recorded no iterates; rerun with record_iterates = true";
    out.push_back(std::move(lya));
    out.push_back(std::move(bnd));
    return out;
  }
  if (trace.xs.size() != trace.rows.size()) {
    throw std::invalid_argument("iterate arrays do not match the trace rows");
  }
  if (x_star == nullptr) {
    lya.note = bnd.note = "no reference minimizer is known for this problem";
    out.push_back(std::move(lya));
    out.push_back(std::move(bnd));
    return out;
  }

  const std::size_t len = trace.xs.size();
  Trace certified = trace;
  bool reconstructed = false;
  if (certified.vs.empty()) {
    if (form != SolverForm::momentum) {
      lya.note = bnd.note =
          "iterates carry no aggregated dual point; canonical, intermediate "
          "and similar_triangle runs record it, and momentum runs are "
          "certified through reconstruction";
      out.push_back(std::move(lya));
      out.push_back(std::move(bnd));
      return out;
    }
    certified.vs.reserve(len);
    certified.vs.push_back(certified.xs[0]);
    for (std::size_t r = 1; r < len; ++r) {
      const double a = s.alpha(static_cast<long>(r));
      certified.vs.push_back(certified.xs[r] + (1.0 / a - 1.0) *
                                                   (certified.xs[r] -
                                                    certified.xs[r - 1]));
    }
    reconstructed = true;
  }

  if (form == SolverForm::momentum) {
    lya.status = "skipped";
    lya.note =
        "momentum runs carry no recorded aggregated point; the stepwise "
        "chain is certified on canonical, intermediate or similar_triangle "
        "runs";
  } else if (certified.ys.size() != len) {
    lya.status = "skipped";
    lya.note = "no extrapolation points recorded";
  } else if (len < 2) {
    lya.status = "skipped";
    lya.note = "fewer than two recorded iterations";
  } else {
    double R = 0.0;
    double worst = std::numeric_limits<double>::infinity();
    bool pass = true;
    for (std::size_t r = 0; r + 1 < len; ++r) {
      SolverState sk;
      sk.k = static_cast<long>(r) + 1;
      sk.x = certified.xs[r];
      sk.v = certified.vs[r];
      sk.y = certified.ys[r];
      sk.form = form;
      SolverState sn;
      sn.k = sk.k + 1;
      sn.x = certified.xs[r + 1];
      sn.v = certified.vs[r + 1];
      sn.y = certified.ys[r + 1];
      sn.form = form;
      const LyapunovRecord rec = lyapunov_step(p, s, sk, sn, R, *x_star);
      worst = std::min(worst, rec.slack);
      const double tol = 1e-10 * (1.0 + std::abs(trace.rows[r].F));
      if (rec.slack < -tol) pass = false;
      R = rec.R_next;
    }
    lya.status = pass ? "pass" : "fail";
    lya.worst_slack = worst;
    lya.note = format_long(static_cast<long>(len) - 1) + " steps";
  }

  const CertificateReport rep =
      convergence_certificate(certified, s, p, *x_star, p.objective(*x_star));
  bnd.status = rep.all_pass ? "pass" : "fail";
  bnd.worst_slack = rep.worst_slack;
  bnd.note = format_long(static_cast<long>(rep.rows.size())) + " rows";
  if (reconstructed) {
    bnd.note += "; aggregated point reconstructed from x differences";
  }

  out.push_back(std::move(lya));
  out.push_back(std::move(bnd));
  return out;
}

namespace {

struct BuiltProblem {
  CompositeProblem problem;
  std::optional<Eigen::VectorXd> x_star;
  std::optional<double> exact_F_star;
  std::vector<std::pair<std::string, std::string>> constants;
};

BuiltProblem build_problem(const ExperimentConfig& config) {
  if (std::holds_alternative<QuadraticSpec>(config.problem)) {
    QuadraticProblem qp =
        make_quadratic(std::get<QuadraticSpec>(config.problem), config.modulus);
    return BuiltProblem{std::move(qp.problem), std::move(qp.x_star),
                        qp.F_star, {}};
  }
  LassoProblem lp = make_lasso(std::get<LassoSpec>(config.problem));
  BuiltProblem built{std::move(lp.problem), std::nullopt, std::nullopt, {}};
  built.constants.emplace_back("L_est", format_double(lp.L_est));
  built.constants.emplace_back("mu_est", format_double(lp.mu_est));
  return built;
}

Eigen::VectorXd initial_point(const ExperimentConfig& config, long rep) {
  if (std::holds_alternative<QuadraticSpec>(config.problem)) {
    return draw_initial(std::get<QuadraticSpec>(config.problem), rep);
  }
  return draw_initial(std::get<LassoSpec>(config.problem), rep);
}

struct Cell {
  Trace trace;
  std::optional<Schedule> schedule;
};

Cell run_cell(const CompositeProblem& p, const SolverEntry& entry,
              const ExperimentConfig& config, const Eigen::VectorXd& x1) {
  Cell cell;
  RunConfig rc;
  rc.eps = config.eps;
  rc.max_iter = config.max_iter;
  rc.x1 = x1;
  rc.record_iterates = config.record_iterates;
  switch (entry.kind) {
    case SolverKind::rwapg: {
      const double q = p.strong_convexity() / p.lipschitz();
      Schedule s = entry.schedule->build(q, config.max_iter + 2);
      cell.trace = run_rwapg(p, s, entry.form, rc);
      cell.schedule = std::move(s);
      break;
    }
    case SolverKind::fista:
      cell.trace = run_fista(p, rc);
      break;
    case SolverKind::vfista:
      cell.trace = run_vfista(p, rc, entry.mu_override);
      break;
    case SolverKind::mfista:
      cell.trace = run_mfista(p, rc);
      break;
    case SolverKind::free_rwapg: {
      FreeRunConfig frc;
      frc.eps = config.eps;
      frc.max_iter = config.max_iter;
      frc.x1 = x1;
      frc.record_iterates = config.record_iterates;
      if (entry.initial_L.has_value()) frc.initial_L = *entry.initial_L;
      if (entry.initial_mu.has_value()) frc.initial_mu = *entry.initial_mu;
      cell.trace = run_free_rwapg(p, frc);
      break;
    }
  }
  return cell;
}

void write_manifest(const std::string& path, const ExperimentConfig& config,
                    const BuiltProblem& built, double F_star,
                    bool F_star_exact) {
  std::ofstream out = open_for_write(path);
  out << "[meta]\n";
  out << "version = " << kVersion << "\n";
  out << "file_format = " << format_long(kFileFormat) << "\n";

  out << "\n[problem]\n";
  if (std::holds_alternative<QuadraticSpec>(config.problem)) {
    const QuadraticSpec& spec = std::get<QuadraticSpec>(config.problem);
    out << "type = quadratic\n";
    out << "n = " << format_long(spec.n) << "\n";
    out << "mu = " << format_double(spec.mu) << "\n";
    out << "L = " << format_double(spec.L) << "\n";
    out << "seed = " << format_long(static_cast<long>(spec.seed)) << "\n";
    out << "shifted = " << (spec.shifted ? "true" : "false") << "\n";
    out << "modulus = "
        << (config.modulus == ModulusChoice::true_modulus ? "true" : "spectrum")
        << "\n";
  } else {
    const LassoSpec& spec = std::get<LassoSpec>(config.problem);
    out << "type = lasso\n";
    out << "m = " << format_long(spec.m) << "\n";
    out << "n = " << format_long(spec.n) << "\n";
    out << "lambda = " << format_double(spec.lambda) << "\n";
    out << "seed = " << format_long(static_cast<long>(spec.seed)) << "\n";
  }

  out << "\n[run]\n";
  out << "repetitions = " << format_long(config.repetitions) << "\n";
  out << "eps = " << format_double(config.eps) << "\n";
  out << "max_iter = " << format_long(config.max_iter) << "\n";
  out << "record_iterates = " << (config.record_iterates ? "true" : "false")
      << "\n";

  for (const SolverEntry& entry : config.solvers) {
    out << "\n[solver]\n";
    out << "solver = " << solver_kind_name(entry.kind) << "\n";
    if (entry.kind == SolverKind::rwapg) {
      out << "form = " << form_name(entry.form) << "\n";
      const ScheduleSpec& sched = *entry.schedule;
      out << "schedule = " << sched.kind << "\n";
      if (sched.a.has_value()) out << "a = " << format_double(*sched.a) << "\n";
      if (sched.r.has_value()) out << "r = " << format_double(*sched.r) << "\n";
      if (sched.q.has_value()) out << "q = " << format_double(*sched.q) << "\n";
      if (!sched.alphas.empty()) {
        out << "alpha =";
        for (double a : sched.alphas) out << " " << format_double(a);
        out << "\n";
      }
    }
    if (entry.mu_override.has_value()) {
      out << "mu_override = " << format_double(*entry.mu_override) << "\n";
    }
    if (entry.initial_L.has_value()) {
      out << "initial_L = " << format_double(*entry.initial_L) << "\n";
    }
    if (entry.initial_mu.has_value()) {
      out << "initial_mu = " << format_double(*entry.initial_mu) << "\n";
    }
    out << "label = " << entry.label << "\n";
  }

  out << "\n[derived]\n";
  out << "F_star = " << format_double(F_star) << "\n";
  out << "F_star_source = " << (F_star_exact ? "exact" : "surrogate") << "\n";
  out << "q = "
      << format_double(built.problem.strong_convexity() /
                       built.problem.lipschitz())
      << "\n";
  for (const auto& [key, value] : built.constants) {
    out << key << " = " << value << "\n";
  }
  finish_write(out, path);
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config) {
  if (config.output_dir.empty()) {
    throw std::invalid_argument(
        "output_dir is not set; set [run] output_dir or RWAPG_OUTPUT_DIR");
  }
  const BuiltProblem built = build_problem(config);
  const CompositeProblem& p = built.problem;

  std::vector<std::vector<Cell>> cells(config.solvers.size());
  for (std::size_t i = 0; i < config.solvers.size(); ++i) {
    for (long rep = 0; rep < config.repetitions; ++rep) {
      cells[i].push_back(
          run_cell(p, config.solvers[i], config, initial_point(config, rep)));
    }
  }

  double F_star = 0.0;
  bool F_star_exact = false;
  if (built.exact_F_star.has_value()) {
    F_star = *built.exact_F_star;
    F_star_exact = true;
  } else {
    F_star = std::numeric_limits<double>::infinity();
    for (const auto& per_solver : cells) {
      for (const Cell& cell : per_solver) {
        for (const IterationRecord& row : cell.trace.rows) {
          F_star = std::min(F_star, row.F);
        }
      }
    }
  }

  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) {
    throw std::runtime_error(config.output_dir +
                             ": cannot create output directory: " +
                             ec.message());
  }

  RunSummary summary;
  summary.output_dir = config.output_dir;
  summary.F_star = F_star;
  summary.F_star_exact = F_star_exact;
  auto path_of = [&](const std::string& name) {
    summary.files.push_back(name);
    return (fs::path(config.output_dir) / name).string();
  };

  for (std::size_t i = 0; i < config.solvers.size(); ++i) {
    const SolverEntry& entry = config.solvers[i];
    std::vector<std::vector<double>> curves;
    for (long rep = 0; rep < config.repetitions; ++rep) {
      const Trace& trace = cells[i][rep].trace;
      write_trace_csv(path_of(trace_file_name(entry.label, rep)), trace,
                      F_star);
      if (!trace.xs.empty()) {
        write_iterates_csv(path_of(iterates_file_name(entry.label, rep)),
                           trace);
      }
      const NogSeries series = nog(trace, F_star);
      if (series.defined) curves.push_back(series.delta);
    }
    if (!curves.empty()) {
      write_ribbon_csv(path_of(ribbon_file_name(entry.label)),
                       aggregate_ribbon(curves));
    }
  }

  CertifyReport report;
  for (std::size_t i = 0; i < config.solvers.size(); ++i) {
    const SolverEntry& entry = config.solvers[i];
    for (long rep = 0; rep < config.repetitions; ++rep) {
      const std::string run_name = run_display_name(entry.label, rep);
      std::vector<CertifyFinding> findings;
      if (entry.kind == SolverKind::rwapg) {
        findings = certify_trace(
            p, *cells[i][rep].schedule, entry.form, cells[i][rep].trace,
            built.x_star.has_value() ? &*built.x_star : nullptr, run_name);
      } else {
        findings.push_back(CertifyFinding{
            run_name, "certificates", "skipped", std::nullopt,
            "inequality certification covers schedule-driven runs "
            "(solver = rwapg)"});
      }
      for (CertifyFinding& f : findings) {
        if (f.status == "fail") report.all_pass = false;
        report.findings.push_back(std::move(f));
      }
    }
  }
  summary.certificates = report;

  {
    std::ofstream out = open_for_write(path_of("certificates.txt"));
    out << render_report(report);
    finish_write(out, "certificates.txt");
  }
  write_manifest(path_of("metadata.ini"), config, built, F_star, F_star_exact);
  return summary;
}

CertifyReport certify_directory(const std::string& dir) {
  const std::string manifest_path = (fs::path(dir) / "metadata.ini").string();
  const std::vector<ConfigSection> sections = parse_ini_file(manifest_path);

  std::optional<double> stored_F_star;
  std::string F_star_source;
  std::vector<ConfigSection> config_sections;
  for (const ConfigSection& section : sections) {
    if (section.name == "meta") {
      const auto it = section.entries.find("file_format");
      if (it == section.entries.end() ||
          parse_field_long(manifest_path, section.line, "file_format",
                           it->second) != kFileFormat) {
        throw std::runtime_error(manifest_path +
                                 ": unsupported or missing file_format");
      }
    } else if (section.name == "derived") {
      const auto f_it = section.entries.find("F_star");
      if (f_it != section.entries.end()) {
        stored_F_star = parse_field_double(manifest_path, section.line,
                                           "F_star", f_it->second);
      }
      const auto s_it = section.entries.find("F_star_source");
      if (s_it != section.entries.end()) F_star_source = s_it->second;
    } else {
      config_sections.push_back(section);
    }
  }

  const ExperimentConfig config =
      interpret_config_sections(config_sections, manifest_path, false);
  const BuiltProblem built = build_problem(config);
  const CompositeProblem& p = built.problem;

  CertifyReport report;
  auto add = [&](CertifyFinding f) {
    if (f.status == "fail") report.all_pass = false;
    report.findings.push_back(std::move(f));
  };

  if (!stored_F_star.has_value()) {
    add(CertifyFinding{"metadata.ini", "manifest", "fail", std::nullopt,
                       "derived F_star entry is missing"});
    return report;
  }
  const double F_star = *stored_F_star;
  if (built.exact_F_star.has_value() &&
      !matches(F_star, *built.exact_F_star, 1e-12)) {
    add(CertifyFinding{"metadata.ini", "manifest", "fail", std::nullopt,
                       "stored F_star disagrees with the rebuilt problem"});
  } else {
    add(CertifyFinding{"metadata.ini", "manifest", "pass", std::nullopt,
                       "problem rebuilt; F_star source: " +
                           (F_star_source.empty() ? std::string("unknown")
                                                  : F_star_source)});
  }

  for (const SolverEntry& entry : config.solvers) {
    std::optional<Schedule> schedule;
    if (entry.kind == SolverKind::rwapg) {
      schedule = entry.schedule->build(
          p.strong_convexity() / p.lipschitz(), config.max_iter + 2);
    }

    std::vector<std::vector<double>> curves;
    for (long rep = 0; rep < config.repetitions; ++rep) {
      const std::string run_name = run_display_name(entry.label, rep);
      const std::string trace_path =
          (fs::path(dir) / trace_file_name(entry.label, rep)).string();

      ParsedTrace parsed;
      try {
        parsed = read_trace_csv(trace_path);
      } catch (const std::runtime_error& e) {
        add(CertifyFinding{run_name, "trace", "fail", std::nullopt, e.what()});
        continue;
      }
      const std::vector<IterationRecord>& rows = parsed.trace.rows;

      {
        std::string problem_note;
        if (rows.empty()) problem_note = "no data rows";
        long prev_f = -1, prev_g = -1, prev_p = -1;
        const double gap0 = rows.empty() ? 0.0 : rows.front().F - F_star;
        const bool nog_defined = gap0 > 0.0;
        for (std::size_t r = 0; r < rows.size() && problem_note.empty(); ++r) {
          const IterationRecord& row = rows[r];
          const std::string at = " at k = " + format_long(row.k);
          if (row.k != static_cast<long>(r) + 1) {
            problem_note = "k column is not contiguous from 1" + at;
          } else if (!std::isfinite(row.F)) {
            problem_note = "non-finite objective" + at;
          } else if (!parsed.gap[r].has_value() ||
                     !matches(*parsed.gap[r], row.F - F_star, 1e-12)) {
            problem_note = "gap column disagrees with F - F_star" + at;
          } else if (nog_defined &&
                     (!parsed.nog[r].has_value() ||
                      !matches(*parsed.nog[r],
                               std::log2((row.F - F_star) / gap0), 1e-12))) {
            problem_note = "nog column disagrees with recomputation" + at;
          } else if (!nog_defined && parsed.nog[r].has_value()) {
            problem_note = "nog column present but undefined for this run" + at;
          } else if (row.f_evals.has_value() && *row.f_evals < prev_f) {
            problem_note = "f_evals decreases" + at;
          } else if (row.grad_evals.has_value() && *row.grad_evals < prev_g) {
            problem_note = "grad_evals decreases" + at;
          } else if (row.prox_evals.has_value() && *row.prox_evals < prev_p) {
            problem_note = "prox_evals decreases" + at;
          }
          if (row.f_evals.has_value()) prev_f = *row.f_evals;
          if (row.grad_evals.has_value()) prev_g = *row.grad_evals;
          if (row.prox_evals.has_value()) prev_p = *row.prox_evals;
        }
        if (problem_note.empty()) {
          add(CertifyFinding{run_name, "trace", "pass", std::nullopt,
                             format_long(static_cast<long>(rows.size())) +
                                 " rows"});
        } else {
          add(CertifyFinding{run_name, "trace", "fail", std::nullopt,
                             problem_note});
        }
      }

      Trace full = parsed.trace;
      const std::string iter_path =
          (fs::path(dir) / iterates_file_name(entry.label, rep)).string();
      const bool iter_exists = fs::exists(iter_path);
      if (config.record_iterates && !iter_exists) {
        add(CertifyFinding{run_name, "iterates", "fail", std::nullopt,
                           "iterates file missing despite record_iterates"});
      } else if (iter_exists) {
        std::string problem_note;
        try {
          IteratesFile iter = read_iterates_csv(iter_path);
          if (iter.ks.size() != rows.size()) {
            problem_note = "iterates row count disagrees with the trace";
          } else if (!iter.xs.empty() &&
                     iter.xs.front().size() != p.dim()) {
            problem_note = "iterate dimension disagrees with the problem";
          } else {
            for (std::size_t r = 0; r < rows.size(); ++r) {
              if (iter.ks[r] != rows[r].k) {
                problem_note = "iterates k column disagrees with the trace";
                break;
              }
              const double recomputed = p.objective(iter.xs[r]);
              if (!matches(rows[r].F, recomputed, 1e-9)) {
                problem_note = "stored F disagrees with F(x) at k = " +
                               format_long(rows[r].k);
                break;
              }
            }
          }
          if (problem_note.empty()) {
            full.xs = std::move(iter.xs);
            full.vs = std::move(iter.vs);
            full.ys = std::move(iter.ys);
            add(CertifyFinding{run_name, "iterates", "pass", std::nullopt,
                               ""});
          } else {
            add(CertifyFinding{run_name, "iterates", "fail", std::nullopt,
                               problem_note});
          }
        } catch (const std::runtime_error& e) {
          add(CertifyFinding{run_name, "iterates", "fail", std::nullopt,
                             e.what()});
        }
      }

      if (entry.kind == SolverKind::rwapg) {
        for (CertifyFinding& f :
             certify_trace(p, *schedule, entry.form, full,
                           built.x_star.has_value() ? &*built.x_star : nullptr,
                           run_name)) {
          add(std::move(f));
        }
      } else {
        add(CertifyFinding{run_name, "certificates", "skipped", std::nullopt,
                           "inequality certification covers schedule-driven "
                           "runs (solver = rwapg)"});
      }

      const NogSeries series = nog(parsed.trace, F_star);
      if (series.defined) curves.push_back(series.delta);
    }

    const std::string ribbon_path =
        (fs::path(dir) / ribbon_file_name(entry.label)).string();
    const bool ribbon_exists = fs::exists(ribbon_path);
    if (curves.empty()) {
      if (ribbon_exists) {
        add(CertifyFinding{entry.label, "ribbon", "fail", std::nullopt,
                           "ribbon present but no repetition defines a "
                           "digit-gain curve"});
      }
      continue;
    }
    std::string problem_note;
    if (!ribbon_exists) {
      problem_note = "ribbon file missing";
    } else {
      try {
        const std::vector<RibbonRow> stored = read_ribbon_csv(ribbon_path);
        const std::vector<RibbonRow> expected = aggregate_ribbon(curves);
        if (stored.size() != expected.size()) {
          problem_note = "ribbon row count disagrees with recomputation";
        } else {
          for (std::size_t r = 0; r < stored.size(); ++r) {
            if (!matches(stored[r].min, expected[r].min, 1e-12) ||
                !matches(stored[r].median, expected[r].median, 1e-12) ||
                !matches(stored[r].max, expected[r].max, 1e-12)) {
              problem_note =
                  "ribbon disagrees with recomputation at k = " +
                  format_long(static_cast<long>(r) + 1);
              break;
            }
          }
        }
      } catch (const std::runtime_error& e) {
        problem_note = e.what();
      }
    }
    if (problem_note.empty()) {
      add(CertifyFinding{entry.label, "ribbon", "pass", std::nullopt,
                         format_long(static_cast<long>(curves.size())) +
                             " curves"});
    } else {
      add(CertifyFinding{entry.label, "ribbon", "fail", std::nullopt,
                         problem_note});
    }
  }
  return report;
}

}  // namespace rwapg
