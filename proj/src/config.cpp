#include "rwapg/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace rwapg {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail_at(long line, const std::string& message) {
  std::ostringstream os;
  os << "line " << line << ": " << message;
  throw std::runtime_error(os.str());
}

[[noreturn]] void fail_in(const std::string& path, long line,
                          const std::string& message) {
  std::ostringstream os;
  os << path;
  if (line > 0) os << ":" << line;
  os << ": " << message;
  throw std::runtime_error(os.str());
}

double parse_double_or_fail(const std::string& path, long line,
                            const std::string& key, const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
    fail_in(path, line, "value of '" + key + "' is not a number: " + text);
  }
  return v;
}

long parse_long_or_fail(const std::string& path, long line,
                        const std::string& key, const std::string& text) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
    fail_in(path, line, "value of '" + key + "' is not an integer: " + text);
  }
  return v;
}

bool parse_bool_or_fail(const std::string& path, long line,
                        const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  fail_in(path, line, "value of '" + key + "' is not a boolean: " + text);
}

std::vector<double> parse_double_list_or_fail(const std::string& path,
                                              long line,
                                              const std::string& key,
                                              const std::string& text) {
  std::string normalized = text;
  for (char& c : normalized) {
    if (c == ',') c = ' ';
  }
  std::istringstream is(normalized);
  std::vector<double> values;
  std::string token;
  while (is >> token) {
    values.push_back(parse_double_or_fail(path, line, key, token));
  }
  if (values.empty()) {
    fail_in(path, line, "value of '" + key + "' lists no numbers");
  }
  return values;
}

long line_of(const ConfigSection& section, const std::string& key) {
  const auto it = section.entry_lines.find(key);
  return it == section.entry_lines.end() ? section.line : it->second;
}

// Compact numeric fragment for labels and file names: shortest decimal with
// '.' and '-' replaced by filename-safe letters.
std::string label_number(double v) {
  std::ostringstream os;
  os << v;
  std::string s = os.str();
  for (char& c : s) {
    if (c == '.') c = 'p';
    if (c == '-') c = 'm';
  }
  return s;
}

}  // namespace

std::vector<ConfigSection> parse_ini(std::istream& in) {
  std::vector<ConfigSection> sections;
  sections.push_back(ConfigSection{"", 0, {}, {}});
  std::string raw;
  long line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text[0] == '#' || text[0] == ';') continue;
    if (text.front() == '[') {
      if (text.back() != ']') fail_at(line, "unterminated section header");
      const std::string name = trim(text.substr(1, text.size() - 2));
      if (name.empty()) fail_at(line, "empty section name");
      sections.push_back(ConfigSection{name, line, {}, {}});
      continue;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      fail_at(line, "expected 'key = value' or '[section]'");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) fail_at(line, "empty key");
    ConfigSection& section = sections.back();
    if (section.entries.count(key) != 0) {
      fail_at(line, "duplicate key '" + key + "' in section [" +
                        section.name + "]");
    }
    section.entries[key] = value;
    section.entry_lines[key] = line;
  }
  // Drop the unnamed leading section when nothing was written into it.
  if (sections.front().entries.empty()) sections.erase(sections.begin());
  return sections;
}

std::vector<ConfigSection> parse_ini_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  try {
    return parse_ini(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

Schedule ScheduleSpec::build(double q_problem, long horizon) const {
  if (q.has_value()) {
    const double mismatch = std::abs(*q - q_problem);
    if (mismatch > 1e-12 * std::max(1.0, q_problem)) {
      std::ostringstream os;
      os << "schedule declares q = " << *q << " but the problem has q = "
         << q_problem;
      throw std::invalid_argument(os.str());
    }
  }
  if (kind == "chambolle_dossal") {
    return Schedule::chambolle_dossal(a.value_or(2.0));
  }
  if (kind == "constant") {
    return Schedule::constant(r.value_or(1.0), q_problem);
  }
  if (kind == "inverted_fista") {
    return Schedule::inverted_fista(std::max(horizon + 2, 4L));
  }
  if (kind == "custom") {
    if (alphas.empty()) {
      throw std::invalid_argument("custom schedule lists no alpha values");
    }
    return Schedule::custom(alphas, q_problem);
  }
  throw std::invalid_argument("unknown schedule kind: " + kind);
}

std::string ScheduleSpec::tag() const {
  if (kind == "chambolle_dossal") return "cd" + label_number(a.value_or(2.0));
  if (kind == "constant") return "const" + label_number(r.value_or(1.0));
  if (kind == "inverted_fista") return "tfista";
  if (kind == "custom") return "custom";
  return kind;
}

ScheduleSpec schedule_spec_from_section(const ConfigSection& section) {
  ScheduleSpec spec;
  const std::string path = "[" + section.name + "]";
  for (const auto& [key, value] : section.entries) {
    const long line = line_of(section, key);
    if (key == "kind") {
      spec.kind = value;
    } else if (key == "a") {
      spec.a = parse_double_or_fail(path, line, key, value);
    } else if (key == "r") {
      spec.r = parse_double_or_fail(path, line, key, value);
    } else if (key == "q") {
      spec.q = parse_double_or_fail(path, line, key, value);
    } else if (key == "alpha") {
      spec.alphas = parse_double_list_or_fail(path, line, key, value);
    } else {
      fail_in(path, line, "unknown schedule key '" + key + "'");
    }
  }
  if (spec.kind.empty()) {
    fail_in(path, section.line, "schedule needs a 'kind' entry");
  }
  return spec;
}

const char* solver_kind_name(SolverKind k) {
  switch (k) {
    case SolverKind::rwapg: return "rwapg";
    case SolverKind::free_rwapg: return "free";
    case SolverKind::fista: return "fista";
    case SolverKind::vfista: return "vfista";
    case SolverKind::mfista: return "mfista";
  }
  throw std::invalid_argument("unknown solver kind");
}

namespace {

SolverKind solver_kind_from_name(const std::string& name,
                                 const std::string& path, long line) {
  if (name == "rwapg") return SolverKind::rwapg;
  if (name == "free" || name == "free_rwapg") return SolverKind::free_rwapg;
  if (name == "fista") return SolverKind::fista;
  if (name == "vfista") return SolverKind::vfista;
  if (name == "mfista") return SolverKind::mfista;
  fail_in(path, line, "unknown solver '" + name + "'");
}

SolverEntry solver_entry_from_section(const ConfigSection& section,
                                      const std::string& path) {
  SolverEntry entry;
  const auto solver_it = section.entries.find("solver");
  if (solver_it == section.entries.end()) {
    fail_in(path, section.line, "[solver] section needs a 'solver' entry");
  }
  entry.kind = solver_kind_from_name(solver_it->second, path,
                                     line_of(section, "solver"));

  ScheduleSpec schedule;
  bool has_schedule_key = false;
  for (const auto& [key, value] : section.entries) {
    const long line = line_of(section, key);
    if (key == "solver") continue;
    if (key == "label") {
      entry.label = value;
    } else if (key == "form") {
      if (entry.kind != SolverKind::rwapg) {
        fail_in(path, line, "'form' applies only to solver = rwapg");
      }
      try {
        entry.form = form_from_name(value);
      } catch (const std::invalid_argument& e) {
        fail_in(path, line, e.what());
      }
    } else if (key == "schedule" || key == "a" || key == "r" || key == "q" ||
               key == "alpha") {
      if (entry.kind != SolverKind::rwapg) {
        fail_in(path, line, "'" + key + "' applies only to solver = rwapg");
      }
      has_schedule_key = true;
      if (key == "schedule") {
        schedule.kind = value;
      } else if (key == "a") {
        schedule.a = parse_double_or_fail(path, line, key, value);
      } else if (key == "r") {
        schedule.r = parse_double_or_fail(path, line, key, value);
      } else if (key == "q") {
        schedule.q = parse_double_or_fail(path, line, key, value);
      } else {
        schedule.alphas = parse_double_list_or_fail(path, line, key, value);
      }
    } else if (key == "mu_override") {
      if (entry.kind != SolverKind::vfista) {
        fail_in(path, line, "'mu_override' applies only to solver = vfista");
      }
      entry.mu_override = parse_double_or_fail(path, line, key, value);
    } else if (key == "initial_L") {
      if (entry.kind != SolverKind::free_rwapg) {
        fail_in(path, line, "'initial_L' applies only to solver = free");
      }
      entry.initial_L = parse_double_or_fail(path, line, key, value);
    } else if (key == "initial_mu") {
      if (entry.kind != SolverKind::free_rwapg) {
        fail_in(path, line, "'initial_mu' applies only to solver = free");
      }
      entry.initial_mu = parse_double_or_fail(path, line, key, value);
    } else {
      fail_in(path, line, "unknown solver key '" + key + "'");
    }
  }

  if (entry.kind == SolverKind::rwapg) {
    if (schedule.kind.empty()) {
      if (has_schedule_key) {
        fail_in(path, section.line,
                "schedule parameters given without 'schedule = <kind>'");
      }
      schedule.kind = "chambolle_dossal";
    }
    entry.schedule = std::move(schedule);
  }
  return entry;
}

std::string default_label(const SolverEntry& entry) {
  std::string label = solver_kind_name(entry.kind);
  if (entry.kind == SolverKind::rwapg) {
    label += std::string("_") + form_name(entry.form) + "_" +
             entry.schedule->tag();
  }
  return label;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  return interpret_config_sections(parse_ini_file(path), path, true);
}

ExperimentConfig interpret_config_sections(
    const std::vector<ConfigSection>& sections, const std::string& context,
    bool apply_env_override) {
  const std::string& path = context;
  ExperimentConfig config;
  bool saw_problem = false;

  for (const ConfigSection& section : sections) {
    if (section.name.empty()) {
      const auto& first = *section.entries.begin();
      fail_in(path, line_of(section, first.first),
              "key '" + first.first + "' appears before any [section]");
    }
    if (section.name == "problem") {
      if (saw_problem) fail_in(path, section.line, "second [problem] section");
      saw_problem = true;
      const auto type_it = section.entries.find("type");
      if (type_it == section.entries.end()) {
        fail_in(path, section.line, "[problem] needs a 'type' entry");
      }
      const std::string& type = type_it->second;
      if (type == "quadratic") {
        QuadraticSpec spec;
        for (const auto& [key, value] : section.entries) {
          const long line = line_of(section, key);
          if (key == "type") continue;
          if (key == "n") {
            spec.n = parse_long_or_fail(path, line, key, value);
          } else if (key == "mu") {
            spec.mu = parse_double_or_fail(path, line, key, value);
          } else if (key == "L") {
            spec.L = parse_double_or_fail(path, line, key, value);
          } else if (key == "seed") {
            spec.seed = static_cast<std::uint64_t>(
                parse_long_or_fail(path, line, key, value));
          } else if (key == "shifted") {
            spec.shifted = parse_bool_or_fail(path, line, key, value);
          } else if (key == "modulus") {
            if (value == "true" || value == "true_modulus") {
              config.modulus = ModulusChoice::true_modulus;
            } else if (value == "spectrum") {
              config.modulus = ModulusChoice::spectrum;
            } else {
              fail_in(path, line,
                      "modulus must be 'true' or 'spectrum', got: " + value);
            }
          } else {
            fail_in(path, line, "unknown quadratic key '" + key + "'");
          }
        }
        config.problem = spec;
      } else if (type == "lasso") {
        LassoSpec spec;
        for (const auto& [key, value] : section.entries) {
          const long line = line_of(section, key);
          if (key == "type") continue;
          if (key == "m") {
            spec.m = parse_long_or_fail(path, line, key, value);
          } else if (key == "n") {
            spec.n = parse_long_or_fail(path, line, key, value);
          } else if (key == "lambda") {
            spec.lambda = parse_double_or_fail(path, line, key, value);
          } else if (key == "seed") {
            spec.seed = static_cast<std::uint64_t>(
                parse_long_or_fail(path, line, key, value));
          } else {
            fail_in(path, line, "unknown lasso key '" + key + "'");
          }
        }
        config.problem = spec;
      } else {
        fail_in(path, line_of(section, "type"),
                "unknown problem type '" + type + "'");
      }
    } else if (section.name == "run") {
      for (const auto& [key, value] : section.entries) {
        const long line = line_of(section, key);
        if (key == "repetitions") {
          config.repetitions = parse_long_or_fail(path, line, key, value);
        } else if (key == "eps") {
          config.eps = parse_double_or_fail(path, line, key, value);
        } else if (key == "max_iter") {
          config.max_iter = parse_long_or_fail(path, line, key, value);
        } else if (key == "output_dir") {
          config.output_dir = value;
        } else if (key == "record_iterates") {
          config.record_iterates = parse_bool_or_fail(path, line, key, value);
        } else {
          fail_in(path, line, "unknown run key '" + key + "'");
        }
      }
    } else if (section.name == "solver") {
      config.solvers.push_back(solver_entry_from_section(section, path));
    } else {
      fail_in(path, section.line, "unknown section [" + section.name + "]");
    }
  }

  if (!saw_problem) fail_in(path, 0, "missing [problem] section");
  if (config.solvers.empty()) fail_in(path, 0, "no [solver] sections");
  if (config.repetitions < 1) fail_in(path, 0, "repetitions must be >= 1");
  if (!(config.eps > 0.0) || !std::isfinite(config.eps)) {
    fail_in(path, 0, "eps must be positive and finite");
  }
  if (config.max_iter < 1) fail_in(path, 0, "max_iter must be >= 1");

  if (apply_env_override) {
    if (const char* env = std::getenv("RWAPG_OUTPUT_DIR")) {
      if (*env != '\0') config.output_dir = env;
    }
  }

  for (auto& entry : config.solvers) {
    if (entry.label.empty()) entry.label = default_label(entry);
  }
  for (std::size_t i = 0; i < config.solvers.size(); ++i) {
    for (std::size_t j = i + 1; j < config.solvers.size(); ++j) {
      if (config.solvers[i].label == config.solvers[j].label) {
        fail_in(path, 0,
                "two solvers share the label '" + config.solvers[i].label +
                    "'; set distinct 'label' entries");
      }
    }
  }
  return config;
}

ScheduleFileContents load_schedule_spec(const std::string& path) {
  std::vector<ConfigSection> sections = parse_ini_file(path);
  if (sections.empty()) fail_in(path, 0, "file holds no schedule entries");
  if (sections.size() > 1) {
    fail_in(path, sections[1].line,
            "schedule file must hold a single section");
  }
  ConfigSection section = sections.front();
  if (!section.name.empty() && section.name != "schedule") {
    fail_in(path, section.line, "unknown section [" + section.name + "]");
  }

  ScheduleFileContents contents;
  const auto horizon_it = section.entries.find("horizon");
  if (horizon_it != section.entries.end()) {
    contents.horizon = parse_long_or_fail(path, line_of(section, "horizon"),
                                          "horizon", horizon_it->second);
    if (contents.horizon < 1) {
      fail_in(path, line_of(section, "horizon"), "horizon must be >= 1");
    }
    section.entries.erase("horizon");
    section.entry_lines.erase("horizon");
  }
  try {
    contents.spec = schedule_spec_from_section(section);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return contents;
}

}  // namespace rwapg
