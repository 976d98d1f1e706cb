#include "CLI11.hpp"

#include <exception>
#include <iostream>
#include <string>

#include "rwapg/config.hpp"
#include "rwapg/experiment.hpp"
#include "rwapg/schedule.hpp"
#include "rwapg/version.hpp"

namespace {

int run_command(const std::string& config_path) {
  const rwapg::ExperimentConfig config =
      rwapg::load_experiment_config(config_path);
  const rwapg::RunSummary summary = rwapg::run_experiment(config);
  std::cout << "wrote " << summary.files.size() << " files to "
            << summary.output_dir << "\n";
  std::cout << "F_star (" << (summary.F_star_exact ? "exact" : "surrogate")
            << ") = " << rwapg::format_double(summary.F_star) << "\n";
  std::cout << rwapg::render_report(summary.certificates);
  return summary.certificates.all_pass ? 0 : 1;
}

int certify_command(const std::string& dir) {
  const rwapg::CertifyReport report = rwapg::certify_directory(dir);
  std::cout << rwapg::render_report(report);
  return report.all_pass ? 0 : 1;
}

int validate_schedule_command(const std::string& spec_path) {
  const rwapg::ScheduleFileContents contents =
      rwapg::load_schedule_spec(spec_path);
  const rwapg::ScheduleSpec& spec = contents.spec;
  if (spec.kind == "constant" && !spec.q.has_value()) {
    throw std::invalid_argument(
        "a constant schedule needs 'q' to be validated");
  }
  const double q = spec.q.value_or(0.0);
  const rwapg::Schedule schedule = spec.build(q, contents.horizon);

  const rwapg::ValidationReport report =
      rwapg::validate(schedule, contents.horizon);
  std::cout << "kind: " << schedule.kind_name() << "\n";
  std::cout << "q: " << rwapg::format_double(schedule.q()) << "\n";
  std::cout << "checked horizon: " << report.checked_horizon << "\n";
  std::cout << "max recurrence residual: "
            << rwapg::format_double(report.max_recurrence_residual) << "\n";
  if (!report.valid) {
    std::cout << "invalid at index " << report.first_invalid_index << ": "
              << report.reason << "\n";
    return 1;
  }
  std::cout << "admissible: yes\n";

  if (spec.kind == "inverted_fista") {
    const rwapg::TSequenceReport t =
        rwapg::inverted_fista_check(schedule, contents.horizon);
    if (!t.premises_ok || !t.recursion_ok) {
      std::cout << "reciprocal recursion check failed at index "
                << t.first_bad_index << ": " << t.reason << "\n";
      return 1;
    }
    std::cout << "reciprocal recursion: ok (max product deviation "
              << rwapg::format_double(t.max_product_deviation) << ")\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composite optimization benchmark harness"};
  app.set_version_flag("--version", std::string(rwapg::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run =
      app.add_subcommand("run", "execute an experiment configuration");
  run->add_option("config", config_path, "configuration file")->required();

  std::string certify_dir;
  CLI::App* certify =
      app.add_subcommand("certify", "re-check a result directory");
  certify->add_option("dir", certify_dir, "directory written by run")
      ->required();

  std::string schedule_path;
  CLI::App* validate = app.add_subcommand(
      "validate-schedule", "check a schedule description for admissibility");
  validate->add_option("spec", schedule_path, "schedule description file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(config_path);
    if (certify->parsed()) return certify_command(certify_dir);
    return validate_schedule_command(schedule_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
