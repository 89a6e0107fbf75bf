// qfisher: scenario runner for the Fisher information / quantum potential / heat field suite.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qfisher/app/config.hpp"
#include "qfisher/app/report.hpp"
#include "qfisher/app/runner.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4 };

struct RunOptions {
  std::string config;
  std::string out;
  std::string format = "json";
  bool dump_fields = false;
  std::size_t refinements = 3;
};

qfisher::app::Format parse_format(const std::string& f) {
  return f == "csv" ? qfisher::app::Format::csv : qfisher::app::Format::json;
}

void write_or_print(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
  } else {
    qfisher::app::write_text(path, text);
  }
}

std::string fields_path(const RunOptions& o, const qfisher::app::ScenarioConfig& cfg) {
  if (o.out.empty()) return cfg.scenario_id + "_fields.csv";
  std::filesystem::path p(o.out);
  p.replace_extension();
  return p.string() + "_fields.csv";
}

void report_warnings(const qfisher::app::RunReport& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
}

int run(const RunOptions& o, qfisher::app::Mode mode) {
  using namespace qfisher::app;
  const ScenarioConfig cfg = load_config(o.config);
  const RunReport report = run_scenario(cfg, mode);
  report_warnings(report);
  write_or_print(render_report(report, parse_format(o.format)), o.out);
  if (o.dump_fields) {
    write_text(fields_path(o, cfg), render_fields(cfg, *report.density));
  }
  return kOk;
}

int run_convergence(const RunOptions& o) {
  using namespace qfisher::app;
  const ScenarioConfig cfg = load_config(o.config);
  const RunReport report = qfisher::app::run_convergence(cfg, o.refinements);
  report_warnings(report);
  write_or_print(render_report(report, parse_format(o.format)), o.out);
  return kOk;
}

int run_catalog(const std::string& out) {
  write_or_print(qfisher::app::catalog_json(qfisher::PhysicalConstants{}).dump(2) + "\n", out);
  return kOk;
}

void add_run_flags(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config, "scenario JSON file")->required();
  cmd->add_option("--out", o.out, "output path (default: stdout)");
  cmd->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fisher information, quantum potential and heat field identity checks"};
  app.set_version_flag("--version", std::string(qfisher::app::kVersion));
  app.require_subcommand(1);

  RunOptions analyze_opts;
  auto* analyze = app.add_subcommand("analyze", "static density checks");
  add_run_flags(analyze, analyze_opts);
  analyze->add_flag("--dump-fields", analyze_opts.dump_fields, "also write a CSV of field profiles");

  RunOptions evolve_opts;
  auto* evolve = app.add_subcommand("evolve", "Crank-Nicolson trajectory and time-dependent checks");
  add_run_flags(evolve, evolve_opts);
  evolve->add_flag("--dump-fields", evolve_opts.dump_fields, "also write a CSV of field profiles");

  RunOptions conv_opts;
  auto* convergence = app.add_subcommand("convergence", "grid refinement study of the configured checks");
  add_run_flags(convergence, conv_opts);
  convergence->add_option("--refinements", conv_opts.refinements, "number of spacing halvings")->required();

  std::string catalog_out;
  auto* catalog = app.add_subcommand("catalog", "list analytic densities and their oracle values");
  catalog->add_option("--out", catalog_out, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*analyze) return run(analyze_opts, qfisher::app::Mode::analyze);
    if (*evolve) return run(evolve_opts, qfisher::app::Mode::evolve);
    if (*convergence) return run_convergence(conv_opts);
    if (*catalog) return run_catalog(catalog_out);
  } catch (const qfisher::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const qfisher::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const qfisher::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const qfisher::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
