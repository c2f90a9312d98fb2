#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nmq/config.hpp"
#include "nmq/control.hpp"
#include "nmq/runner.hpp"

namespace {

struct RunOptions {
  std::string config;
  std::string scenario;
  std::string out;
  std::optional<double> dt;
  std::string mode;
  std::string engine;
  bool paper_compat = false;
  unsigned threads = 0;
};

nmq::ScenarioConfig resolve(const RunOptions& o) {
  std::optional<nmq::ScenarioId> forced;
  if (!o.scenario.empty()) forced = nmq::parse_scenario_id(o.scenario);
  nmq::ScenarioConfig cfg = o.config.empty() ? nmq::builtin_scenario(forced.value_or(nmq::ScenarioId::Custom))
                                             : nmq::load_config(o.config, forced);
  if (!o.out.empty()) cfg.output = o.out;
  if (o.dt) cfg.integrator.dt = *o.dt;
  if (!o.mode.empty()) cfg.mode = nmq::parse_representation(o.mode);
  if (!o.engine.empty()) cfg.engine = nmq::parse_engine(o.engine);
  if (o.paper_compat) cfg.paper_compat = true;
  return cfg;
}

void write_error_manifest(const std::filesystem::path& dir, const nmq::ScenarioConfig* cfg,
                          const nmq::RunFailure& failure) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return;
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << nmq::error_manifest_json(cfg, failure);
}

int cmd_run(const RunOptions& o) {
  std::optional<nmq::ScenarioConfig> cfg;
  try {
    cfg = resolve(o);
    nmq::validate(*cfg);
  } catch (const nmq::Error& e) {
    std::cerr << "nmq: " << e.what() << "\n";
    const std::filesystem::path dir = !o.out.empty() ? std::filesystem::path(o.out)
                                      : cfg           ? cfg->output
                                                      : std::filesystem::path();
    if (!dir.empty()) write_error_manifest(dir, cfg ? &*cfg : nullptr, {e.kind(), e.what()});
    return nmq::exit_code_for(e.kind());
  }

  nmq::ScenarioResult result = nmq::run_scenario(*cfg, o.threads);
  nmq::write_outputs(result, cfg->output);
  for (const auto& m : result.members) {
    std::cout << m.stem << ": ";
    if (m.failure) {
      std::cout << "FAILED " << m.failure->message << "\n";
      continue;
    }
    std::cout << "F(S)=" << m.run->records.back().fidelity;
    if (m.uncontrolled) std::cout << " uncontrolled F(S)=" << m.uncontrolled->records.back().fidelity;
    std::cout << " max balance ratio=" << m.run->summary.max_balance_ratio << " (" << m.wall_seconds << " s)\n";
  }
  const int code = nmq::exit_code(result);
  std::cout << "wrote " << (cfg->output / "manifest.json").string() << ", exit " << code << "\n";
  return code;
}

int cmd_compare(const RunOptions& o, const std::string& table) {
  try {
    const nmq::ScenarioConfig cfg = resolve(o);
    const auto rows = nmq::compare_baseline(cfg);
    const std::string csv = nmq::baseline_csv(rows, cfg.bath.axis());
    if (table.empty()) {
      std::cout << csv;
    } else {
      std::ofstream out(table, std::ios::binary | std::ios::trunc);
      out << csv;
    }
    return nmq::kExitOk;
  } catch (const nmq::Error& e) {
    std::cerr << "nmq: " << e.what() << "\n";
    return nmq::exit_code_for(e.kind());
  }
}

int cmd_pulse(int n, int k, const std::string& tau_text) {
  try {
    const double tau = nmq::parse_real(tau_text);
    const nmq::ControlSpec c = nmq::design_pulse(n, k, tau);
    const nmq::PulseCondition cond = nmq::condition_residual(c);
    std::cout << "intensity=" << nmq::format_real(c.intensity) << " a=" << nmq::format_real(c.a)
              << " b=" << nmq::format_real(c.b) << " half_period=" << nmq::format_real(c.half_period)
              << "\nz=" << nmq::format_real(cond.z) << " J_n(z)=" << cond.bessel_value
              << " |residual|=" << std::abs(cond.residual) << "\n";
    return nmq::kExitOk;
  } catch (const nmq::Error& e) {
    std::cerr << "nmq: " << e.what() << "\n";
    return nmq::exit_code_for(e.kind());
  }
}

void add_common(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config, "INI config file")->check(CLI::ExistingFile);
  cmd->add_option("--scenario", o.scenario, "fig2a|fig2b|fig2c|fig3|fig4|custom");
  cmd->add_option("--dt", o.dt, "Upper bound on the RK4 step");
  cmd->add_option("--mode", o.mode, "sector|full");
  cmd->add_option("--engine", o.engine, "nonmarkov|lindblad|closed");
  cmd->add_flag("--paper-compat", o.paper_compat, "Accept 4-significant-figure Bessel zeros");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-Markovian heat-current simulator for the cut XY chain"};
  app.set_version_flag("--version", NMQ_VERSION);
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run a scenario and write CSV files plus manifest.json");
  add_common(run, run_opts);
  run->add_option("--out", run_opts.out, "Output directory");

  RunOptions cmp_opts;
  std::string table;
  auto* cmp = app.add_subcommand("compare", "Tabulate engines and control on/off for a scenario");
  add_common(cmp, cmp_opts);
  cmp->add_option("--table", table, "Write the table here instead of stdout");

  int n = 0, k = 1;
  std::string tau = "pi/30";
  auto* pulse = app.add_subcommand("pulse", "Design a zero-area sine pulse from a Bessel zero");
  pulse->add_option("--order", n, "Bessel order n");
  pulse->add_option("--zero", k, "Zero index k (1-based)");
  pulse->add_option("--tau", tau, "Half period, e.g. pi/30");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nmq::kExitConfig;
  }

  if (*run) return cmd_run(run_opts);
  if (*cmp) return cmd_compare(cmp_opts, table);
  return cmd_pulse(n, k, tau);
}
