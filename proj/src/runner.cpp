#include "nmq/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include <json.hpp>

namespace nmq {

namespace {

using json = nlohmann::json;

struct Task {
  std::size_t member;
  bool uncontrolled;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Trajectory integrate_member(const ScenarioConfig& cfg, std::size_t member, const ControlSpec& control) {
  const BathSpec bath = cfg.bath.at(cfg.chain.n_sites, member);
  const HilbertSpec space = cfg.space_for(bath);
  const CutChain system(cfg.chain, space, control);
  const StateVector psi0 = space.embed_single_excitation(initial_state(cfg.chain));
  switch (cfg.engine) {
    case EngineKind::NonMarkovian: return evolve(psi0, system, bath, cfg.integrator);
    case EngineKind::Lindblad: return lindblad_evolve(Operator(psi0 * psi0.adjoint()), system, bath, cfg.integrator);
    case EngineKind::Closed: return closed_evolve(psi0, system, cfg.integrator);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown engine");
}

std::string member_stem(const ScenarioConfig& cfg, std::size_t member) {
  const SweepAxis axis = cfg.bath.axis();
  std::string stem = to_string(cfg.id);
  if (axis != SweepAxis::None) stem += "_" + to_string(axis) + "_" + format_real(cfg.bath.value(member));
  return stem;
}

double row_value(const ScenarioConfig& cfg, std::size_t member) {
  return cfg.bath.axis() == SweepAxis::None ? cfg.bath.cutoff.front() : cfg.bath.value(member);
}

bool trajectory_ok(const ScenarioConfig& cfg, const Trajectory& t) {
  if (!t.summary.balance_ok) return false;
  if (cfg.engine == EngineKind::Lindblad && cfg.integrator.diagnostics && !t.summary.positivity_ok) return false;
  return true;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json trajectory_json(const Trajectory& t, bool diagnostics) {
  double max_heat = -std::numeric_limits<double>::infinity();
  for (const auto& r : t.records) max_heat = std::max(max_heat, r.heat_current);
  json checks = {
      {"max_trace_error", t.summary.max_trace_error},
      {"trace_ok", t.summary.max_trace_error < kTraceTolerance},
      {"max_hermiticity_error", t.summary.max_hermiticity_error},
      {"hermiticity_ok", t.summary.max_hermiticity_error < kHermiticityTolerance},
      {"max_balance_ratio", number_or_null(t.summary.max_balance_ratio)},
      {"balance_ok", t.summary.balance_ok},
  };
  if (diagnostics) {
    checks["min_eigenvalue"] = number_or_null(t.summary.min_eigenvalue);
    checks["positivity_ok"] = t.summary.positivity_ok;
  }
  return {
      {"final_fidelity", t.records.empty() ? json(nullptr) : json(t.records.back().fidelity)},
      {"max_heat_current", number_or_null(max_heat)},
      {"l2_energy_heat", l2_distance(t.records, &ThermoRecord::energy_current, &ThermoRecord::heat_current)},
      {"l2_energy_power", l2_distance(t.records, &ThermoRecord::energy_current, &ThermoRecord::power)},
      {"steps", t.steps},
      {"dt", t.dt},
      {"rows", t.records.size()},
      {"checks", checks},
  };
}

json config_json(const ScenarioConfig& cfg) {
  const ControlSpec& c = cfg.control;
  json control = {{"kind", c.active() ? "sine" : "none"}};
  if (c.active()) {
    control.update({{"intensity", c.intensity},
                    {"a", c.a},
                    {"b", c.b},
                    {"half_period", c.half_period},
                    {"gap_rescaled", c.gap_rescaled}});
  }
  json defaults = json::array();
  for (const auto& d : cfg.repo_defaults) defaults.push_back({{"key", d.key}, {"note", d.note}});

  int steps = 0;
  double dt = 0.0;
  if (cfg.integrator.dt > 0.0 && cfg.chain.total_time > 0.0) {
    try {
      steps = cfg.integrator.steps_for(cfg.chain.total_time);
      dt = cfg.chain.total_time / steps;
    } catch (const Error&) {
    }
  }
  return {
      {"scenario", to_string(cfg.id)},
      {"chain",
       {{"n_sites", cfg.chain.n_sites},
        {"coupling", cfg.chain.coupling},
        {"cut_bond", cfg.chain.cut_bond},
        {"total_time", cfg.chain.total_time}}},
      {"bath",
       {{"channel", to_string(cfg.bath.channel)},
        {"coupling_strength", cfg.bath.coupling_strength},
        {"cutoff", cfg.bath.cutoff},
        {"temperature", cfg.bath.temperature}}},
      {"control", control},
      {"paper_compat", cfg.paper_compat},
      {"zero_tolerance", cfg.zero_tolerance()},
      {"baseline", cfg.baseline},
      {"integrator",
       {{"method", "rk4"},
        {"dt_requested", cfg.integrator.dt},
        {"dt", dt},
        {"steps", steps},
        {"record_every", cfg.integrator.record_every},
        {"diagnostics", cfg.integrator.diagnostics},
        {"thermo_hamiltonian", cfg.integrator.thermo == ThermoHamiltonian::Bare ? "bare" : "controlled"}}},
      {"engine", to_string(cfg.engine)},
      {"mode", to_string(cfg.mode)},
      {"repo_defaults", defaults},
  };
}

json header_json() {
  return {{"nmq_version", NMQ_VERSION}, {"commit", NMQ_GIT_DESCRIBE}};
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << body;
  if (!out) throw Error(ErrorKind::InvalidArgument, "failed writing " + path.string());
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ConfigInvalid:
    case ErrorKind::NonIntegerN: return kExitConfig;
    case ErrorKind::TraceDrift:
    case ErrorKind::HermiticityDrift:
    case ErrorKind::NegativeExpectation: return kExitInvariant;
    default: return kExitNumeric;
  }
}

int exit_code(const ScenarioResult& result) {
  int code = kExitOk;
  for (const auto& m : result.members) {
    if (m.failure) code = std::max(code, exit_code_for(m.failure->kind));
    if (m.run && !trajectory_ok(result.config, *m.run)) code = std::max(code, kExitInvariant);
    if (m.uncontrolled && !trajectory_ok(result.config, *m.uncontrolled)) code = std::max(code, kExitInvariant);
  }
  return code;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  validate(cfg);

  ScenarioResult result;
  result.config = cfg;
  if (cfg.control.active()) result.pulse = condition_residual(cfg.control, cfg.zero_tolerance());

  const std::size_t n = cfg.bath.size();
  result.members.resize(n);
  std::vector<Task> tasks;
  for (std::size_t m = 0; m < n; ++m) {
    MemberResult& member = result.members[m];
    member.value = cfg.bath.axis() == SweepAxis::None ? 0.0 : cfg.bath.value(m);
    member.stem = member_stem(cfg, m);
    const HilbertSpec space = cfg.space_for(cfg.bath.at(cfg.chain.n_sites, m));
    member.dim = space.dim();
    if (!space.is_full()) member.sectors = space.included_sectors();
    tasks.push_back({m, false});
    if (cfg.control.active() && cfg.baseline) tasks.push_back({m, true});
  }

  std::vector<std::optional<Trajectory>> outputs(tasks.size());
  std::vector<std::optional<RunFailure>> failures(tasks.size());
  std::vector<double> seconds(tasks.size(), 0.0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const ControlSpec control = tasks[i].uncontrolled ? ControlSpec::none() : cfg.control;
        outputs[i] = integrate_member(cfg, tasks[i].member, control);
      } catch (const Error& e) {
        failures[i] = RunFailure{e.kind(), e.what()};
      } catch (const std::exception& e) {
        failures[i] = RunFailure{ErrorKind::NonFiniteValue, e.what()};
      }
      seconds[i] = seconds_since(t0);
    }
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, tasks.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    MemberResult& member = result.members[tasks[i].member];
    member.wall_seconds += seconds[i];
    if (failures[i] && !member.failure) member.failure = failures[i];
    if (tasks[i].uncontrolled) member.uncontrolled = std::move(outputs[i]);
    else member.run = std::move(outputs[i]);
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

std::string trajectory_csv(const Trajectory& trajectory, bool with_min_eig) {
  std::string out = "t,heat_current,energy_current,power,fidelity,trace_error";
  if (with_min_eig) out += ",min_eig";
  out += '\n';
  for (const auto& r : trajectory.records) {
    out += format_real(r.t);
    for (double v : {r.heat_current, r.energy_current, r.power, r.fidelity, r.trace_error}) {
      out += ',';
      out += format_real(v);
    }
    if (with_min_eig) {
      out += ',';
      if (r.min_eig) out += format_real(*r.min_eig);
    }
    out += '\n';
  }
  return out;
}

std::string manifest_json(const ScenarioResult& result) {
  const ScenarioConfig& cfg = result.config;
  json doc = header_json();
  const int code = exit_code(result);
  doc["status"] = code == kExitOk ? "ok" : code == kExitInvariant ? "invariant_violation" : "numeric_failure";
  doc["exit_code"] = code;
  doc["config"] = config_json(cfg);
  doc["sweep"] = {{"axis", to_string(cfg.bath.axis())}};
  if (result.pulse) {
    doc["config"]["control"]["condition"] = {
        {"n", result.pulse->n},
        {"z", result.pulse->z},
        {"bessel_value", result.pulse->bessel_value},
        {"residual_abs", std::abs(result.pulse->residual)},
        {"valid", result.pulse->is_valid},
    };
  }

  json members = json::array();
  for (const auto& m : result.members) {
    json entry = {
        {"value", m.value},
        {"csv", m.stem + ".csv"},
        {"dim", m.dim},
        {"sectors", m.sectors.empty() ? json("all") : json(m.sectors)},
        {"wall_seconds", m.wall_seconds},
        {"error", nullptr},
    };
    if (m.run) entry["run"] = trajectory_json(*m.run, cfg.integrator.diagnostics);
    if (m.uncontrolled) {
      entry["uncontrolled_csv"] = m.stem + "_uncontrolled.csv";
      entry["uncontrolled"] = trajectory_json(*m.uncontrolled, cfg.integrator.diagnostics);
    }
    if (m.run && m.uncontrolled && !m.run->records.empty() && !m.uncontrolled->records.empty())
      entry["control_improves_fidelity"] = m.run->records.back().fidelity > m.uncontrolled->records.back().fidelity;
    if (m.failure)
      entry["error"] = {{"kind", to_string(m.failure->kind)}, {"message", m.failure->message},
                        {"exit_code", exit_code_for(m.failure->kind)}};
    members.push_back(entry);
  }
  doc["members"] = members;
  doc["wall_seconds"] = result.wall_seconds;
  return doc.dump(2) + "\n";
}

std::string error_manifest_json(const ScenarioConfig* cfg, const RunFailure& failure) {
  json doc = header_json();
  const int code = exit_code_for(failure.kind);
  doc["status"] = code == kExitConfig ? "config_error" : code == kExitInvariant ? "invariant_violation" : "numeric_failure";
  doc["exit_code"] = code;
  if (cfg) doc["config"] = config_json(*cfg);
  doc["error"] = {{"kind", to_string(failure.kind)}, {"message", failure.message}, {"exit_code", code}};
  return doc.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_outputs(const ScenarioResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const bool diag = result.config.integrator.diagnostics;
  for (const auto& m : result.members) {
    if (m.run) {
      written.push_back(dir / (m.stem + ".csv"));
      write_file(written.back(), trajectory_csv(*m.run, diag));
    }
    if (m.uncontrolled) {
      written.push_back(dir / (m.stem + "_uncontrolled.csv"));
      write_file(written.back(), trajectory_csv(*m.uncontrolled, diag));
    }
  }
  written.push_back(dir / "manifest.json");
  write_file(written.back(), manifest_json(result));
  return written;
}

std::vector<BaselineRow> compare_baseline(const ScenarioConfig& cfg) {
  std::vector<BaselineRow> rows;
  std::vector<bool> pulses{false};
  if (cfg.control.active()) pulses.push_back(true);
  for (EngineKind engine : {EngineKind::NonMarkovian, EngineKind::Lindblad, EngineKind::Closed}) {
    for (bool pulsed : pulses) {
      ScenarioConfig variant = cfg;
      variant.engine = engine;
      variant.baseline = false;
      if (!pulsed) variant.control = ControlSpec::none();
      const ScenarioResult result = run_scenario(variant);
      for (std::size_t m = 0; m < result.members.size(); ++m) {
        const MemberResult& member = result.members[m];
        if (member.failure) throw Error(member.failure->kind, member.failure->message);
        const Trajectory& t = *member.run;
        rows.push_back({engine, pulsed, row_value(cfg, m), t.records.back().fidelity,
                        l2_distance(t.records, &ThermoRecord::energy_current, &ThermoRecord::heat_current),
                        l2_distance(t.records, &ThermoRecord::energy_current, &ThermoRecord::power)});
      }
    }
  }
  return rows;
}

std::string baseline_csv(const std::vector<BaselineRow>& rows, SweepAxis axis) {
  std::string out = "engine,control," + (axis == SweepAxis::None ? std::string("cutoff") : to_string(axis)) +
                    ",final_fidelity,l2_energy_heat,l2_energy_power\n";
  for (const auto& r : rows) {
    out += to_string(r.engine);
    out += r.pulsed ? ",sine," : ",none,";
    out += format_real(r.value) + "," + format_real(r.final_fidelity) + "," + format_real(r.l2_energy_heat) + "," +
           format_real(r.l2_energy_power) + "\n";
  }
  return out;
}

}  // namespace nmq
