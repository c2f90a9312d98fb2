#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nmq/config.hpp"
#include "nmq/dynamics.hpp"
#include "nmq/errors.hpp"

namespace nmq {

struct RunFailure {
  ErrorKind kind = ErrorKind::InvalidArgument;
  std::string message;
};

struct MemberResult {
  double value = 0.0;  // sweep-axis value (0 when nothing is swept)
  std::string stem;    // CSV file name without extension
  std::optional<Trajectory> run;
  std::optional<Trajectory> uncontrolled;
  std::optional<RunFailure> failure;
  double wall_seconds = 0.0;
  int dim = 0;
  std::vector<int> sectors;  // empty in full mode
};

struct ScenarioResult {
  ScenarioConfig config;
  std::optional<PulseCondition> pulse;
  std::vector<MemberResult> members;
  double wall_seconds = 0.0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInvariant = 3;
inline constexpr int kExitNumeric = 4;

int exit_code_for(ErrorKind kind) noexcept;

// 0 when every member finished and every monitored invariant held.
int exit_code(const ScenarioResult& result);

// Validates and runs every sweep member (and the uncontrolled baseline of a
// pulsed run) on up to `threads` workers; 0 picks the hardware concurrency.
// Dynamics errors are recorded per member, configuration errors throw.
ScenarioResult run_scenario(const ScenarioConfig& cfg, unsigned threads = 0);

// One member trajectory as CSV: header plus one row per record, shortest
// round-trip decimals, LF line ends.
std::string trajectory_csv(const Trajectory& trajectory, bool with_min_eig);

std::string manifest_json(const ScenarioResult& result);
std::string error_manifest_json(const ScenarioConfig* cfg, const RunFailure& failure);

// Writes <stem>.csv (and <stem>_uncontrolled.csv) for every member, then
// manifest.json. Returns the list of files written.
std::vector<std::filesystem::path> write_outputs(const ScenarioResult& result, const std::filesystem::path& dir);

struct BaselineRow {
  EngineKind engine = EngineKind::NonMarkovian;
  bool pulsed = false;
  double value = 0.0;  // sweep-axis value
  double final_fidelity = 0.0;
  double l2_energy_heat = 0.0;   // ||dE/dt - J_Q||_2
  double l2_energy_power = 0.0;  // ||dE/dt - P||_2
};

// The scenario with ctrl in {none, pulse (if configured)} crossed with the
// non-Markovian, Lindblad and closed engines.
std::vector<BaselineRow> compare_baseline(const ScenarioConfig& cfg);
std::string baseline_csv(const std::vector<BaselineRow>& rows, SweepAxis axis);

std::string format_real(double v);

}  // namespace nmq
