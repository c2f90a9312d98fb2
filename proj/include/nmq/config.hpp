#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nmq/bath.hpp"
#include "nmq/control.hpp"
#include "nmq/dynamics.hpp"
#include "nmq/model.hpp"

namespace nmq {

enum class ScenarioId { Fig2a, Fig2b, Fig2c, Fig3, Fig4, Custom };
enum class SweepAxis { None, CouplingStrength, Cutoff, Temperature };
enum class EngineKind { NonMarkovian, Lindblad, Closed };
enum class Representation { Sector, Full };

std::string to_string(ScenarioId id);
std::string to_string(SweepAxis axis);
std::string to_string(EngineKind engine);
std::string to_string(Representation mode);
std::string to_string(Channel channel);

ScenarioId parse_scenario_id(std::string_view text);
EngineKind parse_engine(std::string_view text);
Representation parse_representation(std::string_view text);

// Uniform bath parameters. At most one of the three lists holds more than
// one value; that list is the sweep axis.
struct BathGrid {
  std::vector<double> coupling_strength{0.01};
  std::vector<double> cutoff{0.5};
  std::vector<double> temperature{50.0};
  Channel channel = Channel::SigmaMinus;

  SweepAxis axis() const;
  std::size_t size() const;
  double value(std::size_t member) const;  // value on the sweep axis
  BathSpec at(int n_sites, std::size_t member) const;
};

struct RepoDefault {
  std::string key;   // "section.key"
  std::string note;
};

struct ScenarioConfig {
  ScenarioId id = ScenarioId::Custom;
  ChainSpec chain;
  BathGrid bath;
  ControlSpec control;
  bool paper_compat = false;
  bool baseline = true;  // also integrate the uncontrolled chain when a pulse is active
  IntegratorConfig integrator;
  EngineKind engine = EngineKind::NonMarkovian;
  Representation mode = Representation::Sector;
  std::filesystem::path output = "out";
  std::vector<RepoDefault> repo_defaults;

  double zero_tolerance() const noexcept { return paper_compat ? kPaperCompatZeroTolerance : kZeroTolerance; }
  HilbertSpec space_for(const BathSpec& bath) const;
};

ScenarioConfig builtin_scenario(ScenarioId id);

// Evaluates a numeric literal or a small arithmetic expression over
// + - * / ( ) and the constant pi, e.g. "pi/30" or "2.405*30".
double parse_real(std::string_view text);

// INI text with sections [scenario] [chain] [bath] [control] [integrator] [run].
// Keys overlay the built-in defaults of the scenario id (custom when absent);
// `forced` replaces the id in the file. Without an explicit dt a pulsed run
// uses min(1e-3, tau/200). Unknown sections or keys, malformed
// values and a second sweep axis raise ConfigInvalid.
ScenarioConfig parse_config(std::string_view text, std::optional<ScenarioId> forced = std::nullopt);
ScenarioConfig load_config(const std::filesystem::path& path, std::optional<ScenarioId> forced = std::nullopt);

// Range checks, pulse validity, tau | S and a gap scan over [0, S] for every
// sweep member. Throws ConfigInvalid.
void validate(const ScenarioConfig& cfg);

}  // namespace nmq
