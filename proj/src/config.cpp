#include "nmq/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nmq/errors.hpp"

namespace nmq {

namespace {

constexpr const char* kNotVerified = "repo default, not paper-verified";

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorKind::ConfigInvalid, message); }

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : s_(text) {}

  double parse() {
    const double v = sum();
    skip_space();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  double sum() {
    double v = product();
    for (;;) {
      skip_space();
      if (eat('+')) v += product();
      else if (eat('-')) v -= product();
      else return v;
    }
  }

  double product() {
    double v = unary();
    for (;;) {
      skip_space();
      if (eat('*')) v *= unary();
      else if (eat('/')) {
        const double d = unary();
        if (d == 0.0) fail("division by zero");
        v /= d;
      } else return v;
    }
  }

  double unary() {
    skip_space();
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return atom();
  }

  double atom() {
    skip_space();
    if (eat('(')) {
      const double v = sum();
      skip_space();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (s_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return std::numbers::pi;
    }
    double v = 0.0;
    const char* begin = s_.data() + pos_;
    const auto [end, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
    if (ec != std::errc() || end == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    config_error("cannot parse number '" + std::string(s_) + "': " + what);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_real(item));
  if (out.empty()) config_error("empty value list");
  return out;
}

int parse_int(const std::string& text) {
  const std::string t = trim(text);
  int v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size()) config_error("expected an integer, got '" + t + "'");
  return v;
}

bool parse_bool(const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  config_error("expected a boolean, got '" + t + "'");
}

double parse_scalar(const std::string& text) {
  if (text.find(',') != std::string::npos) config_error("a list is not allowed here: '" + text + "'");
  return parse_real(text);
}

Channel parse_channel(const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "sigma_minus" || t == "sigma-") return Channel::SigmaMinus;
  if (t == "sigma_z") return Channel::SigmaZ;
  config_error("unknown channel '" + t + "' (sigma_minus|sigma_z)");
}

ControlKind parse_control_kind(const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "none") return ControlKind::None;
  if (t == "sine") return ControlKind::SinePulse;
  config_error("unknown control kind '" + t + "' (none|sine)");
}

ThermoHamiltonian parse_thermo(const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "controlled") return ThermoHamiltonian::Controlled;
  if (t == "bare") return ThermoHamiltonian::Bare;
  config_error("unknown thermo_hamiltonian '" + t + "' (controlled|bare)");
}

void mark_default(ScenarioConfig& cfg, std::string key, std::string note = kNotVerified) {
  cfg.repo_defaults.push_back({std::move(key), std::move(note)});
}

void clear_default(ScenarioConfig& cfg, const std::string& key) {
  std::erase_if(cfg.repo_defaults, [&](const RepoDefault& d) { return d.key == key; });
}

using Setter = void (*)(ScenarioConfig&, const std::string&);

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"scenario.output", [](ScenarioConfig& c, const std::string& v) { c.output = trim(v); }},
      {"chain.n_sites", [](ScenarioConfig& c, const std::string& v) { c.chain.n_sites = parse_int(v); }},
      {"chain.coupling", [](ScenarioConfig& c, const std::string& v) { c.chain.coupling = parse_scalar(v); }},
      {"chain.cut_bond", [](ScenarioConfig& c, const std::string& v) { c.chain.cut_bond = parse_int(v); }},
      {"chain.total_time", [](ScenarioConfig& c, const std::string& v) { c.chain.total_time = parse_scalar(v); }},
      {"bath.channel", [](ScenarioConfig& c, const std::string& v) { c.bath.channel = parse_channel(v); }},
      {"bath.coupling_strength",
       [](ScenarioConfig& c, const std::string& v) { c.bath.coupling_strength = parse_list(v); }},
      {"bath.cutoff", [](ScenarioConfig& c, const std::string& v) { c.bath.cutoff = parse_list(v); }},
      {"bath.temperature", [](ScenarioConfig& c, const std::string& v) { c.bath.temperature = parse_list(v); }},
      {"control.kind", [](ScenarioConfig& c, const std::string& v) { c.control.kind = parse_control_kind(v); }},
      {"control.intensity", [](ScenarioConfig& c, const std::string& v) { c.control.intensity = parse_scalar(v); }},
      {"control.a", [](ScenarioConfig& c, const std::string& v) { c.control.a = parse_scalar(v); }},
      {"control.b", [](ScenarioConfig& c, const std::string& v) { c.control.b = parse_scalar(v); }},
      {"control.half_period",
       [](ScenarioConfig& c, const std::string& v) { c.control.half_period = parse_scalar(v); }},
      {"control.gap_rescaled",
       [](ScenarioConfig& c, const std::string& v) { c.control.gap_rescaled = parse_bool(v); }},
      {"control.paper_compat", [](ScenarioConfig& c, const std::string& v) { c.paper_compat = parse_bool(v); }},
      {"integrator.method",
       [](ScenarioConfig&, const std::string& v) {
         if (lower(trim(v)) != "rk4") config_error("only method = rk4 is available");
       }},
      {"integrator.dt", [](ScenarioConfig& c, const std::string& v) { c.integrator.dt = parse_scalar(v); }},
      {"integrator.record_every",
       [](ScenarioConfig& c, const std::string& v) { c.integrator.record_every = parse_int(v); }},
      {"integrator.diagnostics",
       [](ScenarioConfig& c, const std::string& v) { c.integrator.diagnostics = parse_bool(v); }},
      {"run.engine", [](ScenarioConfig& c, const std::string& v) { c.engine = parse_engine(trim(v)); }},
      {"run.mode", [](ScenarioConfig& c, const std::string& v) { c.mode = parse_representation(trim(v)); }},
      {"run.thermo_hamiltonian",
       [](ScenarioConfig& c, const std::string& v) { c.integrator.thermo = parse_thermo(v); }},
      {"run.baseline", [](ScenarioConfig& c, const std::string& v) { c.baseline = parse_bool(v); }},
  };
  return table;
}

ScenarioConfig fig2_common() {
  ScenarioConfig c;
  c.chain = ChainSpec{5, -1.0, 5, 10.0};
  c.bath.channel = Channel::SigmaMinus;
  c.integrator.dt = 1e-3;
  c.integrator.record_every = 10;
  mark_default(c, "integrator.dt");
  mark_default(c, "integrator.record_every");
  return c;
}

}  // namespace

std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::Fig2a: return "fig2a";
    case ScenarioId::Fig2b: return "fig2b";
    case ScenarioId::Fig2c: return "fig2c";
    case ScenarioId::Fig3: return "fig3";
    case ScenarioId::Fig4: return "fig4";
    case ScenarioId::Custom: return "custom";
  }
  return "custom";
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::None: return "none";
    case SweepAxis::CouplingStrength: return "coupling_strength";
    case SweepAxis::Cutoff: return "cutoff";
    case SweepAxis::Temperature: return "temperature";
  }
  return "none";
}

std::string to_string(EngineKind engine) {
  switch (engine) {
    case EngineKind::NonMarkovian: return "nonmarkov";
    case EngineKind::Lindblad: return "lindblad";
    case EngineKind::Closed: return "closed";
  }
  return "nonmarkov";
}

std::string to_string(Representation mode) { return mode == Representation::Full ? "full" : "sector"; }

std::string to_string(Channel channel) { return channel == Channel::SigmaZ ? "sigma_z" : "sigma_minus"; }

ScenarioId parse_scenario_id(std::string_view text) {
  const std::string t = lower(trim(text));
  for (ScenarioId id : {ScenarioId::Fig2a, ScenarioId::Fig2b, ScenarioId::Fig2c, ScenarioId::Fig3, ScenarioId::Fig4,
                        ScenarioId::Custom})
    if (t == to_string(id)) return id;
  config_error("unknown scenario '" + t + "'");
}

EngineKind parse_engine(std::string_view text) {
  const std::string t = lower(trim(text));
  for (EngineKind e : {EngineKind::NonMarkovian, EngineKind::Lindblad, EngineKind::Closed})
    if (t == to_string(e)) return e;
  config_error("unknown engine '" + t + "' (nonmarkov|lindblad|closed)");
}

Representation parse_representation(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "sector") return Representation::Sector;
  if (t == "full") return Representation::Full;
  config_error("unknown mode '" + t + "' (sector|full)");
}

SweepAxis BathGrid::axis() const {
  SweepAxis axis = SweepAxis::None;
  int lists = 0;
  if (coupling_strength.size() > 1) ++lists, axis = SweepAxis::CouplingStrength;
  if (cutoff.size() > 1) ++lists, axis = SweepAxis::Cutoff;
  if (temperature.size() > 1) ++lists, axis = SweepAxis::Temperature;
  if (lists > 1) config_error("only one bath parameter may carry a sweep list");
  return axis;
}

std::size_t BathGrid::size() const {
  switch (axis()) {
    case SweepAxis::CouplingStrength: return coupling_strength.size();
    case SweepAxis::Cutoff: return cutoff.size();
    case SweepAxis::Temperature: return temperature.size();
    case SweepAxis::None: return 1;
  }
  return 1;
}

double BathGrid::value(std::size_t member) const {
  switch (axis()) {
    case SweepAxis::CouplingStrength: return coupling_strength.at(member);
    case SweepAxis::Cutoff: return cutoff.at(member);
    case SweepAxis::Temperature: return temperature.at(member);
    case SweepAxis::None: return 0.0;
  }
  return 0.0;
}

BathSpec BathGrid::at(int n_sites, std::size_t member) const {
  if (coupling_strength.empty() || cutoff.empty() || temperature.empty()) config_error("empty bath parameter list");
  auto pick = [member](const std::vector<double>& v) { return v.size() > 1 ? v.at(member) : v.front(); };
  return BathSpec::uniform(n_sites, pick(coupling_strength), pick(cutoff), pick(temperature), channel);
}

HilbertSpec ScenarioConfig::space_for(const BathSpec& b) const {
  if (mode == Representation::Full) {
    if (chain.n_sites > HilbertSpec::kMaxFullSites)
      config_error("full mode supports at most " + std::to_string(HilbertSpec::kMaxFullSites) + " sites");
    return HilbertSpec::full(chain.n_sites);
  }
  if (engine == EngineKind::Closed) return HilbertSpec::sectors(chain.n_sites, {1});
  return HilbertSpec::sectors(chain.n_sites, closed_sectors(chain.n_sites, b));
}

ScenarioConfig builtin_scenario(ScenarioId id) {
  ScenarioConfig c;
  switch (id) {
    case ScenarioId::Custom:
      c.integrator.dt = 1e-3;
      c.integrator.record_every = 10;
      break;
    case ScenarioId::Fig2a:
      c = fig2_common();
      c.bath.coupling_strength = {0.002, 0.005, 0.01};
      c.bath.cutoff = {0.5};
      c.bath.temperature = {50.0};
      mark_default(c, "bath.coupling_strength", "sweep values 0.002 and 0.005 are repo defaults, not paper-verified");
      break;
    case ScenarioId::Fig2b:
      c = fig2_common();
      c.bath.coupling_strength = {0.01};
      c.bath.cutoff = {0.5, 2.0, 10.0};
      c.bath.temperature = {30.0};
      mark_default(c, "bath.cutoff", "sweep value 2 is a repo default, not paper-verified");
      break;
    case ScenarioId::Fig2c:
      c = fig2_common();
      c.bath.coupling_strength = {0.01};
      c.bath.cutoff = {10.0};
      c.bath.temperature = {10.0, 30.0, 50.0};
      mark_default(c, "bath.temperature", "sweep value 10 is a repo default, not paper-verified");
      break;
    case ScenarioId::Fig3:
      c.chain = ChainSpec{5, -1.0, 5, 20.0};
      c.bath.channel = Channel::SigmaMinus;
      c.bath.coupling_strength = {0.01};
      c.bath.cutoff = {0.5, 2.0, 10.0};
      c.bath.temperature = {50.0};
      c.integrator.dt = 1e-3;
      c.integrator.record_every = 20;
      mark_default(c, "bath.cutoff");
      mark_default(c, "integrator.dt");
      mark_default(c, "integrator.record_every");
      break;
    case ScenarioId::Fig4:
      c.chain = ChainSpec{10, -1.0, 10, std::numbers::pi / 3.0};
      c.bath.channel = Channel::SigmaZ;
      c.bath.coupling_strength = {0.01};
      c.bath.cutoff = {0.5, 2.0, 10.0};
      c.bath.temperature = {50.0};
      c.control.kind = ControlKind::SinePulse;
      c.control.intensity = 2.405 * 30.0;
      c.control.a = 1.0;
      c.control.b = 0.0;
      c.control.half_period = std::numbers::pi / 30.0;
      c.control.gap_rescaled = true;
      c.paper_compat = true;
      c.integrator.dt = c.control.half_period / 200.0;
      c.integrator.record_every = 4;
      mark_default(c, "bath.cutoff", "sweep values 2 and 10 are repo defaults, not paper-verified");
      mark_default(c, "control.gap_rescaled");
      mark_default(c, "integrator.dt");
      mark_default(c, "integrator.record_every");
      break;
  }
  c.id = id;
  mark_default(c, "chain.cut_bond");
  c.output = "out/" + to_string(id);
  return c;
}

double parse_real(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) config_error("empty number");
  const double v = ExpressionParser(t).parse();
  if (!std::isfinite(v)) config_error("number '" + t + "' is not finite");
  return v;
}

ScenarioConfig parse_config(std::string_view text, std::optional<ScenarioId> forced) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    config_error(std::string("malformed config: ") + e.what());
  }

  static const std::set<std::string> sections = {"scenario", "chain", "bath", "control", "integrator", "run"};
  std::optional<ScenarioId> id = forced;
  for (const auto& [section, body] : tree) {
    if (!sections.contains(section)) config_error("unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) config_error("key '" + section + "' outside any section");
  }
  if (!id) {
    if (const auto v = tree.get_optional<std::string>(pt::ptree::path_type("scenario/id", '/')))
      id = parse_scenario_id(*v);
  }

  ScenarioConfig cfg = builtin_scenario(id.value_or(ScenarioId::Custom));
  const auto& table = setters();
  bool dt_set = false, cut_set = false;
  for (const auto& [section, body] : tree) {
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      if (full == "scenario.id") continue;
      const auto it = table.find(full);
      if (it == table.end()) config_error("unknown key '" + key + "' in [" + section + "]");
      try {
        it->second(cfg, node.data());
      } catch (const Error& e) {
        config_error(full + ": " + e.what());
      }
      clear_default(cfg, full);
      dt_set = dt_set || full == "integrator.dt";
      cut_set = cut_set || full == "chain.cut_bond";
    }
  }
  if (!cut_set) cfg.chain.cut_bond = cfg.chain.n_sites;
  if (!dt_set && cfg.control.active() && cfg.control.half_period > 0.0)
    cfg.integrator.dt = std::min(1e-3, cfg.control.half_period / 200.0);
  cfg.bath.axis();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, std::optional<ScenarioId> forced) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), forced);
}

void validate(const ScenarioConfig& cfg) {
  cfg.chain.validate();
  cfg.bath.axis();
  if (!(cfg.integrator.dt > 0.0) || !std::isfinite(cfg.integrator.dt)) config_error("integrator.dt must be positive");
  if (cfg.integrator.dt > cfg.chain.total_time) config_error("integrator.dt exceeds total_time");
  if (cfg.integrator.record_every < 1) config_error("integrator.record_every must be >= 1");

  if (cfg.control.active()) {
    if (!(cfg.control.half_period > 0.0) || !std::isfinite(cfg.control.half_period))
      config_error("control.half_period must be positive");
    if (!std::isfinite(cfg.control.intensity) || !std::isfinite(cfg.control.a) || !std::isfinite(cfg.control.b))
      config_error("control parameters must be finite");
    PulseCondition cond;
    try {
      cond = condition_residual(cfg.control, cfg.zero_tolerance());
    } catch (const Error& e) {
      config_error(std::string("pulse condition: ") + e.what());
    }
    if (!cond.is_valid)
      config_error("pulse violates the zero-area condition: |J_" + std::to_string(cond.n) + "(" +
                   std::to_string(cond.z) + ")| = " + std::to_string(std::abs(cond.bessel_value)) +
                   (cfg.paper_compat ? "" : " (set control.paper_compat for 4-figure zeros)"));
  }

  for (std::size_t m = 0; m < cfg.bath.size(); ++m) cfg.bath.at(cfg.chain.n_sites, m).validate(cfg.chain.n_sites);
  const CutChain system(cfg.chain, cfg.space_for(cfg.bath.at(cfg.chain.n_sites, 0)), cfg.control);
  try {
    system.check_gap();
  } catch (const Error& e) {
    config_error(std::string("gap scan: ") + e.what());
  }
}

}  // namespace nmq
