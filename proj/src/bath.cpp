#include "nmq/bath.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nmq/errors.hpp"

namespace nmq {

namespace {

void require_dim(const Operator& m, Eigen::Index d, const char* what) {
  if (m.rows() != d || m.cols() != d)
    throw Error(ErrorKind::DimMismatch, std::string(what) + " has the wrong dimension");
}

}  // namespace

BathSpec BathSpec::uniform(int n_sites, double coupling_strength, double cutoff, double temperature,
                           Channel channel) {
  BathSpec spec;
  spec.sites.assign(static_cast<std::size_t>(n_sites), BathSite{coupling_strength, cutoff, temperature});
  spec.channel = channel;
  return spec;
}

void BathSpec::validate(int n_sites) const {
  if (size() != n_sites)
    throw Error(ErrorKind::ConfigInvalid, "bath list length must equal n_sites");
  for (const auto& s : sites) {
    if (!(s.coupling_strength >= 0.0) || !std::isfinite(s.coupling_strength))
      throw Error(ErrorKind::ConfigInvalid, "coupling_strength must be >= 0");
    if (!(s.cutoff > 0.0) || !std::isfinite(s.cutoff))
      throw Error(ErrorKind::ConfigInvalid, "cutoff must be > 0");
    if (!(s.temperature >= 0.0) || !std::isfinite(s.temperature))
      throw Error(ErrorKind::ConfigInvalid, "temperature must be >= 0");
  }
}

CorrelationParams correlation_params(const BathSite& s) {
  const double w = 0.5 * s.coupling_strength * s.temperature * s.cutoff;
  return {Complex(w, -0.5 * s.coupling_strength * s.cutoff * s.cutoff), w, s.cutoff};
}

double spectral_density(const BathSpec& spec, int site, double omega) {
  if (site < 1 || site > spec.size()) throw Error(ErrorKind::InvalidArgument, "bath site out of range");
  if (omega < 0.0) throw Error(ErrorKind::NegativeFrequency, "spectral density needs omega >= 0");
  const BathSite& s = spec.sites[static_cast<std::size_t>(site - 1)];
  const double r = omega / s.cutoff;
  return s.coupling_strength / std::numbers::pi * omega / (1.0 + r * r);
}

std::vector<SparseOperator> coupling_operators(const BathSpec& spec, const HilbertSpec& space) {
  const PauliKind kind = spec.channel == Channel::SigmaZ ? PauliKind::SigmaZ : PauliKind::SigmaMinus;
  std::vector<SparseOperator> out;
  out.reserve(static_cast<std::size_t>(spec.size()));
  for (int j = 1; j <= spec.size(); ++j) out.push_back(site_operator_sparse(kind, j, space));
  return out;
}

std::vector<int> closed_sectors(int n_sites, const BathSpec& spec) {
  if (spec.channel == Channel::SigmaZ) return {1};
  bool warm = false;
  for (const auto& s : spec.sites) warm = warm || (s.temperature > 0.0 && s.coupling_strength > 0.0);
  if (!warm) return {0, 1};
  std::vector<int> all;
  for (int k = 0; k <= n_sites; ++k) all.push_back(k);
  return all;
}

ORates o_operator_rhs(const Operator& h_eff, std::span<const Operator> couplings,
                      std::span<const Operator> oz, std::span<const Operator> ow,
                      const BathSpec& spec, int site) {
  const Eigen::Index d = h_eff.rows();
  require_dim(h_eff, d, "Hamiltonian");
  const std::size_t n = couplings.size();
  if (oz.size() != n || ow.size() != n || static_cast<int>(n) != spec.size())
    throw Error(ErrorKind::DimMismatch, "coupling, Oz, Ow and bath lists must have equal length");
  if (site < 1 || site > static_cast<int>(n)) throw Error(ErrorKind::InvalidArgument, "bath site out of range");

  const Complex i1{0.0, 1.0};
  Operator bracket = i1 * h_eff;
  for (std::size_t k = 0; k < n; ++k) {
    require_dim(couplings[k], d, "coupling operator");
    require_dim(oz[k], d, "Oz");
    require_dim(ow[k], d, "Ow");
    bracket += couplings[k].adjoint() * oz[k] + couplings[k] * ow[k];
  }
  const auto j = static_cast<std::size_t>(site - 1);
  const CorrelationParams p = correlation_params(spec.sites[j]);
  ORates out;
  out.oz = p.weight_z * couplings[j] - p.decay * oz[j] - (bracket * oz[j] - oz[j] * bracket);
  out.ow = p.weight_w * couplings[j].adjoint() - p.decay * ow[j] - (bracket * ow[j] - ow[j] * bracket);
  return out;
}

Operator lindblad_rhs(const Operator& rho, const Operator& h, std::span<const Operator> couplings,
                      const BathSpec& spec) {
  const Eigen::Index d = rho.rows();
  require_dim(rho, d, "rho");
  require_dim(h, d, "Hamiltonian");
  if (static_cast<int>(couplings.size()) != spec.size())
    throw Error(ErrorKind::DimMismatch, "one coupling operator per bath expected");
  const Complex i1{0.0, 1.0};
  Operator out = -i1 * (h * rho - rho * h);
  for (std::size_t j = 0; j < couplings.size(); ++j) {
    const Operator& l = couplings[j];
    require_dim(l, d, "coupling operator");
    const Operator ld = l.adjoint();
    const BathSite& s = spec.sites[j];
    const double rate = 0.5 * s.coupling_strength * s.temperature;
    out += rate * ((2.0 * l * rho * ld - ld * l * rho - rho * ld * l) +
                   (2.0 * ld * rho * l - l * ld * rho - rho * l * ld));
  }
  return out;
}

}  // namespace nmq
