#include "nmq/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "nmq/errors.hpp"

namespace nmq {

double ChainSpec::omega() const noexcept { return std::numbers::pi / (2.0 * total_time); }

double ChainSpec::bond_coupling(int bond, double t) const noexcept {
  return bond == cut_bond ? coupling * std::cos(omega() * t) : coupling;
}

void ChainSpec::validate() const {
  if (n_sites < 3) throw Error(ErrorKind::ConfigInvalid, "chain needs at least 3 sites");
  if (cut_bond < 1 || cut_bond > n_sites)
    throw Error(ErrorKind::ConfigInvalid, "cut_bond must be in [1, n_sites]");
  if (!(total_time > 0.0) || !std::isfinite(total_time))
    throw Error(ErrorKind::ConfigInvalid, "total_time must be positive");
  if (!std::isfinite(coupling) || coupling == 0.0)
    throw Error(ErrorKind::ConfigInvalid, "coupling must be finite and nonzero");
}

SparseOperator hopping_operator(int site_i, int site_j, const HilbertSpec& space) {
  const std::uint64_t bi = std::uint64_t{1} << (site_i - 1);
  const std::uint64_t bj = std::uint64_t{1} << (site_j - 1);
  std::vector<Eigen::Triplet<Complex>> entries;
  for (int col = 0; col < space.dim(); ++col) {
    const std::uint64_t m = space.basis_state(col);
    if (((m & bi) != 0) == ((m & bj) != 0)) continue;
    const int row = space.index_of(m ^ bi ^ bj);
    entries.emplace_back(row, col, 2.0);
  }
  SparseOperator op(space.dim(), space.dim());
  op.setFromTriplets(entries.begin(), entries.end());
  return op;
}

CutChain::CutChain(ChainSpec chain, HilbertSpec space, ControlSpec control)
    : chain_(chain), space_(std::move(space)), control_(control) {
  chain_.validate();
  if (space_.n_sites() != chain_.n_sites)
    throw Error(ErrorKind::DimMismatch, "Hilbert space and chain disagree on n_sites");
  if (control_.active()) {
    if (!(control_.half_period > 0.0))
      throw Error(ErrorKind::ConfigInvalid, "pulse half_period must be positive");
    const double periods = chain_.total_time / control_.half_period;
    if (std::abs(periods - std::round(periods)) > 1e-9)
      throw Error(ErrorKind::ConfigInvalid,
                  "total_time must be an integer number of pulse half-periods (S/tau = " +
                      std::to_string(periods) + ")");
  }

  const int n = chain_.n_sites;
  const int d = space_.dim();
  fixed_part_ = Operator::Zero(d, d);
  cut_part_ = Operator::Zero(d, d);
  const HilbertSpec single = HilbertSpec::sectors(n, {1});
  fixed_block_ = Eigen::MatrixXd::Zero(n, n);
  cut_block_ = Eigen::MatrixXd::Zero(n, n);
  for (int bond = 1; bond <= n; ++bond) {
    const int next = bond % n + 1;
    const Operator hop(hopping_operator(bond, next, space_));
    const Eigen::MatrixXd block = Operator(hopping_operator(bond, next, single)).real();
    if (bond == chain_.cut_bond) {
      cut_part_ += hop;
      cut_block_ += block;
    } else {
      fixed_part_ += chain_.coupling * hop;
      fixed_block_ += chain_.coupling * block;
    }
  }
}

double CutChain::checked_time(double t) const {
  const double slack = 1e-9 * chain_.total_time;
  if (!(t >= -slack && t <= chain_.total_time + slack))
    throw Error(ErrorKind::TimeOutOfRange,
                "t = " + std::to_string(t) + " outside [0, " + std::to_string(chain_.total_time) + "]");
  return t;
}

double CutChain::cut_coefficient(double t) const {
  return chain_.coupling * std::cos(chain_.omega() * t);
}

double CutChain::cut_coefficient_rate(double t) const {
  return -chain_.coupling * chain_.omega() * std::sin(chain_.omega() * t);
}

Operator CutChain::hamiltonian(double t) const {
  checked_time(t);
  return fixed_part_ + cut_coefficient(t) * cut_part_;
}

Operator CutChain::dhamiltonian_dt(double t) const {
  checked_time(t);
  return cut_coefficient_rate(t) * cut_part_;
}

Eigen::MatrixXd CutChain::single_excitation_block(double t) const {
  return fixed_block_ + cut_coefficient(t) * cut_block_;
}

double CutChain::gap_unchecked(double t) const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(single_excitation_block(t),
                                                         Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return ev(1) - ev(0);
}

double CutChain::energy_gap(double t) const {
  const double gap = gap_unchecked(checked_time(t));
  if (!(gap > kGapFloor))
    throw Error(ErrorKind::GapCollapse, "E21(" + std::to_string(t) + ") = " + std::to_string(gap));
  return gap;
}

void CutChain::check_gap(int points) const {
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : chain_.total_time * i / (points - 1);
    energy_gap(t);
  }
}

double CutChain::control_value(double t) const {
  if (!control_.active()) return 0.0;
  checked_time(t);
  std::optional<double> gap;
  if (control_.gap_rescaled) gap = energy_gap(t);
  return pulse_value(control_, gap, t);
}

double CutChain::control_rate(double t) const {
  if (!control_.active()) return 0.0;
  checked_time(t);
  if (!control_.gap_rescaled) return pulse_rate_fixed_amplitude(control_, std::nullopt, t);
  const double gap = energy_gap(t);
  constexpr double h = 1e-6;
  // E21 is smooth in t beyond [0, S] as well (cos schedule), so the stencil
  // may straddle the endpoints.
  const double gap_rate = (gap_unchecked(t + h) - gap_unchecked(t - h)) / (2.0 * h);
  const double amplitude_rate = -control_.intensity * gap_rate / (gap * gap);
  const double shape = control_.b + control_.a * std::sin(control_.pulse_frequency() * t);
  return pulse_rate_fixed_amplitude(control_, gap, t) + amplitude_rate * shape;
}

Operator CutChain::controlled_hamiltonian(double t) const {
  if (!control_.active()) return hamiltonian(t);
  return (1.0 + control_value(t)) * hamiltonian(t);
}

Operator CutChain::controlled_dhamiltonian_dt(double t) const {
  if (!control_.active()) return dhamiltonian_dt(t);
  return control_rate(t) * hamiltonian(t) + (1.0 + control_value(t)) * dhamiltonian_dt(t);
}

double energy_gap_E21(const ChainSpec& chain, double t) {
  return CutChain(chain, HilbertSpec::sectors(chain.n_sites, {1})).energy_gap(t);
}

StateVector initial_state(const ChainSpec& chain) {
  chain.validate();
  return StateVector::Constant(chain.n_sites, Complex(1.0 / std::sqrt(static_cast<double>(chain.n_sites)), 0.0));
}

StateVector target_state(const ChainSpec& chain) {
  const CutChain model(chain, HilbertSpec::sectors(chain.n_sites, {1}));
  const EigenSystem es = hermitian_eigensystem(model.single_excitation_block(chain.total_time).cast<Complex>());
  return es.vectors.col(0);
}

}  // namespace nmq
