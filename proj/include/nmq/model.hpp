#pragma once

#include "nmq/control.hpp"
#include "nmq/hilbert.hpp"

namespace nmq {

// XY ring of n_sites spins with periodic boundary (site N+1 == site 1). The
// bond (cut_bond, cut_bond+1) is ramped as J cos(omega t), omega = pi/(2S),
// so the ring is an open chain at t = S. The default cut_bond = N opens the
// ring between sites N and 1.
struct ChainSpec {
  int n_sites = 5;
  double coupling = -1.0;  // J
  int cut_bond = 5;
  double total_time = 10.0;  // S

  double omega() const noexcept;
  double bond_coupling(int bond, double t) const noexcept;
  void validate() const;
};

// Hopping term sigma^x_i sigma^x_j + sigma^y_i sigma^y_j
// = 2 (sigma^+_i sigma^-_j + sigma^-_i sigma^+_j), built on bitmasks so it is
// available in any sector subset.
SparseOperator hopping_operator(int site_i, int site_j, const HilbertSpec& space);

// The cut chain on a fixed Hilbert space, optionally driven by a control
// pulse. Hamiltonians are assembled from two precomputed pieces,
// H_s(t) = H_fixed + J cos(omega t) H_cut.
class CutChain {
 public:
  CutChain(ChainSpec chain, HilbertSpec space, ControlSpec control = ControlSpec::none());

  const ChainSpec& chain() const noexcept { return chain_; }
  const HilbertSpec& space() const noexcept { return space_; }
  const ControlSpec& control() const noexcept { return control_; }

  Operator hamiltonian(double t) const;
  Operator dhamiltonian_dt(double t) const;

  // (1 + c(t)) H_s(t) and its time derivative c' H_s + (1 + c) H_s'.
  Operator controlled_hamiltonian(double t) const;
  Operator controlled_dhamiltonian_dt(double t) const;

  double control_value(double t) const;
  // Analytic in the pulse phase; the gap-rescaled amplitude is
  // differentiated with a centered difference of E21 (h = 1e-6).
  double control_rate(double t) const;

  // E2 - E1 of the single-excitation block. GapCollapse below kGapFloor.
  double energy_gap(double t) const;
  // Scans E21 on `points` evenly spaced times in [0, S].
  void check_gap(int points = 1000) const;

  Eigen::MatrixXd single_excitation_block(double t) const;

 private:
  double checked_time(double t) const;
  double cut_coefficient(double t) const;
  double cut_coefficient_rate(double t) const;
  double gap_unchecked(double t) const;

  ChainSpec chain_;
  HilbertSpec space_;
  ControlSpec control_;
  Operator fixed_part_;
  Operator cut_part_;
  Eigen::MatrixXd fixed_block_;
  Eigen::MatrixXd cut_block_;
};

// E21(t) of the chain, computed in the single-excitation sector.
double energy_gap_E21(const ChainSpec& chain, double t);

// Uniform superposition over |1>..|N>: the t = 0 ring ground state for J < 0.
StateVector initial_state(const ChainSpec& chain);

// Lowest eigenvector of the single-excitation block of H_s(S), largest
// component real positive. Amplitudes over |1>..|N>.
StateVector target_state(const ChainSpec& chain);

}  // namespace nmq
