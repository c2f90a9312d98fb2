#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nmq/hilbert.hpp"
#include "nmq/model.hpp"

namespace nmq {

// Which operator plays "the system Hamiltonian" in heat, work and energy:
// the driven generator H_c = (1 + c) H_s, or the bare chain H_s.
enum class ThermoHamiltonian { Controlled, Bare };

struct ThermoRecord {
  double t = 0.0;
  double heat_current = 0.0;    // Re tr(rho' H)
  double energy_current = 0.0;  // d<H>/dt by finite differences of per-step energies
  double power = 0.0;           // Re tr(rho dH/dt)
  double fidelity = 0.0;
  double trace_error = 0.0;     // |tr rho - 1|
  std::optional<double> min_eig;
  double energy = 0.0;          // <H>
  double hermiticity_error = 0.0;
  double balance_residual = 0.0;   // |energy_current - heat_current - power|
  double balance_tolerance = 0.0;  // 10 dt^2 max_t ||H(t)||^2
};

// Heat current Re tr(rho_rate h); rho_rate is the density-matrix component of
// the master-equation right-hand side. NotHermitian if the trace carries an
// imaginary part beyond rounding.
double heat_current(const Eigen::Ref<const Operator>& rho_rate, const Eigen::Ref<const Operator>& h);

Operator thermo_hamiltonian(const CutChain& system, double t, ThermoHamiltonian which);
Operator thermo_hamiltonian_rate(const CutChain& system, double t, ThermoHamiltonian which);

// Re tr(rho dH/dt) with H chosen by `which`.
double power(const Eigen::Ref<const Operator>& rho, const CutChain& system, double t,
             ThermoHamiltonian which = ThermoHamiltonian::Controlled);

// Two-sample estimate (E_next - E_prev) / (t_next - t_prev).
double energy_current(double t_prev, double e_prev, double t_next, double e_next);

// Five-point O(dt^4) derivative of uniformly spaced energies at `index`:
// centered in the interior, shifted one-sided stencils at the two ends.
double energy_current_fd(std::span<const double> energies, double dt, std::size_t index);

double balance_tolerance(double dt, double hamiltonian_norm);

// sqrt(<target| rho |target>). Small negative overlaps (> -1e-9) clip to 0;
// anything below raises NegativeExpectation.
double fidelity(const Eigen::Ref<const Operator>& rho, const Eigen::Ref<const StateVector>& target);
double fidelity_pure(const Eigen::Ref<const StateVector>& psi, const Eigen::Ref<const StateVector>& target);

struct WorkHeat {
  std::vector<double> work;  // cumulative trapezoid of power
  std::vector<double> heat;  // cumulative trapezoid of heat current
};

WorkHeat accumulate(std::span<const ThermoRecord> records);

// sqrt(int (a - b)^2 dt) over the records by the trapezoid rule.
double l2_distance(std::span<const ThermoRecord> records, double ThermoRecord::*a, double ThermoRecord::*b);

// Trace distance (1/2) ||a - b||_1 of two Hermitian matrices.
double trace_distance(const Eigen::Ref<const Operator>& a, const Eigen::Ref<const Operator>& b);

}  // namespace nmq
