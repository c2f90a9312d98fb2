#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "nmq/bath.hpp"
#include "nmq/model.hpp"
#include "nmq/thermo.hpp"

namespace nmq {

struct IntegratorConfig {
  double dt = 1e-3;  // upper bound; the run uses S / ceil(S / dt)
  int record_every = 1;
  bool diagnostics = false;  // track the minimum eigenvalue of rho
  ThermoHamiltonian thermo = ThermoHamiltonian::Controlled;

  int steps_for(double total_time) const;
};

// Density matrix plus the 2N auxiliary operators, stored as one d x (1+2N)d
// matrix with column blocks ordered (rho, Oz_1..Oz_N, Ow_1..Ow_N). Bath
// indices of the accessors are 0-based.
class NonMarkovianState {
 public:
  // Auxiliary operators start at zero (they are integrals over [0, t]).
  NonMarkovianState(const Operator& rho, int n_baths, double t = 0.0);
  static NonMarkovianState from_stacked(Operator stacked, int n_baths, double t);

  double t = 0.0;

  int dim() const noexcept { return static_cast<int>(data_.rows()); }
  int n_baths() const noexcept { return n_baths_; }

  auto rho() { return data_.leftCols(dim()); }
  auto rho() const { return data_.leftCols(dim()); }
  auto oz(int j) { return data_.middleCols(static_cast<Eigen::Index>(1 + j) * dim(), dim()); }
  auto oz(int j) const { return data_.middleCols(static_cast<Eigen::Index>(1 + j) * dim(), dim()); }
  auto ow(int j) { return data_.middleCols(static_cast<Eigen::Index>(1 + n_baths_ + j) * dim(), dim()); }
  auto ow(int j) const {
    return data_.middleCols(static_cast<Eigen::Index>(1 + n_baths_ + j) * dim(), dim());
  }

  Operator& stacked() noexcept { return data_; }
  const Operator& stacked() const noexcept { return data_; }

 private:
  NonMarkovianState() = default;

  int n_baths_ = 0;
  Operator data_;
};

// Time derivative of the full state, written term by term:
//   drho = -i[H, rho] + sum_j { [L_j, rho Oz_j^dag] - [L_j^dag, Oz_j rho]
//                              + [L_j^dag, rho Ow_j^dag] - [L_j, Ow_j rho] }
// with the Oz/Ow components from o_operator_rhs. evolve() uses an equivalent
// factored form that is exact for Hermitian rho.
NonMarkovianState master_rhs(const NonMarkovianState& state, const Operator& h,
                             std::span<const Operator> couplings, const BathSpec& spec);

struct InvariantSummary {
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double max_balance_ratio = 0.0;  // max residual / tolerance over records
  double min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  bool balance_ok = true;
  bool positivity_ok = true;  // min eigenvalue >= -1e-8 (only when diagnostics)
};

struct Trajectory {
  std::vector<ThermoRecord> records;
  std::vector<double> step_energies;  // <H>(t_n) for every step n
  int steps = 0;
  double dt = 0.0;
  Operator final_rho;
  StateVector final_psi;  // closed_evolve only
  InvariantSummary summary;
};

inline constexpr double kTraceTolerance = 1e-6;
inline constexpr double kHermiticityTolerance = 1e-8;
inline constexpr double kPositivityTolerance = 1e-8;

using StateObserver = std::function<void(const NonMarkovianState&)>;
using DensityObserver = std::function<void(double, const Operator&)>;
using VectorObserver = std::function<void(double, const StateVector&)>;

// Fixed-step RK4 of the coupled (rho, Oz, Ow) system over [0, S]. Thermodynamic
// records are taken every cfg.record_every steps and at t = S; fidelity is
// measured against target_state(chain). Throws TraceDrift, HermiticityDrift,
// NonFiniteValue or GapCollapse.
Trajectory evolve(const Operator& rho0, const CutChain& system, const BathSpec& bath,
                  const IntegratorConfig& cfg, const StateObserver& observer = {});
Trajectory evolve(const StateVector& psi0, const CutChain& system, const BathSpec& bath,
                  const IntegratorConfig& cfg, const StateObserver& observer = {});

Trajectory lindblad_evolve(const Operator& rho0, const CutChain& system, const BathSpec& bath,
                           const IntegratorConfig& cfg, const DensityObserver& observer = {});

// Schroedinger evolution with the controlled Hamiltonian; records carry zero
// heat current. Norm drift beyond kTraceTolerance raises TraceDrift.
Trajectory closed_evolve(const StateVector& psi0, const CutChain& system, const IntegratorConfig& cfg,
                         const VectorObserver& observer = {});

}  // namespace nmq
