#include "nmq/thermo.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "nmq/errors.hpp"

namespace nmq {

double heat_current(const Eigen::Ref<const Operator>& rho_rate, const Eigen::Ref<const Operator>& h) {
  const Complex value = expectation(rho_rate, h);
  const double scale = std::max(1.0, rho_rate.norm() * h.norm());
  if (std::abs(value.imag()) > 1e-10 * scale)
    throw Error(ErrorKind::NotHermitian,
                "heat current has imaginary part " + std::to_string(value.imag()));
  return value.real();
}

Operator thermo_hamiltonian(const CutChain& system, double t, ThermoHamiltonian which) {
  return which == ThermoHamiltonian::Controlled ? system.controlled_hamiltonian(t) : system.hamiltonian(t);
}

Operator thermo_hamiltonian_rate(const CutChain& system, double t, ThermoHamiltonian which) {
  return which == ThermoHamiltonian::Controlled ? system.controlled_dhamiltonian_dt(t)
                                                : system.dhamiltonian_dt(t);
}

double power(const Eigen::Ref<const Operator>& rho, const CutChain& system, double t, ThermoHamiltonian which) {
  return expectation(rho, thermo_hamiltonian_rate(system, t, which)).real();
}

double energy_current(double t_prev, double e_prev, double t_next, double e_next) {
  if (!(t_next != t_prev)) throw Error(ErrorKind::InvalidArgument, "energy samples at equal times");
  return (e_next - e_prev) / (t_next - t_prev);
}

double energy_current_fd(std::span<const double> e, double dt, std::size_t i) {
  const std::size_t n = e.size();
  if (i >= n) throw Error(ErrorKind::InvalidArgument, "energy index out of range");
  if (n < 5) {
    if (n < 2) return 0.0;
    if (i == 0) return (e[1] - e[0]) / dt;
    if (i == n - 1) return (e[n - 1] - e[n - 2]) / dt;
    return (e[i + 1] - e[i - 1]) / (2.0 * dt);
  }
  const double s = 12.0 * dt;
  if (i >= 2 && i + 2 < n) return (e[i - 2] - 8.0 * e[i - 1] + 8.0 * e[i + 1] - e[i + 2]) / s;
  if (i == 0) return (-25.0 * e[0] + 48.0 * e[1] - 36.0 * e[2] + 16.0 * e[3] - 3.0 * e[4]) / s;
  if (i == 1) return (-3.0 * e[0] - 10.0 * e[1] + 18.0 * e[2] - 6.0 * e[3] + e[4]) / s;
  if (i == n - 2)
    return (-e[n - 5] + 6.0 * e[n - 4] - 18.0 * e[n - 3] + 10.0 * e[n - 2] + 3.0 * e[n - 1]) / s;
  return (3.0 * e[n - 5] - 16.0 * e[n - 4] + 36.0 * e[n - 3] - 48.0 * e[n - 2] + 25.0 * e[n - 1]) / s;
}

double balance_tolerance(double dt, double hamiltonian_norm) {
  return 10.0 * dt * dt * hamiltonian_norm * hamiltonian_norm;
}

double fidelity(const Eigen::Ref<const Operator>& rho, const Eigen::Ref<const StateVector>& target) {
  if (rho.rows() != target.size() || rho.cols() != target.size())
    throw Error(ErrorKind::DimMismatch, "fidelity target and rho differ in dimension");
  const double overlap = target.dot(rho * target).real();
  if (overlap < -1e-9)
    throw Error(ErrorKind::NegativeExpectation, "<target|rho|target> = " + std::to_string(overlap));
  return std::min(1.0, std::sqrt(std::max(0.0, overlap)));
}

double fidelity_pure(const Eigen::Ref<const StateVector>& psi, const Eigen::Ref<const StateVector>& target) {
  if (psi.size() != target.size()) throw Error(ErrorKind::DimMismatch, "fidelity vectors differ in length");
  return std::min(1.0, std::abs(target.dot(psi)));
}

WorkHeat accumulate(std::span<const ThermoRecord> records) {
  WorkHeat out;
  out.work.reserve(records.size());
  out.heat.reserve(records.size());
  double w = 0.0, q = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i > 0) {
      const double h = records[i].t - records[i - 1].t;
      w += 0.5 * h * (records[i].power + records[i - 1].power);
      q += 0.5 * h * (records[i].heat_current + records[i - 1].heat_current);
    }
    out.work.push_back(w);
    out.heat.push_back(q);
  }
  return out;
}

double l2_distance(std::span<const ThermoRecord> records, double ThermoRecord::*a, double ThermoRecord::*b) {
  double sum = 0.0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double d0 = records[i - 1].*a - records[i - 1].*b;
    const double d1 = records[i].*a - records[i].*b;
    sum += 0.5 * (records[i].t - records[i - 1].t) * (d0 * d0 + d1 * d1);
  }
  return std::sqrt(sum);
}

double trace_distance(const Eigen::Ref<const Operator>& a, const Eigen::Ref<const Operator>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorKind::DimMismatch, "trace distance dims");
  const Operator diff = a - b;
  Eigen::SelfAdjointEigenSolver<Operator> solver(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace nmq
