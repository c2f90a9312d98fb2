#pragma once

// Independent reference constructions used by the tests. Nothing here calls
// into the library's own operator builders, Bessel code or integrators.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nmq/hilbert.hpp"

namespace oracle {

using nmq::Complex;
using nmq::Operator;

inline Operator pauli(nmq::PauliKind kind) {
  // basis order (up, down)
  const Complex i{0.0, 1.0};
  Operator m = Operator::Zero(2, 2);
  switch (kind) {
    case nmq::PauliKind::SigmaX: m << 0, 1, 1, 0; break;
    case nmq::PauliKind::SigmaY: m << 0, -i, i, 0; break;
    case nmq::PauliKind::SigmaZ: m << 1, 0, 0, -1; break;
    case nmq::PauliKind::SigmaPlus: m << 0, 1, 0, 0; break;
    case nmq::PauliKind::SigmaMinus: m << 0, 0, 1, 0; break;
  }
  return m;
}

inline Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

// Kronecker product I x .. x op x .. x I with site 1 as the least significant
// factor. Row/column index r encodes the register as: bit (i-1) of r clear
// means site i is up (the (up, down) order of pauli()).
inline Operator kron_site(nmq::PauliKind kind, int site, int n) {
  Operator out = Operator::Identity(1, 1);
  for (int i = n; i >= 1; --i) out = kron(out, i == site ? pauli(kind) : Operator::Identity(2, 2));
  return out;
}

// Maps the Kronecker index convention onto the library's bitmask convention
// (bit set = up) and reorders rows/columns into the spec's basis order.
inline Operator to_spec_basis(const Operator& kron_op, const nmq::HilbertSpec& spec) {
  const int n = spec.n_sites();
  const std::uint64_t all = (std::uint64_t{1} << n) - 1;
  Operator out(spec.dim(), spec.dim());
  for (int r = 0; r < spec.dim(); ++r)
    for (int c = 0; c < spec.dim(); ++c)
      out(r, c) = kron_op(static_cast<Eigen::Index>(all ^ spec.basis_state(r)),
                          static_cast<Eigen::Index>(all ^ spec.basis_state(c)));
  return out;
}

// J_n(x) by its power series in long double; adequate for x <= 10.
inline double bessel_series(int n, double x) {
  long double term = 1.0L;
  for (int k = 1; k <= n; ++k) term *= static_cast<long double>(x) / (2.0L * k);
  long double sum = term;
  const long double q = -static_cast<long double>(x) * x / 4.0L;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * (k + n));
    sum += term;
    if (std::fabs(term) < 1e-30L) break;
  }
  return static_cast<double>(sum);
}

// Sector-1 block of the XY ring, built straight from the hopping amplitudes:
// entry (i, j) = 2 J_bond for neighbouring sites.
inline Eigen::MatrixXd ring_block(int n, double j, int cut_bond, double cut_factor) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int b = 1; b <= n; ++b) {
    const int a = b - 1, c = b % n;
    const double amp = 2.0 * j * (b == cut_bond ? cut_factor : 1.0);
    h(a, c) += amp;
    h(c, a) += amp;
  }
  return h;
}

// Random Hermitian matrix with a fixed seed.
inline Operator random_hermitian(int d, unsigned seed) {
  std::srand(seed);
  const Operator a = Operator::Random(d, d);
  return 0.5 * (a + a.adjoint());
}

inline Operator random_density(int d, unsigned seed) {
  std::srand(seed);
  const Operator a = Operator::Random(d, d);
  Operator rho = a * a.adjoint();
  return rho / rho.trace();
}

// Classical RK4 on a vector ODE y' = -i H(t) y, written independently.
template <class HamiltonianAt>
Eigen::VectorXcd schroedinger_rk4(Eigen::VectorXcd y, double total, int steps, HamiltonianAt h) {
  const Complex i{0.0, 1.0};
  const double dt = total / steps;
  for (int s = 0; s < steps; ++s) {
    const double t = s * dt;
    const Eigen::VectorXcd k1 = -i * (h(t) * y);
    const Eigen::VectorXcd k2 = -i * (h(t + dt / 2) * (y + dt / 2 * k1));
    const Eigen::VectorXcd k3 = -i * (h(t + dt / 2) * (y + dt / 2 * k2));
    const Eigen::VectorXcd k4 = -i * (h(t + dt) * (y + dt * k3));
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

}  // namespace oracle
