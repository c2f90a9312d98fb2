#pragma once

#include <span>
#include <vector>

#include "nmq/hilbert.hpp"

namespace nmq {

enum class Channel { SigmaMinus, SigmaZ };

// Lorentz-Drude bath attached to one site. Units of |J|, hbar = k_B = 1.
struct BathSite {
  double coupling_strength = 0.0;  // Gamma_j >= 0
  double cutoff = 1.0;             // gamma_j > 0, inverse memory time
  double temperature = 0.0;        // T_j >= 0
};

struct BathSpec {
  std::vector<BathSite> sites;
  Channel channel = Channel::SigmaMinus;

  static BathSpec uniform(int n_sites, double coupling_strength, double cutoff, double temperature,
                          Channel channel);
  int size() const noexcept { return static_cast<int>(sites.size()); }
  void validate(int n_sites) const;
};

// High-temperature exponential closure of the bath correlation functions:
// alpha_z(t) = weight_z exp(-decay t), alpha_w(t) = weight_w exp(-decay t).
struct CorrelationParams {
  Complex weight_z;  // Gamma T gamma / 2 - i Gamma gamma^2 / 2
  double weight_w;   // Gamma T gamma / 2
  double decay;      // gamma
};

CorrelationParams correlation_params(const BathSite& site);

// (Gamma / pi) omega / (1 + (omega / gamma)^2); site is 1-based.
double spectral_density(const BathSpec& spec, int site, double omega);

// L_j for every site (sigma^- or sigma^z), in the given space.
std::vector<SparseOperator> coupling_operators(const BathSpec& spec, const HilbertSpec& space);

// Smallest set of excitation sectors containing sector 1 that the coupled
// dynamics cannot leave: {1} for sigma^z, {0,1} for sigma^- with every
// T_j = 0, and every sector for sigma^- at finite temperature (the thermal
// L^dag terms raise the excitation number).
std::vector<int> closed_sectors(int n_sites, const BathSpec& spec);

struct ORates {
  Operator oz;
  Operator ow;
};

// Right-hand side of the auxiliary operator equations for bath `site`
// (1-based):
//   dOz_j = w_z L_j - gamma_j Oz_j - [iH + sum_k (L_k^dag Oz_k + L_k Ow_k), Oz_j]
//   dOw_j = w_w L_j^dag - gamma_j Ow_j - [same, Ow_j]
ORates o_operator_rhs(const Operator& h_eff, std::span<const Operator> couplings,
                      std::span<const Operator> oz, std::span<const Operator> ow,
                      const BathSpec& spec, int site);

// Markovian limit:
//   -i[H, rho] + sum_j (Gamma_j T_j / 2) [(2 L rho L^dag - L^dag L rho - rho L^dag L)
//                                        + (2 L^dag rho L - L L^dag rho - rho L L^dag)]
Operator lindblad_rhs(const Operator& rho, const Operator& h, std::span<const Operator> couplings,
                      const BathSpec& spec);

}  // namespace nmq
