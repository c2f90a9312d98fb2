#pragma once

#include <complex>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace nmq {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using SparseOperator = Eigen::SparseMatrix<Complex>;

enum class PauliKind { SigmaX, SigmaY, SigmaZ, SigmaPlus, SigmaMinus };

// Computational basis of an N-qubit register, optionally restricted to a set
// of excitation-number sectors.
//
// A basis state is a bitmask with bit (i-1) set when site i is spin up.
// Within sector k the states are the k-subsets of {1..N} of up sites, listed
// in lexicographic order of the ascending site tuple: for N=3, k=2 this is
// (1,2), (1,3), (2,3). Sectors are concatenated by ascending k, so Full mode
// is the same ordering with every sector included and sector 1 is
// |1>, |2>, ..., |N> in site order.
class HilbertSpec {
 public:
  static constexpr int kMaxFullSites = 12;

  static HilbertSpec full(int n_sites);
  static HilbertSpec sectors(int n_sites, std::vector<int> included);

  int n_sites() const noexcept { return n_sites_; }
  int dim() const noexcept { return static_cast<int>(states_.size()); }
  bool is_full() const noexcept { return full_; }
  const std::vector<int>& included_sectors() const noexcept { return sectors_; }
  bool includes_sector(int k) const noexcept;

  std::uint64_t basis_state(int index) const { return states_.at(static_cast<std::size_t>(index)); }
  // Index of a bitmask in this basis, or -1 when its sector is excluded.
  int index_of(std::uint64_t mask) const;

  int sector_offset(int k) const;
  int sector_dim(int k) const;

  // Embeds amplitudes over |1>..|N> (single-excitation sector) into this space.
  StateVector embed_single_excitation(const Eigen::Ref<const StateVector>& amplitudes) const;

  bool operator==(const HilbertSpec& other) const noexcept {
    return n_sites_ == other.n_sites_ && sectors_ == other.sectors_;
  }

 private:
  HilbertSpec(int n_sites, std::vector<int> included, bool full);

  int n_sites_;
  bool full_;
  std::vector<int> sectors_;
  std::vector<int> offsets_;  // parallel to sectors_
  std::vector<std::uint64_t> states_;
  std::unordered_map<std::uint64_t, int> lookup_;
};

std::uint64_t binomial(int n, int k);

// Tensor-product embedding of a single-site Pauli-type operator (site is
// 1-based). Throws SectorViolation when the operator maps an included sector
// onto an excluded one.
SparseOperator site_operator_sparse(PauliKind kind, int site, const HilbertSpec& spec);
Operator site_operator(PauliKind kind, int site, const HilbertSpec& spec);

// trace(rho * obs).
Complex expectation(const Eigen::Ref<const Operator>& rho, const Eigen::Ref<const Operator>& obs);

double hermiticity_error(const Eigen::Ref<const Operator>& m);

struct EigenSystem {
  Eigen::VectorXd values;  // ascending
  Operator vectors;        // columns, orthonormal
};

// Dense Hermitian eigendecomposition. Each eigenvector is phased so that its
// largest-magnitude component (first one on ties) is real and positive.
EigenSystem hermitian_eigensystem(const Eigen::Ref<const Operator>& h);

// Spectral norm of a Hermitian matrix (largest |eigenvalue|).
double hermitian_norm(const Eigen::Ref<const Operator>& h);

}  // namespace nmq
