#include "nmq/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "nmq/errors.hpp"

namespace nmq {

namespace {

// k-subsets of {0..n-1} in lexicographic order, as bitmasks.
std::vector<std::uint64_t> sector_states(int n, int k) {
  std::vector<std::uint64_t> out;
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    std::uint64_t mask = 0;
    for (int i : idx) mask |= std::uint64_t{1} << i;
    out.push_back(mask);
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int i = pos + 1; i < k; ++i)
      idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
  }
  return out;
}

}  // namespace

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

HilbertSpec::HilbertSpec(int n_sites, std::vector<int> included, bool full)
    : n_sites_(n_sites), full_(full), sectors_(std::move(included)) {
  if (n_sites_ < 1 || n_sites_ > 62)
    throw Error(ErrorKind::InvalidArgument, "n_sites must be in [1, 62]");
  std::sort(sectors_.begin(), sectors_.end());
  sectors_.erase(std::unique(sectors_.begin(), sectors_.end()), sectors_.end());
  if (sectors_.empty()) throw Error(ErrorKind::InvalidArgument, "no sectors included");
  for (int k : sectors_) {
    if (k < 0 || k > n_sites_)
      throw Error(ErrorKind::InvalidArgument, "sector " + std::to_string(k) + " out of range");
  }
  for (int k : sectors_) {
    offsets_.push_back(static_cast<int>(states_.size()));
    auto s = sector_states(n_sites_, k);
    states_.insert(states_.end(), s.begin(), s.end());
  }
  lookup_.reserve(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) lookup_.emplace(states_[i], static_cast<int>(i));
}

HilbertSpec HilbertSpec::full(int n_sites) {
  if (n_sites < 1 || n_sites > kMaxFullSites)
    throw Error(ErrorKind::InvalidArgument,
                "Full mode supports 1..." + std::to_string(kMaxFullSites) + " sites");
  std::vector<int> all(static_cast<std::size_t>(n_sites + 1));
  for (int k = 0; k <= n_sites; ++k) all[static_cast<std::size_t>(k)] = k;
  return HilbertSpec(n_sites, std::move(all), true);
}

HilbertSpec HilbertSpec::sectors(int n_sites, std::vector<int> included) {
  return HilbertSpec(n_sites, std::move(included), false);
}

bool HilbertSpec::includes_sector(int k) const noexcept {
  return std::binary_search(sectors_.begin(), sectors_.end(), k);
}

int HilbertSpec::index_of(std::uint64_t mask) const {
  auto it = lookup_.find(mask);
  return it == lookup_.end() ? -1 : it->second;
}

int HilbertSpec::sector_offset(int k) const {
  auto it = std::lower_bound(sectors_.begin(), sectors_.end(), k);
  if (it == sectors_.end() || *it != k)
    throw Error(ErrorKind::SectorViolation, "sector " + std::to_string(k) + " not included");
  return offsets_[static_cast<std::size_t>(it - sectors_.begin())];
}

int HilbertSpec::sector_dim(int k) const {
  return includes_sector(k) ? static_cast<int>(binomial(n_sites_, k)) : 0;
}

StateVector HilbertSpec::embed_single_excitation(const Eigen::Ref<const StateVector>& amplitudes) const {
  if (amplitudes.size() != n_sites_)
    throw Error(ErrorKind::DimMismatch, "single-excitation amplitudes need length n_sites");
  StateVector out = StateVector::Zero(dim());
  const int off = sector_offset(1);
  out.segment(off, n_sites_) = amplitudes;
  return out;
}

SparseOperator site_operator_sparse(PauliKind kind, int site, const HilbertSpec& spec) {
  if (site < 1 || site > spec.n_sites())
    throw Error(ErrorKind::InvalidArgument, "site " + std::to_string(site) + " out of range");
  const std::uint64_t bit = std::uint64_t{1} << (site - 1);
  const int d = spec.dim();
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(static_cast<std::size_t>(d));
  const Complex i1{0.0, 1.0};

  auto emit = [&](int col, std::uint64_t target, Complex value) {
    const int row = spec.index_of(target);
    if (row < 0)
      throw Error(ErrorKind::SectorViolation,
                  "site operator leaves the included sector set");
    entries.emplace_back(row, col, value);
  };

  for (int col = 0; col < d; ++col) {
    const std::uint64_t m = spec.basis_state(col);
    const bool up = (m & bit) != 0;
    switch (kind) {
      case PauliKind::SigmaZ:
        entries.emplace_back(col, col, up ? 1.0 : -1.0);
        break;
      case PauliKind::SigmaPlus:
        if (!up) emit(col, m | bit, 1.0);
        break;
      case PauliKind::SigmaMinus:
        if (up) emit(col, m & ~bit, 1.0);
        break;
      case PauliKind::SigmaX:
        emit(col, m ^ bit, 1.0);
        break;
      case PauliKind::SigmaY:
        // sigma_y |up> = i |down>, sigma_y |down> = -i |up>
        emit(col, m ^ bit, up ? i1 : -i1);
        break;
    }
  }
  SparseOperator op(d, d);
  op.setFromTriplets(entries.begin(), entries.end());
  return op;
}

Operator site_operator(PauliKind kind, int site, const HilbertSpec& spec) {
  return Operator(site_operator_sparse(kind, site, spec));
}

Complex expectation(const Eigen::Ref<const Operator>& rho, const Eigen::Ref<const Operator>& obs) {
  if (rho.rows() != rho.cols() || obs.rows() != obs.cols() || rho.rows() != obs.rows())
    throw Error(ErrorKind::DimMismatch, "expectation needs square operators of equal dimension");
  return rho.cwiseProduct(obs.transpose()).sum();
}

double hermiticity_error(const Eigen::Ref<const Operator>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

EigenSystem hermitian_eigensystem(const Eigen::Ref<const Operator>& h) {
  if (h.rows() != h.cols()) throw Error(ErrorKind::DimMismatch, "eigensystem of non-square matrix");
  if (h.size() > 0 && hermiticity_error(h) >= 1e-10)
    throw Error(ErrorKind::NotHermitian, "matrix is not Hermitian within 1e-10");
  Eigen::SelfAdjointEigenSolver<Operator> solver(h);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::NotHermitian, "eigensolver failed to converge");
  EigenSystem out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
    auto v = out.vectors.col(c);
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < v.size(); ++r) {
      // ties resolve to the first index; 1e-12 guards against rounding flips
      const double a = std::abs(v(r));
      if (a > best_abs + 1e-12) {
        best_abs = a;
        best = r;
      }
    }
    if (best_abs > 0.0) v *= std::conj(v(best)) / best_abs;
    v(best) = v(best).real();
  }
  return out;
}

double hermitian_norm(const Eigen::Ref<const Operator>& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Operator> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace nmq
