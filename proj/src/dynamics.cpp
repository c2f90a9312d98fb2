#include "nmq/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "nmq/errors.hpp"
#include "nmq/rk4.hpp"

namespace nmq {

namespace {

const Complex kI{0.0, 1.0};

void require_square(const Operator& m, Eigen::Index d, const char* what) {
  if (m.rows() != d || m.cols() != d)
    throw Error(ErrorKind::DimMismatch, std::string(what) + " has the wrong dimension");
}

double min_eigenvalue(const Operator& rho) {
  Eigen::SelfAdjointEigenSolver<Operator> solver(rho, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

// Factored right-hand side of the coupled system. For Hermitian rho,
//   -[L^dag, Oz rho] = ([L, rho Oz^dag])^dag and -[L, Ow rho] = ([L^dag, rho Ow^dag])^dag,
// so drho = Z + Z^dag + Y + Y^dag with Z = -i H rho and
// Y = sum_j [L_j, rho Oz_j^dag] + [L_j^dag, rho Ow_j^dag]. The increment is then
// Hermitian to the last bit.
class NonMarkovianEngine {
 public:
  using State = Operator;

  NonMarkovianEngine(const CutChain& system, const BathSpec& bath, const StateObserver& observer)
      : system_(system), observer_(observer), d_(system.space().dim()), n_(bath.size()) {
    bath.validate(system.chain().n_sites);
    l_ = coupling_operators(bath, system.space());
    for (const auto& l : l_) ld_.emplace_back(l.adjoint());
    for (int j = 0; j < n_; ++j) {
      const CorrelationParams p = correlation_params(bath.sites[static_cast<std::size_t>(j)]);
      drive_z_.emplace_back(p.weight_z * Operator(l_[static_cast<std::size_t>(j)]));
      drive_w_.emplace_back(p.weight_w * Operator(ld_[static_cast<std::size_t>(j)]));
      decay_.push_back(p.decay);
    }
    bracket_.resize(d_, d_);
    acc_.resize(d_, d_);
    prod_.resize(d_, d_);
    z_.resize(d_, d_);
  }

  void slope(double t, const State& y, State& dy) {
    h_ = system_.controlled_hamiltonian(t);
    const auto rho = y.leftCols(d_);

    bracket_ = kI * h_;
    for (int k = 0; k < n_; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      bracket_ += ld_[uk] * oz(y, k);
      bracket_ += l_[uk] * ow(y, k);
    }

    z_.noalias() = h_ * rho;
    z_ *= -kI;
    acc_.setZero();
    for (int j = 0; j < n_; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      prod_.noalias() = rho * oz(y, j).adjoint();
      acc_ += l_[uj] * prod_;
      acc_ -= prod_ * l_[uj];
      prod_.noalias() = rho * ow(y, j).adjoint();
      acc_ += ld_[uj] * prod_;
      acc_ -= prod_ * ld_[uj];
    }
    dy.leftCols(d_) = z_ + z_.adjoint() + acc_ + acc_.adjoint();

    for (int j = 0; j < n_; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      prod_.noalias() = bracket_ * oz(y, j);
      prod_.noalias() -= oz(y, j) * bracket_;
      dy.middleCols(static_cast<Eigen::Index>(1 + j) * d_, d_) = drive_z_[uj] - decay_[uj] * oz(y, j) - prod_;
      prod_.noalias() = bracket_ * ow(y, j);
      prod_.noalias() -= ow(y, j) * bracket_;
      dy.middleCols(static_cast<Eigen::Index>(1 + n_ + j) * d_, d_) =
          drive_w_[uj] - decay_[uj] * ow(y, j) - prod_;
    }
  }

  Operator density(const State& y) const { return y.leftCols(d_); }
  Operator density_rate(const State&, const State& dy) const { return dy.leftCols(d_); }
  double energy(const State& y, const Operator& h) const { return expectation(y.leftCols(d_), h).real(); }
  double trace_error(const State& y) const { return std::abs(y.leftCols(d_).trace() - 1.0); }
  double hermiticity(const State& y) const { return hermiticity_error(y.leftCols(d_)); }
  double fidelity_of(const State& y, const StateVector& target) const {
    return fidelity(Operator(y.leftCols(d_)), target);
  }
  void observe(double t, const State& y) const {
    if (observer_) observer_(NonMarkovianState::from_stacked(y, n_, t));
  }

 private:
  Operator::ConstColsBlockXpr oz(const State& y, int j) const {
    return y.middleCols(static_cast<Eigen::Index>(1 + j) * d_, d_);
  }
  Operator::ConstColsBlockXpr ow(const State& y, int j) const {
    return y.middleCols(static_cast<Eigen::Index>(1 + n_ + j) * d_, d_);
  }

  const CutChain& system_;
  const StateObserver& observer_;
  int d_;
  int n_;
  std::vector<SparseOperator> l_, ld_;
  std::vector<Operator> drive_z_, drive_w_;
  std::vector<double> decay_;
  Operator h_, bracket_, acc_, prod_, z_;
};

class LindbladEngine {
 public:
  using State = Operator;

  LindbladEngine(const CutChain& system, const BathSpec& bath, const DensityObserver& observer)
      : system_(system), observer_(observer), d_(system.space().dim()) {
    bath.validate(system.chain().n_sites);
    const auto ls = coupling_operators(bath, system.space());
    anti_ = Operator::Zero(d_, d_);
    for (std::size_t j = 0; j < ls.size(); ++j) {
      const double rate = 0.5 * bath.sites[j].coupling_strength * bath.sites[j].temperature;
      if (rate == 0.0) continue;
      const SparseOperator ld = ls[j].adjoint();
      l_.push_back(ls[j]);
      ld_.push_back(ld);
      rate_.push_back(rate);
      anti_ += rate * Operator(ld * ls[j] + ls[j] * ld);
    }
  }

  void slope(double t, const State& rho, State& dy) {
    h_ = system_.controlled_hamiltonian(t);
    z_.noalias() = h_ * rho;
    z_ *= -kI;
    z_.noalias() -= anti_ * rho;
    dy = z_ + z_.adjoint();
    for (std::size_t j = 0; j < l_.size(); ++j) {
      tmp_ = l_[j] * rho;
      dy += (2.0 * rate_[j]) * (tmp_ * ld_[j]);
      tmp_ = ld_[j] * rho;
      dy += (2.0 * rate_[j]) * (tmp_ * l_[j]);
    }
    tmp_ = 0.5 * (dy + dy.adjoint());
    dy = tmp_;
  }

  Operator density(const State& y) const { return y; }
  Operator density_rate(const State&, const State& dy) const { return dy; }
  double energy(const State& y, const Operator& h) const { return expectation(y, h).real(); }
  double trace_error(const State& y) const { return std::abs(y.trace() - 1.0); }
  double hermiticity(const State& y) const { return hermiticity_error(y); }
  double fidelity_of(const State& y, const StateVector& target) const { return fidelity(Operator(y), target); }
  void observe(double t, const State& y) const {
    if (observer_) observer_(t, y);
  }

 private:
  const CutChain& system_;
  const DensityObserver& observer_;
  int d_;
  std::vector<SparseOperator> l_, ld_;
  std::vector<double> rate_;
  Operator anti_, h_, z_, tmp_;
};

class ClosedEngine {
 public:
  using State = StateVector;

  ClosedEngine(const CutChain& system, const VectorObserver& observer) : system_(system), observer_(observer) {}

  void slope(double t, const State& psi, State& dpsi) {
    h_ = system_.controlled_hamiltonian(t);
    dpsi.noalias() = h_ * psi;
    dpsi *= -kI;
  }

  Operator density(const State& psi) const { return psi * psi.adjoint(); }
  Operator density_rate(const State& psi, const State& dpsi) const {
    return dpsi * psi.adjoint() + psi * dpsi.adjoint();
  }
  double energy(const State& psi, const Operator& h) const { return psi.dot(h * psi).real(); }
  double trace_error(const State& psi) const { return std::abs(psi.squaredNorm() - 1.0); }
  double hermiticity(const State&) const { return 0.0; }
  double fidelity_of(const State& psi, const StateVector& target) const { return fidelity_pure(psi, target); }
  void observe(double t, const State& psi) const {
    if (observer_) observer_(t, psi);
  }

 private:
  const CutChain& system_;
  const VectorObserver& observer_;
  Operator h_;
};

template <class Engine>
Trajectory integrate(Engine& engine, typename Engine::State y, const CutChain& system,
                     const IntegratorConfig& cfg, typename Engine::State* final_state = nullptr) {
  if (cfg.record_every < 1) throw Error(ErrorKind::InvalidArgument, "record_every must be >= 1");
  system.check_gap();
  const double total = system.chain().total_time;
  const int steps = cfg.steps_for(total);
  const double dt = total / steps;
  const StateVector target = system.space().embed_single_excitation(target_state(system.chain()));

  Trajectory out;
  out.steps = steps;
  out.dt = dt;
  out.step_energies.resize(static_cast<std::size_t>(steps) + 1);
  std::vector<std::size_t> recorded_steps;
  double max_norm = 0.0;

  typename Engine::State k1 = y;
  Rk4<typename Engine::State> rk(y);
  auto rhs = [&engine](double t, const typename Engine::State& s, typename Engine::State& ds) {
    engine.slope(t, s, ds);
  };

  for (int n = 0;; ++n) {
    const double t = n == steps ? total : n * dt;
    if (!y.allFinite()) throw Error(ErrorKind::NonFiniteValue, "state not finite at t = " + std::to_string(t));
    engine.slope(t, y, k1);

    const Operator h = thermo_hamiltonian(system, t, cfg.thermo);
    out.step_energies[static_cast<std::size_t>(n)] = engine.energy(y, h);
    const double trace_err = engine.trace_error(y);
    out.summary.max_trace_error = std::max(out.summary.max_trace_error, trace_err);
    if (!(trace_err <= kTraceTolerance))
      throw Error(ErrorKind::TraceDrift, "|tr rho - 1| = " + std::to_string(trace_err) + " at t = " + std::to_string(t));

    if (n % cfg.record_every == 0 || n == steps) {
      const double herm = engine.hermiticity(y);
      out.summary.max_hermiticity_error = std::max(out.summary.max_hermiticity_error, herm);
      if (!(herm <= kHermiticityTolerance))
        throw Error(ErrorKind::HermiticityDrift, "||rho - rho^dag|| = " + std::to_string(herm));

      const Operator rho = engine.density(y);
      ThermoRecord r;
      r.t = t;
      r.heat_current = heat_current(engine.density_rate(y, k1), h);
      r.power = expectation(rho, thermo_hamiltonian_rate(system, t, cfg.thermo)).real();
      r.fidelity = engine.fidelity_of(y, target);
      r.trace_error = trace_err;
      r.energy = out.step_energies[static_cast<std::size_t>(n)];
      r.hermiticity_error = herm;
      max_norm = std::max(max_norm, hermitian_norm(h));
      if (cfg.diagnostics) {
        const double lo = min_eigenvalue(0.5 * (rho + rho.adjoint()));
        r.min_eig = lo;
        if (std::isnan(out.summary.min_eigenvalue) || lo < out.summary.min_eigenvalue)
          out.summary.min_eigenvalue = lo;
        if (lo < -kPositivityTolerance) out.summary.positivity_ok = false;
      }
      engine.observe(t, y);
      out.records.push_back(r);
      recorded_steps.push_back(static_cast<std::size_t>(n));
    }
    if (n == steps) break;
    rk.step(y, k1, t, dt, rhs);
  }

  // tolerance scale: largest ||H|| over the recorded samples
  const double tolerance = balance_tolerance(dt, max_norm);
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    ThermoRecord& r = out.records[i];
    r.balance_tolerance = tolerance;
    r.energy_current = energy_current_fd(out.step_energies, dt, recorded_steps[i]);
    r.balance_residual = std::abs(r.energy_current - r.heat_current - r.power);
    const double ratio = r.balance_tolerance > 0.0 ? r.balance_residual / r.balance_tolerance
                                                   : (r.balance_residual > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    out.summary.max_balance_ratio = std::max(out.summary.max_balance_ratio, ratio);
    if (!(r.balance_residual < r.balance_tolerance) && r.balance_residual != 0.0) out.summary.balance_ok = false;
  }
  out.final_rho = engine.density(y);
  if (final_state) *final_state = std::move(y);
  return out;
}

}  // namespace

int IntegratorConfig::steps_for(double total_time) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  const double raw = total_time / dt;
  const double steps = std::ceil(raw - 1e-9 * raw);
  if (steps > 1e9) throw Error(ErrorKind::InvalidArgument, "too many integration steps");
  return std::max(1, static_cast<int>(steps));
}

NonMarkovianState::NonMarkovianState(const Operator& rho, int n_baths, double time)
    : t(time), n_baths_(n_baths) {
  if (rho.rows() != rho.cols()) throw Error(ErrorKind::DimMismatch, "rho must be square");
  if (n_baths < 0) throw Error(ErrorKind::InvalidArgument, "negative bath count");
  data_ = Operator::Zero(rho.rows(), rho.cols() * (1 + 2 * static_cast<Eigen::Index>(n_baths)));
  data_.leftCols(rho.cols()) = rho;
}

NonMarkovianState NonMarkovianState::from_stacked(Operator stacked, int n_baths, double time) {
  if (stacked.cols() != stacked.rows() * (1 + 2 * static_cast<Eigen::Index>(n_baths)))
    throw Error(ErrorKind::DimMismatch, "stacked state has the wrong number of columns");
  NonMarkovianState s;
  s.t = time;
  s.n_baths_ = n_baths;
  s.data_ = std::move(stacked);
  return s;
}

NonMarkovianState master_rhs(const NonMarkovianState& state, const Operator& h,
                             std::span<const Operator> couplings, const BathSpec& spec) {
  const int n = state.n_baths();
  const Eigen::Index d = state.dim();
  require_square(h, d, "Hamiltonian");
  if (static_cast<int>(couplings.size()) != n || spec.size() != n)
    throw Error(ErrorKind::DimMismatch, "one coupling operator and bath per auxiliary pair expected");

  std::vector<Operator> oz, ow;
  for (int j = 0; j < n; ++j) {
    oz.emplace_back(state.oz(j));
    ow.emplace_back(state.ow(j));
  }
  const Operator rho = state.rho();
  NonMarkovianState out(Operator::Zero(d, d), n, state.t);
  Operator drho = -kI * (h * rho - rho * h);
  auto comm = [](const Operator& a, const Operator& b) -> Operator { return a * b - b * a; };
  for (int j = 0; j < n; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    const Operator& l = couplings[uj];
    require_square(l, d, "coupling operator");
    const Operator ld = l.adjoint();
    drho += comm(l, rho * oz[uj].adjoint()) - comm(ld, oz[uj] * rho) + comm(ld, rho * ow[uj].adjoint()) -
            comm(l, ow[uj] * rho);
    const ORates rates = o_operator_rhs(h, couplings, oz, ow, spec, j + 1);
    out.oz(j) = rates.oz;
    out.ow(j) = rates.ow;
  }
  out.rho() = drho;
  return out;
}

Trajectory evolve(const Operator& rho0, const CutChain& system, const BathSpec& bath, const IntegratorConfig& cfg,
                  const StateObserver& observer) {
  require_square(rho0, system.space().dim(), "initial rho");
  NonMarkovianEngine engine(system, bath, observer);
  NonMarkovianState start(rho0, bath.size());
  return integrate(engine, std::move(start.stacked()), system, cfg);
}

Trajectory evolve(const StateVector& psi0, const CutChain& system, const BathSpec& bath, const IntegratorConfig& cfg,
                  const StateObserver& observer) {
  return evolve(Operator(psi0 * psi0.adjoint()), system, bath, cfg, observer);
}

Trajectory lindblad_evolve(const Operator& rho0, const CutChain& system, const BathSpec& bath,
                           const IntegratorConfig& cfg, const DensityObserver& observer) {
  require_square(rho0, system.space().dim(), "initial rho");
  LindbladEngine engine(system, bath, observer);
  return integrate(engine, rho0, system, cfg);
}

Trajectory closed_evolve(const StateVector& psi0, const CutChain& system, const IntegratorConfig& cfg,
                         const VectorObserver& observer) {
  if (psi0.size() != system.space().dim()) throw Error(ErrorKind::DimMismatch, "initial state dimension");
  ClosedEngine engine(system, observer);
  StateVector final_psi;
  Trajectory out = integrate(engine, psi0, system, cfg, &final_psi);
  out.final_psi = std::move(final_psi);
  return out;
}

}  // namespace nmq
