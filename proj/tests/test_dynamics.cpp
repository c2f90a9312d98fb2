#include <doctest.h>

#include <bit>
#include <cmath>
#include <vector>

#include "nmq/dynamics.hpp"
#include "nmq/errors.hpp"
#include "oracles.hpp"

using namespace nmq;

namespace {

std::vector<Operator> dense_couplings(const BathSpec& b, const HilbertSpec& s) {
  std::vector<Operator> out;
  for (const auto& l : coupling_operators(b, s)) out.emplace_back(l);
  return out;
}

Operator pure(const StateVector& psi) { return psi * psi.adjoint(); }

IntegratorConfig config(double dt, int record_every = 1) {
  IntegratorConfig c;
  c.dt = dt;
  c.record_every = record_every;
  return c;
}

// Restriction of a full-space operator to the states of `sub`.
Operator restrict_to(const Operator& full_op, const HilbertSpec& full, const HilbertSpec& sub) {
  Operator out(sub.dim(), sub.dim());
  for (int r = 0; r < sub.dim(); ++r)
    for (int c = 0; c < sub.dim(); ++c)
      out(r, c) = full_op(full.index_of(sub.basis_state(r)), full.index_of(sub.basis_state(c)));
  return out;
}

double off_block_norm(const Operator& m, const HilbertSpec& f) {
  double s = 0.0;
  for (int r = 0; r < f.dim(); ++r)
    for (int c = 0; c < f.dim(); ++c)
      if (std::popcount(f.basis_state(r)) != std::popcount(f.basis_state(c))) s += std::norm(m(r, c));
  return std::sqrt(s);
}

NonMarkovianState random_state(int d, int n_baths, unsigned seed) {
  NonMarkovianState s(oracle::random_density(d, seed), n_baths);
  std::srand(seed + 1);
  for (int j = 0; j < n_baths; ++j) {
    s.oz(j) = Operator::Random(d, d);
    s.ow(j) = Operator::Random(d, d);
  }
  return s;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("steps and effective dt") {
  IntegratorConfig c = config(1e-3);
  CHECK(c.steps_for(10.0) == 10000);
  c.dt = 0.3;
  CHECK(c.steps_for(1.0) == 4);
}

TEST_CASE("stacked state layout") {
  NonMarkovianState s(Operator::Identity(3, 3), 2, 0.5);
  CHECK(s.stacked().rows() == 3);
  CHECK(s.stacked().cols() == 15);
  CHECK(s.oz(1).norm() == 0.0);
  s.ow(1)(2, 2) = 7.0;
  CHECK(s.stacked()(2, 14) == Complex(7.0));
}

TEST_CASE("master_rhs with vanishing auxiliaries is unitary") {
  const HilbertSpec f = HilbertSpec::full(3);
  const BathSpec b = BathSpec::uniform(3, 0.02, 1.0, 30.0, Channel::SigmaMinus);
  const auto ls = dense_couplings(b, f);
  const Operator h = oracle::random_hermitian(8, 1);
  const NonMarkovianState s(oracle::random_density(8, 2), 3);
  const NonMarkovianState r = master_rhs(s, h, ls, b);
  const Complex i{0.0, 1.0};
  const Operator want = -i * (h * s.rho() - s.rho() * h);
  CHECK((Operator(r.rho()) - want).norm() < 1e-14);
}

TEST_CASE("master_rhs preserves trace and Hermiticity") {
  for (Channel ch : {Channel::SigmaMinus, Channel::SigmaZ}) {
    const HilbertSpec f = HilbertSpec::full(3);
    const BathSpec b = BathSpec::uniform(3, 0.02, 1.0, 30.0, ch);
    const NonMarkovianState s = random_state(8, 3, 11);
    const NonMarkovianState r = master_rhs(s, oracle::random_hermitian(8, 12), dense_couplings(b, f), b);
    CHECK(std::abs(Operator(r.rho()).trace()) < 1e-12);
    CHECK(hermiticity_error(r.rho()) < 1e-12);
  }
}

TEST_CASE("evolve agrees with RK4 over the literal equations") {
  for (Channel ch : {Channel::SigmaMinus, Channel::SigmaZ}) {
    const ChainSpec c{3, -1.0, 3, 2.0};
    const HilbertSpec f = HilbertSpec::full(3);
    const CutChain sys(c, f);
    const BathSpec b = BathSpec::uniform(3, 0.05, 2.0, 20.0, ch);
    const auto ls = dense_couplings(b, f);
    const StateVector psi0 = f.embed_single_excitation(initial_state(c));
    const IntegratorConfig cfg = config(0.01, 50);
    const Trajectory tr = evolve(psi0, sys, b, cfg);

    NonMarkovianState y(pure(psi0), 3);
    const double dt = tr.dt;
    auto f_at = [&](const Operator& st, double t) {
      return master_rhs(NonMarkovianState::from_stacked(st, 3, t), sys.controlled_hamiltonian(t), ls, b).stacked();
    };
    for (int n = 0; n < tr.steps; ++n) {
      const double t = n * dt;
      const Operator& x = y.stacked();
      const Operator k1 = f_at(x, t);
      const Operator k2 = f_at(x + 0.5 * dt * k1, t + 0.5 * dt);
      const Operator k3 = f_at(x + 0.5 * dt * k2, t + 0.5 * dt);
      const Operator k4 = f_at(x + dt * k3, std::min(t + dt, c.total_time));
      y = NonMarkovianState::from_stacked(x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), 3, t + dt);
    }
    CHECK((tr.final_rho - Operator(y.rho())).norm() < 1e-12);
  }
}

TEST_CASE("zero coupling reproduces the closed evolution") {
  const ChainSpec c{4, -1.0, 4, 5.0};
  const HilbertSpec s = HilbertSpec::sectors(4, {1});
  const CutChain sys(c, s);
  const BathSpec b = BathSpec::uniform(4, 0.0, 1.0, 50.0, Channel::SigmaZ);
  const IntegratorConfig cfg = config(1e-3, 100);
  double worst_o = 0.0;
  const Trajectory open = evolve(initial_state(c), sys, b, cfg, [&](const NonMarkovianState& st) {
    for (int j = 0; j < st.n_baths(); ++j) worst_o = std::max({worst_o, st.oz(j).norm(), st.ow(j).norm()});
  });
  const Trajectory closed = closed_evolve(initial_state(c), sys, cfg);
  CHECK(worst_o == 0.0);
  CHECK((open.final_rho - pure(closed.final_psi)).norm() < 1e-8);
  for (const auto& r : open.records) CHECK(std::abs(r.heat_current) < 1e-10);
  REQUIRE(open.records.size() == closed.records.size());
  for (std::size_t i = 0; i < open.records.size(); ++i)
    CHECK(open.records[i].fidelity == doctest::Approx(closed.records[i].fidelity).epsilon(1e-8));
}

TEST_CASE("closed evolution matches an independent RK4 oracle") {
  const ChainSpec c{5, -1.0, 5, 3.0};
  const HilbertSpec s = HilbertSpec::sectors(5, {1});
  const CutChain sys(c, s);
  const Trajectory tr = closed_evolve(initial_state(c), sys, config(1e-3, 1000));
  const StateVector want = oracle::schroedinger_rk4(initial_state(c), 3.0, 3000, [&](double t) {
    return Eigen::MatrixXcd(oracle::ring_block(5, -1.0, 5, std::cos(c.omega() * t)).cast<Complex>());
  });
  CHECK((tr.final_psi - want).norm() < 1e-10);
  CHECK(std::abs(tr.final_psi.norm() - 1.0) < 1e-9 * 3.0);
}

TEST_CASE("closed evolution leaves an invariant state alone") {
  const ChainSpec c{3, -1.0, 3, 2.0};
  const HilbertSpec f = HilbertSpec::full(3);
  const CutChain sys(c, f);
  StateVector vac = StateVector::Zero(8);
  vac(f.index_of(0)) = 1.0;
  const Trajectory tr = closed_evolve(vac, sys, config(1e-2, 10));
  CHECK(std::abs(std::abs(tr.final_psi(f.index_of(0))) - 1.0) < 1e-14);
}

TEST_CASE("oversized steps raise TraceDrift") {
  const ChainSpec c{5, -1.0, 5, 10.0};
  const CutChain sys(c, HilbertSpec::sectors(5, {1}));
  try {
    closed_evolve(initial_state(c), sys, config(1.0));
    FAIL("expected TraceDrift");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TraceDrift);
  }
}

TEST_CASE("sector and full representations agree") {
  struct Case {
    Channel channel;
    double temperature;
    std::vector<int> sectors;
  };
  const std::vector<Case> cases{{Channel::SigmaZ, 40.0, {1}}, {Channel::SigmaMinus, 0.0, {0, 1}}};
  for (const Case& k : cases) {
    for (int n = 3; n <= 4; ++n) {
      CAPTURE(n);
      const ChainSpec c{n, -1.0, n, 1.0};
      const BathSpec b = BathSpec::uniform(n, 0.05, 2.0, k.temperature, k.channel);
      REQUIRE(closed_sectors(n, b) == k.sectors);
      const HilbertSpec f = HilbertSpec::full(n);
      const HilbertSpec s = HilbertSpec::sectors(n, k.sectors);
      const IntegratorConfig cfg = config(1e-3, 100);
      const Trajectory full = evolve(f.embed_single_excitation(initial_state(c)), CutChain(c, f), b, cfg);
      const Trajectory sec = evolve(s.embed_single_excitation(initial_state(c)), CutChain(c, s), b, cfg);
      CHECK((restrict_to(full.final_rho, f, s) - sec.final_rho).norm() < 1e-8);
      CHECK(off_block_norm(full.final_rho, f) < 1e-10);
      REQUIRE(full.records.size() == sec.records.size());
      for (std::size_t i = 0; i < sec.records.size(); ++i) {
        CHECK(std::abs(full.records[i].fidelity - sec.records[i].fidelity) < 1e-8);
        CHECK(std::abs(full.records[i].heat_current - sec.records[i].heat_current) < 1e-8);
      }
    }
  }
}

TEST_CASE("thermal sigma_minus bath populates the two-excitation sector") {
  const ChainSpec c{3, -1.0, 3, 2.0};
  const HilbertSpec f = HilbertSpec::full(3);
  const BathSpec b = BathSpec::uniform(3, 0.05, 2.0, 50.0, Channel::SigmaMinus);
  const Trajectory tr = evolve(f.embed_single_excitation(initial_state(c)), CutChain(c, f), b, config(1e-3, 100));
  double p2 = 0.0;
  for (int r = 0; r < f.dim(); ++r)
    if (std::popcount(f.basis_state(r)) == 2) p2 += tr.final_rho(r, r).real();
  CHECK(p2 > 1e-4);
}

TEST_CASE("Lindblad engine at zero coupling is closed") {
  const ChainSpec c{4, -1.0, 4, 3.0};
  const HilbertSpec s = HilbertSpec::sectors(4, {1});
  const CutChain sys(c, s);
  const BathSpec b = BathSpec::uniform(4, 0.0, 1.0, 50.0, Channel::SigmaZ);
  const IntegratorConfig cfg = config(1e-3, 100);
  const Trajectory l = lindblad_evolve(pure(initial_state(c)), sys, b, cfg);
  const Trajectory u = closed_evolve(initial_state(c), sys, cfg);
  CHECK((l.final_rho - pure(u.final_psi)).norm() < 1e-8);
}

TEST_CASE("Lindblad evolution stays positive") {
  const ChainSpec c{4, -1.0, 4, 4.0};
  const HilbertSpec f = HilbertSpec::full(4);
  const BathSpec b = BathSpec::uniform(4, 0.01, 0.5, 50.0, Channel::SigmaMinus);
  IntegratorConfig cfg = config(1e-3, 100);
  cfg.diagnostics = true;
  const Trajectory tr = lindblad_evolve(pure(f.embed_single_excitation(initial_state(c))), CutChain(c, f), b, cfg);
  CHECK(tr.summary.positivity_ok);
  CHECK(tr.summary.min_eigenvalue >= -kPositivityTolerance);
  CHECK(tr.summary.max_trace_error < 1e-10);
}

TEST_CASE("invariants over a non-Markovian run") {
  const ChainSpec c{5, -1.0, 5, 2.0};
  const HilbertSpec s = HilbertSpec::sectors(5, {1});
  const BathSpec b = BathSpec::uniform(5, 0.01, 10.0, 30.0, Channel::SigmaZ);
  const Trajectory tr = evolve(initial_state(c), CutChain(c, s), b, config(1e-3, 10));
  CHECK(tr.summary.max_trace_error < 1e-10);
  CHECK(tr.summary.max_hermiticity_error < 1e-12);
  CHECK(tr.summary.balance_ok);
  CHECK(tr.records.size() == 201);
  CHECK(tr.records.front().t == 0.0);
  CHECK(tr.records.back().t == 2.0);
  CHECK(tr.step_energies.size() == 2001);
  CHECK(std::abs(tr.records.front().heat_current) < 1e-12);
}

TEST_CASE("runs are bitwise deterministic") {
  const ChainSpec c{4, -1.0, 4, 1.0};
  const HilbertSpec s = HilbertSpec::sectors(4, {1});
  const BathSpec b = BathSpec::uniform(4, 0.01, 2.0, 30.0, Channel::SigmaZ);
  const Trajectory a = evolve(initial_state(c), CutChain(c, s), b, config(1e-3, 10));
  const Trajectory d = evolve(initial_state(c), CutChain(c, s), b, config(1e-3, 10));
  CHECK(a.final_rho == d.final_rho);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].heat_current == d.records[i].heat_current);
    CHECK(a.records[i].fidelity == d.records[i].fidelity);
  }
}

TEST_CASE("fourth-order convergence under step halving") {
  const ChainSpec c{4, -1.0, 4, 1.0};
  const HilbertSpec s = HilbertSpec::sectors(4, {1});
  const BathSpec b = BathSpec::uniform(4, 0.05, 2.0, 30.0, Channel::SigmaZ);
  auto final_at = [&](double dt) { return evolve(initial_state(c), CutChain(c, s), b, config(dt, 1000000)).final_rho; };
  const Operator r1 = final_at(0.1), r2 = final_at(0.05), r4 = final_at(0.025);
  const double ratio = (r1 - r2).norm() / (r2 - r4).norm();
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("dimension errors") {
  const ChainSpec c{4, -1.0, 4, 1.0};
  const CutChain sys(c, HilbertSpec::sectors(4, {1}));
  const BathSpec b = BathSpec::uniform(4, 0.01, 2.0, 30.0, Channel::SigmaZ);
  CHECK_THROWS_AS(evolve(Operator(Operator::Identity(3, 3)), sys, b, config(1e-2)), Error);
  CHECK_THROWS_AS(closed_evolve(StateVector::Zero(3), sys, config(1e-2)), Error);
  CHECK_THROWS_AS(evolve(initial_state(c), sys, BathSpec::uniform(3, 0.01, 2.0, 30.0, Channel::SigmaZ), config(1e-2)), Error);
}

}  // TEST_SUITE
