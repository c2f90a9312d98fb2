#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>

#include "nmq/errors.hpp"
#include "nmq/model.hpp"
#include "oracles.hpp"

using namespace nmq;

namespace {

ChainSpec chain5() { return ChainSpec{5, -1.0, 5, 10.0}; }

// i -> N + 1 - i maps the cut bond (N, 1) onto itself.
int mirror_site(int i, int n) { return n + 1 - i; }

}  // namespace

TEST_SUITE("model") {

TEST_CASE("cut schedule") {
  const ChainSpec c = chain5();
  CHECK(c.omega() * c.total_time == doctest::Approx(std::numbers::pi / 2));
  for (int b = 1; b <= 5; ++b) CHECK(c.bond_coupling(b, 0.0) == -1.0);
  CHECK(std::abs(c.bond_coupling(5, c.total_time)) < 1e-15);
  CHECK(c.bond_coupling(2, c.total_time) == -1.0);
}

TEST_CASE("sector-1 block matches the hopping-matrix oracle") {
  const ChainSpec c = chain5();
  const CutChain sys(c, HilbertSpec::sectors(5, {1}));
  for (double t : {0.0, 2.5, 7.0, 10.0}) {
    const Eigen::MatrixXd expected = oracle::ring_block(5, -1.0, 5, std::cos(c.omega() * t));
    CHECK((sys.hamiltonian(t).real() - expected).norm() < 1e-14);
    CHECK(sys.hamiltonian(t).imag().norm() == 0.0);
    CHECK((sys.single_excitation_block(t) - expected).norm() < 1e-14);
  }
}

TEST_CASE("full-mode Hamiltonian matches Kronecker construction") {
  const int n = 4;
  const ChainSpec c{n, -1.0, 2, 3.0};
  const HilbertSpec f = HilbertSpec::full(n);
  const CutChain sys(c, f);
  const double t = 1.1;
  Operator expected = Operator::Zero(1 << n, 1 << n);
  for (int b = 1; b <= n; ++b) {
    const int nb = b % n + 1;
    const double j = b == 2 ? -std::cos(c.omega() * t) : -1.0;
    expected += j * (oracle::kron_site(PauliKind::SigmaX, b, n) * oracle::kron_site(PauliKind::SigmaX, nb, n) +
                     oracle::kron_site(PauliKind::SigmaY, b, n) * oracle::kron_site(PauliKind::SigmaY, nb, n));
  }
  CHECK((sys.hamiltonian(t) - oracle::to_spec_basis(expected, f)).norm() < 1e-13);
}

TEST_CASE("Hamiltonian is Hermitian and conserves excitation number") {
  for (int n = 3; n <= 6; ++n) {
    const HilbertSpec f = HilbertSpec::full(n);
    const CutChain sys(ChainSpec{n, -1.0, n, 4.0}, f);
    for (double t : {0.0, 1.3, 4.0}) {
      const Operator h = sys.hamiltonian(t);
      CHECK(hermiticity_error(h) == 0.0);
      for (int r = 0; r < f.dim(); ++r)
        for (int col = 0; col < f.dim(); ++col)
          if (std::popcount(f.basis_state(r)) != std::popcount(f.basis_state(col))) CHECK(h(r, col) == Complex(0.0));
    }
  }
}

TEST_CASE("ground energy of the N=5 ring is -4") {
  const CutChain sys(chain5(), HilbertSpec::sectors(5, {1}));
  CHECK(hermitian_eigensystem(sys.hamiltonian(0.0)).values(0) == doctest::Approx(-4.0).epsilon(1e-12));
}

TEST_CASE("dH/dt: analytic values and finite differences") {
  const ChainSpec c = chain5();
  const CutChain sys(c, HilbertSpec::full(5));
  CHECK(sys.dhamiltonian_dt(0.0).norm() == 0.0);
  const Operator cut = Operator(hopping_operator(5, 1, HilbertSpec::full(5)));
  CHECK((sys.dhamiltonian_dt(c.total_time) - (-c.coupling * c.omega()) * cut).norm() < 1e-14);
  const double h = 1e-4;
  for (double t : {0.5, 3.3, 9.0}) {
    const Operator fd = (sys.hamiltonian(t + h) - sys.hamiltonian(t - h)) / (2 * h);
    CHECK((fd - sys.dhamiltonian_dt(t)).norm() < 1e-7);
  }
}

TEST_CASE("time outside [0, S] is rejected") {
  const CutChain sys(chain5(), HilbertSpec::sectors(5, {1}));
  CHECK_THROWS_AS(sys.hamiltonian(-0.1), Error);
  CHECK_THROWS_AS(sys.hamiltonian(10.5), Error);
  try {
    sys.dhamiltonian_dt(11.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TimeOutOfRange);
  }
}

TEST_CASE("energy gap E21") {
  const ChainSpec c = chain5();
  CHECK(energy_gap_E21(c, 0.0) == doctest::Approx(4.0 * (1.0 - std::cos(2 * std::numbers::pi / 5))).epsilon(1e-12));
  CHECK(energy_gap_E21(c, 0.0) == doctest::Approx(2.7639).epsilon(1e-4));
  CHECK(energy_gap_E21(c, c.total_time) ==
        doctest::Approx(4.0 * (std::cos(std::numbers::pi / 6) - std::cos(2 * std::numbers::pi / 6))).epsilon(1e-12));
  CHECK(energy_gap_E21(c, c.total_time) == doctest::Approx(1.4641).epsilon(1e-4));
  const CutChain sys(c, HilbertSpec::sectors(5, {1}));
  for (int i = 0; i < 200; ++i) {
    const double t = c.total_time * i / 200.0;
    CHECK(std::abs(sys.energy_gap(t + 1e-6) - sys.energy_gap(t)) < 1e-4);
  }
  CHECK_NOTHROW(sys.check_gap());
}

TEST_CASE("initial state is the uniform ring ground state") {
  for (int n : {5, 10}) {
    const ChainSpec c{n, -1.0, n, 10.0};
    const StateVector psi = initial_state(c);
    for (int i = 0; i < n; ++i) CHECK(psi(i).real() == doctest::Approx(1.0 / std::sqrt(double(n))));
    const Operator ring = oracle::ring_block(n, -1.0, n, 1.0).cast<Complex>();
    const EigenSystem es = hermitian_eigensystem(ring);
    CHECK(std::abs(std::abs(es.vectors.col(0).dot(psi)) - 1.0) < 1e-9);
  }
}

TEST_CASE("target state amplitudes") {
  const StateVector target = target_state(chain5());
  const double s3 = std::sqrt(3.0);
  const double expected[] = {1 / (2 * s3), 0.5, 1 / s3, 0.5, 1 / (2 * s3)};
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(target(i) - expected[i]) < 1e-10);
    CHECK(std::abs(target(i) - std::sin(std::numbers::pi * (i + 1) / 6) / s3) < 1e-10);
  }
  CHECK(target.norm() == doctest::Approx(1.0).epsilon(1e-14));

  for (int n : {4, 7, 10}) {
    const StateVector t = target_state(ChainSpec{n, -1.0, n, 2.0});
    StateVector standing(n);
    for (int k = 1; k <= n; ++k) standing(k - 1) = std::sin(std::numbers::pi * k / (n + 1));
    standing.normalize();
    CHECK((t - standing).norm() < 1e-9);
  }

  const CutChain sys(chain5(), HilbertSpec::sectors(5, {1}));
  const EigenSystem es = hermitian_eigensystem(sys.hamiltonian(10.0));
  CHECK(std::abs(es.vectors.col(1).dot(target)) < 1e-10);
}

TEST_CASE("mirror symmetry about the cut bond") {
  const int n = 5;
  const ChainSpec c = chain5();
  const CutChain sys(c, HilbertSpec::sectors(n, {1}));
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i <= n; ++i) p(mirror_site(i, n) - 1, i - 1) = 1.0;
  for (double t : {0.0, 4.0, 10.0}) {
    const Eigen::MatrixXd h = sys.single_excitation_block(t);
    CHECK((p * h * p.transpose() - h).norm() < 1e-14);
  }
  const StateVector target = target_state(c);
  const StateVector initial = initial_state(c);
  CHECK((p.cast<Complex>() * target - target).norm() < 1e-12);
  CHECK((p.cast<Complex>() * initial - initial).norm() < 1e-15);
}

TEST_CASE("controlled Hamiltonian") {
  const ChainSpec c = chain5();
  const HilbertSpec s = HilbertSpec::sectors(5, {1});
  const CutChain plain(c, s);
  CHECK((plain.controlled_hamiltonian(3.0) - plain.hamiltonian(3.0)).norm() == 0.0);

  ControlSpec ctrl;
  ctrl.kind = ControlKind::SinePulse;
  ctrl.intensity = 0.7;
  ctrl.half_period = 1.0;
  const CutChain driven(c, s, ctrl);
  CHECK((driven.controlled_hamiltonian(0.5) - 1.7 * driven.hamiltonian(0.5)).norm() < 1e-14);
  const Operator hc = driven.controlled_hamiltonian(2.3), hs = driven.hamiltonian(2.3);
  CHECK((hc * hs - hs * hc).norm() < 1e-12);

  ctrl.half_period = 3.0;
  CHECK_THROWS_AS(CutChain(c, s, ctrl), Error);

  // fig4 pulse: c(S) = 0
  ControlSpec pulse;
  pulse.kind = ControlKind::SinePulse;
  pulse.intensity = 2.405 * 30;
  pulse.half_period = std::numbers::pi / 30;
  pulse.gap_rescaled = true;
  const ChainSpec c10{10, -1.0, 10, std::numbers::pi / 3};
  const CutChain fig4(c10, HilbertSpec::sectors(10, {1}), pulse);
  CHECK(std::abs(fig4.control_value(c10.total_time)) < 1e-10);
  CHECK((fig4.controlled_hamiltonian(c10.total_time) - fig4.hamiltonian(c10.total_time)).norm() < 1e-9);
  const double t = 0.37;
  CHECK(fig4.control_value(t) ==
        doctest::Approx(pulse.intensity / energy_gap_E21(c10, t) * std::sin(30.0 * t)).epsilon(1e-12));
}

TEST_CASE("controlled dH/dt matches finite differences, including gap rescaling") {
  ControlSpec ctrl;
  ctrl.kind = ControlKind::SinePulse;
  ctrl.intensity = 3.0;
  ctrl.b = 0.0;
  ctrl.half_period = 0.5;
  const ChainSpec c{6, -1.0, 6, 2.0};
  for (bool rescale : {false, true}) {
    ctrl.gap_rescaled = rescale;
    const CutChain sys(c, HilbertSpec::sectors(6, {1}), ctrl);
    const double h = 1e-5;
    for (double t : {0.3, 1.1, 1.7}) {
      const Operator fd = (sys.controlled_hamiltonian(t + h) - sys.controlled_hamiltonian(t - h)) / (2 * h);
      CHECK((fd - sys.controlled_dhamiltonian_dt(t)).norm() < 1e-5 * std::max(1.0, fd.norm()));
    }
  }
}

TEST_CASE("chain validation") {
  CHECK_THROWS_AS(ChainSpec({2, -1.0, 2, 1.0}).validate(), Error);
  CHECK_THROWS_AS(ChainSpec({5, -1.0, 6, 1.0}).validate(), Error);
  CHECK_THROWS_AS(ChainSpec({5, -1.0, 5, 0.0}).validate(), Error);
  CHECK_NOTHROW(ChainSpec({5, -1.0, 1, 1.0}).validate());
}

}  // TEST_SUITE
