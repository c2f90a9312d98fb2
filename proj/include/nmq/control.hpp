#pragma once

#include <complex>
#include <optional>

namespace nmq {

enum class ControlKind { None, SinePulse };

// Control c(t) = I_eff (b + a sin(pi t / tau)) multiplying the chain
// Hamiltonian, H_c = (1 + c) H_s. With gap_rescaled the amplitude is
// I / E21(t).
struct ControlSpec {
  ControlKind kind = ControlKind::None;
  double intensity = 0.0;
  double a = 1.0;
  double b = 0.0;
  double half_period = 1.0;  // tau; pulse angular frequency is pi / tau
  bool gap_rescaled = false;

  static ControlSpec none() { return {}; }
  bool active() const noexcept { return kind == ControlKind::SinePulse; }
  double pulse_frequency() const;
};

// Gap-rescaled amplitudes I/E21 abort with GapCollapse below this gap.
inline constexpr double kGapFloor = 1e-6;

inline constexpr double kZeroTolerance = 1e-8;
// Looser validity threshold for 4-significant-figure zeros such as I = 2.405*30.
inline constexpr double kPaperCompatZeroTolerance = 5e-4;

// J_n(x) for 0 <= n <= 20 and 0 <= x <= 50, absolute error below 1e-10.
// Power series for x <= 1, normalized backward recurrence above.
double bessel_j(int n, double x);

// k-th positive zero of J_n (k >= 1), refined to |J_n(root)| < 1e-10.
// Searched in [max(n, 1), n + 20k]; RootNotFound otherwise.
double bessel_zero(int n, int k);

// c(t). gap is E21(t) and is required when ctrl.gap_rescaled.
double pulse_value(const ControlSpec& ctrl, std::optional<double> gap, double t);

// dc/dt at fixed amplitude: I_eff * a * (pi/tau) cos(pi t / tau).
double pulse_rate_fixed_amplitude(const ControlSpec& ctrl, std::optional<double> gap, double t);

struct PulseCondition {
  int n = 0;            // I b / omega
  double z = 0.0;       // I a / omega
  std::complex<double> residual;  // int_0^tau exp(i int_0^s c) ds
  double bessel_value = 0.0;      // J_n(z)
  bool is_valid = false;          // |J_n(z)| < zero_tol
};

// Evaluates the zero-area condition for the constant-amplitude pulse
// underlying ctrl (gap rescaling is ignored). The inner integral is analytic,
// the outer one adaptive Gauss-Kronrod. For n = 0, |residual| = tau |J_0(z)|;
// for n != 0 the quadrature keeps an extra sine-moment term, and validity is
// still classified by |J_n(z)|.
PulseCondition condition_residual(const ControlSpec& ctrl, double zero_tol = kZeroTolerance);

// Sine pulse with a = 1, omega = pi/tau, I = z_k omega (z_k the k-th zero of
// J_n) and b = n omega / I.
ControlSpec design_pulse(int n, int zero_index, double half_period);

}  // namespace nmq
