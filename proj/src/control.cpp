#include "nmq/control.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nmq/errors.hpp"

namespace nmq {

namespace {

double series_j(int n, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int i = 1; i <= n; ++i) term *= half / i;
  double sum = term;
  const double q = -half * half;
  for (int m = 1; m < 200; ++m) {
    term *= q / (static_cast<double>(m) * (m + n));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Miller's algorithm: recur downward from an order well above max(n, x),
// normalize with J_0 + 2 sum_k J_2k = 1.
double recurrence_j(int n, double x) {
  const int top = std::max(n, static_cast<int>(x));
  int start = top + 40 + static_cast<int>(std::sqrt(40.0 * (top + 1)));
  start += start % 2;
  const double two_over_x = 2.0 / x;
  double next = 0.0;  // J_{k+1}
  double cur = 1e-30;  // J_k
  double norm = 0.0;
  double result = 0.0;
  for (int k = start; k > 0; --k) {
    const double prev = k * two_over_x * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      result *= 1e-250;
    }
    if (k - 1 == n) result = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
  }
  norm += cur;  // J_0
  return result / norm;
}

double bessel_unchecked(int n, double x) {
  if (n < 0) return (n % 2 == 0 ? 1.0 : -1.0) * bessel_unchecked(-n, x);
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (x <= 1.0) return series_j(n, x);
  return recurrence_j(n, x);
}

double derivative_j(int n, double x) {
  return 0.5 * (bessel_unchecked(n - 1, x) - bessel_unchecked(n + 1, x));
}

double amplitude(const ControlSpec& ctrl, std::optional<double> gap) {
  if (!ctrl.gap_rescaled) return ctrl.intensity;
  if (!gap) throw Error(ErrorKind::InvalidArgument, "gap-rescaled pulse needs E21(t)");
  if (!(*gap > kGapFloor)) throw Error(ErrorKind::GapCollapse, "E21 below gap floor");
  return ctrl.intensity / *gap;
}

}  // namespace

double ControlSpec::pulse_frequency() const {
  if (!(half_period > 0.0)) throw Error(ErrorKind::InvalidArgument, "half_period must be > 0");
  return std::numbers::pi / half_period;
}

double bessel_j(int n, double x) {
  if (n < 0 || n > 20 || !(x >= 0.0) || x > 50.0)
    throw Error(ErrorKind::OutOfValidatedRange,
                "bessel_j validated for 0<=n<=20, 0<=x<=50 (n=" + std::to_string(n) +
                    ", x=" + std::to_string(x) + ")");
  return bessel_unchecked(n, x);
}

double bessel_zero(int n, int k) {
  if (n < 0 || n > 20 || k < 1)
    throw Error(ErrorKind::InvalidArgument, "bessel_zero needs 0<=n<=20, k>=1");
  const double lo = std::max(n, 1);
  const double hi = n + 20.0 * k;
  constexpr double step = 0.05;
  int found = 0;
  double a = lo;
  double fa = bessel_unchecked(n, a);
  while (a < hi) {
    const double b = std::min(a + step, hi);
    const double fb = bessel_unchecked(n, b);
    if (fa == 0.0 || fa * fb < 0.0) {
      if (++found == k) {
        double left = a, right = b, fleft = fa;
        if (fa == 0.0) return a;
        for (int it = 0; it < 60 && right - left > 1e-9; ++it) {
          const double mid = 0.5 * (left + right);
          const double fm = bessel_unchecked(n, mid);
          if (fleft * fm <= 0.0) {
            right = mid;
          } else {
            left = mid;
            fleft = fm;
          }
        }
        double root = 0.5 * (left + right);
        for (int it = 0; it < 8; ++it) {
          const double delta = bessel_unchecked(n, root) / derivative_j(n, root);
          root -= delta;
          if (std::abs(delta) < 1e-15 * root) break;
        }
        if (std::abs(bessel_unchecked(n, root)) >= 1e-10)
          throw Error(ErrorKind::RootNotFound, "zero refinement did not converge");
        return root;
      }
    }
    a = b;
    fa = fb;
  }
  throw Error(ErrorKind::RootNotFound,
              "zero " + std::to_string(k) + " of J_" + std::to_string(n) + " not in search window");
}

double pulse_value(const ControlSpec& ctrl, std::optional<double> gap, double t) {
  if (!ctrl.active()) return 0.0;
  return amplitude(ctrl, gap) * (ctrl.b + ctrl.a * std::sin(ctrl.pulse_frequency() * t));
}

double pulse_rate_fixed_amplitude(const ControlSpec& ctrl, std::optional<double> gap, double t) {
  if (!ctrl.active()) return 0.0;
  const double w = ctrl.pulse_frequency();
  return amplitude(ctrl, gap) * ctrl.a * w * std::cos(w * t);
}

PulseCondition condition_residual(const ControlSpec& ctrl, double zero_tol) {
  const double tau = ctrl.half_period;
  const double w = ctrl.pulse_frequency();
  const double intensity = ctrl.active() ? ctrl.intensity : 0.0;
  const double n_real = intensity * ctrl.b / w;
  const double n_round = std::round(n_real);
  if (std::abs(n_real - n_round) > 1e-9)
    throw Error(ErrorKind::NonIntegerN, "I b / omega = " + std::to_string(n_real) + " is not an integer");

  PulseCondition out;
  out.n = static_cast<int>(n_round);
  out.z = intensity * ctrl.a / w;

  auto phase = [&](double s) {
    return intensity * ctrl.b * s + out.z * (1.0 - std::cos(w * s));
  };
  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double re = Quad::integrate([&](double s) { return std::cos(phase(s)); }, 0.0, tau, 20, 1e-13);
  const double im = Quad::integrate([&](double s) { return std::sin(phase(s)); }, 0.0, tau, 20, 1e-13);
  out.residual = {re, im};

  // J_{-n}(x) = (-1)^n J_n(x) = J_n(-x)
  out.bessel_value = bessel_j(std::abs(out.n), std::abs(out.z));
  out.is_valid = std::abs(out.bessel_value) < zero_tol;
  return out;
}

ControlSpec design_pulse(int n, int zero_index, double half_period) {
  if (!(half_period > 0.0)) throw Error(ErrorKind::InvalidArgument, "half_period must be > 0");
  ControlSpec c;
  c.kind = ControlKind::SinePulse;
  c.half_period = half_period;
  c.a = 1.0;
  const double w = c.pulse_frequency();
  const double z = bessel_zero(n, zero_index);
  c.intensity = z * w / c.a;
  c.b = n * w / c.intensity;
  return c;
}

}  // namespace nmq
