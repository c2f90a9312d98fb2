#pragma once

namespace nmq {

// Classical fourth-order Runge-Kutta over any Eigen dense type. The first
// slope is supplied by the caller so observables can reuse f(t_n, y_n).
template <class State>
class Rk4 {
 public:
  explicit Rk4(const State& shape) : k2_(shape), k3_(shape), k4_(shape), tmp_(shape) {}

  // f(t, y, dy) writes dy = dy/dt at (t, y).
  template <class Rhs>
  void step(State& y, const State& k1, double t, double dt, Rhs& f) {
    const double half = 0.5 * dt;
    tmp_ = y + half * k1;
    f(t + half, tmp_, k2_);
    tmp_ = y + half * k2_;
    f(t + half, tmp_, k3_);
    tmp_ = y + dt * k3_;
    f(t + dt, tmp_, k4_);
    y += (dt / 6.0) * (k1 + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  State k2_, k3_, k4_, tmp_;
};

}  // namespace nmq
