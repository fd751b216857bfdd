#pragma once

#include <utility>

namespace lowmach {

/// Three-stage, third-order strong-stability-preserving Runge-Kutta step
/// (Shu-Osher form):
///
///   u1 = u0 + dt L(u0)
///   u2 = 3/4 u0 + 1/4 (u1 + dt L(u1))
///   u  = 1/3 u0 + 2/3 (u2 + dt L(u2))
///
/// `rhs(u)` returns the tendency, `advance(u, dt, du)` performs u += dt du,
/// `blend(u, a, u0, b)` sets u = a u0 + b u, and `finish(u)` re-imposes the
/// discrete constraints after every stage.
template <class State, class Rhs, class Advance, class Blend, class Finish>
State ssp_rk3(const State& u0, double dt, Rhs&& rhs, Advance&& advance, Blend&& blend, Finish&& finish) {
  State u1 = u0;
  advance(u1, dt, rhs(u0));
  finish(u1);

  State u2 = u1;
  advance(u2, dt, rhs(u1));
  blend(u2, 0.75, u0, 0.25);
  finish(u2);

  State u3 = u2;
  advance(u3, dt, rhs(u2));
  blend(u3, 1.0 / 3.0, u0, 2.0 / 3.0);
  finish(u3);
  return u3;
}

}  // namespace lowmach
