#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "lowmach/error.hpp"
#include "lowmach/model.hpp"
#include "lowmach/spectral.hpp"
#include "lowmach/ssp_rk3.hpp"

namespace lowmach {

struct PETendency {
  VectorField dv;
};

// ---------------------------------------------------------------------------
// Shared kinematics (also used by the compressible solver)

/// v . grad_h f + w d_z f for an Even scalar f, dealiased.
inline SpectralField3 advect(const VectorField& v, const SpectralField3& w, const SpectralField3& f) {
  auto out = multiply(v.x, deriv(f, Axis::X));
  out += multiply(v.y, deriv(f, Axis::Y));
  out += multiply(w, deriv(f, Axis::Z));
  return out;
}

inline VectorField advect(const VectorField& v, const SpectralField3& w) {
  return {advect(v, w, v.x), advect(v, w, v.y)};
}

/// mu Lap_h v + lambda grad_h div_h v + d_zz v
inline VectorField viscous_term(const VectorField& v, const Params& p) {
  const auto div = div_h(v);
  VectorField out{laplacian_h(v.x), laplacian_h(v.y)};
  out *= p.mu;
  out.axpy(p.lambda, grad_h(div));
  out += VectorField{dzz(v.x), dzz(v.y)};
  return out;
}

/// div_h div_h (a (x) b) = sum_{i,j} d_i d_j (a_i b_j), vertically averaged.
inline SpectralField2 averaged_div_div(const VectorField& a, const VectorField& b) {
  auto s = deriv(deriv(multiply(a.x, b.x), Axis::X), Axis::X);
  s += deriv(deriv(multiply(a.x, b.y), Axis::X), Axis::Y);
  s += deriv(deriv(multiply(a.y, b.x), Axis::Y), Axis::X);
  s += deriv(deriv(multiply(a.y, b.y), Axis::Y), Axis::Y);
  return vertical_average(s);
}

inline double max_speed(const VectorField& v, const SpectralField3* w = nullptr) {
  const auto px = to_physical(v.x);
  const auto py = to_physical(v.y);
  Samples pw;
  if (w) pw = to_physical(*w);
  double m = 0.0;
  for (std::size_t n = 0; n < px.size(); ++n) {
    double s2 = px[n] * px[n] + py[n] * py[n];
    if (w) s2 += pw[n] * pw[n];
    m = std::max(m, std::sqrt(s2));
  }
  return m;
}

/// Max over (x,y) of |div_h of the barotropic velocity|.
inline double barotropic_divergence(const VectorField& v) {
  const auto d = to_physical(vertical_average(div_h(v)));
  double m = 0.0;
  for (double x : d) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------------------
// Incompressible primitive equations

/// w_p = - int_0^z div_h v dz'. Requires div_h of the barotropic velocity to
/// vanish; otherwise NonzeroVerticalMean.
inline SpectralField3 diagnose_w_pe(const VectorField& v, double tol = Tolerances{}.solvability) {
  return -integrate_z_from_zero(div_h(v), tol);
}

/// Removes the horizontal gradient part of the barotropic (m = 0) velocity.
/// Nyquist components of k are dropped so the result is divergence free for
/// the same discrete div_h used everywhere else.
inline VectorField leray_project_barotropic(VectorField v) {
  const Grid& g = v.grid();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double kx = g.is_nyquist_x(i) ? 0.0 : g.kx(i);
      const double ky = g.is_nyquist_y(j) ? 0.0 : g.ky(j);
      const double k2 = kx * kx + ky * ky;
      if (k2 == 0.0) continue;
      cplx& a = v.x(i, j, 0);
      cplx& b = v.y(i, j, 0);
      const cplx kv = (kx * a + ky * b) / k2;
      a -= kx * kv;
      b -= ky * kv;
    }
  return v;
}

/// Dealias, parity-project and barotropically project a PE velocity.
inline VectorField clean_pe_velocity(VectorField v) {
  v.x = parity_project(dealias(std::move(v.x)), Parity::Even);
  v.y = parity_project(dealias(std::move(v.y)), Parity::Even);
  return leray_project_barotropic(std::move(v));
}

inline PETendency pe_rhs(const PEState& s, const Params& p) {
  const auto w = diagnose_w_pe(s.v, p.tol.solvability);
  VectorField dv = viscous_term(s.v, p);
  dv *= 1.0 / p.rho0;
  dv -= advect(s.v, w);
  return {clean_pe_velocity(std::move(dv))};
}

/// min(advective, viscous) step limit.
inline double stable_dt_pe(const PEState& s, const Params& p) {
  const Grid& g = s.grid();
  const double dx = g.dx_min();
  const double visc = p.cfl_viscous * dx * dx * p.rho0 / (2.0 * (p.mu + p.lambda + 1.0));
  double umax = 0.0;
  try {
    const auto w = diagnose_w_pe(s.v, p.tol.solvability);
    umax = max_speed(s.v, &w);
  } catch (const Error&) {
    umax = max_speed(s.v);
  }
  const double adv = umax > 0.0 ? p.cfl_advective * dx / umax : std::numeric_limits<double>::infinity();
  return std::min(visc, adv);
}

inline void check_dt(double dt, double limit, const char* where) {
  if (!(dt > 0.0)) throw Error(ErrorCode::CFLViolation, std::string(where) + ": dt must be positive");
  if (dt > limit * (1.0 + 1e-12)) {
    throw Error(ErrorCode::CFLViolation,
                std::string(where) + ": dt = " + sci(dt) + " exceeds stable limit " + sci(limit));
  }
}

inline PEState pe_step(const PEState& s, double dt, const Params& p) {
  check_dt(dt, stable_dt_pe(s, p), "pe_step");
  auto out = ssp_rk3(
      s, dt, [&](const PEState& u) { return pe_rhs(u, p); },
      [](PEState& u, double h, const PETendency& du) {
        u.v.axpy(h, du.dv);
        u.t += h;
      },
      [](PEState& u, double a, const PEState& u0, double b) {
        u.v *= b;
        u.v.axpy(a, u0.v);
        u.t = a * u0.t + b * u.t;
      },
      [](PEState& u) { u.v = clean_pe_velocity(std::move(u.v)); });
  out.t = s.t + dt;
  return out;
}

/// rho_1 with zero mean solving -c_s^2 Lap_h rho_1 = rho0 avg_z div_h div_h (v (x) v).
inline SpectralField2 diagnose_pressure_rho1(const PEState& s, const Params& p) {
  return solve_neg_laplacian_h(p.rho0 * averaged_div_div(s.v, s.v), sound_speed_sq(p), p.tol.solvability);
}

/// Time derivative of rho_1: -c_s^2 Lap_h rho_1t = 2 rho0 avg_z div_h div_h (v (x) v_t).
inline SpectralField2 diagnose_rho1_t(const PEState& s, const PETendency& dv, const Params& p) {
  return solve_neg_laplacian_h(2.0 * p.rho0 * averaged_div_div(s.v, dv.dv), sound_speed_sq(p),
                               p.tol.solvability);
}

}  // namespace lowmach
