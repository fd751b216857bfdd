#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "lowmach/error.hpp"
#include "lowmach/model.hpp"
#include "lowmach/pe_solver.hpp"
#include "lowmach/spectral.hpp"
#include "lowmach/ssp_rk3.hpp"

namespace lowmach {

struct CPETendency {
  SpectralField2 drho;
  VectorField dv;
};

inline void require_positive(const Samples& rho, const char* where) {
  for (double r : rho)
    if (!(r > 0.0)) throw Error(ErrorCode::NonpositiveDensity, std::string(where) + ": rho = " + sci(r));
}

/// Throws DensityOutOfBounds unless rho0/2 < rho < 2 rho0 on every grid point.
inline void check_density_bounds(const Samples& rho, const Params& p, const char* where) {
  const auto [lo, hi] = min_max(rho);
  if (!(lo > 0.5 * p.rho0 && hi < 2.0 * p.rho0)) {
    throw Error(ErrorCode::DensityOutOfBounds, std::string(where) + ": rho in [" + sci(lo) + ", " + sci(hi) +
                                                   "], admissible (" + sci(0.5 * p.rho0) + ", " +
                                                   sci(2.0 * p.rho0) + ")");
  }
}

/// Pointwise division of a 3-D field by a z-independent positive field; the
/// quotient is truncated back to the 2/3 band with the given parity.
inline SpectralField3 divide(const SpectralField3& f, const Samples& rho_phys) {
  const Grid& g = f.grid();
  Samples pf = to_physical(f);
  for (std::size_t n = 0; n < pf.size(); ++n) pf[n] /= rho_phys[n / std::size_t(g.nz)];
  return detail::finish(g, pf, f.parity());
}

/// rho w = - int_0^z div_h(rho v~) dz', v~ the baroclinic part of v.
inline SpectralField3 diagnose_w_cpe(const SpectralField2& rho, const VectorField& v,
                                     double tol = Tolerances{}.solvability) {
  const Samples rp = to_physical(rho);
  require_positive(rp, "diagnose_w_cpe");
  const auto vt = baroclinic(v);
  const VectorField flux{multiply(rho, vt.x), multiply(rho, vt.y)};
  const auto rho_w = -integrate_z_from_zero(div_h(flux), tol);
  return divide(rho_w, rp);
}

inline CPETendency cpe_rhs(const CPEState& s, const Params& p) {
  const Grid& g = s.grid();
  const Samples rp = to_physical(s.rho);
  check_density_bounds(rp, p, "cpe_rhs");

  // d_t rho = - div_h(rho vbar)
  const auto vbar_x = vertical_average(s.v.x);
  const auto vbar_y = vertical_average(s.v.y);
  auto drho = deriv(multiply(s.rho, vbar_x), Axis::X);
  drho += deriv(multiply(s.rho, vbar_y), Axis::Y);
  drho = -drho;

  const auto w = diagnose_w_cpe(s.rho, s.v, p.tol.solvability);

  // rho^gamma - rho0^gamma, evaluated pointwise without cancellation.
  Samples pex(rp.size());
  for (std::size_t n = 0; n < rp.size(); ++n) pex[n] = pressure_excess(rp[n] - p.rho0, p);
  const auto press = dealias(to_spectral2(g, pex));

  VectorField force = viscous_term(s.v, p);
  force.axpy(-1.0 / (p.eps * p.eps), grad_h(press));

  VectorField dv{divide(force.x, rp), divide(force.y, rp)};
  dv -= advect(s.v, w);
  dv.x = parity_project(dealias(std::move(dv.x)), Parity::Even);
  dv.y = parity_project(dealias(std::move(dv.y)), Parity::Even);
  return {dealias(std::move(drho)), std::move(dv)};
}

/// Components of the explicit step limit; min() is the admissible dt.
struct StableDt {
  double acoustic = std::numeric_limits<double>::infinity();
  double advective = std::numeric_limits<double>::infinity();
  double viscous = std::numeric_limits<double>::infinity();

  double min() const { return std::min({acoustic, advective, viscous}); }
};

inline StableDt stable_dt_parts(const CPEState& s, const Params& p) {
  const Grid& g = s.grid();
  const auto [rmin, rmax] = min_max(to_physical(s.rho));
  StableDt out;
  const double cmax = std::sqrt(p.gamma * std::pow(std::max(rmax, 0.0), p.gamma - 1.0));
  if (cmax > 0.0) out.acoustic = p.cfl_acoustic * p.eps * g.dx_h() / cmax;
  double umax = 0.0;
  try {
    const auto w = diagnose_w_cpe(s.rho, s.v, p.tol.solvability);
    umax = max_speed(s.v, &w);
  } catch (const Error&) {
    umax = max_speed(s.v);
  }
  if (umax > 0.0) out.advective = p.cfl_advective * g.dx_min() / umax;
  out.viscous = p.cfl_viscous * g.dx_min() * g.dx_min() * rmin / (2.0 * (p.mu + p.lambda + 1.0));
  return out;
}

inline double stable_dt(const CPEState& s, const Params& p) { return stable_dt_parts(s, p).min(); }

inline CPEState cpe_step(const CPEState& s, double dt, const Params& p) {
  check_dt(dt, stable_dt(s, p), "cpe_step");
  auto out = ssp_rk3(
      s, dt, [&](const CPEState& u) { return cpe_rhs(u, p); },
      [](CPEState& u, double h, const CPETendency& du) {
        u.rho.axpy(h, du.drho);
        u.v.axpy(h, du.dv);
        u.t += h;
      },
      [](CPEState& u, double a, const CPEState& u0, double b) {
        u.rho *= b;
        u.rho.axpy(a, u0.rho);
        u.v *= b;
        u.v.axpy(a, u0.v);
        u.t = a * u0.t + b * u.t;
      },
      [](CPEState& u) {
        u.rho = dealias(std::move(u.rho));
        u.v.x = parity_project(dealias(std::move(u.v.x)), Parity::Even);
        u.v.y = parity_project(dealias(std::move(u.v.y)), Parity::Even);
      });
  out.t = s.t + dt;
  check_density_bounds(to_physical(out.rho), p, "cpe_step");
  return out;
}

}  // namespace lowmach
