#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "lowmach/cpe_solver.hpp"
#include "lowmach/error.hpp"
#include "lowmach/model.hpp"
#include "lowmach/pe_solver.hpp"
#include "lowmach/spectral.hpp"

namespace lowmach {

// ---------------------------------------------------------------------------
// Perturbation view

inline void require_matched(const CPEState& cpe, const PEState& pe, const char* where) {
  require_same_grid(cpe.grid(), pe.grid(), where);
  if (std::abs(cpe.t - pe.t) > 1e-12 * std::max(1.0, std::abs(pe.t))) {
    throw Error(ErrorCode::TimeMismatch,
                std::string(where) + ": cpe.t = " + sci(cpe.t) + ", pe.t = " + sci(pe.t));
  }
}

/// Decomposes the compressible state around the incompressible one. Time
/// derivatives come from the semi-discrete right-hand sides.
inline PerturbationView perturbation_view(const CPEState& cpe, const PEState& pe, const Params& p) {
  require_matched(cpe, pe, "perturbation_view");
  const double e2 = p.eps * p.eps;
  PerturbationView out;
  out.rho1 = diagnose_pressure_rho1(pe, p);

  out.zeta = cpe.rho - constant2(cpe.grid(), p.rho0);
  out.xi = out.zeta;
  out.xi.axpy(-e2, out.rho1);
  out.psi_h = cpe.v - pe.v;
  out.psi_z = diagnose_w_cpe(cpe.rho, cpe.v, p.tol.solvability) - diagnose_w_pe(pe.v, p.tol.solvability);

  const auto dpe = pe_rhs(pe, p);
  const auto dcpe = cpe_rhs(cpe, p);
  out.xi_t = dcpe.drho;
  out.xi_t.axpy(-e2, diagnose_rho1_t(pe, dpe, p));
  out.psi_h_t = dcpe.dv - dpe.dv;
  return out;
}

/// Closed form for psi_z: rho psi_z = - int_0^z [div_h(rho psi_h~) + v_p~ . grad_h rho] dz'.
inline SpectralField3 psi_z_closed_form(const CPEState& cpe, const PEState& pe, const Params& p) {
  require_matched(cpe, pe, "psi_z_closed_form");
  const Samples rp = to_physical(cpe.rho);
  require_positive(rp, "psi_z_closed_form");
  const auto psi_t = baroclinic(cpe.v - pe.v);
  const auto vp_t = baroclinic(pe.v);
  auto integrand = deriv(multiply(cpe.rho, psi_t.x), Axis::X);
  integrand += deriv(multiply(cpe.rho, psi_t.y), Axis::Y);
  integrand += multiply(deriv(cpe.rho, Axis::X), vp_t.x);
  integrand += multiply(deriv(cpe.rho, Axis::Y), vp_t.y);
  return divide(-integrate_z_from_zero(integrand, p.tol.solvability), rp);
}

// ---------------------------------------------------------------------------
// Functionals

/// Squared components of the perturbation energy
/// E = ||psi_h||_H2^2 + ||eps psi_h_t||_L2^2 + ||xi / eps||_H2^2 + ||xi_t||_L2^2.
struct EnergyParts {
  double psi_h2 = 0.0;
  double eps_psit_l2 = 0.0;
  double xi_h2 = 0.0;
  double xit_l2 = 0.0;
  double total() const { return psi_h2 + eps_psit_l2 + xi_h2 + xit_l2; }
};

/// Squared components of the dissipation
/// D = ||grad psi_h||_H2^2 + ||eps psi_h_t||_H1^2 + ||grad_h xi / eps||_H1^2 + ||xi_t||_L2^2.
struct DissipationParts {
  double grad_psi_h2 = 0.0;
  double eps_psit_h1 = 0.0;
  double grad_xi_h1 = 0.0;
  double xit_l2 = 0.0;
  double total() const { return grad_psi_h2 + eps_psit_h1 + grad_xi_h1 + xit_l2; }
};

inline double sq(double x) { return x * x; }

inline EnergyParts energy_E(const PerturbationView& view, const Params& p) {
  EnergyParts e;
  e.psi_h2 = sq(sobolev_norm(view.psi_h, 2));
  e.eps_psit_l2 = sq(p.eps * sobolev_norm(view.psi_h_t, 0));
  e.xi_h2 = sq(sobolev_norm(view.xi, 2) / p.eps);
  e.xit_l2 = sq(sobolev_norm(view.xi_t, 0));
  return e;
}

inline DissipationParts dissipation_D(const PerturbationView& view, const Params& p) {
  DissipationParts d;
  d.grad_psi_h2 = sq(grad_sobolev_norm(view.psi_h, 2));
  d.eps_psit_h1 = sq(p.eps * sobolev_norm(view.psi_h_t, 1));
  d.grad_xi_h1 = sq(grad_h_sobolev_norm(view.xi, 1) / p.eps);
  d.xit_l2 = sq(sobolev_norm(view.xi_t, 0));
  return d;
}

// ---------------------------------------------------------------------------
// Incompressible energy balance

/// Squared norms that enter d/dt(rho0/2 ||v||^2) + dissipation = 0.
inline double pe_dissipation(const VectorField& v, const Params& p) {
  auto grad_h_sq = [](const SpectralField3& f) {
    return sq(sobolev_norm(deriv(f, Axis::X), 0)) + sq(sobolev_norm(deriv(f, Axis::Y), 0));
  };
  const double grad = grad_h_sq(v.x) + grad_h_sq(v.y);
  const double div = sq(sobolev_norm(div_h(v), 0));
  const double vz = sq(sobolev_norm(deriv(v.x, Axis::Z), 0)) + sq(sobolev_norm(deriv(v.y, Axis::Z), 0));
  return p.mu * grad + p.lambda * div + vz;
}

struct EnergyResidual {
  std::vector<double> series;
  double max_abs = 0.0;
  double accumulated = 0.0;  // sum |r_n| dt
};

/// r_n = rho0/2 (||v_{n+1}||^2 - ||v_n||^2)/dt + (D_n + D_{n+1})/2 over a
/// uniformly spaced history.
inline EnergyResidual pe_energy_residual(std::span<const PEState> history, const Params& p) {
  if (history.size() < 2) throw Error(ErrorCode::InsufficientData, "pe_energy_residual needs >= 2 states");
  const double dt = history[1].t - history[0].t;
  EnergyResidual out;
  double prev_e = sq(sobolev_norm(history[0].v, 0));
  double prev_d = pe_dissipation(history[0].v, p);
  for (std::size_t n = 1; n < history.size(); ++n) {
    const double h = history[n].t - history[n - 1].t;
    if (std::abs(h - dt) > 1e-9 * std::abs(dt)) {
      throw Error(ErrorCode::InsufficientData, "pe_energy_residual: history is not uniformly spaced");
    }
    const double e = sq(sobolev_norm(history[n].v, 0));
    const double d = pe_dissipation(history[n].v, p);
    const double r = 0.5 * p.rho0 * (e - prev_e) / h + 0.5 * (d + prev_d);
    out.series.push_back(r);
    out.max_abs = std::max(out.max_abs, std::abs(r));
    out.accumulated += std::abs(r) * h;
    prev_e = e;
    prev_d = d;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conservation and convergence

struct Conservation {
  double mass = 0.0;
  double momentum_x = 0.0;
  double momentum_y = 0.0;
};

/// Exact quadrature of int rho and int rho v (the grid mean of a product of
/// band-limited fields is exact).
inline Conservation conservation_report(const CPEState& s) {
  const Grid& g = s.grid();
  const Samples r = to_physical(s.rho);
  const Samples vx = to_physical(s.v.x);
  const Samples vy = to_physical(s.v.y);
  double mx = 0.0, my = 0.0;
  for (std::size_t n = 0; n < vx.size(); ++n) {
    const double rn = r[n / std::size_t(g.nz)];
    mx += rn * vx[n];
    my += rn * vy[n];
  }
  const double w = g.volume() / double(vx.size());
  return {integral(s.rho), mx * w, my * w};
}

struct ConvergenceMetrics {
  double h2_v = 0.0;    // ||v^eps - v_p||_H2
  double h2_rho = 0.0;  // ||rho^eps - rho0||_H2
  double h1_w = 0.0;    // ||w^eps - w_p||_H1
};

inline ConvergenceMetrics convergence_metrics(const CPEState& cpe, const PEState& pe, const Params& p) {
  require_matched(cpe, pe, "convergence_metrics");
  ConvergenceMetrics m;
  m.h2_v = sobolev_norm(cpe.v - pe.v, 2);
  m.h2_rho = sobolev_norm(cpe.rho - constant2(cpe.grid(), p.rho0), 2);
  const auto dw = diagnose_w_cpe(cpe.rho, cpe.v, p.tol.solvability) - diagnose_w_pe(pe.v, p.tol.solvability);
  m.h1_w = sobolev_norm(dw, 1);
  return m;
}

// ---------------------------------------------------------------------------
// Rate fitting

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = slope x + intercept.
inline LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::DimensionMismatch, "fit_line: size mismatch");
  if (xs.size() < 2) throw Error(ErrorCode::InsufficientData, "fit_line: need >= 2 points");
  const double n = double(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += sq(xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += sq(ys[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorCode::InsufficientData, "fit_line: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : sq(sxy) / (sxx * syy);
  return f;
}

/// Least squares on (log x, log y).
inline LineFit fit_log_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::DimensionMismatch, "fit_log_slope: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw Error(ErrorCode::NonpositiveData, "fit_log_slope: data must be positive");
    }
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  return fit_line(lx, ly);
}

/// Least squares on (t, log y); slope is the exponential rate.
inline LineFit fit_semilog(std::span<const double> ts, std::span<const double> ys) {
  std::vector<double> ly;
  for (double y : ys) {
    if (!(y > 0.0)) throw Error(ErrorCode::NonpositiveData, "fit_semilog: data must be positive");
    ly.push_back(std::log(y));
  }
  return fit_line(ts, ly);
}

// ---------------------------------------------------------------------------
// Report row

struct EnergyReport {
  double t = 0.0;
  EnergyParts E;
  DissipationParts D;
  double mass = 0.0;
  double momentum_x = 0.0;
  double momentum_y = 0.0;
  double pe_l2_sq = 0.0;
  double pe_momentum = 0.0;  // |int v_p|
  double conv_h2_v = 0.0;
  double conv_h2_rho = 0.0;
  double conv_h1_w = 0.0;
  double xi_h2_over_eps = 0.0;  // ||xi / eps||_H2
  double psi_z_route_gap = 0.0;  // max |psi_z (difference of w's) - psi_z (closed form)|
};

inline double max_abs_physical(const SpectralField3& f) {
  double m = 0.0;
  for (double x : to_physical(f)) m = std::max(m, std::abs(x));
  return m;
}

inline EnergyReport energy_report(const CPEState& cpe, const PEState& pe, const Params& p) {
  EnergyReport r;
  r.t = pe.t;
  const auto view = perturbation_view(cpe, pe, p);
  r.E = energy_E(view, p);
  r.D = dissipation_D(view, p);
  const auto c = conservation_report(cpe);
  r.mass = c.mass;
  r.momentum_x = c.momentum_x;
  r.momentum_y = c.momentum_y;
  r.pe_l2_sq = sq(sobolev_norm(pe.v, 0));
  r.pe_momentum = std::hypot(integral(pe.v.x), integral(pe.v.y));
  const auto m = convergence_metrics(cpe, pe, p);
  r.conv_h2_v = m.h2_v;
  r.conv_h2_rho = m.h2_rho;
  r.conv_h1_w = m.h1_w;
  r.xi_h2_over_eps = sobolev_norm(view.xi, 2) / p.eps;
  r.psi_z_route_gap = max_abs_physical(view.psi_z - psi_z_closed_form(cpe, pe, p));
  return r;
}

}  // namespace lowmach
