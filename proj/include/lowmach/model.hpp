#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "lowmach/error.hpp"
#include "lowmach/grid.hpp"
#include "lowmach/spectral.hpp"
#include "lowmach/spectral_field.hpp"

namespace lowmach {

/// Physical and numerical parameters shared by both solvers.
struct Params {
  double rho0 = 1.0;
  double gamma = 2.0;
  double mu = 1.0;
  double lambda = 1.0;
  double eps = 0.1;
  Grid grid{};
  double cfl_acoustic = 0.5;
  double cfl_advective = 0.5;
  double cfl_viscous = 0.35;
  double t_end = 0.5;
  int output_count = 10;
  Tolerances tol{};
};

/// c_s^2 = gamma * rho0^(gamma - 1)
inline double sound_speed_sq(const Params& p) { return p.gamma * std::pow(p.rho0, p.gamma - 1.0); }

/// Every violated parameter invariant, as human-readable messages. Empty
/// means the parameters are admissible.
inline std::vector<std::string> validate(const Params& p) {
  std::vector<std::string> out;
  if (!(p.rho0 > 0.0)) out.push_back("rho0 > 0 required (rho0=" + sci(p.rho0) + ")");
  if (!(p.gamma > 1.0)) out.push_back("gamma > 1 required (gamma=" + sci(p.gamma) + ")");
  if (!(p.mu > 0.0)) out.push_back("mu > 0 required (mu=" + sci(p.mu) + ")");
  if (!(p.lambda > 0.0)) out.push_back("0 < lambda required (lambda=" + sci(p.lambda) + ")");
  if (!(p.lambda < 4.0 * p.mu)) {
    out.push_back("lambda < 4 mu required (lambda=" + sci(p.lambda) + ", 4mu=" + sci(4.0 * p.mu) + ")");
  }
  if (!(4.0 * p.mu < 12.0 * p.lambda)) {
    out.push_back("4 mu < 12 lambda required (4mu=" + sci(4.0 * p.mu) + ", 12lambda=" + sci(12.0 * p.lambda) +
                  ")");
  }
  if (!(p.eps > 0.0 && p.eps < 1.0)) out.push_back("eps in (0,1) required (eps=" + sci(p.eps) + ")");
  auto unit = [&](double c, const char* name) {
    if (!(c > 0.0 && c < 1.0)) out.push_back(std::string(name) + " in (0,1) required (" + sci(c) + ")");
  };
  unit(p.cfl_acoustic, "cfl_acoustic");
  unit(p.cfl_advective, "cfl_advective");
  unit(p.cfl_viscous, "cfl_viscous");
  if (!(p.t_end >= 0.0)) out.push_back("t_end >= 0 required");
  if (p.output_count < 1) out.push_back("output_count >= 1 required");
  auto grid_ok = [](int n) { return n >= 4 && n % 2 == 0; };
  if (!grid_ok(p.grid.nx) || !grid_ok(p.grid.ny) || !grid_ok(p.grid.nz)) {
    out.push_back("grid sizes must be even and >= 4");
  }
  return out;
}

inline void require_valid(const Params& p) {
  const auto v = validate(p);
  if (v.empty()) return;
  std::string msg;
  for (const auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
  throw Error(ErrorCode::InvalidParams, msg);
}

/// rho^gamma - rho0^gamma for rho = rho0 + zeta, without cancellation for
/// small zeta.
inline double pressure_excess(double zeta, const Params& p) {
  const double rho = p.rho0 + zeta;
  if (!(rho > 0.0)) throw Error(ErrorCode::NonpositiveDensity, "rho = " + sci(rho));
  return std::pow(p.rho0, p.gamma) * std::expm1(p.gamma * std::log1p(zeta / p.rho0));
}

/// Taylor remainder R(zeta) = rho^gamma - rho0^gamma - c_s^2 zeta, rho = rho0 + zeta.
/// Small |zeta| uses the binomial series so R/zeta^2 stays accurate.
inline double residue(double zeta, const Params& p) {
  const double rho = p.rho0 + zeta;
  if (!(rho > 0.0)) throw Error(ErrorCode::NonpositiveDensity, "rho0 + zeta = " + sci(rho));
  const double t = zeta / p.rho0;
  const double scale = std::pow(p.rho0, p.gamma);
  if (std::abs(t) < 0.25) {
    // sum_{n>=2} binom(gamma, n) t^n
    double term = p.gamma * t;  // n = 1
    double sum = 0.0;
    for (int n = 2; n < 200; ++n) {
      term *= (p.gamma - (n - 1)) / n * t;
      sum += term;
      if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return scale * sum;
  }
  return pressure_excess(zeta, p) - sound_speed_sq(p) * zeta;
}

// ---------------------------------------------------------------------------
// States

/// Incompressible state: Even horizontal velocity v_p.
struct PEState {
  VectorField v;
  double t = 0.0;

  PEState() = default;
  explicit PEState(const Grid& g) : v(g) {}
  PEState(VectorField v_, double t_) : v(std::move(v_)), t(t_) {}

  const Grid& grid() const { return v.grid(); }
};

/// Compressible state: z-independent density and Even horizontal velocity.
struct CPEState {
  SpectralField2 rho;
  VectorField v;
  double t = 0.0;

  CPEState() = default;
  CPEState(SpectralField2 rho_, VectorField v_, double t_)
      : rho(std::move(rho_)), v(std::move(v_)), t(t_) {}

  const Grid& grid() const { return v.grid(); }
};

/// Deviation of a compressible state from the incompressible one:
/// rho = rho0 + eps^2 rho1 + xi, v = v_p + psi_h, w = w_p + psi_z.
struct PerturbationView {
  SpectralField2 rho1;
  SpectralField2 xi;
  VectorField psi_h;
  SpectralField3 psi_z;
  SpectralField2 zeta;
  SpectralField2 xi_t;
  VectorField psi_h_t;
};

/// Constant field with value c.
inline SpectralField2 constant2(const Grid& g, double c) {
  SpectralField2 f(g);
  f(0, 0) = c;
  return f;
}

inline std::pair<double, double> min_max(const Samples& v) {
  double lo = v.empty() ? 0.0 : v[0], hi = lo;
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return {lo, hi};
}

}  // namespace lowmach
