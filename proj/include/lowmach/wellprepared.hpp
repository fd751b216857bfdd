#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "lowmach/cpe_solver.hpp"
#include "lowmach/diagnostics.hpp"
#include "lowmach/error.hpp"
#include "lowmach/model.hpp"
#include "lowmach/pe_solver.hpp"
#include "lowmach/spectral.hpp"

namespace lowmach {

enum class InitialFamily { BaroclinicTaylorGreen, BarotropicVortex, HeatMode, Rest };

inline InitialFamily parse_family(const std::string& name) {
  if (name == "baroclinic-taylor-green") return InitialFamily::BaroclinicTaylorGreen;
  if (name == "barotropic-vortex") return InitialFamily::BarotropicVortex;
  if (name == "heat-mode") return InitialFamily::HeatMode;
  if (name == "rest") return InitialFamily::Rest;
  throw Error(ErrorCode::UnknownFamily, "unknown initial-condition family '" + name + "'");
}

inline std::string to_string(InitialFamily f) {
  switch (f) {
    case InitialFamily::BaroclinicTaylorGreen: return "baroclinic-taylor-green";
    case InitialFamily::BarotropicVortex: return "barotropic-vortex";
    case InitialFamily::HeatMode: return "heat-mode";
    case InitialFamily::Rest: return "rest";
  }
  return "?";
}

/// Analytic initial velocities:
///  baroclinic-taylor-green  A (sin x cos y cos pi z, -cos x sin y cos pi z)
///  barotropic-vortex        A (2 sin x cos 2y, -cos x sin 2y), from the stream function sin x sin 2y
///  heat-mode                A (cos pi z, 0)
///  rest                     0
inline VectorField sample_initial_velocity(InitialFamily family, double amplitude, const Grid& g) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw Error(ErrorCode::InvalidConfig, "amplitude must be finite and non-negative");
  }
  const double A = amplitude;
  auto make = [&](auto fx, auto fy) {
    VectorField v{to_spectral3(g, sample3(g, fx), Parity::Even), to_spectral3(g, sample3(g, fy), Parity::Even)};
    v.x = parity_project(dealias(std::move(v.x)), Parity::Even);
    v.y = parity_project(dealias(std::move(v.y)), Parity::Even);
    return v;
  };
  switch (family) {
    case InitialFamily::BaroclinicTaylorGreen:
      return make([A](double x, double y, double z) { return A * std::sin(x) * std::cos(y) * std::cos(kPi * z); },
                  [A](double x, double y, double z) { return -A * std::cos(x) * std::sin(y) * std::cos(kPi * z); });
    case InitialFamily::BarotropicVortex:
      return make([A](double x, double y, double) { return 2.0 * A * std::sin(x) * std::cos(2.0 * y); },
                  [A](double x, double y, double) { return -A * std::cos(x) * std::sin(2.0 * y); });
    case InitialFamily::HeatMode:
      return make([A](double, double, double z) { return A * std::cos(kPi * z); },
                  [](double, double, double) { return 0.0; });
    case InitialFamily::Rest:
      return VectorField(g);
  }
  throw Error(ErrorCode::UnknownFamily, "unhandled family");
}

inline VectorField sample_initial_velocity(const std::string& family, double amplitude, const Grid& g) {
  return sample_initial_velocity(parse_family(family), amplitude, g);
}

/// Zero total momentum and barotropically divergence-free. Idempotent.
inline VectorField enforce_compatibility(VectorField v) {
  v.x(0, 0, 0) = 0.0;
  v.y(0, 0, 0) = 0.0;
  return leray_project_barotropic(std::move(v));
}

/// Largest violation of the two compatibility conditions: |int v| and
/// max |div_h vbar|.
inline double compatibility_defect(const VectorField& v) {
  const double mean = std::hypot(integral(v.x), integral(v.y));
  return std::max(mean, barotropic_divergence(v));
}

struct InitialStates {
  PEState pe;
  CPEState cpe;
  SpectralField2 rho1;
};

/// Well-prepared pair: PE starts from v_in; CPE starts from
/// (rho0 + eps^2 rho1_in, v_in), i.e. xi_in = 0 and psi_h_in = 0.
inline InitialStates build_initial_states(const VectorField& v_in, const Params& p) {
  require_valid(p);
  if (const double d = compatibility_defect(v_in); d > p.tol.solvability) {
    throw Error(ErrorCode::InvalidConfig, "initial velocity is not compatible (defect " + sci(d) + ")");
  }
  PEState pe(v_in, 0.0);
  auto rho1 = diagnose_pressure_rho1(pe, p);
  auto rho = constant2(v_in.grid(), p.rho0);
  rho.axpy(p.eps * p.eps, rho1);
  check_density_bounds(to_physical(rho), p, "build_initial_states");
  CPEState cpe(std::move(rho), v_in, 0.0);
  return {std::move(pe), std::move(cpe), std::move(rho1)};
}

/// E_in: the perturbation energy at t = 0, with the initial time derivatives
/// of xi and psi_h taken from the two right-hand sides.
inline EnergyParts initial_energy(const PEState& pe0, const CPEState& cpe0, const Params& p) {
  return energy_E(perturbation_view(cpe0, pe0, p), p);
}

}  // namespace lowmach
