#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lowmach/cpe_solver.hpp"
#include "lowmach/diagnostics.hpp"
#include "lowmach/error.hpp"
#include "lowmach/harness/config.hpp"
#include "lowmach/harness/runner.hpp"
#include "lowmach/pe_solver.hpp"
#include "lowmach/spectral.hpp"
#include "lowmach/wellprepared.hpp"

namespace lowmach::harness {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }
};

namespace detail {

inline double max_abs(const Samples& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const Samples& a, const Samples& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

/// Band-limited random 2-D field with zero mean.
inline SpectralField2 random_zero_mean2(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Samples s(g.size2());
  for (double& x : s) x = u(rng);
  auto f = dealias(to_spectral2(g, s));
  f(0, 0) = 0.0;
  return f;
}

/// Heat-mode velocity A e^{-pi^2 t / rho0} cos(pi z) x.
inline VectorField heat_mode_exact(const Grid& g, double A, double t, const Params& p) {
  return sample_initial_velocity(InitialFamily::HeatMode, A * std::exp(-kPi * kPi * t / p.rho0), g);
}

}  // namespace detail

/// Runs the invariant checks of every module at the config's grid and
/// parameters. Thrown errors become failed checks.
inline VerifyReport verify(const ExperimentConfig& c) {
  VerifyReport report;
  auto check = [&](const std::string& name, const std::function<CheckResult()>& body) {
    CheckResult r;
    try {
      r = body();
    } catch (const Error& e) {
      r.pass = false;
      r.detail = e.what();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = e.what();
    }
    r.name = name;
    report.checks.push_back(std::move(r));
  };
  auto result = [](bool pass, std::string detail) { return CheckResult{{}, pass, std::move(detail)}; };

  const Params p = c.at(c.eps_list.empty() ? 0.1 : c.eps_list.front());
  const Grid& g = p.grid;
  const Tolerances& tol = p.tol;
  std::mt19937_64 rng(c.seed);

  check("config.validate", [&] {
    const auto problems = validate(c);
    std::string d;
    for (const auto& m : problems) d += (d.empty() ? "" : "; ") + m;
    return result(problems.empty(), problems.empty() ? "ok" : d);
  });

  check("spectral.round_trip", [&] {
    g.check();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Samples s(g.size3());
    for (double& x : s) x = u(rng);
    const double e3 = detail::max_abs_diff(to_physical(to_spectral3(g, s)), s);
    Samples s2(g.size2());
    for (double& x : s2) x = u(rng);
    const double e2 = detail::max_abs_diff(to_physical(to_spectral2(g, s2)), s2);
    const double e = std::max(e2, e3);
    return result(e <= tol.round_trip, "max error " + sci(e) + " (tol " + sci(tol.round_trip) + ")");
  });

  check("spectral.parity", [&] {
    const auto f = to_spectral3(g, sample3(g, [](double x, double y, double z) {
                                  return std::sin(x) * std::cos(2.0 * y) * std::cos(kPi * z);
                                }), Parity::Even);
    const double even_leak = parity_contamination(to_spectral3(g, to_physical(f)), Parity::Even);
    const auto fz = deriv(f, Axis::Z);
    const auto prod = multiply(f, fz);
    const bool ok = even_leak <= tol.round_trip && fz.parity() == Parity::Odd && prod.parity() == Parity::Odd &&
                    parity_contamination(prod, Parity::Odd) <= tol.round_trip;
    return result(ok, "even-field leak " + sci(even_leak));
  });

  check("spectral.dealias_idempotent", [&] {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Samples s(g.size3());
    for (double& x : s) x = u(rng);
    const auto once = dealias(to_spectral3(g, s));
    const auto twice = dealias(once);
    const double d = (once - twice).max_abs_coeff();
    return result(d == 0.0, "max change " + sci(d));
  });

  check("spectral.integrate_z", [&] {
    const auto f = to_spectral3(g, sample3(g, [](double x, double, double z) { return std::sin(x) * std::cos(kPi * z); }),
                                Parity::Even);
    const auto F = integrate_z_from_zero(f, tol.solvability);
    const Samples exact = sample3(g, [](double x, double, double z) { return std::sin(x) * std::sin(kPi * z) / kPi; });
    const double e = detail::max_abs_diff(to_physical(F), exact);
    const double back = (deriv(F, Axis::Z) - f).max_abs_coeff();
    return result(e <= 1e-13 && back <= 1e-13, "error " + sci(e) + ", d_z round trip " + sci(back));
  });

  check("elliptic.residual", [&] {
    const auto rhs = detail::random_zero_mean2(g, rng);
    const double cs2 = sound_speed_sq(p);
    const auto u = solve_neg_laplacian_h(rhs, cs2, tol.solvability);
    auto back = laplacian_h(u);
    back *= -cs2;
    const double e = (back - rhs).max_abs_coeff() / std::max(rhs.max_abs_coeff(), 1e-300);
    const double m = std::abs(u.mean());
    return result(e <= 1e-12 && m <= 1e-15, "relative residual " + sci(e) + ", |mean| " + sci(m));
  });

  check("elliptic.rho1_zero_mean", [&] {
    const PEState s(initial_velocity(c), 0.0);
    const auto rho1 = diagnose_pressure_rho1(s, p);
    const double m = std::abs(rho1.mean());
    return result(m <= 1e-15, "|mean rho1| " + sci(m));
  });

  check("wellprepared.compatibility", [&] {
    const double d = compatibility_defect(initial_velocity(c));
    return result(d <= tol.solvability, "defect " + sci(d));
  });

  check("boundary.w_traces", [&] {
    const auto init = build_initial_states(initial_velocity(c), p);
    const auto wp = diagnose_w_pe(init.pe.v, tol.solvability);
    const auto wc = diagnose_w_cpe(init.cpe.rho, init.cpe.v, tol.solvability);
    double worst = 0.0;
    for (int zi : {0, 1}) {
      worst = std::max(worst, detail::max_abs(trace_at_integer_z(wp, zi)));
      worst = std::max(worst, detail::max_abs(trace_at_integer_z(wc, zi)));
    }
    return result(worst <= 1e-14, "max |w| on z = 0, 1: " + sci(worst));
  });

  check("conservation.short_runs", [&] {
    const auto init = build_initial_states(initial_velocity(c), p);
    const double m0 = conservation_report(init.cpe).mass;
    CPEState cs = init.cpe;
    PEState ps = init.pe;
    double mass_drift = 0.0, momentum = 0.0;
    for (int n = 0; n < 20; ++n) {
      cs = cpe_step(cs, stable_dt(cs, p), p);
      ps = pe_step(ps, stable_dt_pe(ps, p), p);
      mass_drift = std::max(mass_drift, std::abs(conservation_report(cs).mass - m0) / m0);
      momentum = std::max(momentum, std::hypot(integral(ps.v.x), integral(ps.v.y)));
    }
    return result(mass_drift <= 1e-12 && momentum <= 1e-12,
                  "relative mass drift " + sci(mass_drift) + ", |int v_p| " + sci(momentum));
  });

  check("energy.residual_order", [&] {
    const PEState s0(detail::heat_mode_exact(g, 1.0, 0.0, p), 0.0);
    const double dt = 0.5 * stable_dt_pe(s0, p);
    auto max_residual = [&](double h, int steps) {
      std::vector<PEState> hist{s0};
      for (int n = 0; n < steps; ++n) hist.push_back(pe_step(hist.back(), h, p));
      return pe_energy_residual(hist, p).max_abs;
    };
    const double r1 = max_residual(dt, 20);
    const double r2 = max_residual(dt / 2, 40);
    const double ratio = r1 / r2;
    return result(ratio > 3.0 && ratio < 5.0, "residual " + sci(r1) + " -> " + sci(r2) + ", ratio " + sci(ratio));
  });

  check("heat_mode.exact_solution", [&] {
    const double T = 0.05, A = 1.0;
    const auto v0 = detail::heat_mode_exact(g, A, 0.0, p);
    const auto ve = detail::heat_mode_exact(g, A, T, p);
    const PEState pe = advance_pe(PEState(v0, 0.0), T, p);
    const CPEState cpe = advance_cpe(CPEState(constant2(g, p.rho0), v0, 0.0), T, p);
    const double n = sobolev_norm(ve, 0);
    const double e_pe = sobolev_norm(pe.v - ve, 0) / n;
    const double e_cpe = sobolev_norm(cpe.v - ve, 0) / n;
    return result(e_pe <= 1e-6 && e_cpe <= 1e-6,
                  "relative error PE " + sci(e_pe) + ", CPE " + sci(e_cpe) + " at t = " + sci(T));
  });

  check("fit.synthetic_slope", [&] {
    std::uniform_real_distribution<double> noise(-0.05, 0.05);
    std::vector<double> xs, ys;
    for (int k = 0; k < 8; ++k) {
      const double x = 0.1 * std::pow(0.5, k);
      xs.push_back(x);
      ys.push_back(3.0 * x * (1.0 + noise(rng)));
    }
    const auto f = fit_log_slope(xs, ys);
    return result(f.slope >= 0.9 && f.slope <= 1.1, "slope " + sci(f.slope) + ", r2 " + sci(f.r2));
  });

  return report;
}

}  // namespace lowmach::harness
