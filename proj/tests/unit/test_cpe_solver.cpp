#include <gtest/gtest.h>

#include <cmath>

#include "fields.hpp"
#include "lowmach/cpe_solver.hpp"
#include "lowmach/diagnostics.hpp"
#include "lowmach/wellprepared.hpp"
#include "oracles.hpp"

using namespace lowmach;
using namespace testing_fields;

namespace {

const Grid g16{16, 16, 16};
const Grid g32{32, 32, 8};

Params params_on(const Grid& g, double eps = 0.1) {
  Params p;
  p.grid = g;
  p.eps = eps;
  return p;
}

VectorField heat_mode(const Grid& g, double A) {
  return velocity(g, [A](double, double, double z) { return A * std::cos(kPi * z); }, zero);
}

VectorField taylor_green(const Grid& g, double A) {
  return velocity(
      g, [A](double x, double y, double z) { return A * std::sin(x) * std::cos(y) * std::cos(kPi * z); },
      [A](double x, double y, double z) { return -A * std::cos(x) * std::sin(y) * std::cos(kPi * z); });
}

SpectralField2 density(const Grid& g, auto f) { return to_spectral2(g, sample2(g, f)); }

// int [rho |v|^2 / 2 + eps^-2 Pi(rho)], Pi the relative pressure potential.
double total_energy(const CPEState& s, const Params& p) {
  const Grid& g = s.grid();
  const Samples r = to_physical(s.rho), vx = to_physical(s.v.x), vy = to_physical(s.v.y);
  const double c2 = sound_speed_sq(p);
  double e = 0.0;
  for (std::size_t n = 0; n < vx.size(); ++n) {
    const double rho = r[n / std::size_t(g.nz)];
    const double pot = (std::pow(rho, p.gamma) - std::pow(p.rho0, p.gamma) - c2 * (rho - p.rho0)) / (p.gamma - 1.0);
    e += 0.5 * rho * (vx[n] * vx[n] + vy[n] * vy[n]) + pot / (p.eps * p.eps);
  }
  return e * g.volume() / double(vx.size());
}

}  // namespace

TEST(DiagnoseWCpe, NoBaroclinicFlowMeansNoVerticalVelocity) {
  const auto v = velocity(
      g16, [](double, double y, double) { return std::sin(y); }, [](double x, double, double) { return std::cos(x); });
  const auto rho = density(g16, [](double x, double y) { return 1.0 + 0.1 * std::sin(x + y); });
  EXPECT_LT(diagnose_w_cpe(rho, v).max_abs_coeff(), 1e-300);
}

TEST(DiagnoseWCpe, ConstantDensityReducesToIncompressibleFormula) {
  const auto v = taylor_green(g16, 1.0) + velocity(
                                              g16, [](double x, double, double z) { return std::sin(x) * std::cos(2 * kPi * z); },
                                              zero);
  const auto wc = diagnose_w_cpe(constant2(g16, 1.0), v);
  const auto wp = diagnose_w_pe(v);
  EXPECT_LT(max_diff(to_physical(wc), to_physical(wp)), 1e-12);
}

TEST(DiagnoseWCpe, QuadratureOracle) {
  auto rho_f = [](double x, double) { return 1.0 + 0.1 * std::cos(x); };
  const auto rho = density(g32, rho_f);
  const auto v = velocity(g32, [](double x, double, double z) { return std::cos(kPi * z) * std::sin(x); }, zero);
  const Samples w = to_physical(diagnose_w_cpe(rho, v));
  const double h = 1e-3;
  double worst = 0.0;
  for (int i : {0, 3, 11, 20})
    for (int l : {1, 2, 5}) {
      const double x = g32.x(i), z = g32.z(l);
      auto flux_div = [&](double s) {
        return oracle::fd1([&](double xx) { return rho_f(xx, 0.0) * std::sin(xx) * std::cos(kPi * s); }, x, h);
      };
      const double rho_w = -oracle::integrate(flux_div, 0.0, z, 1e-12);
      worst = std::max(worst, std::abs(w[g32.index(i, 0, l)] - rho_w / rho_f(x, 0.0)));
    }
  EXPECT_LT(worst, 1e-8);
}

TEST(DiagnoseWCpe, NonpositiveDensityThrows) {
  const auto rho = density(g16, [](double x, double) { return std::cos(x); });
  try {
    diagnose_w_cpe(rho, taylor_green(g16, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonpositiveDensity);
  }
}

TEST(DiagnoseWCpe, ColumnIntegralVanishesAndTracesAreZero) {
  const auto rho = density(g16, [](double x, double y) { return 1.0 + 0.2 * std::cos(x) * std::sin(2 * y); });
  const auto v = taylor_green(g16, 1.0);
  const auto vt = baroclinic(v);
  const auto div = div_h(VectorField{multiply(rho, vt.x), multiply(rho, vt.y)});
  EXPECT_LT(vertical_average(div).max_abs_coeff(), 1e-12);
  const auto w = diagnose_w_cpe(rho, v);
  for (int zi : {0, 1})
    for (double x : trace_at_integer_z(w, zi)) EXPECT_EQ(x, 0.0);
}

TEST(CpeRhs, RestState) {
  const Params p = params_on(g16);
  const auto t = cpe_rhs(CPEState(constant2(g16, p.rho0), VectorField(g16), 0.0), p);
  EXPECT_LT(t.drho.max_abs_coeff(), 1e-300);
  EXPECT_LT(max_abs(t.dv), 1e-300);
}

TEST(CpeRhs, HeatModeSharesTheIncompressibleReduction) {
  Params p = params_on(g16);
  p.rho0 = 1.3;
  const auto v = heat_mode(g16, 0.4);
  const auto t = cpe_rhs(CPEState(constant2(g16, p.rho0), v, 0.0), p);
  EXPECT_LT(t.drho.max_abs_coeff(), 1e-16);
  auto expected = v;
  expected *= -kPi * kPi / p.rho0;
  EXPECT_LT(max_diff(t.dv, expected), 1e-13);
  EXPECT_LT(max_diff(t.dv, pe_rhs(PEState(v, 0.0), p).dv), 1e-13);
}

TEST(CpeRhs, PressureGradientMatchesFiniteDifferences) {
  Params p = params_on(g32, 0.2);
  p.gamma = 1.4;
  auto rho_f = [](double x, double y) { return 1.0 + 0.01 * std::cos(x) + 0.005 * std::sin(2 * y); };
  const auto t = cpe_rhs(CPEState(density(g32, rho_f), VectorField(g32), 0.0), p);
  const Samples gx = to_physical(t.dv.x), gy = to_physical(t.dv.y);
  const double h = 1e-3, e2 = p.eps * p.eps;
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < g32.nx; i += 5)
    for (int j = 0; j < g32.ny; j += 3) {
      const double x = g32.x(i), y = g32.y(j), r = rho_f(x, y);
      const double px = oracle::fd1([&](double s) { return std::pow(rho_f(s, y), p.gamma); }, x, h);
      const double py = oracle::fd1([&](double s) { return std::pow(rho_f(x, s), p.gamma); }, y, h);
      worst = std::max(worst, std::abs(gx[g32.index(i, j, 0)] + px / (e2 * r)));
      worst = std::max(worst, std::abs(gy[g32.index(i, j, 0)] + py / (e2 * r)));
      scale = std::max(scale, std::abs(px / (e2 * r)));
    }
  EXPECT_LT(worst, 1e-6 * scale);
}

TEST(CpeRhs, DensityTendencyHasZeroMean) {
  const Params p = params_on(g16);
  const auto rho = density(g16, [](double x, double y) { return 1.0 + 0.05 * std::cos(x - y); });
  const auto v = taylor_green(g16, 1.0) + velocity(
                                              g16, [](double, double y, double) { return std::sin(2 * y); },
                                              [](double x, double, double) { return std::cos(x); });
  EXPECT_LT(std::abs(cpe_rhs(CPEState(rho, v, 0.0), p).drho.mean()), 1e-15);
}

TEST(CpeRhs, DensityOutOfBoundsThrows) {
  const Params p = params_on(g16);
  try {
    cpe_rhs(CPEState(constant2(g16, 2.5), VectorField(g16), 0.0), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DensityOutOfBounds);
  }
}

TEST(StableDt, AcousticFormula) {
  const Grid g{32, 32, 16};
  const Params p = params_on(g, 0.1);
  const auto parts = stable_dt_parts(CPEState(constant2(g, 1.0), VectorField(g), 0.0), p);
  EXPECT_NEAR(parts.acoustic, 0.5 * 0.1 * (2 * kPi / 32) / std::sqrt(2.0), 1e-16);
  EXPECT_TRUE(std::isinf(parts.advective));
  EXPECT_NEAR(parts.viscous, 0.35 * g.dx_min() * g.dx_min() / 6.0, 1e-16);
}

TEST(StableDt, MonotoneInEpsAndSpeed) {
  Params p = params_on(g16, 0.005);
  const CPEState s(constant2(g16, 1.0), taylor_green(g16, 0.1), 0.0);
  const double a = stable_dt(s, p);
  ASSERT_EQ(a, stable_dt_parts(s, p).acoustic);
  p.eps = 0.0025;
  EXPECT_NEAR(stable_dt(s, p), 0.5 * a, 1e-15);

  Params q = params_on(g16, 0.9);
  q.cfl_viscous = 0.99;
  const CPEState slow(constant2(g16, 1.0), taylor_green(g16, 50.0), 0.0);
  const CPEState fast(constant2(g16, 1.0), taylor_green(g16, 500.0), 0.0);
  const auto ps = stable_dt_parts(slow, q), pf = stable_dt_parts(fast, q);
  ASSERT_EQ(ps.min(), ps.advective);
  EXPECT_NEAR(pf.min(), ps.min() / 10.0, 1e-15);
}

TEST(CpeStep, RestStaysAtRest) {
  const Params p = params_on(g16);
  CPEState s(constant2(g16, p.rho0), VectorField(g16), 0.0);
  for (int n = 0; n < 3; ++n) s = cpe_step(s, stable_dt(s, p), p);
  EXPECT_LT(max_abs(s.v), 1e-300);
  EXPECT_LT((s.rho - constant2(g16, p.rho0)).max_abs_coeff(), 1e-300);
}

TEST(CpeStep, HeatModeDecaysExactly) {
  const Params p = params_on(g16);
  const double A = 0.5, dt = 8e-4;
  const CPEState s0(constant2(g16, p.rho0), heat_mode(g16, A), 0.0);
  const auto s1 = cpe_step(s0, dt, p);
  EXPECT_LT(max_diff(s1.v, heat_mode(g16, A * std::exp(-kPi * kPi * dt))), 0.1 * std::pow(kPi * kPi * dt, 4) * A);
}

TEST(CpeStep, RejectsUnstableStep) {
  const Params p = params_on(g16);
  const CPEState s(constant2(g16, p.rho0), taylor_green(g16, 1.0), 0.0);
  try {
    cpe_step(s, 1.5 * stable_dt(s, p), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CFLViolation);
  }
}

TEST(CpeStep, WellPreparedRunKeepsInvariants) {
  const Grid g{32, 32, 16};
  const Params p = params_on(g, 0.1);
  auto s = build_initial_states(sample_initial_velocity("baroclinic-taylor-green", 1.0, g), p).cpe;
  const double m0 = conservation_report(s).mass;
  double e_prev = total_energy(s, p);
  for (int n = 0; n < 60; ++n) {
    const double dt = stable_dt(s, p);
    s = cpe_step(s, dt, p);
    const auto [lo, hi] = min_max(to_physical(s.rho));
    EXPECT_GT(lo, 0.5 * p.rho0);
    EXPECT_LT(hi, 2.0 * p.rho0);
    EXPECT_NEAR(conservation_report(s).mass, m0, 1e-12 * m0);
    const double e = total_energy(s, p);
    EXPECT_LE(e, e_prev + 1e-8 * dt);
    e_prev = e;
  }
  EXPECT_LT(parity_contamination(s.v.x, Parity::Even), 1e-12);
  EXPECT_LT(parity_contamination(s.v.y, Parity::Even), 1e-12);
  const auto mom = conservation_report(s);
  EXPECT_LT(std::hypot(mom.momentum_x, mom.momentum_y), 1e-10);
}
