#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fields.hpp"
#include "lowmach/diagnostics.hpp"
#include "lowmach/wellprepared.hpp"

using namespace lowmach;
using namespace testing_fields;

namespace {

const Grid g16{16, 16, 8};
const double kPi2 = kPi * kPi;

Params params_on(const Grid& g, double eps = 0.1) {
  Params p;
  p.grid = g;
  p.eps = eps;
  return p;
}

SpectralField2 density(const Grid& g, auto f) { return to_spectral2(g, sample2(g, f)); }

VectorField sin_x(const Grid& g) {
  return velocity(g, [](double x, double, double) { return std::sin(x); }, zero);
}

}  // namespace

TEST(PerturbationView, IdenticalRestStatesGiveZero) {
  const Params p = params_on(g16);
  const PEState pe(g16);
  const CPEState cpe(constant2(g16, p.rho0), VectorField(g16), 0.0);
  const auto view = perturbation_view(cpe, pe, p);
  EXPECT_LT(view.xi.max_abs_coeff(), 1e-300);
  EXPECT_LT(max_abs(view.psi_h), 1e-300);
  EXPECT_LT(view.psi_z.max_abs_coeff(), 1e-300);
  EXPECT_EQ(energy_E(view, p).total(), 0.0);
}

TEST(PerturbationView, TimeMismatchThrows) {
  const Params p = params_on(g16);
  const CPEState cpe(constant2(g16, p.rho0), VectorField(g16), 0.1);
  try {
    perturbation_view(cpe, PEState(g16), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TimeMismatch);
  }
}

TEST(PerturbationView, VerticalVelocityRoutesAgree) {
  const Params p = params_on(g16);
  const auto vp = sample_initial_velocity("baroclinic-taylor-green", 1.0, g16);
  const auto v = vp + velocity(
                          g16, [](double x, double y, double z) { return 0.1 * std::cos(x + y) * std::cos(2 * kPi * z); },
                          [](double, double y, double z) { return 0.05 * std::sin(y) * std::cos(kPi * z); });
  const CPEState cpe(density(g16, [](double x, double y) { return 1.0 + 0.05 * std::cos(x) * std::sin(y); }), v, 0.0);
  const PEState pe(vp, 0.0);
  const auto view = perturbation_view(cpe, pe, p);
  EXPECT_GT(max_abs_physical(view.psi_z), 1e-3);
  EXPECT_LT(max_abs_physical(view.psi_z - psi_z_closed_form(cpe, pe, p)), 1e-10);
}

TEST(EnergyE, PlancherelValues) {
  const Params p = params_on(g16, 0.1);
  const CPEState cpe(constant2(g16, 1.0), sin_x(g16), 0.0);
  const auto view = perturbation_view(cpe, PEState(g16), p);
  const auto e = energy_E(view, p);
  // ||sin x||^2 = 4 pi^2 on the slab, weight (1 + 1)^2 at H2.
  EXPECT_NEAR(e.psi_h2, 16 * kPi2, 1e-11);
  EXPECT_EQ(e.xi_h2, 0.0);
  // xi_t = -div(rho vbar) = -cos x.
  EXPECT_NEAR(e.xit_l2, 4 * kPi2, 1e-11);
  // psi_h_t = -sin x cos x - (mu + lambda) sin x.
  EXPECT_NEAR(e.eps_psit_l2, 0.01 * 17 * kPi2, 1e-11);
  const auto d = dissipation_D(view, p);
  EXPECT_NEAR(d.grad_psi_h2, 16 * kPi2, 1e-11);
  EXPECT_NEAR(d.xit_l2, 4 * kPi2, 1e-11);
  EXPECT_EQ(d.grad_xi_h1, 0.0);
}

TEST(EnergyE, DisplacementTermIsQuadratic) {
  const Params p = params_on(g16);
  const auto v = sample_initial_velocity("baroclinic-taylor-green", 1.0, g16);
  const CPEState a(constant2(g16, 1.0), v, 0.0), b(constant2(g16, 1.0), 3.0 * v, 0.0);
  const double ea = energy_E(perturbation_view(a, PEState(g16), p), p).psi_h2;
  const double eb = energy_E(perturbation_view(b, PEState(g16), p), p).psi_h2;
  EXPECT_NEAR(eb, 9.0 * ea, 1e-12 * eb);
  // (1 + 2 + pi^2)^2 ||TG||^2 with ||TG||^2 = 2 * 8 pi^2 / 8.
  EXPECT_NEAR(ea, std::pow(3.0 + kPi2, 2) * 2.0 * kPi2, 1e-10);
}

TEST(PeEnergyResidual, RestIsZero) {
  const Params p = params_on(g16);
  std::vector<PEState> h{PEState(g16), PEState(VectorField(g16), 0.1)};
  const auto r = pe_energy_residual(h, p);
  ASSERT_EQ(r.series.size(), 1u);
  EXPECT_EQ(r.max_abs, 0.0);
}

TEST(PeEnergyResidual, SecondOrderInDt) {
  const Params p = params_on(g16);
  auto run = [&](double dt) {
    std::vector<PEState> h{PEState(sample_initial_velocity("heat-mode", 1.0, g16), 0.0)};
    for (int n = 0; n < int(std::lround(0.05 / dt)); ++n) h.push_back(pe_step(h.back(), dt, p));
    return pe_energy_residual(h, p);
  };
  const auto coarse = run(5e-4), fine = run(2.5e-4);
  double m = 0.0;
  for (double r : coarse.series) m = std::max(m, std::abs(r));
  EXPECT_EQ(m, coarse.max_abs);
  EXPECT_NEAR(coarse.max_abs / fine.max_abs, 4.0, 0.3);
}

TEST(PeEnergyResidual, TooFewStatesThrows) {
  std::vector<PEState> h{PEState(g16)};
  try {
    pe_energy_residual(h, params_on(g16));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
  }
}

TEST(Conservation, UniformDensityAtRest) {
  const auto c = conservation_report(CPEState(constant2(g16, 1.0), VectorField(g16), 0.0));
  EXPECT_NEAR(c.mass, 8 * kPi2, 1e-12);
  EXPECT_EQ(c.momentum_x, 0.0);
  EXPECT_EQ(c.momentum_y, 0.0);
}

TEST(Conservation, MomentumOfCorrelatedFields) {
  const auto rho = density(g16, [](double x, double) { return 1.0 + 0.1 * std::cos(x); });
  const auto v = velocity(g16, [](double x, double, double) { return std::cos(x); }, zero);
  const auto c = conservation_report(CPEState(rho, v, 0.0));
  EXPECT_NEAR(c.mass, 8 * kPi2, 1e-12);
  EXPECT_NEAR(c.momentum_x, 0.1 * 8 * kPi2 / 2.0, 1e-13);
  EXPECT_NEAR(c.momentum_y, 0.0, 1e-15);
}

TEST(ConvergenceMetrics, ZeroForMatchedStatesAndPlancherelOtherwise) {
  const Params p = params_on(g16);
  const auto vp = sample_initial_velocity("baroclinic-taylor-green", 1.0, g16);
  const auto m0 = convergence_metrics(CPEState(constant2(g16, 1.0), vp, 0.0), PEState(vp, 0.0), p);
  EXPECT_LT(m0.h2_v + m0.h2_rho + m0.h1_w, 1e-13);

  const auto dv = velocity(g16, [](double x, double, double z) { return std::sin(x) * std::cos(kPi * z); }, zero);
  const auto m = convergence_metrics(CPEState(constant2(g16, 1.1), vp + dv, 0.0), PEState(vp, 0.0), p);
  EXPECT_NEAR(m.h2_v, (2.0 + kPi2) * std::sqrt(2.0 * kPi2), 1e-11);
  EXPECT_NEAR(m.h2_rho, 0.1 * std::sqrt(8 * kPi2), 1e-13);
  EXPECT_GT(m.h1_w, 0.0);
}

TEST(Fits, ExactPowerLaw) {
  const std::vector<double> x{0.1, 0.05, 0.025, 0.0125}, y{3e-2, 7.5e-3, 1.875e-3, 4.6875e-4};
  const auto f = fit_log_slope(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-11);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
}

TEST(Fits, NoisyPowerLawSeeded) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  std::vector<double> x, y;
  for (int k = 0; k < 6; ++k) {
    x.push_back(0.1 / std::pow(2.0, k));
    y.push_back(0.5 * x.back() * (1.0 + noise(rng)));
  }
  const auto f = fit_log_slope(x, y);
  EXPECT_NEAR(f.slope, 1.0, 0.05);
  EXPECT_GT(f.r2, 0.99);
}

TEST(Fits, RejectsBadData) {
  const std::vector<double> x{1.0, 2.0}, bad{1.0, 0.0}, one{1.0};
  try {
    fit_log_slope(x, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonpositiveData);
  }
  try {
    fit_line(one, one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
  }
}

TEST(Fits, SemilogRecoversRate) {
  std::vector<double> t, y;
  for (int k = 0; k <= 10; ++k) {
    t.push_back(0.2 * k);
    y.push_back(2.0 * std::exp(-kPi2 * t.back()));
  }
  const auto f = fit_semilog(t, y);
  EXPECT_NEAR(f.slope, -kPi2, 1e-10);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
}
