#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "lowmach/model.hpp"
#include "oracles.hpp"

using namespace lowmach;

namespace {

Params with(double rho0, double gamma) {
  Params p;
  p.rho0 = rho0;
  p.gamma = gamma;
  return p;
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

// gamma (gamma - 1) int_0^zeta (zeta - s) (rho0 + s)^(gamma - 2) ds
double residue_quadrature(double zeta, const Params& p) {
  const double g = p.gamma;
  return g * (g - 1.0) *
         oracle::integrate([&](double s) { return (zeta - s) * std::pow(p.rho0 + s, g - 2.0); }, 0.0, zeta, 1e-15);
}

}  // namespace

TEST(SoundSpeed, DirectEvaluation) {
  EXPECT_DOUBLE_EQ(sound_speed_sq(with(1.0, 2.0)), 2.0);
  EXPECT_DOUBLE_EQ(sound_speed_sq(with(1.0, 1.4)), 1.4);
  EXPECT_DOUBLE_EQ(sound_speed_sq(with(2.0, 2.0)), 4.0);
}

TEST(Residue, ZeroAndQuadraticCase) {
  EXPECT_EQ(residue(0.0, with(1.0, 2.0)), 0.0);
  EXPECT_NEAR(residue(0.1, with(1.0, 2.0)), 0.01, 1e-15);
  EXPECT_NEAR(residue(0.1, with(1.0, 2.0)), residue_quadrature(0.1, with(1.0, 2.0)), 1e-14);
}

TEST(Residue, MatchesQuadratureForNonIntegerGamma) {
  const Params p = with(1.0, 1.5);
  EXPECT_NEAR(residue(0.2, p), residue_quadrature(0.2, p), 1e-13);
  // Frozen from a 30-digit quadrature.
  EXPECT_NEAR(residue(0.2, p), 0.0145341380123986723, 1e-15);
  const Params q = with(1.3, 1.4);
  for (double z : {-0.6, -0.1, 1e-3, 0.05, 0.5}) EXPECT_NEAR(residue(z, q), residue_quadrature(z, q), 1e-13);
}

TEST(Residue, NonpositiveDensityThrows) {
  try {
    residue(-1.0, with(1.0, 2.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonpositiveDensity);
  }
}

TEST(Residue, QuadraticBoundAndTaylorLimit) {
  for (const Params& p : {with(1.0, 2.0), with(1.0, 1.4), with(2.0, 3.0)}) {
    // C = gamma (gamma - 1)/2 max rho^(gamma - 2) over |zeta| <= rho0/2.
    const double lo = 0.5 * p.rho0, hi = 1.5 * p.rho0;
    const double C = 0.5 * p.gamma * (p.gamma - 1.0) * std::max(std::pow(lo, p.gamma - 2), std::pow(hi, p.gamma - 2));
    for (int k = -50; k <= 50; ++k) {
      const double z = 0.5 * p.rho0 * k / 50.0;
      EXPECT_LE(std::abs(residue(z, p)), C * z * z * (1 + 1e-12) + 1e-300);
    }
    const double taylor = 0.5 * p.gamma * (p.gamma - 1.0) * std::pow(p.rho0, p.gamma - 2.0);
    for (double z : {1e-4, 1e-5}) EXPECT_NEAR(residue(z, p) / (z * z), taylor, 1e-3 * taylor);
  }
}

TEST(PressureExcess, NoCancellationForSmallZeta) {
  const Params p = with(1.0, 1.4);
  EXPECT_NEAR(pressure_excess(1e-12, p), 1.4e-12, 1e-22);
  EXPECT_NEAR(pressure_excess(0.3, p), std::pow(1.3, 1.4) - 1.0, 1e-15);
}

TEST(Validate, AcceptsDefaultParameters) { EXPECT_TRUE(validate(Params{}).empty()); }

TEST(Validate, ReportsViolatedViscosityOrdering) {
  Params p;
  p.lambda = 5.0;
  const auto v = validate(p);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_TRUE(mentions(v, "lambda < 4 mu"));
  p.lambda = 0.2;  // 4 mu < 12 lambda fails
  EXPECT_TRUE(mentions(validate(p), "4 mu < 12 lambda"));
}

TEST(Validate, ReportsEveryViolation) {
  Params p;
  p.gamma = 1.0;
  p.eps = 1.0;
  p.cfl_viscous = 0.0;
  p.grid.nz = 7;
  const auto v = validate(p);
  EXPECT_TRUE(mentions(v, "gamma > 1"));
  EXPECT_TRUE(mentions(v, "eps"));
  EXPECT_TRUE(mentions(v, "cfl_viscous"));
  EXPECT_TRUE(mentions(v, "grid"));
  try {
    require_valid(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidParams);
  }
}

TEST(MinMax, PairOfExtremes) {
  const auto [lo, hi] = min_max({3.0, -1.0, 2.0});
  EXPECT_EQ(lo, -1.0);
  EXPECT_EQ(hi, 3.0);
}
