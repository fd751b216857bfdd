#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "lowmach/error.hpp"
#include "lowmach/fft.hpp"
#include "lowmach/grid.hpp"
#include "lowmach/spectral_field.hpp"

namespace lowmach {

enum class Axis { X, Y, Z };

using Samples = std::vector<double>;

/// Default thresholds for solvability and round-off checks. Callers may pass
/// their own values to every operation that takes a tolerance.
struct Tolerances {
  double solvability = 1e-10;
  double round_trip = 1e-12;
};

// ---------------------------------------------------------------------------
// Sampling and transforms

template <class F>
Samples sample3(const Grid& g, F&& f) {
  Samples out(g.size3());
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int l = 0; l < g.nz; ++l) out[g.index(i, j, l)] = f(g.x(i), g.y(j), g.z(l));
  return out;
}

template <class F>
Samples sample2(const Grid& g, F&& f) {
  Samples out(g.size2());
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) out[g.index(i, j)] = f(g.x(i), g.y(j));
  return out;
}

namespace detail {

inline std::vector<int> dims_of(const Grid& g, int dim) {
  return dim == 3 ? std::vector<int>{g.nx, g.ny, g.nz} : std::vector<int>{g.nx, g.ny};
}

template <int Dim>
SpectralField<Dim> forward(const Grid& g, std::span<const double> values, Parity parity) {
  const std::size_t n = SpectralField<Dim>::count(g);
  if (values.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "to_spectral: expected " + std::to_string(n) +
                                                  " samples, got " + std::to_string(values.size()));
  }
  std::vector<cplx> in(values.begin(), values.end());
  SpectralField<Dim> f(g, parity);
  plan_for(dims_of(g, Dim)).forward(in, f.coeffs());
  f *= 1.0 / double(n);
  return f;
}

template <int Dim>
Samples backward(const SpectralField<Dim>& f) {
  std::vector<cplx> out(f.size());
  plan_for(dims_of(f.grid(), Dim)).backward(f.coeffs(), out);
  Samples re(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) re[k] = out[k].real();
  return re;
}

}  // namespace detail

/// Forward transform of real samples. The parity tag is taken on trust;
/// pass the result through parity_project when the samples are not already
/// of pure parity.
inline SpectralField3 to_spectral3(const Grid& g, std::span<const double> values,
                                   Parity declared = Parity::Mixed) {
  return detail::forward<3>(g, values, declared);
}

inline SpectralField2 to_spectral2(const Grid& g, std::span<const double> values) {
  return detail::forward<2>(g, values, Parity::Even);
}

/// Inverse transform; the imaginary round-off residue is discarded.
template <int Dim>
Samples to_physical(const SpectralField<Dim>& f) {
  return detail::backward(f);
}

/// Largest |imag| of the inverse transform relative to the largest |real|;
/// a Hermitian-symmetry audit.
template <int Dim>
double imaginary_residue(const SpectralField<Dim>& f) {
  std::vector<cplx> out(f.size());
  detail::plan_for(detail::dims_of(f.grid(), Dim)).backward(f.coeffs(), out);
  double re = 0.0, im = 0.0;
  for (const auto& c : out) {
    re = std::max(re, std::abs(c.real()));
    im = std::max(im, std::abs(c.imag()));
  }
  return re > 0.0 ? im / re : im;
}

// ---------------------------------------------------------------------------
// Truncation and symmetry

/// 2/3-rule truncation. Idempotent.
template <int Dim>
SpectralField<Dim> dealias(SpectralField<Dim> f) {
  const Grid& g = f.grid();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      if constexpr (Dim == 2) {
        if (!g.retained(i, j)) f(i, j) = 0.0;
      } else {
        for (int l = 0; l < g.nz; ++l)
          if (!g.retained(i, j, l)) f(i, j, l) = 0.0;
      }
    }
  return f;
}

/// Symmetrize (Even) or antisymmetrize (Odd) the coefficients in m.
inline SpectralField3 parity_project(SpectralField3 f, Parity p) {
  if (p == Parity::Mixed) {
    f.set_parity(Parity::Mixed);
    return f;
  }
  const Grid& g = f.grid();
  const double s = p == Parity::Even ? 1.0 : -1.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      for (int l = 1; l < g.nz / 2; ++l) {
        const int lm = Grid::mirror(l, g.nz);
        const cplx avg = 0.5 * (f(i, j, l) + s * f(i, j, lm));
        f(i, j, l) = avg;
        f(i, j, lm) = s * avg;
      }
      if (p == Parity::Odd) {
        f(i, j, 0) = 0.0;
        f(i, j, g.nz / 2) = 0.0;
      }
    }
  f.set_parity(p);
  return f;
}

/// Norm of the part of f with the opposite parity to `p`, relative to ||f||.
inline double parity_contamination(const SpectralField3& f, Parity p) {
  double bad = 0.0, total = 0.0;
  const auto clean = parity_project(f, p);
  for (std::size_t n = 0; n < f.size(); ++n) {
    bad += std::norm(f.coeffs()[n] - clean.coeffs()[n]);
    total += std::norm(f.coeffs()[n]);
  }
  return total > 0.0 ? std::sqrt(bad / total) : 0.0;
}

// ---------------------------------------------------------------------------
// Calculus

/// Spectral derivative. d/dz flips parity; Nyquist modes of the
/// differentiated axis are dropped so the result stays real.
inline SpectralField3 deriv(const SpectralField3& f, Axis axis) {
  const Grid& g = f.grid();
  SpectralField3 out(g, axis == Axis::Z ? flip(f.parity()) : f.parity());
  const cplx I(0.0, 1.0);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int l = 0; l < g.nz; ++l) {
        double k = 0.0;
        bool nyq = false;
        switch (axis) {
          case Axis::X: k = g.kx(i); nyq = g.is_nyquist_x(i); break;
          case Axis::Y: k = g.ky(j); nyq = g.is_nyquist_y(j); break;
          case Axis::Z: k = g.kz(l); nyq = g.is_nyquist_z(l); break;
        }
        out(i, j, l) = nyq ? cplx{} : I * k * f(i, j, l);
      }
  return out;
}

inline SpectralField2 deriv(const SpectralField2& f, Axis axis) {
  const Grid& g = f.grid();
  SpectralField2 out(g);
  if (axis == Axis::Z) return out;
  const cplx I(0.0, 1.0);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const bool nyq = axis == Axis::X ? g.is_nyquist_x(i) : g.is_nyquist_y(j);
      const double k = axis == Axis::X ? g.kx(i) : g.ky(j);
      out(i, j) = nyq ? cplx{} : I * k * f(i, j);
    }
  return out;
}

template <int Dim>
SpectralField<Dim> laplacian_h(const SpectralField<Dim>& f) {
  const Grid& g = f.grid();
  SpectralField<Dim> out = f;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double k2 = g.kx(i) * g.kx(i) + g.ky(j) * g.ky(j);
      if constexpr (Dim == 2) {
        out(i, j) *= -k2;
      } else {
        for (int l = 0; l < g.nz; ++l) out(i, j, l) *= -k2;
      }
    }
  return out;
}

inline SpectralField3 dzz(const SpectralField3& f) {
  const Grid& g = f.grid();
  SpectralField3 out = f;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int l = 0; l < g.nz; ++l) out(i, j, l) *= -g.kz(l) * g.kz(l);
  return out;
}

inline SpectralField3 div_h(const VectorField& v) { return deriv(v.x, Axis::X) + deriv(v.y, Axis::Y); }

inline VectorField grad_h(const SpectralField3& f) { return {deriv(f, Axis::X), deriv(f, Axis::Y)}; }

// ---------------------------------------------------------------------------
// Barotropic / baroclinic split

/// Pointwise-in-(x,y) average over z in [0,1]. For Even fields this is the
/// m = 0 slice.
inline SpectralField2 vertical_average(const SpectralField3& f) {
  if (f.parity() != Parity::Even) {
    throw Error(ErrorCode::ParityMismatch, "vertical_average requires an Even field, got " +
                                               to_string(f.parity()));
  }
  const Grid& g = f.grid();
  SpectralField2 out(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) out(i, j) = f(i, j, 0);
  return out;
}

/// z-independent Even 3-D field with the given horizontal profile.
inline SpectralField3 extend_z(const SpectralField2& f) {
  const Grid& g = f.grid();
  SpectralField3 out(g, Parity::Even);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) out(i, j, 0) = f(i, j);
  return out;
}

/// Horizontal gradient of a z-independent field, as an Even 3-D vector.
inline VectorField grad_h(const SpectralField2& f) {
  return {extend_z(deriv(f, Axis::X)), extend_z(deriv(f, Axis::Y))};
}

/// f - vertical_average(f).
inline SpectralField3 baroclinic(SpectralField3 f) {
  if (f.parity() != Parity::Even) {
    throw Error(ErrorCode::ParityMismatch, "baroclinic requires an Even field");
  }
  const Grid& g = f.grid();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) f(i, j, 0) = 0.0;
  return f;
}

inline VectorField baroclinic(const VectorField& v) { return {baroclinic(v.x), baroclinic(v.y)}; }

/// F with dF/dz = f and F(z=0) = 0, for Even f whose pointwise vertical
/// average vanishes. The result is Odd.
inline SpectralField3 integrate_z_from_zero(const SpectralField3& f, double tol = Tolerances{}.solvability) {
  if (f.parity() != Parity::Even) {
    throw Error(ErrorCode::ParityMismatch, "integrate_z_from_zero requires an Even field, got " +
                                               to_string(f.parity()));
  }
  const Grid& g = f.grid();
  const Samples avg = to_physical(vertical_average(f));
  double worst = 0.0;
  for (double a : avg) worst = std::max(worst, std::abs(a));
  if (worst > tol) {
    throw Error(ErrorCode::NonzeroVerticalMean,
                "max |vertical average| = " + sci(worst) + " exceeds " + sci(tol));
  }
  SpectralField3 out(g, Parity::Odd);
  const cplx I(0.0, 1.0);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int l = 0; l < g.nz; ++l) {
        if (l == 0 || g.is_nyquist_z(l)) continue;
        out(i, j, l) = f(i, j, l) / (I * g.kz(l));
      }
  return parity_project(std::move(out), Parity::Odd);
}

/// Horizontal field of f restricted to the plane z = zi (zi an integer),
/// summed pairwise in m so Odd fields give exact zeros.
inline Samples trace_at_integer_z(const SpectralField3& f, int zi) {
  const Grid& g = f.grid();
  SpectralField2 t(g);
  const bool flip_odd_modes = (zi % 2) != 0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      cplx acc = f(i, j, 0);
      for (int l = 1; l < g.nz / 2; ++l) {
        const double s = (flip_odd_modes && (l % 2)) ? -1.0 : 1.0;
        acc += s * (f(i, j, l) + f(i, j, Grid::mirror(l, g.nz)));
      }
      const int ln = g.nz / 2;
      acc += ((flip_odd_modes && (ln % 2)) ? -1.0 : 1.0) * f(i, j, ln);
      t(i, j) = acc;
    }
  return to_physical(t);
}

// ---------------------------------------------------------------------------
// Products (pseudo-spectral, dealiased, parity-projected)

namespace detail {

inline SpectralField3 finish(const Grid& g, const Samples& values, Parity p) {
  auto f = dealias(to_spectral3(g, values, p));
  return p == Parity::Mixed ? f : parity_project(std::move(f), p);
}

}  // namespace detail

inline SpectralField3 multiply(const SpectralField3& a, const SpectralField3& b) {
  require_same_grid(a.grid(), b.grid(), "multiply");
  Samples pa = to_physical(a);
  const Samples pb = to_physical(b);
  for (std::size_t n = 0; n < pa.size(); ++n) pa[n] *= pb[n];
  return detail::finish(a.grid(), pa, product_parity(a.parity(), b.parity()));
}

inline SpectralField3 multiply(const SpectralField2& a, const SpectralField3& b) {
  require_same_grid(a.grid(), b.grid(), "multiply");
  const Grid& g = a.grid();
  const Samples pa = to_physical(a);
  Samples pb = to_physical(b);
  for (std::size_t n = 0; n < pb.size(); ++n) pb[n] *= pa[n / std::size_t(g.nz)];
  return detail::finish(g, pb, b.parity());
}

inline SpectralField2 multiply(const SpectralField2& a, const SpectralField2& b) {
  require_same_grid(a.grid(), b.grid(), "multiply");
  Samples pa = to_physical(a);
  const Samples pb = to_physical(b);
  for (std::size_t n = 0; n < pa.size(); ++n) pa[n] *= pb[n];
  return dealias(to_spectral2(a.grid(), pa));
}

// ---------------------------------------------------------------------------
// Norms

/// H^s norm with weight (1 + |k|^2)^s, k = (kx, ky, pi m), scaled by the
/// slab volume so s = 0 is the L2 norm over [0,2pi)^2 x [0,2). A 2-D field
/// is measured as its z-independent extension.
template <int Dim>
double sobolev_norm(const SpectralField<Dim>& f, int s) {
  if (s < 0) throw Error(ErrorCode::InvalidParams, "sobolev_norm: s must be >= 0");
  const Grid& g = f.grid();
  double acc = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double kh2 = g.kx(i) * g.kx(i) + g.ky(j) * g.ky(j);
      if constexpr (Dim == 2) {
        acc += std::pow(1.0 + kh2, s) * std::norm(f(i, j));
      } else {
        for (int l = 0; l < g.nz; ++l) {
          const double k2 = kh2 + g.kz(l) * g.kz(l);
          acc += std::pow(1.0 + k2, s) * std::norm(f(i, j, l));
        }
      }
    }
  return std::sqrt(acc * g.volume());
}

inline double sobolev_norm(const VectorField& v, int s) {
  return std::hypot(sobolev_norm(v.x, s), sobolev_norm(v.y, s));
}

/// || grad f ||_{H^s} using the full 3-D gradient (kx, ky, pi m).
inline double grad_sobolev_norm(const SpectralField3& f, int s) {
  const Grid& g = f.grid();
  double acc = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      for (int l = 0; l < g.nz; ++l) {
        const double k2 = g.kx(i) * g.kx(i) + g.ky(j) * g.ky(j) + g.kz(l) * g.kz(l);
        acc += k2 * std::pow(1.0 + k2, s) * std::norm(f(i, j, l));
      }
  return std::sqrt(acc * g.volume());
}

inline double grad_sobolev_norm(const VectorField& v, int s) {
  return std::hypot(grad_sobolev_norm(v.x, s), grad_sobolev_norm(v.y, s));
}

/// || grad_h f ||_{H^s} for a z-independent field.
inline double grad_h_sobolev_norm(const SpectralField2& f, int s) {
  const Grid& g = f.grid();
  double acc = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double k2 = g.kx(i) * g.kx(i) + g.ky(j) * g.ky(j);
      acc += k2 * std::pow(1.0 + k2, s) * std::norm(f(i, j));
    }
  return std::sqrt(acc * g.volume());
}

/// Domain integral (volume times the mean coefficient).
template <int Dim>
double integral(const SpectralField<Dim>& f) {
  return f.mean().real() * f.grid().volume();
}

// ---------------------------------------------------------------------------
// Elliptic solve

/// Solves -scale * Lap_h u = rhs on the horizontal torus with zero-mean u.
inline SpectralField2 solve_neg_laplacian_h(const SpectralField2& rhs, double scale,
                                           double tol = Tolerances{}.solvability) {
  if (!(scale > 0.0)) throw Error(ErrorCode::InvalidParams, "solve_neg_laplacian_h: scale must be positive");
  if (std::abs(rhs.mean()) > tol) {
    throw Error(ErrorCode::NonzeroMeanRHS,
                "rhs mean " + sci(std::abs(rhs.mean())) + " exceeds " + sci(tol));
  }
  const Grid& g = rhs.grid();
  SpectralField2 u(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      if (i == 0 && j == 0) continue;
      const double k2 = g.kx(i) * g.kx(i) + g.ky(j) * g.ky(j);
      u(i, j) = rhs(i, j) / (scale * k2);
    }
  return u;
}

}  // namespace lowmach
