#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "lowmach/error.hpp"
#include "lowmach/grid.hpp"

namespace lowmach {

using cplx = std::complex<double>;

/// Symmetry of a 3-D field in z. `Mixed` marks raw transforms of arbitrary
/// samples; every solver field is Even or Odd.
enum class Parity { Even, Odd, Mixed };

inline std::string to_string(Parity p) {
  switch (p) {
    case Parity::Even: return "Even";
    case Parity::Odd: return "Odd";
    case Parity::Mixed: return "Mixed";
  }
  return "?";
}

inline Parity product_parity(Parity a, Parity b) {
  if (a == Parity::Mixed || b == Parity::Mixed) return Parity::Mixed;
  return a == b ? Parity::Even : Parity::Odd;
}

inline Parity flip(Parity p) {
  switch (p) {
    case Parity::Even: return Parity::Odd;
    case Parity::Odd: return Parity::Even;
    default: return Parity::Mixed;
  }
}

/// Fourier coefficients of a real field on the periodic slab, normalized so
/// that the zero mode is the domain mean. Dim == 2 fields are z-independent
/// (always Even); Dim == 3 fields carry their z-parity.
template <int Dim>
class SpectralField {
  static_assert(Dim == 2 || Dim == 3);

 public:
  SpectralField() = default;
  explicit SpectralField(const Grid& grid, Parity parity = Parity::Even)
      : grid_(grid), parity_(Dim == 2 ? Parity::Even : parity), coeffs_(count(grid)) {
    grid_.check();
  }

  static std::size_t count(const Grid& g) { return Dim == 3 ? g.size3() : g.size2(); }

  const Grid& grid() const { return grid_; }
  Parity parity() const { return parity_; }
  void set_parity(Parity p) { parity_ = Dim == 2 ? Parity::Even : p; }

  std::span<cplx> coeffs() { return coeffs_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }

  cplx& operator()(int i, int j) requires(Dim == 2) { return coeffs_[grid_.index(i, j)]; }
  const cplx& operator()(int i, int j) const requires(Dim == 2) { return coeffs_[grid_.index(i, j)]; }
  cplx& operator()(int i, int j, int l) requires(Dim == 3) { return coeffs_[grid_.index(i, j, l)]; }
  const cplx& operator()(int i, int j, int l) const requires(Dim == 3) {
    return coeffs_[grid_.index(i, j, l)];
  }

  // Coefficient addressed by signed mode numbers.
  cplx& mode(int kx, int ky) requires(Dim == 2) { return (*this)(wrap(kx, grid_.nx), wrap(ky, grid_.ny)); }
  const cplx& mode(int kx, int ky) const requires(Dim == 2) {
    return (*this)(wrap(kx, grid_.nx), wrap(ky, grid_.ny));
  }
  cplx& mode(int kx, int ky, int m) requires(Dim == 3) {
    return (*this)(wrap(kx, grid_.nx), wrap(ky, grid_.ny), wrap(m, grid_.nz));
  }
  const cplx& mode(int kx, int ky, int m) const requires(Dim == 3) {
    return (*this)(wrap(kx, grid_.nx), wrap(ky, grid_.ny), wrap(m, grid_.nz));
  }

  cplx mean() const { return coeffs_.empty() ? cplx{} : coeffs_[0]; }

  SpectralField& operator+=(const SpectralField& o) {
    check_compatible(o, "operator+=");
    for (std::size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] += o.coeffs_[n];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    check_compatible(o, "operator-=");
    for (std::size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] -= o.coeffs_[n];
    return *this;
  }
  SpectralField& operator*=(double a) {
    for (auto& c : coeffs_) c *= a;
    return *this;
  }
  // this += a * o
  SpectralField& axpy(double a, const SpectralField& o) {
    check_compatible(o, "axpy");
    for (std::size_t n = 0; n < coeffs_.size(); ++n) coeffs_[n] += a * o.coeffs_[n];
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator-(SpectralField a) { return a *= -1.0; }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  static int wrap(int k, int n) { return ((k % n) + n) % n; }

  void check_compatible(const SpectralField& o, const char* where) const {
    require_same_grid(grid_, o.grid_, where);
    if (Dim == 3 && parity_ != o.parity_) {
      throw Error(ErrorCode::ParityMismatch, std::string(where) + ": " + to_string(parity_) +
                                                 " vs " + to_string(o.parity_));
    }
  }

  Grid grid_{};
  Parity parity_ = Parity::Even;
  std::vector<cplx> coeffs_;
};

using SpectralField2 = SpectralField<2>;
using SpectralField3 = SpectralField<3>;

/// Horizontal vector field (two Even components).
struct VectorField {
  SpectralField3 x;
  SpectralField3 y;

  VectorField() = default;
  explicit VectorField(const Grid& g) : x(g, Parity::Even), y(g, Parity::Even) {}
  VectorField(SpectralField3 x_, SpectralField3 y_) : x(std::move(x_)), y(std::move(y_)) {}

  const Grid& grid() const { return x.grid(); }

  VectorField& operator+=(const VectorField& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  VectorField& operator*=(double a) {
    x *= a;
    y *= a;
    return *this;
  }
  VectorField& axpy(double a, const VectorField& o) {
    x.axpy(a, o.x);
    y.axpy(a, o.y);
    return *this;
  }
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(double s, VectorField a) { return a *= s; }
};

}  // namespace lowmach
