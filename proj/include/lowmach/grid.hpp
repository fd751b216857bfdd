#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstddef>
#include <numbers>
#include <string>

#include "lowmach/error.hpp"

namespace lowmach {

inline constexpr double kPi = std::numbers::pi;

/// Periodic slab [0,2pi)^2 x [0,2). Spectral and physical arrays are laid out
/// x-major: index = (i * ny + j) * nz + l.
struct Grid {
  int nx = 32;
  int ny = 32;
  int nz = 16;

  static constexpr double Lx = 2.0 * kPi;
  static constexpr double Ly = 2.0 * kPi;
  static constexpr double Lz = 2.0;

  Grid() = default;
  Grid(int nx_, int ny_, int nz_) : nx(nx_), ny(ny_), nz(nz_) { check(); }

  void check() const {
    auto ok = [](int n) { return n >= 4 && n % 2 == 0; };
    if (!ok(nx) || !ok(ny) || !ok(nz)) {
      throw Error(ErrorCode::DimensionMismatch,
                  "grid sizes must be even and >= 4, got " + std::to_string(nx) + "x" +
                      std::to_string(ny) + "x" + std::to_string(nz));
    }
  }

  std::size_t size3() const { return std::size_t(nx) * ny * nz; }
  std::size_t size2() const { return std::size_t(nx) * ny; }
  std::size_t index(int i, int j, int l) const { return (std::size_t(i) * ny + j) * nz + l; }
  std::size_t index(int i, int j) const { return std::size_t(i) * ny + j; }

  double dx() const { return Lx / nx; }
  double dy() const { return Ly / ny; }
  double dz() const { return Lz / nz; }
  double dx_h() const { return std::min(dx(), dy()); }
  double dx_min() const { return std::min(dx_h(), dz()); }

  double x(int i) const { return i * dx(); }
  double y(int j) const { return j * dy(); }
  double z(int l) const { return l * dz(); }

  double volume() const { return Lx * Ly * Lz; }

  // Signed integer mode number for FFT slot `idx` of an n-point transform.
  static int mode(int idx, int n) { return idx <= n / 2 ? idx : idx - n; }
  // FFT slot holding mode -m.
  static int mirror(int idx, int n) { return idx == 0 ? 0 : n - idx; }

  int mx(int i) const { return mode(i, nx); }
  int my(int j) const { return mode(j, ny); }
  int mz(int l) const { return mode(l, nz); }

  double kx(int i) const { return mx(i); }
  double ky(int j) const { return my(j); }
  double kz(int l) const { return kPi * mz(l); }

  // 2/3 rule.
  bool retained(int i, int j) const {
    return 3 * std::abs(mx(i)) <= nx && 3 * std::abs(my(j)) <= ny;
  }
  bool retained(int i, int j, int l) const {
    return retained(i, j) && 3 * std::abs(mz(l)) <= nz;
  }

  bool is_nyquist_x(int i) const { return i == nx / 2; }
  bool is_nyquist_y(int j) const { return j == ny / 2; }
  bool is_nyquist_z(int l) const { return l == nz / 2; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw Error(ErrorCode::DimensionMismatch, std::string(where) + ": grids differ");
}

}  // namespace lowmach
