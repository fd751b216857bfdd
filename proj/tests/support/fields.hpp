#pragma once

#include <algorithm>
#include <cmath>

#include "lowmach/spectral.hpp"

namespace testing_fields {

using namespace lowmach;

/// Even velocity sampled from two callables of (x, y, z).
template <class Fx, class Fy>
VectorField velocity(const Grid& g, Fx fx, Fy fy) {
  return {to_spectral3(g, sample3(g, fx), Parity::Even), to_spectral3(g, sample3(g, fy), Parity::Even)};
}

inline double max_diff(const Samples& a, const Samples& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

inline double max_abs(const Samples& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

inline double max_diff(const VectorField& a, const VectorField& b) {
  return std::max(max_diff(to_physical(a.x), to_physical(b.x)), max_diff(to_physical(a.y), to_physical(b.y)));
}

inline double max_abs(const VectorField& a) { return std::max(max_abs(to_physical(a.x)), max_abs(to_physical(a.y))); }

inline auto zero = [](double, double, double) { return 0.0; };

}  // namespace testing_fields
