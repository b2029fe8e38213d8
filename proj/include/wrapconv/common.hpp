#pragma once

// Shared numeric primitives: complex alias, domain guards, Neville
// extrapolation, quadrature helpers and the error type used throughout.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wrapconv {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kImag{0.0, 1.0};

/// Raised when an iteration fails to converge, leaves its domain, or an
/// input violates a precondition that can only be detected numerically.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool in_upper_half(cplx z) { return z.imag() > 0.0; }
inline bool in_unit_disk(cplx z) { return std::abs(z) < 1.0; }

/// Representative of x mod 2*pi in [0, 2*pi).
inline double wrap_angle(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Neville polynomial extrapolation of samples (h_i, v_i) to h = 0.
/// The h_i must be distinct; typically a decreasing ladder.
template <typename T>
T extrapolate_to_zero(std::span<const double> h, std::vector<T> v) {
  const std::size_t n = h.size();
  if (n == 0 || v.size() != n) throw std::invalid_argument("extrapolate_to_zero: size mismatch");
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      const double hi = h[i], hj = h[i + level];
      v[i] = (v[i + 1] * hi - v[i] * hj) / (hi - hj);
    }
  }
  return v[0];
}

/// Trapezoid rule on an increasing abscissa grid.
inline double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    s += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
  return s;
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = a;
    return g;
  }
  const double step = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = a + step * static_cast<double>(i);
  g.back() = b;
  return g;
}

inline bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace wrapconv
