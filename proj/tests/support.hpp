#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "whgrav/factorize.hpp"
#include "whgrav/types.hpp"
#include "whgrav/verify.hpp"

namespace whgrav::test {

// Power series oracles, long double accumulation.
inline double series_j0(double x) {
  long double term = 1.0L, sum = 1.0L;
  const long double q = -0.25L * x * x;
  for (int m = 1; m < 200; ++m) {
    term *= q / (static_cast<long double>(m) * m);
    sum += term;
    if (std::fabs(static_cast<double>(term)) < 1e-30) break;
  }
  return static_cast<double>(sum);
}

inline double series_j1(double x) {
  long double term = 0.5L * x, sum = term;
  const long double q = -0.25L * x * x;
  for (int m = 1; m < 200; ++m) {
    term *= q / (static_cast<long double>(m) * (m + 1));
    sum += term;
    if (std::fabs(static_cast<double>(term)) < 1e-30) break;
  }
  return static_cast<double>(sum);
}

// Fourth-order central difference.
template <class F>
auto central_diff(F f, double x, double h) {
  return (f(x - 2 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2 * h)) / (12.0 * h);
}

inline double rel_err(Complex got, Complex want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

inline SolutionFamily family_of(DiagonalMonodromy mono, ContourPtr contour, Backend backend = Backend::Auto,
                                std::optional<DeformationSpec> def = std::nullopt) {
  return [mono = std::move(mono), contour, backend, def](const WeylPoint& p) {
    auto s = canonical_solve(mono, p, contour, {backend});
    return def ? deform(s, *def) : s;
  };
}

inline std::mt19937_64 rng() { return std::mt19937_64(0x5eed); }

}  // namespace whgrav::test
