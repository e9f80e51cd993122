#pragma once

#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace whgrav {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// The sign λ = ±1 selecting the signature of the two-dimensional base.
class Lambda {
 public:
  static Lambda from_int(int value);
  static constexpr Lambda plus() { return Lambda(1); }
  static constexpr Lambda minus() { return Lambda(-1); }

  constexpr int value() const { return value_; }
  constexpr double real() const { return static_cast<double>(value_); }
  /// p_F = sqrt(-λ): 1 for λ = -1, i for λ = +1.
  Complex fixed_point() const;
  /// arg p_F.
  double fixed_angle() const;

  friend constexpr bool operator==(Lambda, Lambda) = default;

 private:
  constexpr explicit Lambda(int value) : value_(value) {}
  int value_;
};

/// Weyl coordinates (ρ, v) with ρ > 0.
class WeylPoint {
 public:
  WeylPoint(double rho, double v);
  double rho() const { return rho_; }
  double v() const { return v_; }
  friend bool operator==(const WeylPoint&, const WeylPoint&) = default;

 private:
  double rho_;
  double v_;
};

nlohmann::json complex_to_json(Complex z);
/// Accepts a number or a two-element array [re, im].
Complex complex_from_json(const nlohmann::json& j);

double max_abs(std::span<const Complex> values);

}  // namespace whgrav
