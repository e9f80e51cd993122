#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "whgrav/types.hpp"

namespace whgrav {

inline constexpr int kDefaultNodeCount = 256;
inline constexpr double kGeometricTolerance = 1e-9;

/// A localized deformation of the curve in log coordinates. The real part of
/// `amplitude` moves the curve radially (in log|τ|), the imaginary part moves
/// it angularly, so curves that fold back over a ray are expressible.
struct Bump {
  double center = 0.0;
  double width = 0.3;
  Complex amplitude{};
};

enum class PointLocation { Inside, Outside, OnContour };

std::string_view to_string(PointLocation location);

struct AdmissibilityReport {
  bool admissible = false;
  bool simple = false;
  int winding_about_origin = 0;
  double symmetry_defect = 0.0;
  double fixed_point_defect = 0.0;
  std::vector<std::string> failures;

  nlohmann::json to_json() const;
};

class Contour;
using ContourPtr = std::shared_ptr<const Contour>;

/// Closed curve τ(t), t ∈ [0, 2π), with trapezoid nodes t_k = 2πk/N and
/// weights w_k = τ'(t_k)·2π/N, so Σ f(τ_k) w_k ≈ ∮ f dτ.
///
/// Curves built by `unit_circle` and `deformed` are written as
/// τ(t) = exp(iθ_F + η(t)) with η(−t) = −η(t), which makes i_λ(τ(t)) = τ(−t)
/// hold identically. Immutable once built.
class Contour {
 public:
  using CurveFn = std::function<Complex(double)>;

  struct Curve {
    CurveFn position;
    CurveFn velocity;
  };

  static ContourPtr unit_circle(Lambda lambda, int node_count = kDefaultNodeCount);
  static ContourPtr deformed(std::vector<Bump> bumps, Lambda lambda,
                             int node_count = kDefaultNodeCount);
  /// A raw curve, not symmetrized; used for diagnostics and negative controls.
  static ContourPtr from_curve(Curve curve, Lambda lambda, int node_count,
                               nlohmann::json descriptor = nlohmann::json::object());
  static ContourPtr from_json(const nlohmann::json& doc);

  Lambda lambda() const { return lambda_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  std::span<const Complex> nodes() const { return nodes_; }
  std::span<const Complex> weights() const { return weights_; }
  double parameter(int k) const;
  Complex position(double t) const { return curve_.position(t); }
  Complex velocity(double t) const { return curve_.velocity(t); }

  bool is_unit_circle() const { return kind_ == Kind::Circle; }
  const std::vector<Bump>& bumps() const { return bumps_; }
  const nlohmann::json& descriptor() const { return descriptor_; }
  double scale() const { return scale_; }
  double max_node_spacing() const { return max_spacing_; }

  /// Same curve with a different node count (a new, distinct contour).
  ContourPtr with_node_count(int node_count) const;

  struct Nearest {
    double t;
    double distance;
  };
  Nearest nearest(Complex p) const;
  double distance(Complex p) const { return nearest(p).distance; }

  /// Winding-number classification; OnContour when the distance to the curve
  /// is below rel_tol·max|τ_k|.
  PointLocation locate(Complex p, double rel_tol = kGeometricTolerance) const;
  AdmissibilityReport admissibility(double rel_tol = kGeometricTolerance) const;

  /// Trapezoid approximation of ∮ f dτ from node values.
  Complex integrate(std::span<const Complex> values) const;
  Complex integrate(const std::function<Complex(Complex)>& f) const;

 private:
  enum class Kind { Circle, Deformed, Raw };

  Contour(Curve curve, Lambda lambda, int node_count, Kind kind, std::vector<Bump> bumps,
          nlohmann::json descriptor);

  int polyline_winding(Complex p) const;
  bool polyline_simple() const;

  Curve curve_;
  Lambda lambda_;
  Kind kind_;
  std::vector<Bump> bumps_;
  nlohmann::json descriptor_;
  std::vector<Complex> nodes_;
  std::vector<Complex> weights_;
  std::vector<Complex> polyline_;
  double scale_ = 1.0;
  double max_spacing_ = 0.0;
  double max_segment_ = 0.0;
  double orientation_ = 1.0;
};

ContourPtr unit_circle(Lambda lambda, int node_count = kDefaultNodeCount);
ContourPtr deformed_contour(std::vector<Bump> bumps, Lambda lambda,
                            int node_count = kDefaultNodeCount);

/// i_λ(τ) = −λ/τ.
Complex involution(Complex tau, Lambda lambda);

PointLocation locate(const Contour& contour, Complex point);
AdmissibilityReport is_admissible(const Contour& contour);

/// Searches bump configurations for an admissible contour that has every
/// point of `inside` in its interior and every point of `outside` in its
/// exterior. Partners under i_λ are placed on the opposite side
/// automatically. Throws a geometry error when no configuration works.
ContourPtr enclosing_contour(std::span<const Complex> inside, std::span<const Complex> outside,
                             Lambda lambda, int node_count = 1024);

}  // namespace whgrav
