#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "whgrav/contour.hpp"
#include "whgrav/types.hpp"

namespace whgrav {

using ScalarFn = std::function<Complex(Complex)>;

/// Values f(τ_k) at the nodes of a contour, optionally with a closed form
/// for evaluation off the node set.
struct BoundarySamples {
  ContourPtr contour;
  std::vector<Complex> values;
  ScalarFn closed_form;

  BoundarySamples(ContourPtr contour, std::vector<Complex> values, ScalarFn closed_form = {});
  static BoundarySamples sample(ContourPtr contour, ScalarFn f);
};

enum class ProjectionMethod { Auto, Fourier, Quadrature };

/// Boundary values of P⁺f and P⁻f at the nodes, plus evaluation of both
/// projections away from the curve. Constants go to the plus side.
///
/// Off-node evaluation uses the barycentric Cauchy form
///   P⁺f(τ) = Σ w_k f⁺_k/(τ_k−τ) / Σ w_k/(τ_k−τ)          (τ inside),
///   P⁻f(τ) = Σ w_k f⁻_k/(τ_k−τ) / Σ w_k τ/(τ_k(τ_k−τ))   (τ outside),
/// which stays accurate up to the curve.
class ProjectionSplit {
 public:
  explicit ProjectionSplit(const BoundarySamples& samples,
                           ProjectionMethod method = ProjectionMethod::Auto);

  const ContourPtr& contour() const { return contour_; }
  ProjectionMethod method() const { return method_; }
  const std::vector<Complex>& plus_boundary() const { return plus_; }
  const std::vector<Complex>& minus_boundary() const { return minus_; }

  /// P⁺f at τ inside Γ or on Γ.
  Complex plus(Complex tau) const;
  Complex plus_derivative(Complex tau) const;
  /// P⁻f at τ outside Γ or on Γ.
  Complex minus(Complex tau) const;
  Complex minus_derivative(Complex tau) const;
  Complex plus_at_zero() const { return plus_zero_; }
  /// Taylor coefficients of P⁺f at 0, orders 0..order.
  std::vector<Complex> plus_taylor(int order) const;

 private:
  ContourPtr contour_;
  ProjectionMethod method_;
  std::vector<Complex> plus_;
  std::vector<Complex> minus_;
  Complex plus_zero_;
};

/// Boundary values of P⁺f at the nodes by the singularity-subtracted
/// Plemelj formula; works on any contour.
std::vector<Complex> plus_boundary_quadrature(const BoundarySamples& samples);
/// Same, by splitting discrete Fourier modes; unit circle only.
std::vector<Complex> plus_boundary_fourier(const BoundarySamples& samples);

/// Laurent coefficients c_n, n = −N/2+1..N/2, of samples on the unit circle,
/// returned indexed by n + N/2 − 1.
std::vector<Complex> laurent_coefficients(const BoundarySamples& samples);

/// d f/dτ at the nodes by spectral differentiation in the curve parameter.
std::vector<Complex> node_derivative(const Contour& contour, const std::vector<Complex>& values);

Complex cauchy_plus(const BoundarySamples& samples, Complex tau);
Complex cauchy_minus(const BoundarySamples& samples, Complex tau);

struct WindingResult {
  int index = 0;
  double rounding_gap = 0.0;
  int node_count = 0;
};

/// Index of f about the origin. Adjacent phase increments must stay below
/// π/2; with a closed form the node count is doubled up to 4096 until they
/// do, otherwise a resolution error is raised.
WindingResult winding_report(const BoundarySamples& samples);
int winding_index(const BoundarySamples& samples);

/// log f with continuously unwrapped phase, anchored to the principal value
/// at node 0. The returned samples may live on a refined copy of the contour.
BoundarySamples continuous_log(const BoundarySamples& samples);

/// f = f₋ f₊ with f₊(0) = 1 and f₋(∞) = normalization.
class ScalarFactorization {
 public:
  /// Factorizes from samples of a continuous log f.
  ScalarFactorization(const BoundarySamples& log_samples,
                      ProjectionMethod method = ProjectionMethod::Auto);

  Complex normalization() const { return std::exp(log_normalization_); }
  Complex log_normalization() const { return log_normalization_; }
  /// log f₊ at τ inside Γ, on Γ, or outside near Γ when a closed form exists.
  Complex log_plus(Complex tau) const;
  Complex log_minus(Complex tau) const;
  Complex plus(Complex tau) const { return std::exp(log_plus(tau)); }
  Complex minus(Complex tau) const { return std::exp(log_minus(tau)); }
  const ProjectionSplit& split() const { return split_; }
  const BoundarySamples& log_samples() const { return log_samples_; }

 private:
  BoundarySamples log_samples_;
  ProjectionSplit split_;
  Complex log_normalization_;
};

ScalarFactorization scalar_canonical_factorization(const BoundarySamples& samples);

/// max_k |f₋(τ_k) f₊(τ_k) − f(τ_k)| / max_k |f(τ_k)|.
double factorization_residual(const ScalarFactorization& fac, const BoundarySamples& samples);

/// J₀(ρ) = (1/2πi) ∮ exp(ρ(z − 1/z)/2) dz/z.
double bessel_contour_j0(double rho, const Contour& contour);

}  // namespace whgrav
