#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "whgrav/factorize.hpp"
#include "whgrav/types.hpp"

namespace whgrav {

/// Produces the solution at any Weyl point; all points share one contour.
using SolutionFamily = std::function<CanonicalSolution(const WeylPoint&)>;

/// Rectangular grid {ρ_i} × {v_j}, uniformly spaced, ρ > 0.
struct Grid {
  double rho_min = 0.5;
  double rho_max = 1.5;
  double v_min = -1.0;
  double v_max = 1.0;
  int n_rho = 5;
  int n_v = 5;

  /// Throws a configuration error for ρ_min ≤ 0, empty ranges or counts < 1.
  void validate() const;
  double rho(int i) const;
  double v(int j) const;
  std::size_t size() const { return static_cast<std::size_t>(n_rho) * static_cast<std::size_t>(n_v); }
  /// Row-major in ρ: index = i·n_v + j.
  WeylPoint point(std::size_t index) const;
  nlohmann::json to_json() const;
  static Grid from_json(const nlohmann::json& doc);
};

inline constexpr double kDefaultStencilStep = 1e-2;
/// Residual pairs below this are treated as rounding noise by the refinement study.
inline constexpr double kRefinementNoiseFloor = 1e-11;

/// Solutions at p and at p ± h, p ± 2h along each axis. Near ρ = 0 the ρ
/// stencil is one-sided (p + h .. p + 4h).
class Neighborhood {
 public:
  Neighborhood(const SolutionFamily& family, const WeylPoint& p, double h);

  const CanonicalSolution& center() const { return center_; }
  double step() const { return h_; }

  using Functional = std::function<std::vector<Complex>(const CanonicalSolution&)>;
  /// Fourth-order ∂_ρ and ∂_v of a per-channel quantity.
  std::vector<Complex> d_rho(const Functional& g) const;
  std::vector<Complex> d_v(const Functional& g) const;

 private:
  CanonicalSolution center_;
  std::vector<CanonicalSolution> rho_;
  std::vector<CanonicalSolution> v_;
  double h_;
  bool forward_;
};

enum class AMode { Analytic, FiniteDifference };

/// A_ρ, A_v per grid point and channel.
struct OneFormA {
  Grid grid;
  std::vector<std::vector<Complex>> a_rho;
  std::vector<std::vector<Complex>> a_v;
};

/// Analytic mode reads ∂ log M from the solutions; finite-difference mode
/// differentiates M with fourth-order stencils of step h.
OneFormA compute_a(const SolutionFamily& family, const Grid& grid, AMode mode,
                   double h = kDefaultStencilStep);

struct CheckReport {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  Grid grid;
  double step = kDefaultStencilStep;
  /// residual(h)/residual(h/2); empty when no refinement study was run.
  std::vector<double> refinement_ratios;
  bool passed = false;
  nlohmann::json detail = nlohmann::json::object();

  nlohmann::json to_json() const;
};

struct CheckOptions {
  double tolerance = 1e-6;
  double step = kDefaultStencilStep;
  bool refine = true;
  AMode mode = AMode::Analytic;
  /// Refinement ratios must fall in this band unless both residuals are noise.
  double ratio_min = 12.0;
  double ratio_max = 20.0;
};

/// max |λ∂_ρ(ρA_ρ) + ρ∂_vA_v|, the component of d(ρ⋆A) with ⋆dρ = −λdv, ⋆dv = dρ.
CheckReport field_equation_check(const SolutionFamily& family, const Grid& grid,
                                 const CheckOptions& options = {});

/// Residuals of φ(X̃_ρ + A_ρX̃) − X̃_v and φ(X̃_v + A_vX̃) + λX̃_ρ where
/// X̃ = X(φ_ω(ρ,v)) and φ_ω is the root of ω inside Γ.
CheckReport lax_check(const SolutionFamily& family, const Grid& grid,
                      const std::vector<Complex>& omegas, const CheckOptions& options = {});

/// Five ω with Im ω ∈ [0.5, 2.5] centred on the v-range of the grid.
std::vector<Complex> default_lax_omegas(const Grid& grid);

/// A_ρ = ∂_v c₁ and A_v = −2λ(∂_ρc₁ − ½∂_vc₂), c_n the Taylor coefficients
/// of log X at 0. Returns the two reports in that order.
std::vector<CheckReport> a_from_x_check(const SolutionFamily& family, const Grid& grid,
                                        const CheckOptions& options = {});

/// ∂_vA_ρ = ∂_ρA_v.
CheckReport mixed_partial_check(const SolutionFamily& family, const Grid& grid,
                                const CheckOptions& options = {});

/// ∂_v(∂_ρψ) = ∂_ρ(∂_vψ) with ∂_ρψ = ¼ρΣ(A_ρ² − λA_v²), ∂_vψ = ½ρΣA_ρA_v.
CheckReport psi_integrability_check(const SolutionFamily& family, const Grid& grid,
                                    const CheckOptions& options = {});

struct NormalizationReport {
  double x0_deviation = 0.0;
  double factorization_residual = 0.0;
  double symmetry_residual = 0.0;
  double determinant_deviation = 0.0;
  double tolerance = 1e-8;

  bool passed() const;
  nlohmann::json to_json() const;
};

NormalizationReport normalization_and_symmetry_report(const CanonicalSolution& sol,
                                                      double tolerance = 1e-8);

/// Field equation, Lax pair, A–X relations, mixed partials, ψ integrability.
std::vector<CheckReport> verify_suite(const SolutionFamily& family, const Grid& grid,
                                      const CheckOptions& options = {});

}  // namespace whgrav
