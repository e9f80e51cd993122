#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "whgrav/factorize.hpp"
#include "whgrav/verify.hpp"

namespace whgrav {

/// Components of Ĵ = j_ρ dρ + j_v dv per grid point and channel.
struct CurrentField {
  Grid grid;
  Complex omega;
  std::vector<std::vector<Complex>> j_rho;
  std::vector<std::vector<Complex>> j_v;
};

/// K_j = X_j⁻¹∂_ωX_j = ∂_τ log X_j(φ_ω)·∂_ωφ_ω, φ_ω the root of ω inside Γ.
std::vector<Complex> current_potential(const CanonicalSolution& sol, Complex omega);

/// Ĵ = ⋆dK with ⋆dρ = −λdv, ⋆dv = dρ, so j_ρ = ∂_vK and j_v = −λ∂_ρK.
/// Derivatives use fourth-order stencils of step h around each grid point.
CurrentField kac_moody_current(const SolutionFamily& family, const Grid& grid, Complex omega,
                               double h = kDefaultStencilStep);

/// |−λ∂_ρj_ρ − ∂_vj_v| per grid point (max over channels), the component of
/// d⋆Ĵ; fourth-order differences on the grid, one-sided at its edges.
std::vector<double> current_conservation_residual(const CurrentField& j, Lambda lambda);

/// Closed-form Ĵ of the deformed Kasner solution with exponent 2n for the
/// first channel (the second is its negative), λ = −1:
/// −4n φ²/(ρ²(φ²−1)³)·[(−φ²−1)dρ − 2φ dv].
std::pair<Complex, Complex> kasner_current(int n, Complex phi, double rho);

/// The alternative current ⋆dX at τ = φ_ω, exposed for diagnostics.
CurrentField star_dx(const SolutionFamily& family, const Grid& grid, Complex omega,
                     double h = kDefaultStencilStep);

/// Columns rho,v,channel,Re j_rho,Im j_rho,Re j_v,Im j_v.
void write_current_csv(std::ostream& out, const CurrentField& j);

}  // namespace whgrav
