#pragma once

#include <span>
#include <vector>

#include "whgrav/contour.hpp"
#include "whgrav/types.hpp"

namespace whgrav {

/// ω = v + (λ/2) ρ (λ − τ²)/τ.
Complex spectral_map(Complex tau, const WeylPoint& point, Lambda lambda);
/// ∂ω/∂τ at fixed (ρ, v).
Complex spectral_map_dtau(Complex tau, const WeylPoint& point, Lambda lambda);
/// ∂ω/∂ρ at fixed (τ, v); ∂ω/∂v is 1.
Complex spectral_map_drho(Complex tau, Lambda lambda);

struct RootPair {
  Complex phi;
  Complex phi_tilde;
};

/// φ = (−λ(ω−v) + √((ω−v)² + λρ²))/ρ with the principal root, φ̃ = −λ/φ.
RootPair spectral_roots(Complex omega, const WeylPoint& point, Lambda lambda);

struct RootDerivatives {
  Complex d_rho;
  Complex d_v;
  Complex d_omega;
};

/// ∂_ρφ = (φ/ρ)(λ−φ²)/(λ+φ²), ∂_vφ = (2λ/ρ)φ²/(λ+φ²),
/// ∂_ωφ = −2λφ²/(ρ(λ+φ²)), which for λ = −1 reads 2φ²/(ρ(φ²−1)).
RootDerivatives root_derivatives(Complex phi, const WeylPoint& point, Lambda lambda);

/// Continues a root of ω along a path of Weyl points, starting from `start`
/// (which must be a root at path[0]) and taking at each step the root
/// nearest to the previous one. Throws when the two roots become
/// indistinguishable.
std::vector<Complex> track_root(Complex omega, std::span<const WeylPoint> path, Lambda lambda,
                                Complex start);

struct RootPlacement {
  Complex inside;
  Complex outside;
};

/// Splits the root pair of ω by the contour; throws an inadmissible-contour
/// error when a root lies on the curve or both fall on one side.
RootPlacement place_roots(Complex omega, const WeylPoint& point, const Contour& contour);

}  // namespace whgrav
