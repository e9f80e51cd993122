#include "whgrav/spectral.hpp"

#include <cmath>

#include "whgrav/error.hpp"

namespace whgrav {

Complex spectral_map(Complex tau, const WeylPoint& point, Lambda lambda) {
  if (tau == Complex(0.0)) throw Error(ErrorKind::Domain, "spectral map undefined at tau = 0");
  const double l = lambda.real();
  return point.v() + 0.5 * l * point.rho() * (l - tau * tau) / tau;
}

Complex spectral_map_dtau(Complex tau, const WeylPoint& point, Lambda lambda) {
  const double l = lambda.real();
  return -0.5 * l * point.rho() * (l + tau * tau) / (tau * tau);
}

Complex spectral_map_drho(Complex tau, Lambda lambda) {
  const double l = lambda.real();
  return 0.5 * l * (l - tau * tau) / tau;
}

RootPair spectral_roots(Complex omega, const WeylPoint& point, Lambda lambda) {
  const double l = lambda.real();
  const double rho = point.rho();
  const Complex d = omega - point.v();
  Complex disc = d * d + l * rho * rho;
  // A discriminant on the cut takes the root from above it.
  disc = Complex(disc.real(), disc.imag() + 0.0);
  if (std::abs(disc) <= 1e-12 * (std::norm(d) + rho * rho)) {
    throw Error(ErrorKind::BranchPoint, "omega is at a branch point of the spectral curve",
                {{"omega", complex_to_json(omega)}, {"rho", rho}, {"v", point.v()}});
  }
  const Complex phi = (-l * d + std::sqrt(disc)) / rho;
  return {phi, -l / phi};
}

RootDerivatives root_derivatives(Complex phi, const WeylPoint& point, Lambda lambda) {
  const double l = lambda.real();
  const double rho = point.rho();
  const Complex p2 = phi * phi;
  const Complex s = l + p2;
  if (std::abs(s) <= 1e-12 * (1.0 + std::norm(phi))) {
    throw Error(ErrorKind::SingularDerivative, "root at a fixed point of the involution",
                {{"phi", complex_to_json(phi)}});
  }
  RootDerivatives r;
  r.d_rho = phi / rho * (l - p2) / s;
  r.d_v = 2.0 * l / rho * p2 / s;
  r.d_omega = (l < 0) ? 2.0 * p2 / (rho * (p2 - 1.0)) : -2.0 * l * p2 / (rho * s);
  return r;
}

std::vector<Complex> track_root(Complex omega, std::span<const WeylPoint> path, Lambda lambda,
                                Complex start) {
  std::vector<Complex> out;
  out.reserve(path.size());
  Complex prev = start;
  for (const auto& p : path) {
    const auto pair = spectral_roots(omega, p, lambda);
    const double d1 = std::abs(pair.phi - prev);
    const double d2 = std::abs(pair.phi_tilde - prev);
    const double sep = std::abs(pair.phi - pair.phi_tilde);
    if (std::min(d1, d2) > 0.25 * sep) {
      throw Error(ErrorKind::BranchPoint, "root continuation is ambiguous along the path",
                  {{"rho", p.rho()}, {"v", p.v()}});
    }
    prev = d1 <= d2 ? pair.phi : pair.phi_tilde;
    out.push_back(prev);
  }
  return out;
}

RootPlacement place_roots(Complex omega, const WeylPoint& point, const Contour& contour) {
  const auto pair = spectral_roots(omega, point, contour.lambda());
  const auto a = contour.locate(pair.phi);
  const auto b = contour.locate(pair.phi_tilde);
  if (a == PointLocation::OnContour || b == PointLocation::OnContour) {
    throw Error(ErrorKind::InadmissibleContour, "a spectral root lies on the contour",
                {{"omega", complex_to_json(omega)},
                 {"phi", complex_to_json(pair.phi)},
                 {"phi_tilde", complex_to_json(pair.phi_tilde)},
                 {"rho", point.rho()},
                 {"v", point.v()}});
  }
  if (a == b) {
    throw Error(ErrorKind::InadmissibleContour, "both spectral roots lie on the same side of the contour",
                {{"omega", complex_to_json(omega)}, {"side", std::string(to_string(a))}});
  }
  return a == PointLocation::Inside ? RootPlacement{pair.phi, pair.phi_tilde}
                                    : RootPlacement{pair.phi_tilde, pair.phi};
}

}  // namespace whgrav
