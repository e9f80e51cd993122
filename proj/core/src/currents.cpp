#include "whgrav/currents.hpp"

#include <cmath>
#include <ostream>

#include "whgrav/error.hpp"
#include "whgrav/parallel.hpp"
#include "whgrav/spectral.hpp"

namespace whgrav {

namespace {

// The root of ω at sol.point continuing `reference`.
Complex continued_root(const CanonicalSolution& sol, Complex omega, Complex reference) {
  const auto roots = spectral_roots(omega, sol.point, sol.lambda);
  const double d1 = std::abs(roots.phi - reference);
  const double d2 = std::abs(roots.phi_tilde - reference);
  if (std::abs(d1 - d2) < 1e-3 * std::abs(roots.phi - roots.phi_tilde)) {
    throw Error(ErrorKind::BranchPoint, "root branch is ambiguous on the stencil",
                {{"omega", complex_to_json(omega)}});
  }
  return d1 < d2 ? roots.phi : roots.phi_tilde;
}

std::vector<Complex> potential_at(const CanonicalSolution& sol, Complex phi) {
  const Complex d_omega = root_derivatives(phi, sol.point, sol.lambda).d_omega;
  std::vector<Complex> k;
  for (const auto& ch : sol.channels) k.push_back(ch.x->log_derivative(phi) * d_omega);
  return k;
}

// Fourth-order derivative of samples f along one grid axis at index i.
Complex grid_derivative(const std::function<Complex(int)>& f, int i, int n, double h) {
  if (i >= 2 && i <= n - 3) return (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / (12.0 * h);
  if (i == 0) return (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)) / (12.0 * h);
  if (i == 1) return (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)) / (12.0 * h);
  if (i == n - 1) {
    return (25.0 * f(n - 1) - 48.0 * f(n - 2) + 36.0 * f(n - 3) - 16.0 * f(n - 4) + 3.0 * f(n - 5)) / (12.0 * h);
  }
  return (3.0 * f(n - 1) + 10.0 * f(n - 2) - 18.0 * f(n - 3) + 6.0 * f(n - 4) - f(n - 5)) / (12.0 * h);
}

}  // namespace

std::vector<Complex> current_potential(const CanonicalSolution& sol, Complex omega) {
  return potential_at(sol, place_roots(omega, sol.point, *sol.contour).inside);
}

CurrentField kac_moody_current(const SolutionFamily& family, const Grid& grid, Complex omega, double h) {
  grid.validate();
  CurrentField out{grid, omega, std::vector<std::vector<Complex>>(grid.size()),
                   std::vector<std::vector<Complex>>(grid.size())};
  parallel_for(grid.size(), [&](std::size_t i) {
    const Neighborhood n(family, grid.point(i), h);
    const auto& c = n.center();
    const Complex phi = place_roots(omega, c.point, *c.contour).inside;
    auto k = [&](const CanonicalSolution& s) { return potential_at(s, continued_root(s, omega, phi)); };
    const auto k_rho = n.d_rho(k);
    out.j_rho[i] = n.d_v(k);
    out.j_v[i] = k_rho;
    for (auto& x : out.j_v[i]) x *= -c.lambda.real();
  });
  return out;
}

std::vector<double> current_conservation_residual(const CurrentField& j, Lambda lambda) {
  const Grid& g = j.grid;
  if (g.n_rho < 5 || g.n_v < 5) {
    throw Error(ErrorKind::Config, "grid too small for the conservation stencil", g.to_json());
  }
  const double hr = (g.rho_max - g.rho_min) / (g.n_rho - 1);
  const double hv = (g.v_max - g.v_min) / (g.n_v - 1);
  std::vector<double> out(g.size(), 0.0);
  const std::size_t channels = j.j_rho.empty() ? 0 : j.j_rho[0].size();
  for (int i = 0; i < g.n_rho; ++i) {
    for (int k = 0; k < g.n_v; ++k) {
      const std::size_t idx = static_cast<std::size_t>(i) * g.n_v + k;
      for (std::size_t c = 0; c < channels; ++c) {
        const Complex dr = grid_derivative(
            [&](int ii) { return j.j_rho[static_cast<std::size_t>(ii) * g.n_v + k][c]; }, i, g.n_rho, hr);
        const Complex dv = grid_derivative(
            [&](int kk) { return j.j_v[static_cast<std::size_t>(i) * g.n_v + kk][c]; }, k, g.n_v, hv);
        out[idx] = std::max(out[idx], std::abs(-lambda.real() * dr - dv));
      }
    }
  }
  return out;
}

std::pair<Complex, Complex> kasner_current(int n, Complex phi, double rho) {
  const Complex p2 = phi * phi;
  const Complex c = -4.0 * static_cast<double>(n) * p2 / (rho * rho * std::pow(p2 - 1.0, 3));
  return {c * (-p2 - 1.0), c * (-2.0 * phi)};
}

CurrentField star_dx(const SolutionFamily& family, const Grid& grid, Complex omega, double h) {
  grid.validate();
  CurrentField out{grid, omega, std::vector<std::vector<Complex>>(grid.size()),
                   std::vector<std::vector<Complex>>(grid.size())};
  parallel_for(grid.size(), [&](std::size_t i) {
    const Neighborhood n(family, grid.point(i), h);
    const auto& c = n.center();
    const Complex phi = place_roots(omega, c.point, *c.contour).inside;
    auto x = [&](const CanonicalSolution& s) {
      const Complex t = continued_root(s, omega, phi);
      std::vector<Complex> v;
      for (std::size_t j = 0; j < s.size(); ++j) v.push_back(s.x(j, t));
      return v;
    };
    out.j_rho[i] = n.d_v(x);
    out.j_v[i] = n.d_rho(x);
    for (auto& v : out.j_v[i]) v *= -c.lambda.real();
  });
  return out;
}

void write_current_csv(std::ostream& out, const CurrentField& j) {
  const auto old = out.precision(17);
  out << "rho,v,channel,re_j_rho,im_j_rho,re_j_v,im_j_v\n";
  for (std::size_t i = 0; i < j.grid.size(); ++i) {
    const auto p = j.grid.point(i);
    for (std::size_t c = 0; c < j.j_rho[i].size(); ++c) {
      out << p.rho() << ',' << p.v() << ',' << c << ',' << j.j_rho[i][c].real() << ','
          << j.j_rho[i][c].imag() << ',' << j.j_v[i][c].real() << ',' << j.j_v[i][c].imag() << '\n';
    }
  }
  out.precision(old);
}

}  // namespace whgrav
