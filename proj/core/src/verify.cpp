#include "whgrav/verify.hpp"

#include <cmath>
#include <limits>

#include "whgrav/error.hpp"
#include "whgrav/parallel.hpp"
#include "whgrav/spectral.hpp"

namespace whgrav {

namespace {

using Values = std::vector<Complex>;

Values combine(const std::vector<const CanonicalSolution*>& sols, const double* coeffs,
               const Neighborhood::Functional& g, double scale, const Values* center, double c0) {
  Values out;
  if (center) {
    out = *center;
    for (auto& x : out) x *= c0;
  }
  for (std::size_t s = 0; s < sols.size(); ++s) {
    const Values v = g(*sols[s]);
    if (out.empty()) out.assign(v.size(), 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) out[j] += coeffs[s] * v[j];
  }
  for (auto& x : out) x /= scale;
  return out;
}

// Every residual at one point, e.g. {field} or {A_rho, A_v} for the A–X pair.
using PointResidual = std::function<std::vector<double>(const Neighborhood&)>;

std::vector<double> sweep(const SolutionFamily& family, const Grid& grid, double h,
                          std::size_t count, const PointResidual& residual) {
  std::vector<std::vector<double>> per_point(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const Neighborhood n(family, grid.point(i), h);
    per_point[i] = residual(n);
  });
  std::vector<double> worst(count, 0.0);
  for (const auto& r : per_point) {
    for (std::size_t c = 0; c < count; ++c) {
      worst[c] = std::max(worst[c], std::isnan(r[c]) ? std::numeric_limits<double>::infinity() : r[c]);
    }
  }
  return worst;
}

std::vector<CheckReport> run_checks(const std::vector<std::string>& names,
                                    const SolutionFamily& family, const Grid& grid,
                                    const CheckOptions& options, const PointResidual& residual) {
  grid.validate();
  const auto coarse = sweep(family, grid, options.step, names.size(), residual);
  std::vector<double> fine;
  if (options.refine) fine = sweep(family, grid, options.step / 2.0, names.size(), residual);
  std::vector<CheckReport> out;
  for (std::size_t c = 0; c < names.size(); ++c) {
    CheckReport r;
    r.name = names[c];
    r.max_residual = coarse[c];
    r.tolerance = options.tolerance;
    r.grid = grid;
    r.step = options.step;
    r.passed = coarse[c] < options.tolerance;
    if (options.refine) {
      const double ratio = fine[c] > 0.0 ? coarse[c] / fine[c] : std::numeric_limits<double>::infinity();
      r.refinement_ratios.push_back(ratio);
      const bool noise = fine[c] <= kRefinementNoiseFloor;
      r.detail["fine_residual"] = fine[c];
      r.detail["noise_limited"] = noise;
      if (!noise && (ratio < options.ratio_min || ratio > options.ratio_max)) r.passed = false;
    }
    out.push_back(std::move(r));
  }
  return out;
}

struct AValues {
  Values rho;
  Values v;
};

AValues a_values(const SolutionFamily& family, const CanonicalSolution& sol, AMode mode, double h) {
  AValues a;
  if (mode == AMode::Analytic) {
    for (const auto& ch : sol.channels) {
      a.rho.push_back(ch.a_rho);
      a.v.push_back(ch.a_v);
    }
    return a;
  }
  const Neighborhood n(family, sol.point, h);
  auto m = [](const CanonicalSolution& s) {
    Values out;
    for (std::size_t j = 0; j < s.size(); ++j) out.push_back(s.m(j));
    return out;
  };
  a.rho = n.d_rho(m);
  a.v = n.d_v(m);
  const Values center = m(sol);
  for (std::size_t j = 0; j < center.size(); ++j) {
    a.rho[j] /= center[j];
    a.v[j] /= center[j];
  }
  return a;
}

double max_abs_diff(const Values& a, const Values& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
  return worst;
}

}  // namespace

void Grid::validate() const {
  if (!(rho_min > 0.0)) throw Error(ErrorKind::Config, "grid rho_min must be positive", to_json());
  if (!(rho_max >= rho_min) || !(v_max >= v_min)) {
    throw Error(ErrorKind::Config, "grid ranges must be non-empty", to_json());
  }
  if (n_rho < 1 || n_v < 1) throw Error(ErrorKind::Config, "grid counts must be positive", to_json());
}

double Grid::rho(int i) const {
  return n_rho == 1 ? rho_min : rho_min + (rho_max - rho_min) * i / (n_rho - 1);
}

double Grid::v(int j) const { return n_v == 1 ? v_min : v_min + (v_max - v_min) * j / (n_v - 1); }

WeylPoint Grid::point(std::size_t index) const {
  const int i = static_cast<int>(index / static_cast<std::size_t>(n_v));
  const int j = static_cast<int>(index % static_cast<std::size_t>(n_v));
  return WeylPoint(rho(i), v(j));
}

nlohmann::json Grid::to_json() const {
  return {{"rho", {rho_min, rho_max, n_rho}}, {"v", {v_min, v_max, n_v}}};
}

Grid Grid::from_json(const nlohmann::json& doc) {
  auto axis = [&](const char* key, double& lo, double& hi, int& n) {
    if (!doc.contains(key) || !doc[key].is_array() || doc[key].size() != 3) {
      throw Error(ErrorKind::Parse, std::string("grid.") + key + ": expected [min, max, count]");
    }
    const auto& a = doc[key];
    if (!a[0].is_number() || !a[1].is_number() || !a[2].is_number_integer()) {
      throw Error(ErrorKind::Parse, std::string("grid.") + key + ": expected [min, max, count]");
    }
    lo = a[0].get<double>();
    hi = a[1].get<double>();
    n = a[2].get<int>();
  };
  Grid g;
  axis("rho", g.rho_min, g.rho_max, g.n_rho);
  axis("v", g.v_min, g.v_max, g.n_v);
  g.validate();
  return g;
}

Neighborhood::Neighborhood(const SolutionFamily& family, const WeylPoint& p, double h)
    : center_(family(p)), h_(h), forward_(p.rho() - 2.0 * h <= 0.25 * p.rho()) {
  if (!(h > 0.0)) throw Error(ErrorKind::Config, "stencil step must be positive");
  static constexpr int kCentral[4] = {-2, -1, 1, 2};
  for (int s = 0; s < 4; ++s) {
    const double dr = forward_ ? (s + 1) * h : kCentral[s] * h;
    rho_.push_back(family(WeylPoint(p.rho() + dr, p.v())));
    v_.push_back(family(WeylPoint(p.rho(), p.v() + kCentral[s] * h)));
  }
}

std::vector<Complex> Neighborhood::d_rho(const Functional& g) const {
  std::vector<const CanonicalSolution*> s{&rho_[0], &rho_[1], &rho_[2], &rho_[3]};
  if (forward_) {
    static constexpr double kForward[4] = {48.0, -36.0, 16.0, -3.0};
    const Values c = g(center_);
    return combine(s, kForward, g, 12.0 * h_, &c, -25.0);
  }
  static constexpr double kCentral[4] = {1.0, -8.0, 8.0, -1.0};
  return combine(s, kCentral, g, 12.0 * h_, nullptr, 0.0);
}

std::vector<Complex> Neighborhood::d_v(const Functional& g) const {
  static constexpr double kCentral[4] = {1.0, -8.0, 8.0, -1.0};
  std::vector<const CanonicalSolution*> s{&v_[0], &v_[1], &v_[2], &v_[3]};
  return combine(s, kCentral, g, 12.0 * h_, nullptr, 0.0);
}

OneFormA compute_a(const SolutionFamily& family, const Grid& grid, AMode mode, double h) {
  grid.validate();
  OneFormA out{grid, std::vector<Values>(grid.size()), std::vector<Values>(grid.size())};
  parallel_for(grid.size(), [&](std::size_t i) {
    const auto a = a_values(family, family(grid.point(i)), mode, h);
    out.a_rho[i] = a.rho;
    out.a_v[i] = a.v;
  });
  return out;
}

nlohmann::json CheckReport::to_json() const {
  return {{"check_name", name},         {"max_residual", max_residual},
          {"grid", grid.to_json()},     {"step", step},
          {"refinement_ratios", refinement_ratios},
          {"tolerance", tolerance},     {"passed", passed},
          {"detail", detail}};
}

CheckReport field_equation_check(const SolutionFamily& family, const Grid& grid,
                                 const CheckOptions& options) {
  return run_checks({"field_equation"}, family, grid, options, [&](const Neighborhood& n) {
    const double lambda = n.center().lambda.real();
    const double h = n.step();
    const auto rho_a_rho = n.d_rho([&](const CanonicalSolution& s) {
      auto a = a_values(family, s, options.mode, h).rho;
      for (auto& x : a) x *= s.point.rho();
      return a;
    });
    const auto a_v = n.d_v([&](const CanonicalSolution& s) { return a_values(family, s, options.mode, h).v; });
    double worst = 0.0;
    for (std::size_t j = 0; j < a_v.size(); ++j) {
      worst = std::max(worst, std::abs(lambda * rho_a_rho[j] + n.center().point.rho() * a_v[j]));
    }
    return std::vector<double>{worst};
  })[0];
}

std::vector<Complex> default_lax_omegas(const Grid& grid) {
  const double mid = 0.5 * (grid.v_min + grid.v_max);
  std::vector<Complex> out;
  for (int k = 0; k < 5; ++k) out.emplace_back(mid + 0.3 * (k - 2), 0.5 + 0.5 * k);
  return out;
}

CheckReport lax_check(const SolutionFamily& family, const Grid& grid,
                      const std::vector<Complex>& omegas, const CheckOptions& options) {
  auto report = run_checks({"lax_pair"}, family, grid, options, [&](const Neighborhood& n) {
    const auto& c = n.center();
    const double lambda = c.lambda.real();
    const auto a = a_values(family, c, options.mode, n.step());
    double worst = 0.0;
    for (const Complex omega : omegas) {
      const Complex phi = place_roots(omega, c.point, *c.contour).inside;
      auto x_tilde = [&](const CanonicalSolution& s) {
        const auto roots = spectral_roots(omega, s.point, s.lambda);
        const double d1 = std::abs(roots.phi - phi);
        const double d2 = std::abs(roots.phi_tilde - phi);
        if (std::abs(d1 - d2) < 1e-3 * std::abs(roots.phi - roots.phi_tilde)) {
          throw Error(ErrorKind::BranchPoint, "root branch is ambiguous on the stencil",
                      {{"omega", complex_to_json(omega)}});
        }
        const Complex t = d1 < d2 ? roots.phi : roots.phi_tilde;
        Values out;
        for (std::size_t j = 0; j < s.size(); ++j) out.push_back(s.x(j, t));
        return out;
      };
      const Values x = x_tilde(c);
      const Values xr = n.d_rho(x_tilde);
      const Values xv = n.d_v(x_tilde);
      for (std::size_t j = 0; j < x.size(); ++j) {
        const Complex r_rho = phi * (xr[j] + a.rho[j] * x[j]) - xv[j];
        const Complex r_v = phi * (xv[j] + a.v[j] * x[j]) + lambda * xr[j];
        worst = std::max({worst, std::abs(r_rho), std::abs(r_v)});
      }
    }
    return std::vector<double>{worst};
  })[0];
  nlohmann::json w = nlohmann::json::array();
  for (const Complex o : omegas) w.push_back(complex_to_json(o));
  report.detail["omegas"] = w;
  return report;
}

std::vector<CheckReport> a_from_x_check(const SolutionFamily& family, const Grid& grid,
                                        const CheckOptions& options) {
  auto taylor = [](int order) {
    return [order](const CanonicalSolution& s) {
      Values out;
      for (const auto& ch : s.channels) out.push_back(ch.x->log_taylor(2)[order]);
      return out;
    };
  };
  return run_checks({"a_rho_from_x", "a_v_from_x"}, family, grid, options, [&](const Neighborhood& n) {
    const double lambda = n.center().lambda.real();
    const auto a = a_values(family, n.center(), options.mode, n.step());
    const Values c1_v = n.d_v(taylor(1));
    const Values c1_rho = n.d_rho(taylor(1));
    const Values c2_v = n.d_v(taylor(2));
    double r_rho = 0.0, r_v = 0.0;
    for (std::size_t j = 0; j < a.rho.size(); ++j) {
      r_rho = std::max(r_rho, std::abs(a.rho[j] - c1_v[j]));
      r_v = std::max(r_v, std::abs(a.v[j] + 2.0 * lambda * (c1_rho[j] - 0.5 * c2_v[j])));
    }
    return std::vector<double>{r_rho, r_v};
  });
}

CheckReport mixed_partial_check(const SolutionFamily& family, const Grid& grid,
                                const CheckOptions& options) {
  return run_checks({"mixed_partials"}, family, grid, options, [&](const Neighborhood& n) {
    const double h = n.step();
    const Values dv = n.d_v([&](const CanonicalSolution& s) { return a_values(family, s, options.mode, h).rho; });
    const Values dr = n.d_rho([&](const CanonicalSolution& s) { return a_values(family, s, options.mode, h).v; });
    return std::vector<double>{max_abs_diff(dv, dr)};
  })[0];
}

CheckReport psi_integrability_check(const SolutionFamily& family, const Grid& grid,
                                    const CheckOptions& options) {
  return run_checks({"psi_integrability"}, family, grid, options, [&](const Neighborhood& n) {
    const double h = n.step();
    auto psi_rho = [&](const CanonicalSolution& s) {
      const auto a = a_values(family, s, options.mode, h);
      Complex sum = 0.0;
      for (std::size_t j = 0; j < a.rho.size(); ++j) {
        sum += a.rho[j] * a.rho[j] - s.lambda.real() * a.v[j] * a.v[j];
      }
      return Values{0.25 * s.point.rho() * sum};
    };
    auto psi_v = [&](const CanonicalSolution& s) {
      const auto a = a_values(family, s, options.mode, h);
      Complex sum = 0.0;
      for (std::size_t j = 0; j < a.rho.size(); ++j) sum += a.rho[j] * a.v[j];
      return Values{0.5 * s.point.rho() * sum};
    };
    return std::vector<double>{max_abs_diff(n.d_v(psi_rho), n.d_rho(psi_v))};
  })[0];
}

bool NormalizationReport::passed() const {
  return x0_deviation < tolerance && factorization_residual < tolerance &&
         symmetry_residual < tolerance && determinant_deviation < tolerance;
}

nlohmann::json NormalizationReport::to_json() const {
  return {{"x0_deviation", x0_deviation},
          {"factorization_residual", factorization_residual},
          {"symmetry_residual", symmetry_residual},
          {"determinant_deviation", determinant_deviation},
          {"tolerance", tolerance},
          {"passed", passed()}};
}

NormalizationReport normalization_and_symmetry_report(const CanonicalSolution& sol, double tolerance) {
  NormalizationReport r;
  r.tolerance = tolerance;
  for (std::size_t j = 0; j < sol.size(); ++j) {
    r.x0_deviation = std::max(r.x0_deviation, std::abs(sol.x(j, 0.0) - 1.0));
  }
  if (sol.monodromy) {
    r.factorization_residual = factorization_residual(sol);
    r.symmetry_residual = symmetry_residual(*sol.monodromy, sol.point, *sol.contour);
    r.determinant_deviation = determinant_deviation(*sol.monodromy, sol.point, *sol.contour);
  } else {
    r.factorization_residual = std::numeric_limits<double>::infinity();
  }
  return r;
}

std::vector<CheckReport> verify_suite(const SolutionFamily& family, const Grid& grid,
                                      const CheckOptions& options) {
  std::vector<CheckReport> out;
  out.push_back(field_equation_check(family, grid, options));
  out.push_back(lax_check(family, grid, default_lax_omegas(grid), options));
  for (auto& r : a_from_x_check(family, grid, options)) out.push_back(std::move(r));
  out.push_back(mixed_partial_check(family, grid, options));
  out.push_back(psi_integrability_check(family, grid, options));
  return out;
}

}  // namespace whgrav
