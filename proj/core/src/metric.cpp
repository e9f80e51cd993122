#include "whgrav/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "whgrav/error.hpp"
#include "whgrav/parallel.hpp"

namespace whgrav {

namespace {

constexpr double kMaxPanel = 0.25;

double leg(const std::function<double(double)>& f, double a, double b) {
  if (a == b) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / kMaxPanel)));
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    sum += boost::math::quadrature::gauss<double, 20>::integrate(f, lo, lo + width);
  }
  return sum;
}

// ∫_{x0}^{x_k} f for every k, sharing the legs between neighbouring targets.
std::vector<double> cumulative(const std::function<double(double)>& f, double x0,
                               const std::vector<double>& xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
  std::vector<double> out(xs.size(), 0.0);
  double acc = 0.0, prev = x0;
  for (std::size_t k : order) {
    if (xs[k] < x0) continue;
    acc += leg(f, prev, xs[k]);
    prev = xs[k];
    out[k] = acc;
  }
  acc = 0.0;
  prev = x0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (xs[*it] >= x0) continue;
    acc += leg(f, prev, xs[*it]);
    prev = xs[*it];
    out[*it] = acc;
  }
  return out;
}

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorKind::Domain, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  return {num / g, den / g};
}

boost::multiprecision::cpp_rational exact(const Rational& r) {
  return boost::multiprecision::cpp_rational(r.num, r.den);
}

}  // namespace

double bessel_j(int order, double x) {
  if (order != 0 && order != 1) {
    throw Error(ErrorKind::Domain, "bessel_j supports orders 0 and 1", {{"order", order}});
  }
  const double value = std::cyl_bessel_j(static_cast<double>(order), std::abs(x));
  return (order == 1 && x < 0.0) ? -value : value;
}

DeltaB extract_delta_b(const Matrix2& m, double tolerance) {
  const double scale = std::max({1.0, std::abs(m[0][0]), std::abs(m[1][1]), std::abs(m[0][1])});
  if (std::abs(m[0][1] - m[1][0]) > tolerance * scale) {
    throw Error(ErrorKind::NotCosetRepresentative, "matrix is not symmetric");
  }
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  if (std::abs(det - 1.0) > tolerance * scale * scale) {
    throw Error(ErrorKind::NotCosetRepresentative, "matrix does not have unit determinant", {{"det", det}});
  }
  if (m[1][1] == 0.0) throw Error(ErrorKind::NotCosetRepresentative, "m22 vanishes");
  const double delta = 1.0 / m[1][1];
  const double b = m[0][1] / m[1][1];
  if (std::abs(m[0][0] - (delta + b * b / delta)) > tolerance * scale) {
    throw Error(ErrorKind::NotCosetRepresentative, "m11 is inconsistent with (delta, B)");
  }
  return {delta, b};
}

Matrix2 assemble_m(double delta, double b_tilde) {
  if (delta == 0.0) throw Error(ErrorKind::Domain, "delta must be nonzero");
  return {{{delta + b_tilde * b_tilde / delta, b_tilde / delta}, {b_tilde / delta, 1.0 / delta}}};
}

Matrix2 solution_matrix(const CanonicalSolution& sol, double tolerance) {
  if (sol.size() != 2) {
    throw Error(ErrorKind::NotCosetRepresentative, "metric data needs a two-channel solution",
                {{"channels", sol.size()}});
  }
  const Complex m1 = sol.m(0);
  const Complex m2 = sol.m(1);
  if (std::abs(m1 * m2 - 1.0) > tolerance * std::max(1.0, std::abs(m1 * m2))) {
    throw Error(ErrorKind::NotCosetRepresentative, "solution is not a unimodular pair",
                {{"det", complex_to_json(m1 * m2)}});
  }
  for (const Complex m : {m1, m2}) {
    if (std::abs(m.imag()) > tolerance * std::max(1.0, std::abs(m))) {
      throw Error(ErrorKind::Validation, "solution is not real at this point",
                  {{"M", complex_to_json(m)}});
    }
  }
  return {{{m1.real(), 0.0}, {0.0, m2.real()}}};
}

std::vector<bool> realness_domain(const std::vector<std::vector<Complex>>& m_values, double tolerance) {
  std::vector<bool> mask;
  mask.reserve(m_values.size());
  for (const auto& point : m_values) {
    bool real = true;
    for (const Complex m : point) real = real && std::abs(m.imag()) <= tolerance * std::max(1.0, std::abs(m));
    mask.push_back(real);
  }
  return mask;
}

AEvaluator a_from_family(const SolutionFamily& family) {
  return [family](const WeylPoint& p) {
    const auto sol = family(p);
    std::pair<std::vector<Complex>, std::vector<Complex>> a;
    for (const auto& ch : sol.channels) {
      a.first.push_back(ch.a_rho);
      a.second.push_back(ch.a_v);
    }
    return a;
  };
}

PsiGrid integrate_psi(const AEvaluator& a, const std::vector<double>& rho,
                      const std::vector<double>& v, Lambda lambda, const WeylPoint& base,
                      double base_value) {
  for (double r : rho) {
    if (!(r > 0.0)) throw Error(ErrorKind::Domain, "psi integration grid touches rho <= 0", {{"rho", r}});
  }
  const double l = lambda.real();
  auto psi_rho = [&](double r, double s) {
    const auto [ar, av] = a(WeylPoint(r, s));
    Complex sum = 0.0;
    for (std::size_t j = 0; j < ar.size(); ++j) sum += ar[j] * ar[j] - l * av[j] * av[j];
    return (0.25 * r * sum).real();
  };
  auto psi_v = [&](double r, double s) {
    const auto [ar, av] = a(WeylPoint(r, s));
    Complex sum = 0.0;
    for (std::size_t j = 0; j < ar.size(); ++j) sum += ar[j] * av[j];
    return (0.5 * r * sum).real();
  };

  const std::size_t nr = rho.size(), nv = v.size();
  const auto base_rho = cumulative([&](double r) { return psi_rho(r, base.v()); }, base.rho(), rho);
  const auto base_v = cumulative([&](double s) { return psi_v(base.rho(), s); }, base.v(), v);
  std::vector<std::vector<double>> columns(nr), rows(nv);
  parallel_for(nr + nv, [&](std::size_t k) {
    if (k < nr) {
      columns[k] = cumulative([&](double s) { return psi_v(rho[k], s); }, base.v(), v);
    } else {
      const std::size_t j = k - nr;
      rows[j] = cumulative([&](double r) { return psi_rho(r, v[j]); }, base.rho(), rho);
    }
  });

  PsiGrid out{rho, v, std::vector<double>(nr * nv), 0.0};
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nv; ++j) {
      const double first = base_value + base_rho[i] + columns[i][j];
      const double second = base_value + base_v[j] + rows[j][i];
      out.psi[i * nv + j] = first;
      out.path_residual = std::max(out.path_residual, std::abs(first - second));
    }
  }
  return out;
}

void anchor_psi(PsiGrid& grid, std::size_t i, std::size_t j, double value) {
  const double shift = value - grid.at(i, j);
  for (auto& x : grid.psi) x += shift;
}

double einstein_rosen_psi(double k, double a, double b, const WeylPoint& p) {
  const double r = p.rho();
  const double j0 = bessel_j(0, k * r);
  const double j1 = bessel_j(1, k * r);
  const double amp = 2.0 * b * std::exp(-a * k);
  const double c = std::cos(k * p.v());
  return amp * amp * (k * k * r * r * (j0 * j0 + j1 * j1) - 2.0 * k * c * c * r * j0 * j1);
}

double einstein_rosen_delta(double k, double a, double b, const WeylPoint& p) {
  return std::exp(4.0 * b * std::exp(-a * k) * std::cos(k * p.v()) * bessel_j(0, k * p.rho()));
}

double pulse_integral(double a, const WeylPoint& p) {
  if (!(a > 0.0)) throw Error(ErrorKind::Domain, "pulse integral needs a > 0", {{"a", a}});
  const Complex s = Complex(a, -p.v()) * Complex(a, -p.v()) + p.rho() * p.rho();
  return (1.0 / std::sqrt(s)).real();
}

Complex pulse_decomposition(double a, const WeylPoint& p, bool difference) {
  const double r2 = p.rho() * p.rho();
  const Complex plus = kI / std::sqrt(Complex(p.v(), a) * Complex(p.v(), a) - r2);
  const Complex minus = kI / std::sqrt(Complex(p.v(), -a) * Complex(p.v(), -a) - r2);
  return difference ? plus - minus : plus + minus;
}

double pulse_psi(double a, double b, const WeylPoint& p) {
  if (a == 0.0) throw Error(ErrorKind::Domain, "pulse psi needs a != 0");
  const double a2 = a * a, r2 = p.rho() * p.rho(), v2 = p.v() * p.v();
  const double s = a2 + r2 - v2;
  const double q = s * s + 4.0 * a2 * v2;
  return b * b / a2 * (1.0 - 2.0 * a2 * r2 * (s * s - 4.0 * a2 * v2) / (q * q) + (r2 - a2 - v2) / std::sqrt(q));
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

KasnerExponents kasner_exponents(int n) {
  if (n < 1) throw Error(ErrorKind::Domain, "Kasner index must be a positive integer", {{"n", n}});
  const std::int64_t m = n;
  const std::int64_t d = m * m - m + 1;
  return {n, make_rational(m * (m - 1), d), make_rational(1 - m, d), make_rational(m, d)};
}

bool kasner_identities_hold(const KasnerExponents& e) {
  const auto p1 = exact(e.p1), p2 = exact(e.p2), p3 = exact(e.p3);
  return p1 + p2 + p3 == 1 && p1 * p1 + p2 * p2 + p3 * p3 == 1 && p1 >= 0 && p1 < 1;
}

int kasner_index_for(const Rational& p1, const Rational& p2, const Rational& p3) {
  const nlohmann::json target{{"p1", p1.str()}, {"p2", p2.str()}, {"p3", p3.str()}};
  if (p1.num == p1.den) {
    throw Error(ErrorKind::Validation, "Kasner exponents with p1 = 1 are not reachable for any n", target);
  }
  // n(n − 1) = q with q = p1/(1 − p1).
  const double q = p1.value() / (1.0 - p1.value());
  if (q >= 0.0) {
    const long n = std::lround(0.5 * (1.0 + std::sqrt(1.0 + 4.0 * q)));
    if (n >= 1 && n < 2000000) {
      const auto e = kasner_exponents(static_cast<int>(n));
      if (e.p1 == make_rational(p1.num, p1.den) && e.p2 == make_rational(p2.num, p2.den) &&
          e.p3 == make_rational(p3.num, p3.den)) {
        return static_cast<int>(n);
      }
    }
  }
  throw Error(ErrorKind::Validation, "no Kasner index n reproduces these exponents", target);
}

nlohmann::json kasner_line_element(int n, std::optional<double> c) {
  const auto e = kasner_exponents(n);
  const double p1 = e.p1.value(), p2 = e.p2.value(), p3 = e.p3.value();
  const double cc = c.value_or(std::pow(2.0, -2.0 * n) / ((1.0 - p1) * (1.0 - p1)));
  // Components of Δdy² + Δ⁻¹(e^ψ(−dρ² + dv²) + ρ²dφ²) in (t, x₁, x₂ = 2ⁿφ, x₃ = 2⁻ⁿy).
  double residual = 0.0;
  for (double t : {0.5, 1.0, 2.0, 3.0}) {
    const double rho = std::pow(t, 1.0 - p1);
    const double delta = std::pow(0.5 * rho, 2.0 * n);
    const double epsi = cc * std::pow(rho, 2.0 * n * n);
    const double drho_dt = (1.0 - p1) * std::pow(t, -p1);
    const double g_tt = -epsi / delta * drho_dt * drho_dt;
    const double g_11 = epsi / delta * (1.0 - p1) * (1.0 - p1);
    const double g_22 = rho * rho / delta * std::pow(2.0, -2.0 * n);
    const double g_33 = delta * std::pow(2.0, 2.0 * n);
    residual = std::max({residual, std::abs(g_tt + 1.0), std::abs(g_11 / std::pow(t, 2 * p1) - 1.0),
                         std::abs(g_22 / std::pow(t, 2 * p2) - 1.0),
                         std::abs(g_33 / std::pow(t, 2 * p3) - 1.0)});
  }
  return {{"n", n},
          {"exponents", {{"p1", e.p1.str()}, {"p2", e.p2.str()}, {"p3", e.p3.str()}}},
          {"coordinates", {{"rho", "t^(1-p1)"}, {"v", "(1-p1)*x1"}, {"x2", "2^n*phi"}, {"x3", "2^(-n)*y"}}},
          {"delta", "(rho/2)^(2n)"},
          {"exp_psi", "c*rho^(2n^2)"},
          {"c", cc},
          {"line_element", "-dt^2 + t^(2p1) dx1^2 + t^(2p2) dx2^2 + t^(2p3) dx3^2"},
          {"component_residual", residual}};
}

MetricData assemble_metric(const SolutionFamily& family, const Grid& grid, Lambda lambda,
                           const WeylPoint& base, double base_value, int sigma, int epsilon) {
  grid.validate();
  if (std::abs(sigma) != 1 || std::abs(epsilon) != 1 || sigma * epsilon != lambda.value()) {
    throw Error(ErrorKind::Config, "signs must satisfy lambda = sigma * epsilon",
                {{"sigma", sigma}, {"epsilon", epsilon}, {"lambda", lambda.value()}});
  }
  MetricData data;
  data.lambda = lambda;
  data.sigma = sigma;
  data.epsilon = epsilon;
  data.base_point = base;
  data.integration_constant = base_value;
  data.rows.resize(grid.size());
  std::vector<std::vector<Complex>> m_values(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const auto sol = family(grid.point(i));
    if (sol.size() != 2) {
      throw Error(ErrorKind::NotCosetRepresentative, "metric data needs a two-channel solution");
    }
    const Complex det = sol.m(0) * sol.m(1);
    if (std::abs(det - 1.0) > 1e-10 * std::max(1.0, std::abs(det))) {
      throw Error(ErrorKind::NotCosetRepresentative, "solution is not a unimodular pair",
                  {{"det", complex_to_json(det)}});
    }
    m_values[i] = {sol.m(0), sol.m(1)};
  });
  const auto mask = realness_domain(m_values);
  std::vector<double> rho(grid.n_rho), v(grid.n_v);
  for (int i = 0; i < grid.n_rho; ++i) rho[i] = grid.rho(i);
  for (int j = 0; j < grid.n_v; ++j) v[j] = grid.v(j);
  const auto psi = integrate_psi(a_from_family(family), rho, v, lambda, base, base_value);
  data.psi_path_residual = psi.path_residual;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto p = grid.point(k);
    const bool real = mask[k];
    double delta = nan;
    if (real) delta = extract_delta_b({{{m_values[k][0].real(), 0.0}, {0.0, m_values[k][1].real()}}}).delta;
    data.rows[k] = {p.rho(), p.v(), delta, 0.0, real ? psi.psi[k] : nan, real};
  }
  return data;
}

void write_metric_csv(std::ostream& out, const MetricData& data) {
  const auto old = out.precision(17);
  out << "rho,v,delta,B,psi,real_mask\n";
  for (const auto& r : data.rows) {
    out << r.rho << ',' << r.v << ',' << r.delta << ',' << r.b << ',' << r.psi << ','
        << (r.real ? 1 : 0) << '\n';
  }
  out.precision(old);
}

}  // namespace whgrav
