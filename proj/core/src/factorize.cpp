#include "whgrav/factorize.hpp"

#include <cmath>

#include "whgrav/error.hpp"
#include "whgrav/spectral.hpp"

namespace whgrav {

namespace {

class IdentityFactor final : public PlusFactor {
 public:
  Complex log_value(Complex) const override { return 0.0; }
  Complex log_derivative(Complex) const override { return 0.0; }
  std::vector<Complex> log_taylor(int order) const override {
    return std::vector<Complex>(order + 1, 0.0);
  }
};

class QuadratureFactor final : public PlusFactor {
 public:
  QuadratureFactor(ScalarFactorization fac, ScalarFn dlog) : fac_(std::move(fac)), dlog_(std::move(dlog)) {}

  Complex log_value(Complex tau) const override { return fac_.log_plus(tau); }

  Complex log_derivative(Complex tau) const override {
    const auto& split = fac_.split();
    if (split.contour()->locate(tau) != PointLocation::Outside) return split.plus_derivative(tau);
    if (!dlog_) {
      throw Error(ErrorKind::Domain, "plus factor derivative outside the contour needs a closed form",
                  {{"tau", complex_to_json(tau)}});
    }
    return dlog_(tau) - split.minus_derivative(tau);
  }

  std::vector<Complex> log_taylor(int order) const override {
    auto c = fac_.split().plus_taylor(order);
    c[0] = 0.0;
    return c;
  }

 private:
  ScalarFactorization fac_;
  ScalarFn dlog_;
};

class RationalFactor final : public PlusFactor {
 public:
  explicit RationalFactor(std::vector<RootFactor> roots) : roots_(std::move(roots)) {}

  Complex log_value(Complex tau) const override {
    Complex s = 0.0;
    for (const auto& r : roots_) s += static_cast<double>(r.multiplicity) * std::log(1.0 - tau / r.root);
    return s;
  }

  Complex log_derivative(Complex tau) const override {
    Complex s = 0.0;
    for (const auto& r : roots_) s += static_cast<double>(r.multiplicity) / (tau - r.root);
    return s;
  }

  std::vector<Complex> log_taylor(int order) const override {
    std::vector<Complex> c(order + 1, 0.0);
    for (const auto& r : roots_) {
      Complex p = 1.0;
      for (int n = 1; n <= order; ++n) {
        p /= r.root;
        c[n] -= static_cast<double>(r.multiplicity) * p / static_cast<double>(n);
      }
    }
    return c;
  }

 private:
  std::vector<RootFactor> roots_;
};

class PartialFractionFactor final : public PlusFactor {
 public:
  explicit PartialFractionFactor(PartialFractionSplit split)
      : split_(std::move(split)), zero_(split_.plus_at_zero()) {}

  Complex log_value(Complex tau) const override { return split_.plus(tau) - zero_; }
  Complex log_derivative(Complex tau) const override { return split_.plus_derivative(tau); }

  std::vector<Complex> log_taylor(int order) const override {
    std::vector<Complex> c(order + 1, 0.0);
    for (const auto& t : split_.plus_poles) {
      Complex p = 1.0 / t.pole;
      for (int n = 1; n <= order; ++n) {
        p /= t.pole;
        c[n] -= t.residue * p;
      }
    }
    for (int n = 1; n <= order && n < static_cast<int>(split_.plus_poly.size()); ++n) {
      c[n] += split_.plus_poly[n];
    }
    return c;
  }

 private:
  PartialFractionSplit split_;
  Complex zero_;
};

class SumFactor final : public PlusFactor {
 public:
  explicit SumFactor(std::vector<PlusFactorPtr> parts) : parts_(std::move(parts)) {}

  Complex log_value(Complex tau) const override {
    Complex s = 0.0;
    for (const auto& p : parts_) s += p->log_value(tau);
    return s;
  }
  Complex log_derivative(Complex tau) const override {
    Complex s = 0.0;
    for (const auto& p : parts_) s += p->log_derivative(tau);
    return s;
  }
  std::vector<Complex> log_taylor(int order) const override {
    std::vector<Complex> c(order + 1, 0.0);
    for (const auto& p : parts_) {
      const auto t = p->log_taylor(order);
      for (int n = 0; n <= order; ++n) c[n] += t[n];
    }
    return c;
  }

 private:
  std::vector<PlusFactorPtr> parts_;
};

class NegatedFactor final : public PlusFactor {
 public:
  explicit NegatedFactor(PlusFactorPtr inner) : inner_(std::move(inner)) {}
  Complex log_value(Complex tau) const override { return -inner_->log_value(tau); }
  Complex log_derivative(Complex tau) const override { return -inner_->log_derivative(tau); }
  std::vector<Complex> log_taylor(int order) const override {
    auto c = inner_->log_taylor(order);
    for (auto& x : c) x = -x;
    return c;
  }

 private:
  PlusFactorPtr inner_;
};

Complex kappa(const WeylPoint& point, Lambda lambda) { return -lambda.real() * point.rho() / 2.0; }

struct SplitRoots {
  Complex inside;
  Complex outside;
};

// Roots of ω(τ) = target, classified by Γ.
SplitRoots split_roots(Complex target, const WeylPoint& point, const Contour& contour, int index_weight) {
  RootPair roots{};
  try {
    roots = spectral_roots(target, point, contour.lambda());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BranchPoint) throw;
    throw Error(ErrorKind::InadmissibleContour, "double root sits on the fixed point of the contour",
                {{"omega", complex_to_json(target)}});
  }
  const auto l1 = contour.locate(roots.phi);
  const auto l2 = contour.locate(roots.phi_tilde);
  if (l1 == PointLocation::OnContour || l2 == PointLocation::OnContour) {
    throw Error(ErrorKind::InadmissibleContour, "inadmissible contour for this monodromy at (rho, v)",
                {{"omega", complex_to_json(target)},
                 {"root", complex_to_json(l1 == PointLocation::OnContour ? roots.phi : roots.phi_tilde)}});
  }
  if (l1 == l2) {
    const int sign = l1 == PointLocation::Inside ? 1 : -1;
    throw Error(ErrorKind::NoCanonicalFactorization, "both roots lie on one side of the contour",
                {{"index", sign * index_weight}, {"omega", complex_to_json(target)}});
  }
  if (l1 == PointLocation::Inside) return {roots.phi, roots.phi_tilde};
  return {roots.phi_tilde, roots.phi};
}

void collect_rational(const ChannelExpr& expr, const WeylPoint& point, const Contour& contour,
                      RationalSplit& out, Complex& log_m, Complex& a_rho, Complex& a_v) {
  if (const auto* m = std::get_if<MonomialPower>(&expr.form)) {
    if (m->n == 0) return;
    const auto roots = split_roots(m->a, point, contour, m->n);
    const Complex k = kappa(point, contour.lambda());
    const double n = static_cast<double>(m->n);
    out.normalization *= std::pow(k * -roots.outside, m->n);
    out.plus_roots.push_back({roots.outside, m->n});
    out.minus_roots.push_back({roots.inside, m->n});
    log_m += n * std::log(k * -roots.outside);
    const auto d = root_derivatives(roots.outside, point, contour.lambda());
    a_rho += n * (1.0 / point.rho() + d.d_rho / roots.outside);
    a_v += n * d.d_v / roots.outside;
    return;
  }
  if (const auto* p = std::get_if<ProductExpr>(&expr.form)) {
    for (const auto& f : p->factors) collect_rational(f, point, contour, out, log_m, a_rho, a_v);
    return;
  }
  const auto& s = std::get<ExpSum>(expr.form);
  if (!s.terms.empty()) {
    throw Error(ErrorKind::Config, "rational backend needs a product of monomial powers");
  }
}

void add_pole(Complex coefficient, Complex b, const WeylPoint& point, const Contour& contour,
              PartialFractionSplit& out) {
  RootPair roots{};
  try {
    roots = spectral_roots(b, point, contour.lambda());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BranchPoint) throw;
    throw Error(ErrorKind::Evaluation, "non-simple pole in the partial-fraction exponent",
                {{"omega", complex_to_json(b)}});
  }
  const Complex k = kappa(point, contour.lambda());
  const Complex t1 = roots.phi;
  const Complex t2 = roots.phi_tilde;
  const PoleResidue terms[2] = {{t1, coefficient * t1 / (k * (t1 - t2))},
                                {t2, coefficient * t2 / (k * (t2 - t1))}};
  for (const auto& t : terms) {
    switch (contour.locate(t.pole)) {
      case PointLocation::Outside:
        out.plus_poles.push_back(t);
        break;
      case PointLocation::Inside:
        out.minus_poles.push_back(t);
        break;
      case PointLocation::OnContour:
        throw Error(ErrorKind::InadmissibleContour, "exponent pole on the contour",
                    {{"omega", complex_to_json(b)}, {"pole", complex_to_json(t.pole)}});
    }
  }
}

void add_power(Complex coefficient, int p, const WeylPoint& point, Lambda lambda,
               PartialFractionSplit& out) {
  // Laurent coefficients of ω(τ)^p, indexed n + p for n = −p..p.
  const Complex base[3] = {point.rho() / 2.0, point.v(), -lambda.real() * point.rho() / 2.0};
  std::vector<Complex> poly{1.0};
  for (int step = 0; step < p; ++step) {
    std::vector<Complex> next(poly.size() + 2, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      for (int d = 0; d < 3; ++d) next[i + d] += poly[i] * base[d];
    }
    poly = std::move(next);
  }
  if (out.plus_poly.size() < static_cast<std::size_t>(p + 1)) out.plus_poly.resize(p + 1, 0.0);
  if (out.minus_poly.size() < static_cast<std::size_t>(p)) out.minus_poly.resize(p, 0.0);
  for (int n = -p; n <= p; ++n) {
    const Complex c = coefficient * poly[n + p];
    if (n >= 0) {
      out.plus_poly[n] += c;
    } else {
      out.minus_poly[-n - 1] += c;
    }
  }
}

void collect_partial_fractions(const ChannelExpr& expr, const WeylPoint& point,
                               const Contour& contour, PartialFractionSplit& out) {
  if (const auto* p = std::get_if<ProductExpr>(&expr.form)) {
    for (const auto& f : p->factors) collect_partial_fractions(f, point, contour, out);
    return;
  }
  if (const auto* m = std::get_if<MonomialPower>(&expr.form)) {
    if (m->n == 0) return;
    throw Error(ErrorKind::Config, "partial-fraction backend needs rational exponents");
  }
  for (const auto& term : std::get<ExpSum>(expr.form).terms) {
    if (const auto* t = std::get_if<PoleTerm>(&term)) {
      add_pole(t->c, t->a, point, contour, out);
    } else if (const auto* q = std::get_if<InvQuadTerm>(&term)) {
      const Complex c = q->c / (2.0 * kI * q->a);
      add_pole(c, kI * q->a, point, contour, out);
      add_pole(-c, -kI * q->a, point, contour, out);
    } else if (const auto* w = std::get_if<PowerTerm>(&term)) {
      add_power(w->c, w->p, point, contour.lambda(), out);
    } else {
      throw Error(ErrorKind::Config, "partial-fraction backend needs rational exponents");
    }
  }
}

// ∂_ρ and ∂_v of (P⁺ log 𝓜_j)(0) = (1/2πi)∮ log 𝓜_j(ω(z)) dz/z.
std::pair<Complex, Complex> a_by_quadrature(const ChannelExpr& expr, const WeylPoint& point,
                                            const Contour& contour) {
  const auto z = contour.nodes();
  const auto w = contour.weights();
  Complex ar = 0.0, av = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const Complex g = dlog_channel(expr, spectral_map(z[k], point, contour.lambda())) * w[k] / z[k];
    ar += g * spectral_map_drho(z[k], contour.lambda());
    av += g;
  }
  const Complex s = 1.0 / (2.0 * kPi * kI);
  return {ar * s, av * s};
}

ChannelSolution solve_quadrature(const ChannelExpr& expr, const BoundarySamples& samples,
                                 const WeylPoint& point, const ContourPtr& contour,
                                 ProjectionMethod projection) {
  const Lambda lambda = contour->lambda();
  BoundarySamples logs = [&] {
    if (!is_exp_only(expr)) return continuous_log(samples);
    const auto z = contour->nodes();
    std::vector<Complex> v(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
      v[k] = *exact_log_channel(expr, spectral_map(z[k], point, lambda));
    }
    ScalarFn closed = [expr, point, lambda](Complex tau) {
      return *exact_log_channel(expr, spectral_map(tau, point, lambda));
    };
    return BoundarySamples(contour, std::move(v), std::move(closed));
  }();
  ScalarFactorization fac(logs, projection);
  ScalarFn dlog = [expr, point, lambda](Complex tau) {
    return dlog_channel(expr, spectral_map(tau, point, lambda)) *
           spectral_map_dtau(tau, point, lambda);
  };
  const auto [ar, av] = a_by_quadrature(expr, point, *contour);
  ChannelSolution ch;
  ch.log_m = fac.log_normalization();
  ch.x = quadrature_factor(std::move(fac), std::move(dlog));
  ch.backend = Backend::QuadratureCauchy;
  ch.a_rho = ar;
  ch.a_v = av;
  return ch;
}

ChannelSolution solve_rational(const ChannelExpr& expr, const WeylPoint& point, const Contour& contour) {
  RationalSplit split{1.0, {}, {}};
  ChannelSolution ch{};
  collect_rational(expr, point, contour, split, ch.log_m, ch.a_rho, ch.a_v);
  ch.x = split.plus_roots.empty() ? identity_factor() : rational_factor(split.plus_roots);
  ch.backend = Backend::RationalZeroPole;
  return ch;
}

ChannelSolution solve_partial_fraction(const ChannelExpr& expr, const WeylPoint& point,
                                       const Contour& contour) {
  auto split = partial_fraction_projection(expr, point, contour);
  const auto [ar, av] = a_by_quadrature(expr, point, contour);
  ChannelSolution ch;
  ch.log_m = split.plus_at_zero();
  ch.x = partial_fraction_factor(std::move(split));
  ch.backend = Backend::PartialFraction;
  ch.a_rho = ar;
  ch.a_v = av;
  return ch;
}

nlohmann::json point_to_json(const WeylPoint& p) { return {{"rho", p.rho()}, {"v", p.v()}}; }

}  // namespace

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::Auto: return "auto";
    case Backend::QuadratureCauchy: return "quadrature";
    case Backend::PartialFraction: return "partial_fraction";
    case Backend::RationalZeroPole: return "rational";
    case Backend::Composite: return "composite";
  }
  return "unknown";
}

Backend backend_from_string(std::string_view name) {
  for (Backend b : {Backend::Auto, Backend::QuadratureCauchy, Backend::PartialFraction,
                    Backend::RationalZeroPole}) {
    if (to_string(b) == name) return b;
  }
  throw Error(ErrorKind::Config, "unknown backend '" + std::string(name) + "'");
}

Complex PartialFractionSplit::plus(Complex tau) const {
  Complex s = 0.0;
  for (const auto& t : plus_poles) s += t.residue / (tau - t.pole);
  Complex p = 1.0;
  for (const auto& c : plus_poly) {
    s += c * p;
    p *= tau;
  }
  return s;
}

Complex PartialFractionSplit::plus_derivative(Complex tau) const {
  Complex s = 0.0;
  for (const auto& t : plus_poles) s -= t.residue / ((tau - t.pole) * (tau - t.pole));
  Complex p = 1.0;
  for (std::size_t n = 1; n < plus_poly.size(); ++n) {
    s += static_cast<double>(n) * plus_poly[n] * p;
    p *= tau;
  }
  return s;
}

Complex PartialFractionSplit::minus(Complex tau) const {
  Complex s = 0.0;
  for (const auto& t : minus_poles) s += t.residue / (tau - t.pole);
  Complex p = 1.0;
  for (const auto& c : minus_poly) {
    p /= tau;
    s += c * p;
  }
  return s;
}

Complex PartialFractionSplit::plus_at_zero() const {
  Complex s = plus_poly.empty() ? Complex(0.0) : plus_poly[0];
  for (const auto& t : plus_poles) s -= t.residue / t.pole;
  return s;
}

Complex RationalSplit::plus(Complex tau) const {
  Complex v = 1.0;
  for (const auto& r : plus_roots) v *= std::pow(1.0 - tau / r.root, r.multiplicity);
  return v;
}

Complex RationalSplit::minus(Complex tau) const {
  Complex v = normalization;
  for (const auto& r : minus_roots) v *= std::pow(1.0 - r.root / tau, r.multiplicity);
  return v;
}

PlusFactorPtr identity_factor() {
  static const PlusFactorPtr id = std::make_shared<IdentityFactor>();
  return id;
}

PlusFactorPtr quadrature_factor(ScalarFactorization fac, ScalarFn dlog_closed) {
  return std::make_shared<QuadratureFactor>(std::move(fac), std::move(dlog_closed));
}

PlusFactorPtr rational_factor(std::vector<RootFactor> roots) {
  return std::make_shared<RationalFactor>(std::move(roots));
}

PlusFactorPtr partial_fraction_factor(PartialFractionSplit split) {
  return std::make_shared<PartialFractionFactor>(std::move(split));
}

PlusFactorPtr sum_factor(std::vector<PlusFactorPtr> parts) {
  return std::make_shared<SumFactor>(std::move(parts));
}

PlusFactorPtr negated_factor(PlusFactorPtr inner) {
  return std::make_shared<NegatedFactor>(std::move(inner));
}

RationalSplit rational_zero_pole_factorize(const ChannelExpr& channel, const WeylPoint& point,
                                           const Contour& contour) {
  if (!is_monomial_product(channel)) {
    throw Error(ErrorKind::Config, "rational backend needs a product of monomial powers");
  }
  RationalSplit split{1.0, {}, {}};
  Complex log_m = 0.0, ar = 0.0, av = 0.0;
  collect_rational(channel, point, contour, split, log_m, ar, av);
  return split;
}

PartialFractionSplit partial_fraction_projection(const ChannelExpr& channel, const WeylPoint& point,
                                                 const Contour& contour) {
  if (!has_rational_exponent(channel)) {
    throw Error(ErrorKind::Config, "partial-fraction backend needs rational exponents");
  }
  PartialFractionSplit split;
  collect_partial_fractions(channel, point, contour, split);
  return split;
}

DeformationSpec DeformationSpec::unimodular(Complex omega, int n) {
  return DeformationSpec{{{{omega, n}}, {{omega, -n}}}};
}

DeformationSpec DeformationSpec::from_json(const nlohmann::json& doc) {
  auto term = [](const nlohmann::json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("omega")) throw Error(ErrorKind::Parse, path + ".omega: required");
    DeformationTerm t{};
    try {
      t.omega = complex_from_json(j["omega"]);
    } catch (const Error&) {
      throw Error(ErrorKind::Parse, path + ".omega: expected a number or [re, im]");
    }
    if (j.contains("multiplicity")) {
      if (!j["multiplicity"].is_number_integer()) {
        throw Error(ErrorKind::Parse, path + ".multiplicity: expected an integer");
      }
      t.multiplicity = j["multiplicity"].get<int>();
    }
    return t;
  };
  if (!doc.is_object()) throw Error(ErrorKind::Parse, "deformation: expected an object");
  if (!doc.contains("channels")) {
    const auto t = term(doc, "deformation");
    return unimodular(t.omega, t.multiplicity);
  }
  if (!doc["channels"].is_array()) throw Error(ErrorKind::Parse, "deformation.channels: expected an array");
  DeformationSpec spec;
  for (std::size_t j = 0; j < doc["channels"].size(); ++j) {
    const auto& list = doc["channels"][j];
    const std::string path = "deformation.channels[" + std::to_string(j) + "]";
    if (!list.is_array()) throw Error(ErrorKind::Parse, path + ": expected an array");
    std::vector<DeformationTerm> terms;
    for (std::size_t i = 0; i < list.size(); ++i) {
      terms.push_back(term(list[i], path + "[" + std::to_string(i) + "]"));
    }
    spec.channels.push_back(std::move(terms));
  }
  return spec;
}

nlohmann::json DeformationSpec::to_json() const {
  nlohmann::json out{{"channels", nlohmann::json::array()}};
  for (const auto& list : channels) {
    nlohmann::json l = nlohmann::json::array();
    for (const auto& t : list) l.push_back({{"omega", complex_to_json(t.omega)}, {"multiplicity", t.multiplicity}});
    out["channels"].push_back(l);
  }
  return out;
}

bool DeformationSpec::empty() const {
  for (const auto& list : channels) {
    for (const auto& t : list) {
      if (t.multiplicity != 0) return false;
    }
  }
  return true;
}

Complex DeformationFactor::value(Complex tau) const {
  return (1.0 - tau / tau_tilde_i) / (1.0 - tau / tau_i);
}

DeformationFactor deformation_factor(Complex omega, const WeylPoint& point, const Contour& contour) {
  try {
    const auto roots = split_roots(omega, point, contour, 0);
    return {roots.outside, roots.inside, contour.lambda()};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoCanonicalFactorization) throw;
    throw Error(ErrorKind::InadmissibleContour, "deformation roots lie on one side of the contour",
                e.detail());
  }
}

CanonicalSolution canonical_solve(const DiagonalMonodromy& mono, const WeylPoint& point,
                                  ContourPtr contour, SolveOptions options) {
  const auto samples = compose_on_contour(mono, point, contour);
  CanonicalSolution sol;
  sol.point = point;
  sol.lambda = mono.lambda;
  sol.contour = contour;
  sol.monodromy = mono;
  for (std::size_t j = 0; j < mono.size(); ++j) {
    const auto& expr = mono.channels[j];
    Backend b = options.backend;
    if (b == Backend::Auto) {
      b = is_monomial_product(expr)     ? Backend::RationalZeroPole
          : has_rational_exponent(expr) ? Backend::PartialFraction
                                        : Backend::QuadratureCauchy;
    }
    switch (b) {
      case Backend::RationalZeroPole:
        if (!is_monomial_product(expr)) {
          throw Error(ErrorKind::Config, "rational backend needs a product of monomial powers",
                      {{"channel", j}});
        }
        sol.channels.push_back(solve_rational(expr, point, *contour));
        break;
      case Backend::PartialFraction:
        if (!has_rational_exponent(expr)) {
          throw Error(ErrorKind::Config, "partial-fraction backend needs rational exponents",
                      {{"channel", j}});
        }
        sol.channels.push_back(solve_partial_fraction(expr, point, *contour));
        break;
      case Backend::QuadratureCauchy:
        sol.channels.push_back(solve_quadrature(expr, samples[j], point, contour, options.projection));
        break;
      default:
        throw Error(ErrorKind::Config, "backend cannot be requested", {{"backend", to_string(b)}});
    }
  }
  nlohmann::json backends = nlohmann::json::array();
  for (const auto& ch : sol.channels) backends.push_back(to_string(ch.backend));
  sol.provenance = {{"op", "solve"}, {"monodromy", mono.name}, {"backends", backends}};
  return sol;
}

CanonicalSolution deform(const CanonicalSolution& sol, const DeformationSpec& spec) {
  if (spec.channels.size() > sol.size()) {
    throw Error(ErrorKind::Validation, "deformation names more channels than the solution has",
                {{"channels", spec.channels.size()}, {"solution_channels", sol.size()}});
  }
  CanonicalSolution out = sol;
  for (std::size_t j = 0; j < spec.channels.size(); ++j) {
    std::vector<RootFactor> roots;
    auto& ch = out.channels[j];
    for (const auto& t : spec.channels[j]) {
      if (t.multiplicity == 0) continue;
      const auto f = deformation_factor(t.omega, sol.point, *sol.contour);
      const double m = static_cast<double>(t.multiplicity);
      roots.push_back({f.tau_tilde_i, t.multiplicity});
      roots.push_back({f.tau_i, -t.multiplicity});
      ch.log_m += m * std::log(f.tau_tilde_i / f.tau_i);
      const auto di = root_derivatives(f.tau_i, sol.point, sol.lambda);
      const auto dt = root_derivatives(f.tau_tilde_i, sol.point, sol.lambda);
      ch.a_rho += m * (dt.d_rho / f.tau_tilde_i - di.d_rho / f.tau_i);
      ch.a_v += m * (dt.d_v / f.tau_tilde_i - di.d_v / f.tau_i);
    }
    if (!roots.empty()) ch.x = sum_factor({ch.x, rational_factor(std::move(roots))});
  }
  if (!spec.empty()) out.meromorphic = true;
  out.provenance = {{"op", "deform"}, {"deformation", spec.to_json()}, {"base", sol.provenance}};
  return out;
}

CanonicalSolution invert_solution(const CanonicalSolution& sol) {
  CanonicalSolution out = sol;
  for (auto& ch : out.channels) {
    ch.log_m = -ch.log_m;
    ch.x = negated_factor(ch.x);
    ch.a_rho = -ch.a_rho;
    ch.a_v = -ch.a_v;
  }
  if (sol.monodromy) out.monodromy = inverse(*sol.monodromy);
  out.provenance = {{"op", "invert"}, {"base", sol.provenance}};
  return out;
}

CanonicalSolution multiply_solutions(const CanonicalSolution& a, const CanonicalSolution& b) {
  if (a.contour.get() != b.contour.get()) {
    throw Error(ErrorKind::ContourMismatch, "solutions are factorized on different contours",
                {{"left", a.contour->descriptor()}, {"right", b.contour->descriptor()}});
  }
  if (!(a.point == b.point) || !(a.lambda == b.lambda) || a.size() != b.size()) {
    throw Error(ErrorKind::Validation, "solutions differ in Weyl point, lambda or channel count");
  }
  CanonicalSolution out = a;
  for (std::size_t j = 0; j < a.size(); ++j) {
    auto& ch = out.channels[j];
    const auto& other = b.channels[j];
    ch.log_m += other.log_m;
    ch.x = sum_factor({ch.x, other.x});
    ch.a_rho += other.a_rho;
    ch.a_v += other.a_v;
    if (ch.backend != other.backend) ch.backend = Backend::Composite;
  }
  out.meromorphic = a.meromorphic || b.meromorphic;
  if (a.monodromy && b.monodromy) {
    out.monodromy = multiply(*a.monodromy, *b.monodromy);
  } else {
    out.monodromy.reset();
  }
  out.provenance = {{"op", "compose"}, {"left", a.provenance}, {"right", b.provenance}};
  return out;
}

CanonicalSolution identity_solution(const WeylPoint& point, ContourPtr contour, std::size_t channels) {
  CanonicalSolution out;
  out.point = point;
  out.lambda = contour->lambda();
  out.contour = std::move(contour);
  DiagonalMonodromy one{out.lambda, {}, "identity"};
  for (std::size_t j = 0; j < channels; ++j) {
    out.channels.push_back({0.0, identity_factor(), Backend::Composite, 0.0, 0.0});
    one.channels.push_back({ExpSum{}});
  }
  out.monodromy = one;
  out.provenance = {{"op", "identity"}};
  return out;
}

double factorization_residual(const CanonicalSolution& sol) {
  if (!sol.monodromy) {
    throw Error(ErrorKind::Validation, "solution carries no monodromy to check against");
  }
  const auto z = sol.contour->nodes();
  double worst = 0.0;
  for (std::size_t j = 0; j < sol.size(); ++j) {
    const auto& expr = sol.monodromy->channels[j];
    const Complex m = sol.m(j);
    double diff = 0.0, scale = 0.0;
    for (const Complex tau : z) {
      const Complex target = evaluate_on_curve(expr, tau, sol.point, sol.lambda);
      const Complex rebuilt = sol.x(j, involution(tau, sol.lambda)) * m * sol.x(j, tau);
      diff = std::max(diff, std::abs(target - rebuilt));
      scale = std::max(scale, std::abs(target));
    }
    worst = std::max(worst, diff / scale);
  }
  return worst;
}

std::vector<Complex> x_taylor(const CanonicalSolution& sol, std::size_t channel, int order) {
  const auto a = sol.channels.at(channel).x->log_taylor(order);
  std::vector<Complex> b(order + 1, 0.0);
  b[0] = std::exp(a[0]);
  for (int n = 1; n <= order; ++n) {
    Complex s = 0.0;
    for (int k = 1; k <= n; ++k) s += static_cast<double>(k) * a[k] * b[n - k];
    b[n] = s / static_cast<double>(n);
  }
  return b;
}

nlohmann::json to_json(const CanonicalSolution& sol) {
  nlohmann::json out{{"point", point_to_json(sol.point)},
                     {"lambda", sol.lambda.value()},
                     {"contour_ref", sol.contour->descriptor()},
                     {"meromorphic", sol.meromorphic},
                     {"channels", nlohmann::json::array()},
                     {"provenance", sol.provenance}};
  for (std::size_t j = 0; j < sol.size(); ++j) {
    const auto& ch = sol.channels[j];
    nlohmann::json c{{"M", complex_to_json(ch.m())},
                     {"log_M", complex_to_json(ch.log_m)},
                     {"A_rho", complex_to_json(ch.a_rho)},
                     {"A_v", complex_to_json(ch.a_v)},
                     {"backend", to_string(ch.backend)}};
    if (sol.contour->is_unit_circle()) {
      nlohmann::json coeffs = nlohmann::json::array();
      for (const Complex x : x_taylor(sol, j, 16)) coeffs.push_back(complex_to_json(x));
      c["x_laurent_coeffs"] = coeffs;
    }
    out["channels"].push_back(c);
  }
  return out;
}

}  // namespace whgrav
