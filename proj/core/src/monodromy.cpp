#include "whgrav/monodromy.hpp"

#include <cmath>

#include "whgrav/error.hpp"

namespace whgrav {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void pole_hit(Complex omega, Complex pole) {
  throw Error(ErrorKind::Evaluation, "channel evaluated at a pole",
              {{"omega", complex_to_json(omega)}, {"pole", complex_to_json(pole)}});
}

Complex term_value(const ExpTerm& term, Complex w) {
  return std::visit(
      overloaded{
          [&](const CosTerm& t) { return t.c * std::exp(-t.damping * t.k) * std::cos(t.k * w); },
          [&](const SinTerm& t) { return t.c * std::exp(-t.damping * t.k) * std::sin(t.k * w); },
          [&](const PoleTerm& t) {
            if (w == Complex(t.a)) pole_hit(w, t.a);
            return t.c / (w - t.a);
          },
          [&](const InvQuadTerm& t) {
            const Complex q = w * w + t.a * t.a;
            if (q == Complex(0.0)) pole_hit(w, kI * t.a);
            return t.c / q;
          },
          [&](const PowerTerm& t) { return t.c * std::pow(w, t.p); },
      },
      term);
}

Complex term_derivative(const ExpTerm& term, Complex w) {
  return std::visit(
      overloaded{
          [&](const CosTerm& t) {
            return -t.c * t.k * std::exp(-t.damping * t.k) * std::sin(t.k * w);
          },
          [&](const SinTerm& t) {
            return t.c * t.k * std::exp(-t.damping * t.k) * std::cos(t.k * w);
          },
          [&](const PoleTerm& t) {
            if (w == Complex(t.a)) pole_hit(w, t.a);
            return -t.c / ((w - t.a) * (w - t.a));
          },
          [&](const InvQuadTerm& t) {
            const Complex q = w * w + t.a * t.a;
            if (q == Complex(0.0)) pole_hit(w, kI * t.a);
            return -2.0 * t.c * w / (q * q);
          },
          [&](const PowerTerm& t) {
            return t.p == 0 ? Complex(0.0) : t.c * static_cast<double>(t.p) * std::pow(w, t.p - 1);
          },
      },
      term);
}

bool term_is_rational(const ExpTerm& term) {
  return std::holds_alternative<PoleTerm>(term) || std::holds_alternative<InvQuadTerm>(term) ||
         std::holds_alternative<PowerTerm>(term);
}

void check_finite(Complex value, Complex omega) {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw Error(ErrorKind::Evaluation, "channel value is not finite",
                {{"omega", complex_to_json(omega)}});
  }
}

// ---- parsing ----

double require_number(const nlohmann::json& j, const char* key, const std::string& path) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw Error(ErrorKind::Parse, path + "." + key + ": required number");
  }
  return j[key].get<double>();
}

Complex require_complex(const nlohmann::json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw Error(ErrorKind::Parse, path + "." + key + ": required");
  try {
    return complex_from_json(j[key]);
  } catch (const Error&) {
    throw Error(ErrorKind::Parse, path + "." + key + ": expected a number or [re, im]");
  }
}

ExpTerm parse_term(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw Error(ErrorKind::Parse, path + ".type: required string");
  }
  const auto type = j["type"].get<std::string>();
  if (type == "cos" || type == "sin") {
    const Complex c = require_complex(j, "c", path);
    const double k = require_number(j, "k", path);
    const double damping = j.contains("damping_a") ? require_number(j, "damping_a", path) : 0.0;
    if (k < 0.0) throw Error(ErrorKind::Validation, path + ".k: must be nonnegative");
    if (type == "cos") return CosTerm{c, k, damping};
    return SinTerm{c, k, damping};
  }
  if (type == "pole") return PoleTerm{require_complex(j, "c", path), require_number(j, "a", path)};
  if (type == "inv_quad") {
    return InvQuadTerm{require_complex(j, "c", path), require_number(j, "a", path)};
  }
  if (type == "power") {
    if (!j.contains("p") || !j["p"].is_number_integer() || j["p"].get<int>() < 0) {
      throw Error(ErrorKind::Parse, path + ".p: required nonnegative integer");
    }
    return PowerTerm{require_complex(j, "c", path), j["p"].get<int>()};
  }
  throw Error(ErrorKind::Parse, path + ".type: unknown term kind '" + type + "'");
}

ChannelExpr parse_channel(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw Error(ErrorKind::Parse, path + ".kind: required string");
  }
  const auto kind = j["kind"].get<std::string>();
  if (kind == "exp_sum") {
    if (!j.contains("terms") || !j["terms"].is_array()) {
      throw Error(ErrorKind::Parse, path + ".terms: required array");
    }
    ExpSum sum;
    for (std::size_t i = 0; i < j["terms"].size(); ++i) {
      sum.terms.push_back(parse_term(j["terms"][i], path + ".terms[" + std::to_string(i) + "]"));
    }
    if (j.contains("strip")) {
      const double s = require_number(j, "strip", path);
      if (!(s > 0.0)) throw Error(ErrorKind::Validation, path + ".strip: must be positive");
      for (const auto& t : sum.terms) {
        if (const auto* q = std::get_if<InvQuadTerm>(&t); q && s > std::abs(q->a)) {
          throw Error(ErrorKind::Validation,
                      path + ".strip: exceeds the convergence strip |Im omega| < |a|");
        }
      }
      sum.strip = s;
    }
    return {sum};
  }
  if (kind == "monomial") {
    if (!j.contains("N") || !j["N"].is_number_integer()) {
      throw Error(ErrorKind::Parse, path + ".N: required integer");
    }
    return {MonomialPower{require_number(j, "a", path), j["N"].get<int>()}};
  }
  if (kind == "product") {
    if (!j.contains("factors") || !j["factors"].is_array()) {
      throw Error(ErrorKind::Parse, path + ".factors: required array");
    }
    ProductExpr p;
    for (std::size_t i = 0; i < j["factors"].size(); ++i) {
      p.factors.push_back(parse_channel(j["factors"][i], path + ".factors[" + std::to_string(i) + "]"));
    }
    return {p};
  }
  throw Error(ErrorKind::Parse, path + ".kind: unknown channel kind '" + kind + "'");
}

nlohmann::json term_to_json(const ExpTerm& term) {
  return std::visit(
      overloaded{
          [](const CosTerm& t) -> nlohmann::json {
            return {{"type", "cos"}, {"c", complex_to_json(t.c)}, {"k", t.k}, {"damping_a", t.damping}};
          },
          [](const SinTerm& t) -> nlohmann::json {
            return {{"type", "sin"}, {"c", complex_to_json(t.c)}, {"k", t.k}, {"damping_a", t.damping}};
          },
          [](const PoleTerm& t) -> nlohmann::json {
            return {{"type", "pole"}, {"c", complex_to_json(t.c)}, {"a", t.a}};
          },
          [](const InvQuadTerm& t) -> nlohmann::json {
            return {{"type", "inv_quad"}, {"c", complex_to_json(t.c)}, {"a", t.a}};
          },
          [](const PowerTerm& t) -> nlohmann::json {
            return {{"type", "power"}, {"c", complex_to_json(t.c)}, {"p", t.p}};
          },
      },
      term);
}

nlohmann::json channel_to_json(const ChannelExpr& expr) {
  return std::visit(overloaded{
                        [](const ExpSum& s) -> nlohmann::json {
                          nlohmann::json j{{"kind", "exp_sum"}, {"terms", nlohmann::json::array()}};
                          for (const auto& t : s.terms) j["terms"].push_back(term_to_json(t));
                          if (s.strip) j["strip"] = *s.strip;
                          return j;
                        },
                        [](const MonomialPower& m) -> nlohmann::json {
                          return {{"kind", "monomial"}, {"a", m.a}, {"N", m.n}};
                        },
                        [](const ProductExpr& p) -> nlohmann::json {
                          nlohmann::json j{{"kind", "product"}, {"factors", nlohmann::json::array()}};
                          for (const auto& f : p.factors) j["factors"].push_back(channel_to_json(f));
                          return j;
                        },
                    },
                    expr.form);
}

ExpTerm negate_term(const ExpTerm& term) {
  return std::visit([](auto t) -> ExpTerm {
    t.c = -t.c;
    return t;
  }, term);
}

ChannelExpr invert_channel(const ChannelExpr& expr) {
  return std::visit(overloaded{
                        [](const ExpSum& s) -> ChannelExpr {
                          ExpSum out{{}, s.strip};
                          for (const auto& t : s.terms) out.terms.push_back(negate_term(t));
                          return {out};
                        },
                        [](const MonomialPower& m) -> ChannelExpr {
                          return {MonomialPower{m.a, -m.n}};
                        },
                        [](const ProductExpr& p) -> ChannelExpr {
                          ProductExpr out;
                          for (const auto& f : p.factors) out.factors.push_back(invert_channel(f));
                          return {out};
                        },
                    },
                    expr.form);
}

std::optional<double> strip_of(const ChannelExpr& expr) {
  return std::visit(overloaded{
                        [](const ExpSum& s) { return s.strip; },
                        [](const MonomialPower&) { return std::optional<double>{}; },
                        [](const ProductExpr& p) {
                          std::optional<double> out;
                          for (const auto& f : p.factors) {
                            if (auto s = strip_of(f)) out = out ? std::min(*out, *s) : *s;
                          }
                          return out;
                        },
                    },
                    expr.form);
}

}  // namespace

Complex exponent(const ExpSum& sum, Complex omega) {
  Complex e = 0.0;
  for (const auto& t : sum.terms) e += term_value(t, omega);
  return e;
}

Complex exponent_derivative(const ExpSum& sum, Complex omega) {
  Complex e = 0.0;
  for (const auto& t : sum.terms) e += term_derivative(t, omega);
  return e;
}

Complex evaluate_channel(const ChannelExpr& expr, Complex omega) {
  const Complex value = std::visit(
      overloaded{
          [&](const ExpSum& s) { return std::exp(exponent(s, omega)); },
          [&](const MonomialPower& m) {
            if (m.n < 0 && omega == Complex(m.a)) pole_hit(omega, m.a);
            return std::pow(omega - m.a, m.n);
          },
          [&](const ProductExpr& p) {
            Complex v = 1.0;
            for (const auto& f : p.factors) v *= evaluate_channel(f, omega);
            return v;
          },
      },
      expr.form);
  check_finite(value, omega);
  return value;
}

Complex dlog_channel(const ChannelExpr& expr, Complex omega) {
  return std::visit(overloaded{
                        [&](const ExpSum& s) { return exponent_derivative(s, omega); },
                        [&](const MonomialPower& m) {
                          if (omega == Complex(m.a)) pole_hit(omega, m.a);
                          return static_cast<double>(m.n) / (omega - m.a);
                        },
                        [&](const ProductExpr& p) {
                          Complex v = 0.0;
                          for (const auto& f : p.factors) v += dlog_channel(f, omega);
                          return v;
                        },
                    },
                    expr.form);
}

std::optional<Complex> exact_log_channel(const ChannelExpr& expr, Complex omega) {
  return std::visit(overloaded{
                        [&](const ExpSum& s) -> std::optional<Complex> { return exponent(s, omega); },
                        [&](const MonomialPower& m) -> std::optional<Complex> {
                          if (m.n == 0) return Complex(0.0);
                          return std::nullopt;
                        },
                        [&](const ProductExpr& p) -> std::optional<Complex> {
                          Complex v = 0.0;
                          for (const auto& f : p.factors) {
                            auto part = exact_log_channel(f, omega);
                            if (!part) return std::nullopt;
                            v += *part;
                          }
                          return v;
                        },
                    },
                    expr.form);
}

std::vector<Complex> singular_points(const ChannelExpr& expr) {
  std::vector<Complex> out;
  std::visit(overloaded{
                 [&](const ExpSum& s) {
                   for (const auto& t : s.terms) {
                     if (const auto* p = std::get_if<PoleTerm>(&t)) out.push_back(p->a);
                     if (const auto* q = std::get_if<InvQuadTerm>(&t)) {
                       out.push_back(kI * q->a);
                       out.push_back(-kI * q->a);
                     }
                   }
                 },
                 [&](const MonomialPower& m) {
                   if (m.n != 0) out.push_back(m.a);
                 },
                 [&](const ProductExpr& p) {
                   for (const auto& f : p.factors) {
                     auto sub = singular_points(f);
                     out.insert(out.end(), sub.begin(), sub.end());
                   }
                 },
             },
             expr.form);
  return out;
}

bool is_exp_only(const ChannelExpr& expr) {
  return std::visit(overloaded{
                        [](const ExpSum&) { return true; },
                        [](const MonomialPower& m) { return m.n == 0; },
                        [](const ProductExpr& p) {
                          for (const auto& f : p.factors) {
                            if (!is_exp_only(f)) return false;
                          }
                          return true;
                        },
                    },
                    expr.form);
}

bool has_rational_exponent(const ChannelExpr& expr) {
  return std::visit(overloaded{
                        [](const ExpSum& s) {
                          for (const auto& t : s.terms) {
                            if (!term_is_rational(t)) return false;
                          }
                          return true;
                        },
                        [](const MonomialPower& m) { return m.n == 0; },
                        [](const ProductExpr& p) {
                          for (const auto& f : p.factors) {
                            if (!has_rational_exponent(f)) return false;
                          }
                          return true;
                        },
                    },
                    expr.form);
}

bool is_monomial_product(const ChannelExpr& expr) {
  return std::visit(overloaded{
                        [](const ExpSum& s) { return s.terms.empty(); },
                        [](const MonomialPower&) { return true; },
                        [](const ProductExpr& p) {
                          for (const auto& f : p.factors) {
                            if (!is_monomial_product(f)) return false;
                          }
                          return true;
                        },
                    },
                    expr.form);
}

DiagonalMonodromy parse_monodromy(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::Parse, "monodromy: expected an object");
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) throw Error(ErrorKind::Parse, "monodromy.preset: expected a string");
    return preset(doc["preset"].get<std::string>(), doc.value("params", nlohmann::json::object()));
  }
  DiagonalMonodromy m;
  if (!doc.contains("lambda") || !doc["lambda"].is_number_integer()) {
    throw Error(ErrorKind::Parse, "monodromy.lambda: required integer +1 or -1");
  }
  try {
    m.lambda = Lambda::from_int(doc["lambda"].get<int>());
  } catch (const Error& e) {
    throw Error(ErrorKind::Parse, std::string("monodromy.lambda: ") + e.what());
  }
  if (!doc.contains("channels") || !doc["channels"].is_array() || doc["channels"].empty()) {
    throw Error(ErrorKind::Parse, "monodromy.channels: required non-empty array");
  }
  for (std::size_t i = 0; i < doc["channels"].size(); ++i) {
    m.channels.push_back(parse_channel(doc["channels"][i], "monodromy.channels[" + std::to_string(i) + "]"));
  }
  m.name = doc.value("name", std::string("custom"));
  return m;
}

nlohmann::json to_json(const DiagonalMonodromy& mono) {
  nlohmann::json j{{"lambda", mono.lambda.value()}, {"name", mono.name}, {"channels", nlohmann::json::array()}};
  for (const auto& c : mono.channels) j["channels"].push_back(channel_to_json(c));
  return j;
}

DiagonalMonodromy einstein_rosen(double k, double a, double b, Lambda lambda) {
  DiagonalMonodromy m{lambda, {}, "einstein_rosen"};
  m.channels.push_back({ExpSum{{CosTerm{4.0 * b, k, a}}, std::nullopt}});
  m.channels.push_back({ExpSum{{CosTerm{-4.0 * b, k, a}}, std::nullopt}});
  return m;
}

DiagonalMonodromy kasner(double a, int n, Lambda lambda) {
  DiagonalMonodromy m{lambda, {}, "kasner"};
  m.channels.push_back({MonomialPower{a, n}});
  m.channels.push_back({MonomialPower{a, -n}});
  return m;
}

DiagonalMonodromy pulse(double a, double b, Lambda lambda) {
  if (a == 0.0) throw Error(ErrorKind::Validation, "pulse: a must be nonzero");
  DiagonalMonodromy m{lambda, {}, "pulse"};
  m.channels.push_back({ExpSum{{InvQuadTerm{4.0 * a * b, a}}, std::nullopt}});
  m.channels.push_back({ExpSum{{InvQuadTerm{-4.0 * a * b, a}}, std::nullopt}});
  return m;
}

DiagonalMonodromy constant_monodromy(Complex c, Lambda lambda) {
  if (c == Complex(0.0)) throw Error(ErrorKind::Validation, "constant monodromy must be nonzero");
  DiagonalMonodromy m{lambda, {}, "constant"};
  const Complex l = std::log(c);
  m.channels.push_back({ExpSum{{PowerTerm{l, 0}}, std::nullopt}});
  m.channels.push_back({ExpSum{{PowerTerm{-l, 0}}, std::nullopt}});
  return m;
}

DiagonalMonodromy multiply(const DiagonalMonodromy& a, const DiagonalMonodromy& b) {
  if (a.size() != b.size() || !(a.lambda == b.lambda)) {
    throw Error(ErrorKind::Validation, "monodromies differ in channel count or lambda");
  }
  DiagonalMonodromy m{a.lambda, {}, a.name + "*" + b.name};
  for (std::size_t j = 0; j < a.size(); ++j) {
    m.channels.push_back({ProductExpr{{a.channels[j], b.channels[j]}}});
  }
  return m;
}

DiagonalMonodromy inverse(const DiagonalMonodromy& mono) {
  DiagonalMonodromy m{mono.lambda, {}, "inverse(" + mono.name + ")"};
  for (const auto& c : mono.channels) m.channels.push_back(invert_channel(c));
  return m;
}

DiagonalMonodromy preset(const std::string& name, const nlohmann::json& params) {
  auto num = [&](const char* key) {
    if (!params.contains(key) || !params[key].is_number()) {
      throw Error(ErrorKind::Config, "preset " + name + ": missing numeric parameter '" + key + "'");
    }
    return params[key].get<double>();
  };
  const Lambda lambda = Lambda::from_int(params.value("lambda", -1));
  if (name == "einstein_rosen") return einstein_rosen(num("k"), num("a"), num("b"), lambda);
  if (name == "kasner") {
    if (!params.contains("N") || !params["N"].is_number_integer()) {
      throw Error(ErrorKind::Config, "preset kasner: missing integer parameter 'N'");
    }
    return kasner(num("a"), params["N"].get<int>(), lambda);
  }
  if (name == "pulse") return pulse(num("a"), num("b"), lambda);
  if (name == "constant") {
    if (!params.contains("c")) throw Error(ErrorKind::Config, "preset constant: missing parameter 'c'");
    return constant_monodromy(complex_from_json(params["c"]), lambda);
  }
  throw Error(ErrorKind::Config, "unknown preset '" + name + "'");
}

Complex evaluate_on_curve(const ChannelExpr& expr, Complex tau, const WeylPoint& point,
                          Lambda lambda) {
  return evaluate_channel(expr, spectral_map(tau, point, lambda));
}

std::vector<BoundarySamples> compose_on_contour(const DiagonalMonodromy& mono,
                                                const WeylPoint& point, ContourPtr contour) {
  if (!(contour->lambda() == mono.lambda)) {
    throw Error(ErrorKind::Config, "contour and monodromy use different lambda");
  }
  for (std::size_t j = 0; j < mono.size(); ++j) {
    for (const Complex s : singular_points(mono.channels[j])) {
      try {
        place_roots(s, point, *contour);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::BranchPoint || e.kind() == ErrorKind::InadmissibleContour) {
          auto detail = e.detail();
          detail["channel"] = j;
          detail["singularity"] = complex_to_json(s);
          throw Error(ErrorKind::InadmissibleContour,
                      "inadmissible contour for this monodromy at (rho, v)", detail);
        }
        throw;
      }
    }
  }
  std::vector<BoundarySamples> out;
  const auto z = contour->nodes();
  std::vector<Complex> omegas(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) omegas[k] = spectral_map(z[k], point, mono.lambda);
  for (std::size_t j = 0; j < mono.size(); ++j) {
    const auto& expr = mono.channels[j];
    if (auto strip = strip_of(expr)) {
      for (const auto& w : omegas) {
        if (std::abs(w.imag()) >= *strip) {
          throw Error(ErrorKind::InadmissibleContour, "contour image leaves the convergence strip",
                      {{"channel", j}, {"omega", complex_to_json(w)}, {"strip", *strip}});
        }
      }
    }
    std::vector<Complex> values(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
      values[k] = evaluate_channel(expr, omegas[k]);
      if (values[k] == Complex(0.0)) {
        throw Error(ErrorKind::InadmissibleContour, "channel vanishes on the contour",
                    {{"channel", j}, {"tau", complex_to_json(z[k])}});
      }
    }
    const Lambda lambda = mono.lambda;
    ScalarFn closed = [expr, point, lambda](Complex tau) {
      return evaluate_on_curve(expr, tau, point, lambda);
    };
    out.emplace_back(contour, std::move(values), std::move(closed));
  }
  return out;
}

double symmetry_residual(const DiagonalMonodromy& mono, const WeylPoint& point,
                         const Contour& contour) {
  double worst = 0.0;
  for (const auto& expr : mono.channels) {
    for (const Complex tau : contour.nodes()) {
      const Complex a = evaluate_on_curve(expr, tau, point, mono.lambda);
      const Complex b = evaluate_on_curve(expr, involution(tau, mono.lambda), point, mono.lambda);
      worst = std::max(worst, std::abs(a - b));
    }
  }
  return worst;
}

double determinant_deviation(const DiagonalMonodromy& mono, const WeylPoint& point,
                             const Contour& contour) {
  double worst = 0.0;
  for (const Complex tau : contour.nodes()) {
    Complex det = 1.0;
    for (const auto& expr : mono.channels) det *= evaluate_on_curve(expr, tau, point, mono.lambda);
    worst = std::max(worst, std::abs(det - 1.0));
  }
  return worst;
}

}  // namespace whgrav
