#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include "support.hpp"
#include "whgrav/contour.hpp"
#include "whgrav/error.hpp"
#include "whgrav/monodromy.hpp"
#include "whgrav/spectral.hpp"

using namespace whgrav;
using nlohmann::json;

namespace {

const Lambda kMinus = Lambda::minus();
const double kE = std::numbers::e;

template <class F>
Error error_of(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  return Error(ErrorKind::Verification, "no error");
}

const ExpSum& exp_sum(const ChannelExpr& c) { return std::get<ExpSum>(c.form); }

}  // namespace

TEST(Parse, EinsteinRosenDocument) {
  const json doc{{"lambda", -1},
                 {"channels",
                  {{{"kind", "exp_sum"}, {"terms", {{{"type", "cos"}, {"c", 4 * 0.7}, {"k", 1.5}, {"damping_a", 0.4}}}}},
                   {{"kind", "exp_sum"}, {"terms", {{{"type", "cos"}, {"c", -4 * 0.7}, {"k", 1.5}, {"damping_a", 0.4}}}}}}}};
  const auto m = parse_monodromy(doc);
  ASSERT_EQ(m.size(), 2u);
  const auto& t = std::get<CosTerm>(exp_sum(m.channels[0]).terms.at(0));
  EXPECT_EQ(t.c, Complex(2.8));
  EXPECT_EQ(t.k, 1.5);
  EXPECT_EQ(t.damping, 0.4);
  const auto preset_doc = parse_monodromy({{"preset", "einstein_rosen"}, {"params", {{"k", 1.5}, {"a", 0.4}, {"b", 0.7}}}});
  for (Complex w : {Complex(0.3, 0.1), Complex(-2.0, 0.5)}) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_LT(std::abs(evaluate_channel(m.channels[j], w) - evaluate_channel(preset_doc.channels[j], w)), 1e-15);
    }
    const Complex g = 4 * 0.7 * std::exp(-0.4 * 1.5) * std::cos(1.5 * w);
    EXPECT_LT(test::rel_err(evaluate_channel(m.channels[0], w), std::exp(g)), 1e-15);
    EXPECT_LT(test::rel_err(evaluate_channel(m.channels[1], w), std::exp(-g)), 1e-15);
  }
}

TEST(Parse, KasnerDocument) {
  const auto m = parse_monodromy({{"lambda", -1},
                                  {"channels", {{{"kind", "monomial"}, {"a", 1.1125}, {"N", 3}},
                                                {{"kind", "monomial"}, {"a", 1.1125}, {"N", -3}}}}});
  EXPECT_EQ(std::get<MonomialPower>(m.channels[0].form).n, 3);
  EXPECT_EQ(std::get<MonomialPower>(m.channels[1].form).n, -3);
  const auto k = kasner(1.1125, 3);
  const Complex w{0.4, 0.9};
  EXPECT_LT(test::rel_err(evaluate_channel(m.channels[0], w), std::pow(w - 1.1125, 3)), 1e-15);
  EXPECT_LT(test::rel_err(evaluate_channel(k.channels[1], w), std::pow(w - 1.1125, -3)), 1e-15);
  EXPECT_TRUE(is_monomial_product(m.channels[0]));
}

TEST(Parse, PulseDocument) {
  const double a = 1.3, b = 0.4;
  const auto m = parse_monodromy({{"lambda", -1},
                                  {"channels", {{{"kind", "exp_sum"}, {"terms", {{{"type", "inv_quad"}, {"c", 4 * a * b}, {"a", a}}}}},
                                                {{"kind", "exp_sum"}, {"terms", {{{"type", "inv_quad"}, {"c", -4 * a * b}, {"a", a}}}}}}}});
  const auto p = pulse(a, b);
  for (double w : {-1.0, 0.0, 0.7}) {
    const double want = std::exp(4 * a * b / (w * w + a * a));
    EXPECT_LT(test::rel_err(evaluate_channel(m.channels[0], w), want), 1e-15);
    EXPECT_LT(test::rel_err(evaluate_channel(p.channels[1], w), 1.0 / want), 1e-15);
  }
  EXPECT_TRUE(has_rational_exponent(m.channels[0]));
}

TEST(Parse, RoundTrip) {
  for (const auto& m : {einstein_rosen(1, 1, 0.5 * kE), kasner(2.0, 4), pulse(1.0, 0.5)}) {
    const auto back = parse_monodromy(to_json(m));
    EXPECT_EQ(to_json(back), to_json(m));
  }
}

TEST(Parse, ErrorsCarryPath) {
  const auto e = error_of([] {
    parse_monodromy({{"lambda", -1}, {"channels", {{{"kind", "exp_sum"}, {"terms", {{{"type", "tan"}, {"c", 1}}}}}}}});
  });
  EXPECT_EQ(e.kind(), ErrorKind::Parse);
  EXPECT_NE(std::string(e.what()).find("monodromy.channels[0].terms[0]"), std::string::npos);
  EXPECT_EQ(error_of([] { parse_monodromy({{"lambda", 2}, {"channels", json::array()}}); }).kind(), ErrorKind::Parse);
  EXPECT_EQ(error_of([] { parse_monodromy({{"lambda", -1}, {"channels", {{{"kind", "monomial"}, {"a", 1}}}}}); }).kind(),
            ErrorKind::Parse);
  EXPECT_EQ(error_of([] { parse_monodromy(json::array()); }).kind(), ErrorKind::Parse);
}

TEST(Parse, NonconvergentStripIsValidationError) {
  const auto e = error_of([] {
    parse_monodromy({{"lambda", -1},
                     {"channels", {{{"kind", "exp_sum"}, {"strip", 2.0}, {"terms", {{{"type", "inv_quad"}, {"c", 1}, {"a", 1.0}}}}}}}});
  });
  EXPECT_EQ(e.kind(), ErrorKind::Validation);
}

TEST(Preset, UnknownIsConfigError) {
  EXPECT_EQ(error_of([] { preset("schwarzschild", json::object()); }).kind(), ErrorKind::Config);
  EXPECT_EQ(error_of([] { preset("kasner", {{"a", 1.0}}); }).kind(), ErrorKind::Config);
}

TEST(Evaluate, Examples) {
  const auto er = einstein_rosen(1.0, 1.0, 0.5 * kE);
  EXPECT_LT(test::rel_err(evaluate_channel(er.channels[0], 0.0), kE * kE), 1e-15);
  const ChannelExpr mono{MonomialPower{0.0, 4}};
  EXPECT_EQ(evaluate_channel(mono, 2.0), Complex(16.0));
  const double a = 0.6, b = 0.35;
  EXPECT_LT(test::rel_err(evaluate_channel(pulse(a, b).channels[0], 0.0), std::exp(4 * b / a)), 1e-15);
}

TEST(Evaluate, PoleIsEvaluationError) {
  const ChannelExpr c{ExpSum{{PoleTerm{1.0, 0.5}}, std::nullopt}};
  const auto e = error_of([&] { evaluate_channel(c, 0.5); });
  EXPECT_EQ(e.kind(), ErrorKind::Evaluation);
  EXPECT_FALSE(e.detail().empty());
  const auto q = error_of([] { evaluate_channel(pulse(1.0, 1.0).channels[0], Complex(0, 1.0)); });
  EXPECT_EQ(q.kind(), ErrorKind::Evaluation);
}

TEST(Evaluate, DlogMatchesDifference) {
  const Complex w{0.3, 0.4};
  const ChannelExpr prod{ProductExpr{{kasner(1.0, 2).channels[0], pulse(1.0, 0.5).channels[0],
                                      einstein_rosen(2.0, 0.5, 0.3).channels[1]}}};
  const auto fd = test::central_diff([&](double h) { return std::log(evaluate_channel(prod, w + h)); }, 0.0, 1e-3);
  EXPECT_LT(std::abs(dlog_channel(prod, w) - fd), 1e-9);
}

TEST(Evaluate, SingularPoints) {
  const auto s = singular_points(pulse(2.0, 1.0).channels[0]);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(std::abs(s[0] * s[1] - 4.0), 0.0, 1e-15);
  const auto k = singular_points(kasner(1.5, 3).channels[0]);
  ASSERT_EQ(k.size(), 1u);
  EXPECT_EQ(k[0], Complex(1.5));
}

TEST(Compose, KasnerOnCircle) {
  auto c = unit_circle(kMinus, 128);
  const WeylPoint p(1.0, 0.0);
  for (int n : {1, 2, 3}) {
    const auto s = compose_on_contour(kasner(3.56 / 3.2, n), p, c);
    ASSERT_EQ(s.size(), 2u);
    for (int k = 0; k < c->node_count(); ++k) {
      const Complex t = c->nodes()[k];
      const Complex want = std::pow(0.5 * p.rho() * (t - 1.6) * (t - 0.625) / t, n);
      EXPECT_LT(test::rel_err(s[0].values[k], want), 1e-13);
      EXPECT_LT(test::rel_err(s[1].values[k], 1.0 / want), 1e-13);
    }
  }
}

TEST(Compose, EinsteinRosenFiniteEverywhere) {
  const std::vector<Complex> in{1.6}, out{0.625};
  for (const auto& c : {unit_circle(kMinus, 256), enclosing_contour(in, out, kMinus, 512)}) {
    for (const auto& s : compose_on_contour(einstein_rosen(1, 1, 0.5 * kE), WeylPoint(0.7, 0.3), c)) {
      for (Complex v : s.values) EXPECT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag()));
    }
  }
}

TEST(Compose, PulsePoleOnContourIsRejected) {
  const double a = 0.8;
  const WeylPoint p(1.0, 0.5);
  const Complex tau_a = spectral_roots(Complex(0, -a), p, kMinus).phi;
  const double r = std::abs(tau_a);
  const double t0 = std::arg(tau_a);
  Contour::Curve through{[r, t0](double t) { return std::polar(r, t + t0); },
                         [r, t0](double t) { return kI * std::polar(r, t + t0); }};
  auto c = Contour::from_curve(through, kMinus, 256);
  const auto e = error_of([&] { compose_on_contour(pulse(a, 1.0), p, c); });
  EXPECT_EQ(e.kind(), ErrorKind::InadmissibleContour);
  EXPECT_NE(std::string(e.what()).find("inadmissible contour for this monodromy"), std::string::npos);
}

TEST(Compose, StripIsEnforced) {
  ExpSum sum{{InvQuadTerm{1.0, 1.0}}, 0.5};
  DiagonalMonodromy m{kMinus, {{sum}}, "strip"};
  // ω is real on the unit circle for λ = −1; a bulge near i gives it an imaginary part.
  auto c = deformed_contour({{kPi / 2, 0.4, {0.6, 0.0}}}, kMinus, 256);
  EXPECT_EQ(error_of([&] { compose_on_contour(m, WeylPoint(1.0, 0.0), c); }).kind(), ErrorKind::InadmissibleContour);
  EXPECT_NO_THROW(compose_on_contour(m, WeylPoint(1.0, 0.0), unit_circle(kMinus, 64)));
}

TEST(Symmetry, ResidualIsTiny) {
  const std::vector<Complex> in{1.6}, out{0.625};
  const std::vector<ContourPtr> contours{unit_circle(kMinus, 256), enclosing_contour(in, out, kMinus, 512)};
  const std::vector<DiagonalMonodromy> families{einstein_rosen(1, 1, 0.5 * kE), kasner(3.0, 2), pulse(1.0, 0.5)};
  for (const auto& c : contours) {
    for (const auto& m : families) {
      for (const WeylPoint p : {WeylPoint(1.0, 0.3), WeylPoint(0.5, -1.0), WeylPoint(1.5, 1.0)}) {
        EXPECT_LT(symmetry_residual(m, p, *c), 1e-10) << m.name;
        EXPECT_LT(determinant_deviation(m, p, *c), 1e-10) << m.name;
      }
    }
  }
  EXPECT_LT(symmetry_residual(einstein_rosen(1, 1, 0.5 * kE), WeylPoint(1.0, 0.3), *contours[0]), 1e-10);
  EXPECT_LT(symmetry_residual(kasner(3.56 / 3.2, 2), WeylPoint(1.0, 0.0), *contours[1]), 1e-10);
}

TEST(Pulse, EqualsItsWaveNumberIntegral) {
  const double a = 0.9, b = 0.6;
  boost::math::quadrature::exp_sinh<double> integrator;
  for (double w : {-3.0, -1.0, 0.0, 0.4, 2.5}) {
    const double integral = integrator.integrate([&](double k) { return std::exp(-a * k) * std::cos(k * w); });
    const Complex closed = evaluate_channel(pulse(a, b).channels[0], w);
    EXPECT_LT(std::abs(std::exp(4 * b * integral) - closed) / std::abs(closed), 1e-8) << w;
  }
}

TEST(Algebra, MultiplyAndInverse) {
  const auto m = multiply(einstein_rosen(1, 1, 0.3), pulse(1.0, 0.2));
  const auto inv = inverse(m);
  const Complex w{0.2, 0.3};
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_LT(std::abs(evaluate_channel(m.channels[j], w) * evaluate_channel(inv.channels[j], w) - 1.0), 1e-14);
  }
  EXPECT_EQ(error_of([] { multiply(kasner(1, 1), constant_monodromy(2.0, Lambda::plus())); }).kind(),
            ErrorKind::Validation);
}
