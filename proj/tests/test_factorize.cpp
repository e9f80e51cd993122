#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"
#include "whgrav/cauchy.hpp"
#include "whgrav/contour.hpp"
#include "whgrav/error.hpp"
#include "whgrav/factorize.hpp"
#include "whgrav/monodromy.hpp"
#include "whgrav/spectral.hpp"

using namespace whgrav;

namespace {

const Lambda kMinus = Lambda::minus();
const double kHalfE = 0.5 * std::numbers::e;
const double kA = 3.56 / 3.2;

template <class F>
ErrorKind kind_of(F f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Verification;
}

ContourPtr circle() {
  static const auto c = unit_circle(kMinus, 256);
  return c;
}

ContourPtr tau_a_inside() {
  static const auto c = [] {
    const std::vector<Complex> in{1.6}, out{0.625};
    return enclosing_contour(in, out, kMinus, 1024);
  }();
  return c;
}

const std::vector<Complex> kProbes{{0.0, 0.0}, {0.3, 0.2}, {-0.5, 0.1}, {0.1, -0.6}};

double max_gap(const CanonicalSolution& a, const CanonicalSolution& b) {
  double gap = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    gap = std::max(gap, test::rel_err(a.m(j), b.m(j)));
    for (Complex t : kProbes) gap = std::max(gap, test::rel_err(a.x(j, t), b.x(j, t)));
  }
  return gap;
}

}  // namespace

TEST(CanonicalSolve, EinsteinRosenNormalization) {
  const double k = 1.0, a = 1.0, b = kHalfE;
  for (const WeylPoint p : {WeylPoint(1.0, 0.0), WeylPoint(0.3, 1.2), WeylPoint(3.0, -2.0)}) {
    const auto s = canonical_solve(einstein_rosen(k, a, b), p, circle());
    const double g = 4 * b * std::exp(-a * k) * std::cos(k * p.v()) * test::series_j0(k * p.rho());
    EXPECT_LT(test::rel_err(s.m(0), std::exp(g)), 1e-12);
    EXPECT_LT(test::rel_err(s.m(1), std::exp(-g)), 1e-12);
  }
}

TEST(CanonicalSolve, KasnerTauAInside) {
  const WeylPoint p(1.0, 0.0);
  for (int n : {1, 2, 3, 4}) {
    for (Backend b : {Backend::RationalZeroPole, Backend::QuadratureCauchy}) {
      const auto s = canonical_solve(kasner(kA, n), p, tau_a_inside(), {b});
      const Complex want = std::pow(-0.5 * p.rho() * 0.625, n);
      EXPECT_LT(test::rel_err(s.m(0), want), 1e-12) << n;
      EXPECT_LT(test::rel_err(s.m(1), 1.0 / want), 1e-12) << n;
    }
  }
}

TEST(CanonicalSolve, Constant) {
  const Complex c{1.7, -0.4};
  const auto s = canonical_solve(constant_monodromy(c), WeylPoint(0.8, 0.1), circle());
  EXPECT_LT(std::abs(s.m(0) - c), 1e-14);
  EXPECT_LT(std::abs(s.m(1) - 1.0 / c), 1e-14);
  for (Complex t : kProbes) {
    EXPECT_LT(std::abs(s.x(0, t) - 1.0), 1e-14);
    EXPECT_LT(std::abs(s.x(1, t) - 1.0), 1e-14);
  }
}

TEST(CanonicalSolve, LambdaMismatchIsConfigError) {
  EXPECT_EQ(kind_of([] { canonical_solve(kasner(1.0, 1), WeylPoint(1.0, 0.0), unit_circle(Lambda::plus(), 64)); }),
            ErrorKind::Config);
}

TEST(CanonicalSolve, BackendMustFitChannel) {
  EXPECT_EQ(kind_of([] {
              canonical_solve(einstein_rosen(1, 1, 1), WeylPoint(1.0, 0.0), circle(), {Backend::RationalZeroPole});
            }),
            ErrorKind::Config);
  EXPECT_EQ(kind_of([] { backend_from_string("magic"); }), ErrorKind::Config);
  EXPECT_EQ(backend_from_string(to_string(Backend::PartialFraction)), Backend::PartialFraction);
}

TEST(RationalZeroPole, SplitAtOnePointSix) {
  const WeylPoint p(1.0, 0.0);
  const ChannelExpr ch{MonomialPower{kA, 2}};
  const auto split = rational_zero_pole_factorize(ch, p, *tau_a_inside());
  EXPECT_LT(std::abs(split.normalization - 0.3125 * 0.3125), 1e-15);
  for (Complex t : kProbes) {
    const Complex want = std::pow((t - 0.625) / -0.625, 2);
    EXPECT_LT(std::abs(split.plus(t) - want), 1e-14);
  }
  // The full product reproduces (ω − a)² on the curve.
  for (Complex t : tau_a_inside()->nodes()) {
    const Complex w = spectral_map(t, p, kMinus);
    EXPECT_LT(test::rel_err(split.minus(t) * split.plus(t), std::pow(w - kA, 2)), 1e-13);
  }
}

TEST(RationalZeroPole, ZeroExponentIsTrivial) {
  const auto split = rational_zero_pole_factorize(ChannelExpr{MonomialPower{kA, 0}}, WeylPoint(1.0, 0.0), *circle());
  EXPECT_EQ(split.normalization, Complex(1.0));
  for (Complex t : kProbes) {
    EXPECT_EQ(split.plus(t), Complex(1.0));
    if (t != Complex(0.0)) EXPECT_EQ(split.minus(t), Complex(1.0));
  }
}

TEST(RationalZeroPole, AgreesWithQuadrature) {
  for (const auto& c : {circle(), tau_a_inside()}) {
    for (const WeylPoint p : {WeylPoint(1.0, 0.0), WeylPoint(0.7, 0.4)}) {
      const auto rat = canonical_solve(kasner(kA, 3), p, c, {Backend::RationalZeroPole});
      const auto quad = canonical_solve(kasner(kA, 3), p, c, {Backend::QuadratureCauchy});
      EXPECT_LT(max_gap(rat, quad), 1e-9);
      // On the curve as well.
      for (Complex t : c->nodes()) {
        EXPECT_LT(test::rel_err(rat.x(0, t), quad.x(0, t)), 1e-9);
      }
    }
  }
}

TEST(PartialFraction, PulseResidues) {
  const double a = 1.0, b = 0.5;
  const WeylPoint p(1.0, 0.5);
  const double rho = p.rho();
  const auto rm = spectral_roots(Complex(0, -a), p, kMinus);  // τ_a, τ̃_a
  const auto rp = spectral_roots(Complex(0, a), p, kMinus);   // τ_{−a}, τ̃_{−a}
  const Complex tau_a = rm.phi, tau_a_t = rm.phi_tilde, tau_ma = rp.phi, tau_ma_t = rp.phi_tilde;
  // {τ_a, τ̃_{−a}} outside.
  const std::vector<Complex> in{tau_a_t, tau_ma}, out{tau_a, tau_ma_t};
  auto c = enclosing_contour(in, out, kMinus, 1024);

  // Residue of 4ab/(ω² + a²) at a simple root of ω² + a², ω' = ρ(τ² − 1)/(2τ²).
  auto residue = [&](Complex t) {
    const Complex w = spectral_map(t, p, kMinus);
    return 4 * a * b / (2.0 * w * rho * (t * t - 1.0) / (2.0 * t * t));
  };
  const Complex A = residue(tau_a), D = residue(tau_ma_t);
  const ChannelExpr ch = pulse(a, b).channels[0];
  const auto split = partial_fraction_projection(ch, p, *c);
  EXPECT_LT(std::abs(split.plus_at_zero() - (-A / tau_a - D / tau_ma_t)), 1e-12);

  // Residues in closed form give −(4ib/ρ)(1/(τ_a − τ̃_a) + 1/(τ_{−a} − τ̃_{−a})); the
  // opposite overall sign is the b ↦ −b member of the family.
  const Complex closed = 4.0 * kI * b / rho * (1.0 / (tau_a - tau_a_t) + 1.0 / (tau_ma - tau_ma_t));
  EXPECT_LT(std::abs(split.plus_at_zero() + closed), 1e-12);

  auto gen = test::rng();
  std::uniform_int_distribution<int> node(0, c->node_count() - 1);
  for (int i = 0; i < 20; ++i) {
    const Complex t = c->nodes()[node(gen)];
    const Complex f = exponent(std::get<ExpSum>(ch.form), spectral_map(t, p, kMinus));
    EXPECT_LT(std::abs(split.plus(t) + split.minus(t) - f), 1e-10);
  }
  const auto samples = BoundarySamples::sample(c, [&](Complex t) {
    return exponent(std::get<ExpSum>(ch.form), spectral_map(t, p, kMinus));
  });
  EXPECT_LT(std::abs(split.plus_at_zero() - ProjectionSplit(samples).plus_at_zero()), 1e-9);
}

TEST(PartialFraction, AgreesWithQuadratureOnGrid) {
  const auto mono = pulse(1.0, 0.5);
  for (const WeylPoint p : {WeylPoint(0.5, -2.0), WeylPoint(1.0, 0.0), WeylPoint(3.0, 1.5)}) {
    const auto pf = canonical_solve(mono, p, circle(), {Backend::PartialFraction});
    const auto qd = canonical_solve(mono, p, circle(), {Backend::QuadratureCauchy});
    EXPECT_LT(max_gap(pf, qd), 1e-9);
  }
}

TEST(Deform, KasnerBecomesIndependentOfA) {
  for (int n : {1, 2, 3}) {
    for (const WeylPoint p : {WeylPoint(1.0, 0.0), WeylPoint(0.6, -0.3)}) {
      std::vector<Complex> ms;
      for (double a : {kA, 2.0, 3.0}) {
        const auto s = deform(canonical_solve(kasner(a, 2 * n), p, circle()), DeformationSpec::unimodular(a, n));
        const double want = std::pow(0.5 * p.rho(), 2 * n);
        EXPECT_LT(test::rel_err(s.m(0), want), 1e-12);
        EXPECT_LT(test::rel_err(s.m(1), 1.0 / want), 1e-12);
        ms.push_back(s.m(0));
      }
      EXPECT_LT(std::abs(ms[0] - ms[2]), 1e-12);
    }
  }
}

TEST(Deform, KasnerClosedFormPlusFactor) {
  // X_m for N = 2, n = 1: ((τ − τ_a)(τ − τ̃_a))/(τ_a τ̃_a) after removing both roots.
  const WeylPoint p(1.0, 0.0);
  const auto s = deform(canonical_solve(kasner(kA, 2), p, circle()), DeformationSpec::unimodular(kA, 1));
  for (Complex t : kProbes) {
    const Complex want = (t - 1.6) * (t - 0.625) / (1.6 * 0.625);
    EXPECT_LT(test::rel_err(s.x(0, t), want), 1e-13);
    EXPECT_LT(test::rel_err(s.x(1, t), 1.0 / want), 1e-13);
  }
}

TEST(Deform, EmptySpecIsIdentity) {
  const auto s = canonical_solve(einstein_rosen(1, 1, kHalfE), WeylPoint(0.9, 0.2), circle());
  const auto d = deform(s, DeformationSpec{});
  EXPECT_EQ(max_gap(s, d), 0.0);
  EXPECT_TRUE(DeformationSpec{}.empty());
}

TEST(Deform, FactorProperties) {
  const WeylPoint p(1.0, 0.2);
  const auto r = deformation_factor(Complex(0.4, 1.3), p, *circle());
  EXPECT_EQ(r.value(0.0), Complex(1.0));
  EXPECT_EQ(circle()->locate(r.tau_i), PointLocation::Outside);
  EXPECT_EQ(circle()->locate(r.tau_tilde_i), PointLocation::Inside);
  EXPECT_LT(std::abs(r.alpha() - (-kMinus.real() * r.tau_i * r.tau_i)), 1e-13 * std::norm(r.tau_i));
  auto gen = test::rng();
  std::uniform_real_distribution<double> mod(0.3, 3.0), arg(-kPi, kPi);
  const double l = kMinus.real();
  for (int i = 0; i < 100; ++i) {
    const Complex t = std::polar(mod(gen), arg(gen));
    // Normalized factor: R⁻¹(τ) = R(−λ/τ)/α.
    EXPECT_LT(std::abs(1.0 / r.value(t) - r.value(-l / t) / r.alpha()), 1e-12 * std::abs(1.0 / r.value(t)) + 1e-14);
    // Bare ratio: its inverse is α times its reflection.
    auto ratio = [&](Complex z) { return (z - r.tau_tilde_i) / (z - r.tau_i); };
    EXPECT_LT(std::abs(1.0 / ratio(t) - r.alpha() * ratio(-l / t)), 1e-12 * std::abs(1.0 / ratio(t)) + 1e-14);
  }
}

TEST(Deform, JsonRoundTrip) {
  auto spec = DeformationSpec::unimodular(Complex(0.3, 2.0), 2);
  ASSERT_EQ(spec.channels.size(), 2u);
  EXPECT_EQ(spec.channels[1][0].multiplicity, -2);
  const auto back = DeformationSpec::from_json(spec.to_json());
  EXPECT_EQ(back.to_json(), spec.to_json());
  EXPECT_EQ(kind_of([] { DeformationSpec::from_json({{"channels", 3}}); }), ErrorKind::Parse);
}

TEST(Deform, TooManyChannelsIsValidationError) {
  const auto s = canonical_solve(kasner(2.0, 1), WeylPoint(1.0, 0.0), circle());
  DeformationSpec spec{{{{Complex(0, 1), 1}}, {}, {}}};
  EXPECT_EQ(kind_of([&] { deform(s, spec); }), ErrorKind::Validation);
}

TEST(Invert, EinsteinRosenFlipsB) {
  const WeylPoint p(0.8, -0.3);
  const auto s = canonical_solve(einstein_rosen(1.2, 0.5, 0.7), p, circle());
  const auto flipped = canonical_solve(einstein_rosen(1.2, 0.5, -0.7), p, circle());
  EXPECT_LT(max_gap(invert_solution(s), flipped), 1e-12);
  EXPECT_LT(factorization_residual(invert_solution(s)), 1e-9);
  EXPECT_EQ(max_gap(invert_solution(invert_solution(s)), s), 0.0);
}

TEST(Compose, SuperposedWaves) {
  const auto m1 = einstein_rosen(1.0, 1.0, kHalfE), m2 = einstein_rosen(2.5, 0.5, 0.3);
  for (const WeylPoint p : {WeylPoint(1.0, 0.0), WeylPoint(0.5, 0.7)}) {
    const auto s1 = canonical_solve(m1, p, circle());
    const auto s2 = canonical_solve(m2, p, circle());
    const auto prod = multiply_solutions(s1, s2);
    EXPECT_LT(max_gap(prod, canonical_solve(multiply(m1, m2), p, circle())), 1e-9);
    EXPECT_LT(factorization_residual(prod), 1e-9);
    const auto other = multiply_solutions(s2, s1);
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_EQ(prod.m(j), other.m(j));
      for (Complex t : kProbes) EXPECT_EQ(prod.x(j, t), other.x(j, t));
    }
  }
}

TEST(Compose, GroupLaws) {
  const WeylPoint p(0.9, 0.1);
  const auto a = canonical_solve(einstein_rosen(1, 1, 0.4), p, circle());
  const auto b = canonical_solve(kasner(2.0, 1), p, circle());
  const auto c = deform(canonical_solve(pulse(1.0, 0.5), p, circle()), DeformationSpec::unimodular(Complex(0.3, 2.0), 1));
  const auto e = identity_solution(p, circle());
  EXPECT_LT(max_gap(multiply_solutions(multiply_solutions(a, b), c), multiply_solutions(a, multiply_solutions(b, c))),
            1e-14);
  EXPECT_LT(max_gap(multiply_solutions(a, e), a), 1e-15);
  const auto u = multiply_solutions(c, invert_solution(c));
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_LT(std::abs(u.m(j) - 1.0), 1e-14);
    for (Complex t : kProbes) EXPECT_LT(std::abs(u.x(j, t) - 1.0), 1e-13);
  }
}

TEST(Compose, DifferentContoursAreRejected) {
  const WeylPoint p(1.0, 0.0);
  const auto a = canonical_solve(einstein_rosen(1, 1, 0.4), p, circle());
  const auto b = canonical_solve(kasner(kA, 4), p, tau_a_inside());
  EXPECT_EQ(kind_of([&] { multiply_solutions(a, b); }), ErrorKind::ContourMismatch);
  const auto same_shape = canonical_solve(kasner(2.0, 1), p, unit_circle(kMinus, 256));
  EXPECT_EQ(kind_of([&] { multiply_solutions(a, same_shape); }), ErrorKind::ContourMismatch);
  const auto elsewhere = canonical_solve(kasner(2.0, 1), WeylPoint(0.5, 0.0), circle());
  EXPECT_EQ(kind_of([&] { multiply_solutions(a, elsewhere); }), ErrorKind::Validation);
}

TEST(Property, NormalizationAndWhmtIdentity) {
  std::vector<SolutionFamily> families{
      test::family_of(einstein_rosen(1, 1, kHalfE), circle()),
      test::family_of(kasner(3.0, 2), circle()),
      test::family_of(pulse(1.0, 0.5), circle()),
      test::family_of(kasner(kA, 2), tau_a_inside()),
      test::family_of(einstein_rosen(1, 1, kHalfE), circle(), Backend::Auto,
                      DeformationSpec::unimodular(Complex(0.3, 2.0), 1)),
      test::family_of(kasner(3.0, 2), circle(), Backend::Auto, DeformationSpec::unimodular(3.0, 1)),
      test::family_of(pulse(1.0, 0.5), circle(), Backend::Auto, DeformationSpec::unimodular(Complex(0.3, 2.0), 2)),
  };
  const Grid g{0.5, 1.5, -1.0, 1.0, 3, 3};
  for (const auto& f : families) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto s = f(g.point(i));
      for (std::size_t j = 0; j < s.size(); ++j) EXPECT_LT(std::abs(s.x(j, 0.0) - 1.0), 1e-10);
      EXPECT_LT(factorization_residual(s), 1e-8);
    }
  }
}

TEST(Property, PlusFactorHasNoNegativeModes) {
  auto c = circle();
  const WeylPoint p(0.8, 0.3);
  const Complex w{0.3, 2.0};
  auto check = [&](const CanonicalSolution& s, const std::optional<DeformationFactor>& r) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      std::vector<Complex> logs;
      for (Complex t : c->nodes()) {
        Complex v = s.channels[j].x->log_value(t);
        if (r) v -= (j == 0 ? 1.0 : -1.0) * std::log(r->value(t));
        logs.push_back(v);
      }
      const auto coeff = laurent_coefficients(BoundarySamples(c, logs));
      const int half = c->node_count() / 2;
      for (int n = -half + 1; n < 0; ++n) ASSERT_LT(std::abs(coeff[n + half - 1]), 1e-9) << n;
    }
  };
  for (const auto& m : {einstein_rosen(1, 1, kHalfE), pulse(1.0, 0.5)}) {
    const auto s = canonical_solve(m, p, c);
    check(s, std::nullopt);
    check(deform(s, DeformationSpec::unimodular(w, 1)), deformation_factor(w, p, *c));
  }
}

TEST(Property, BackendsAgree) {
  const WeylPoint p(1.1, -0.4);
  const auto q = canonical_solve(pulse(1.0, 0.5), p, circle(), {Backend::QuadratureCauchy});
  const auto f = canonical_solve(pulse(1.0, 0.5), p, circle(), {Backend::PartialFraction});
  EXPECT_LT(max_gap(q, f), 1e-9);
  const auto kq = canonical_solve(kasner(2.0, 3), p, circle(), {Backend::QuadratureCauchy});
  const auto kr = canonical_solve(kasner(2.0, 3), p, circle(), {Backend::RationalZeroPole});
  EXPECT_LT(max_gap(kq, kr), 1e-9);
}

TEST(Property, PulseContourClassesGiveTwoSolutions) {
  const double a = 1.0, b = 0.5;
  const WeylPoint p(1.0, 0.5);
  const auto rp = spectral_roots(Complex(0, a), p, kMinus);
  const auto rm = spectral_roots(Complex(0, -a), p, kMinus);
  std::vector<Complex> values;
  for (Complex ip : {rp.phi, rp.phi_tilde}) {
    for (Complex im : {rm.phi, rm.phi_tilde}) {
      const std::vector<Complex> in{ip, im};
      const std::vector<Complex> out{involution(ip, kMinus), involution(im, kMinus)};
      auto c = enclosing_contour(in, out, kMinus, 1024);
      values.push_back(canonical_solve(pulse(a, b), p, c, {Backend::PartialFraction}).channels[0].log_m);
    }
  }
  std::vector<Complex> classes;
  for (Complex z : values) {
    if (std::none_of(classes.begin(), classes.end(),
                     [&](Complex c) { return std::abs(z - c) < 1e-9 || std::abs(z + c) < 1e-9; })) {
      classes.push_back(z);
    }
  }
  EXPECT_EQ(classes.size(), 2u);
}

TEST(Taylor, RationalPlusFactor) {
  const auto s = canonical_solve(kasner(kA, 2), WeylPoint(1.0, 0.0), tau_a_inside());
  const auto c = x_taylor(s, 0, 3);
  const double r = 0.625;
  EXPECT_LT(std::abs(c[0] - 1.0), 1e-14);
  EXPECT_LT(std::abs(c[1] + 2.0 / r), 1e-12);
  EXPECT_LT(std::abs(c[2] - 1.0 / (r * r)), 1e-12);
  EXPECT_LT(std::abs(c[3]), 1e-12);
}

TEST(Json, SolutionDocument) {
  const auto s = canonical_solve(kasner(2.0, 1), WeylPoint(1.0, 0.0), circle());
  const auto j = to_json(s);
  EXPECT_EQ(j.at("channels").size(), 2u);
  EXPECT_TRUE(j.contains("contour_ref"));
  EXPECT_EQ(j.at("channels")[0].at("backend"), "rational");
}
