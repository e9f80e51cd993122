#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"
#include "whgrav/contour.hpp"
#include "whgrav/error.hpp"
#include "whgrav/spectral.hpp"

using namespace whgrav;

namespace {

const Lambda kMinus = Lambda::minus();
const Lambda kPlus = Lambda::plus();

bool has_failure(const AdmissibilityReport& r, const std::string& needle) {
  return std::any_of(r.failures.begin(), r.failures.end(),
                     [&](const std::string& f) { return f.find(needle) != std::string::npos; });
}

ContourPtr split_contour(bool tau_a_inside) {
  const std::vector<Complex> a{1.6}, b{0.625};
  return tau_a_inside ? enclosing_contour(a, b, kMinus, 512) : enclosing_contour(b, a, kMinus, 512);
}

}  // namespace

TEST(UnitCircle, FixedPointsOnCurve) {
  auto m = unit_circle(kMinus, 16);
  EXPECT_EQ(m->locate(1.0), PointLocation::OnContour);
  EXPECT_EQ(m->locate(-1.0), PointLocation::OnContour);
  auto p = unit_circle(kPlus, 16);
  EXPECT_EQ(p->locate(kI), PointLocation::OnContour);
  EXPECT_EQ(p->locate(-kI), PointLocation::OnContour);
  EXPECT_NEAR(std::abs(kMinus.fixed_point() - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(kPlus.fixed_point() - kI), 0.0, 1e-15);
}

TEST(UnitCircle, InvolutionKeepsNodesOnCircle) {
  auto c = unit_circle(kMinus, 16);
  for (Complex t : c->nodes()) EXPECT_NEAR(std::abs(involution(t, kMinus)), 1.0, 1e-15);
}

TEST(UnitCircle, TrapezoidWeights) {
  auto c = unit_circle(kMinus, 16);
  for (int k = 0; k < 16; ++k) {
    const Complex t = c->nodes()[k];
    EXPECT_NEAR(std::abs(t - std::polar(1.0, 2 * kPi * k / 16)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c->weights()[k] - kI * t * (2 * kPi / 16)), 0.0, 1e-15);
  }
}

TEST(UnitCircle, RejectsBadNodeCounts) {
  for (int n : {0, 4, 6, 15, 17}) {
    try {
      unit_circle(kMinus, n);
      ADD_FAILURE() << n;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Config);
    }
  }
  EXPECT_NO_THROW(unit_circle(kMinus, 8));
}

TEST(Involution, Examples) {
  EXPECT_EQ(involution(2.0, kMinus), Complex(0.5));
  EXPECT_NEAR(std::abs(involution(kI, kPlus) - kI), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(involution(1.6, kMinus) - 0.625), 0.0, 1e-16);
}

TEST(Involution, ZeroIsDomainError) {
  try {
    involution(0.0, kMinus);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(Involution, IsAnInvolution) {
  auto gen = test::rng();
  std::uniform_real_distribution<double> mod(1e-3, 1e3), arg(-kPi, kPi);
  for (Lambda l : {kMinus, kPlus}) {
    for (int i = 0; i < 1000; ++i) {
      const Complex t = std::polar(mod(gen), arg(gen));
      EXPECT_LE(std::abs(involution(involution(t, l), l) - t), 4e-16 * std::abs(t));
    }
  }
}

TEST(Locate, UnitCircle) {
  auto c = unit_circle(kMinus, 64);
  EXPECT_EQ(locate(*c, 0.0), PointLocation::Inside);
  EXPECT_EQ(locate(*c, 3.0), PointLocation::Outside);
  EXPECT_EQ(locate(*c, std::polar(1.0, 0.123)), PointLocation::OnContour);
  EXPECT_EQ(to_string(PointLocation::OnContour), "on_contour");
}

TEST(Admissibility, UnitCircle) {
  const auto r = is_admissible(*unit_circle(kMinus, 64));
  EXPECT_TRUE(r.admissible);
  EXPECT_TRUE(r.failures.empty());
  EXPECT_EQ(r.winding_about_origin, 1);
}

TEST(Admissibility, OffsetCircleDoesNotEncircleOrigin) {
  Contour::Curve curve{[](double t) { return 3.0 + 2.0 * std::exp(kI * t); },
                       [](double t) { return 2.0 * kI * std::exp(kI * t); }};
  const auto r = is_admissible(*Contour::from_curve(curve, kMinus, 128));
  EXPECT_FALSE(r.admissible);
  EXPECT_TRUE(has_failure(r, "does not encircle origin"));
}

TEST(Admissibility, UnsymmetrizedBumpIsNotInvariant) {
  // Radial bump at θ = 0.8 without its mirror at −0.8.
  auto r_of = [](double t) { return 1.0 + 0.3 * std::exp(-std::pow(std::remainder(t - 0.8, 2 * kPi), 2) / 0.05); };
  auto dr = [r_of](double t) {
    const double s = std::remainder(t - 0.8, 2 * kPi);
    return (r_of(t) - 1.0) * (-2.0 * s / 0.05);
  };
  Contour::Curve curve{[r_of](double t) { return r_of(t) * std::exp(kI * t); },
                       [r_of, dr](double t) { return (dr(t) + kI * r_of(t)) * std::exp(kI * t); }};
  auto c = Contour::from_curve(curve, kMinus, 256);
  const auto r = is_admissible(*c);
  EXPECT_FALSE(r.admissible);
  EXPECT_TRUE(has_failure(r, "not i_lambda-invariant"));
  // Independent check: some node maps off the curve.
  double worst = 0.0;
  for (Complex t : c->nodes()) worst = std::max(worst, c->distance(involution(t, kMinus)));
  EXPECT_GT(worst, 1e-3);
}

TEST(Deformed, EmptyBumpsIsUnitCircle) {
  auto d = deformed_contour({}, kMinus, 64);
  auto c = unit_circle(kMinus, 64);
  EXPECT_TRUE(d->is_unit_circle());
  for (int k = 0; k < 64; ++k) {
    EXPECT_EQ(d->nodes()[k], c->nodes()[k]);
    EXPECT_EQ(d->weights()[k], c->weights()[k]);
  }
}

TEST(Deformed, SymmetrizedBumpsAreAdmissible) {
  auto d = deformed_contour({{0.7, 0.4, {0.35, 0.1}}, {2.5, 0.3, {-0.2, 0.0}}}, kMinus, 256);
  const auto r = is_admissible(*d);
  EXPECT_TRUE(r.admissible) << r.to_json().dump();
  for (Complex t : d->nodes()) EXPECT_EQ(d->locate(involution(t, kMinus)), PointLocation::OnContour);
}

TEST(Deformed, NonPositiveProfileIsGeometryError) {
  try {
    deformed_contour({{0.5, 0.2, {0.0, 40.0}}}, kMinus, 256);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Geometry);
  }
}

TEST(SplitContour, TauAInside) {
  auto c = split_contour(true);
  EXPECT_EQ(c->locate(1.6), PointLocation::Inside);
  EXPECT_EQ(c->locate(0.625), PointLocation::Outside);
  EXPECT_TRUE(c->admissibility().admissible);
}

TEST(SplitContour, MirrorClassification) {
  auto c = split_contour(false);
  EXPECT_EQ(c->locate(0.625), PointLocation::Inside);
  EXPECT_EQ(c->locate(1.6), PointLocation::Outside);
  EXPECT_TRUE(c->admissibility().admissible);
}

TEST(Property, InvolutionOfNodesIsOnContour) {
  for (const auto& c : {unit_circle(kMinus, 128), unit_circle(kPlus, 128), split_contour(true), split_contour(false),
                        deformed_contour({{1.2, 0.5, {0.4, 0.0}}}, kPlus, 256)}) {
    for (Complex t : c->nodes()) {
      ASSERT_EQ(c->locate(involution(t, c->lambda())), PointLocation::OnContour);
    }
  }
}

TEST(Property, ExactlyOneRootOfEachPairInside) {
  auto gen = test::rng();
  std::uniform_real_distribution<double> re(-2.0, 2.0), im(-2.0, 2.0), rho(0.3, 2.0);
  for (const auto& c : {unit_circle(kMinus, 256), split_contour(true), unit_circle(kPlus, 256)}) {
    int checked = 0;
    while (checked < 200) {
      const Complex w{re(gen), im(gen)};
      const WeylPoint p(rho(gen), re(gen) / 2);
      const auto r = spectral_roots(w, p, c->lambda());
      if (c->distance(r.phi) < 1e-6 || c->distance(r.phi_tilde) < 1e-6) continue;
      const auto a = c->locate(r.phi), b = c->locate(r.phi_tilde);
      EXPECT_NE(a, b);
      EXPECT_NE(a, PointLocation::OnContour);
      EXPECT_NE(b, PointLocation::OnContour);
      ++checked;
    }
  }
}

TEST(Property, QuadratureOfPowers) {
  for (const auto& c : {unit_circle(kMinus, 64), split_contour(true), split_contour(false)}) {
    for (int k = -6; k <= 6; ++k) {
      const Complex got = c->integrate([k](Complex t) { return std::pow(t, k); });
      const Complex want = k == -1 ? 2.0 * kPi * kI : Complex{};
      EXPECT_LT(std::abs(got - want), 1e-11) << "k=" << k;
    }
  }
}

TEST(Property, QuadratureConvergesSpectrally) {
  auto c = split_contour(true);
  auto err = [&](int n) {
    auto cn = c->with_node_count(n);
    return std::abs(cn->integrate([](Complex t) { return 1.0 / (t - 2.5); }));
  };
  EXPECT_GT(err(32), 1e-6);
  EXPECT_LT(err(128), err(64));
  EXPECT_LT(err(512), 1e-12);
}

TEST(Json, RoundTrip) {
  auto c = Contour::from_json({{"kind", "deformed"}, {"lambda", -1}, {"nodes", 128},
                               {"bumps", {{{"center", 0.5}, {"width", 0.4}, {"amplitude", {0.2, 0.0}}}}}});
  EXPECT_EQ(c->node_count(), 128);
  EXPECT_EQ(c->bumps().size(), 1u);
  auto circle = Contour::from_json({{"kind", "circle"}, {"lambda", 1}, {"nodes", 32}});
  EXPECT_TRUE(circle->is_unit_circle());
  EXPECT_EQ(circle->lambda(), kPlus);
}
