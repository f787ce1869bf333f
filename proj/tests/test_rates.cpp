#include <gtest/gtest.h>

#include "ergodic/rates.hpp"

using namespace ergodic;

namespace {

Pl identity() { return Pl({Rational(0), Rational(1)}, {Rational(0)}, {Rational(1)}); }

Pl hat(const Rational& s, const Rational& r, const Rational& e) {
  return FTerm::gen(IdealPoint::circle(s), r, e).to_pl();
}

const std::vector<RateKind> kKinds{RateKind::norm_l1, RateKind::norm_l2, RateKind::as_bounded, RateKind::as_l1};

}  // namespace

TEST(Certify, ConstantObservableIsImmediate) {
  for (RateKind k : kKinds) {
    auto c = certify(System::doubling(), Pl(rat(2, 5)), k, rat(1, 4), rat(1, 4));
    EXPECT_EQ(c.p, 1u);
    EXPECT_TRUE(replay_certificate(c, true).ok);
  }
}

TEST(Certify, ReplaysOnEverySystem) {
  std::vector<std::pair<System, Observable>> cases{
      {System::doubling(), identity()},
      {System::doubling(), hat(rat(1, 2), rat(1, 4), rat(1, 8))},
      {System::rotation(), hat(rat(1, 2), rat(1, 4), rat(1, 8))},
      {System::rotation(), identity()},
      {System::shift(rat(1, 2)), CylFn::indicator("1")},
      {System::shift(rat(1, 3)), CylFn::indicator("10")},
  };
  for (auto& [sys, f] : cases)
    for (RateKind k : kKinds)
      for (const Rational& e : {rat(1, 2), rat(1, 4)}) {
        auto c = certify(sys, f, k, e, rat(1, 2));
        auto r = replay_certificate(c, true);
        EXPECT_TRUE(r.ok) << sys.id() << " " << rate_kind_name(k) << " " << r.reason;
        EXPECT_EQ(c.kind, k);
        EXPECT_EQ(c.system, sys.id());
      }
}

TEST(Certify, NormRateHoldsAtAndBeyondM) {
  System sys = System::shift(rat(1, 2));
  Observable f = CylFn::indicator("11");
  NormOracle o = NormOracle::of(sys, f);
  for (const Rational& e : {rat(1, 2), rat(1, 4), rat(1, 8)}) {
    auto c = certify(sys, f, RateKind::norm_l1, e, e);
    for (std::uint64_t k = c.n0_or_m; k < c.n0_or_m + 20; ++k) EXPECT_LE(o.l1(k).hi, e) << k;
    auto c2 = certify(sys, f, RateKind::norm_l2, e, e);
    for (std::uint64_t k = c2.n0_or_m; k < c2.n0_or_m + 20; ++k) EXPECT_LE(o.l2sq(k).hi, e * e) << k;
  }
}

TEST(Certify, ThresholdIsMonotoneInEps) {
  System sys = System::doubling();
  Observable f = hat(rat(1, 2), rat(1, 4), rat(1, 8));
  for (RateKind k : kKinds) {
    std::uint64_t prev = 0;
    for (const Rational& e : {rat(1, 2), rat(1, 4), rat(1, 8), rat(1, 16)}) {
      auto c = certify(sys, f, k, e, rat(1, 4));
      EXPECT_GE(c.n0_or_m, prev) << rate_kind_name(k);
      prev = c.n0_or_m;
    }
  }
}

TEST(Certify, ExampleValues) {
  System sh = System::shift(rat(1, 2));
  Observable first = CylFn::indicator("1");
  auto b = certify(sh, first, RateKind::as_bounded, Rational(1), rat(1, 2));
  EXPECT_EQ(b.n0_or_m, 4u);
  EXPECT_EQ(certify(sh, first, RateKind::as_bounded, rat(1, 2), rat(1, 2)).n0_or_m, 36u);
  auto l = certify(sh, first, RateKind::as_l1, rat(1, 4), rat(1, 4));
  EXPECT_EQ(l.n0_or_m, 65520u);
  ASSERT_TRUE(l.sub);
  EXPECT_EQ(l.sub->kind, RateKind::as_bounded);
  EXPECT_EQ(l.sub->eps, rat(1, 8));
  // ||A_1 h||_1 = 1/2 is not below eps/2 = 1/2, ||A_2 h||_1 = 1/4 is
  EXPECT_EQ(certify(sh, first, RateKind::norm_l1, Rational(1), Rational(1)).p, 2u);
}

TEST(Replay, TamperedWitnessesAreRejected) {
  System sys = System::doubling();
  Observable f = identity();
  for (RateKind k : kKinds) {
    auto c = certify(sys, f, k, rat(1, 4), rat(1, 4));
    auto bad = c;
    bad.norm_p = Interval::point(c.norm_p.hi + 1);
    EXPECT_FALSE(replay_certificate(bad).ok) << rate_kind_name(k);
    bad = c;
    bad.integral += rat(1, 100);
    EXPECT_FALSE(replay_certificate(bad, true).ok) << rate_kind_name(k);
    if (c.n0_or_m > 1) {
      bad = c;
      bad.n0_or_m -= 1;
      if (k != RateKind::as_bounded) {
        EXPECT_FALSE(replay_certificate(bad).ok) << rate_kind_name(k);
      }
    }
  }
  auto c = certify(System::shift(rat(1, 2)), CylFn::indicator("1"), RateKind::as_bounded, rat(1, 2), rat(1, 2));
  c.n0_or_m = 4 * (c.p - 1) - 1;  // one below 4(p-1) sup/delta with sup = delta
  EXPECT_FALSE(replay_certificate(c).ok);
}

TEST(Validate, ExactShiftMassStaysBelowEps) {
  System sys = System::shift(rat(1, 2));
  for (const auto& f : {Observable(CylFn::indicator("1")), Observable(CylFn::indicator("11")),
                        Observable(CylFn(2, {Rational(0), Rational(1), Rational(1), Rational(0)}))})
    for (const Rational& e : {Rational(1), rat(3, 4), rat(1, 2)})
      for (const Rational& d : {Rational(1), rat(3, 4), rat(1, 2)}) {
        auto c = certify(sys, f, RateKind::as_bounded, e, d);
        if (c.n0_or_m > 40) continue;
        auto rep = validate_as(sys, c, c.n0_or_m + 24, ValidationMode::exact_cylinder);
        EXPECT_TRUE(rep.ok) << to_string(e) << " " << to_string(d) << " mass " << to_string(rep.mass);
        EXPECT_LE(rep.mass, e);
      }
}

TEST(Validate, NontrivialCertificateHolds) {
  System sys = System::shift(rat(1, 2));
  auto c = certify(sys, CylFn::indicator("1"), RateKind::as_bounded, rat(1, 2), rat(1, 2));
  ASSERT_EQ(c.n0_or_m, 36u);
  auto rep = validate_as(sys, c, 80, ValidationMode::exact_cylinder);
  EXPECT_TRUE(rep.ok);
  // deviations beyond 1/2 from mean 1/2 are impossible for a 0/1 observable
  EXPECT_EQ(rep.mass, Rational(0));
  auto tight = deviation_report(sys, CylFn::indicator("1"), 36, 80, rat(1, 8), ValidationMode::exact_cylinder);
  EXPECT_GT(tight.mass, Rational(0));
}

TEST(Validate, DoublingArcMass) {
  System sys = System::doubling();
  Observable f = identity();
  // |x - 1/2| > 1/8 on n = 1 has measure 3/4
  EXPECT_EQ(deviation_report(sys, f, 1, 1, rat(1, 8), ValidationMode::exact_arc).mass, rat(3, 4));
  auto c = certify(sys, hat(rat(1, 2), rat(1, 4), rat(1, 8)), RateKind::as_bounded, rat(1, 2), rat(1, 2));
  if (c.n0_or_m <= 12) {
    auto rep = validate_as(sys, c, c.n0_or_m + 4, ValidationMode::exact_arc);
    EXPECT_TRUE(rep.ok);
  }
}

TEST(Validate, RotationUpperBoundIsSound) {
  System sys = System::rotation();
  Observable g = hat(rat(1, 2), rat(1, 4), rat(1, 8));
  auto up = deviation_report(sys, g, 1, 6, rat(1, 4), ValidationMode::exact_arc);
  EXPECT_TRUE(up.upper_bound);
  auto est = deviation_report(sys, g, 1, 6, rat(1, 4), ValidationMode::sampled);
  EXPECT_EQ(est.samples, kSamplePrime);
  // the sampled frequency may exceed the true mass by sampling error only
  EXPECT_LE(est.mass, up.mass + rat(1, 20));
}

TEST(Validate, SampledModeDoesNotAssert) {
  System sys = System::doubling();
  auto c = certify(sys, identity(), RateKind::as_bounded, rat(1, 2), rat(1, 2));
  auto rep = validate_as(sys, c, c.n0_or_m + 2, ValidationMode::sampled);
  EXPECT_FALSE(rep.asserted);
  EXPECT_TRUE(rep.ok);
}

TEST(Validate, UnsupportedPairs) {
  try {
    deviation_report(System::doubling(), identity(), 1, 2, rat(1, 4), ValidationMode::exact_cylinder);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unsupported_pair);
  }
  auto c = certify(System::doubling(), identity(), RateKind::norm_l1, rat(1, 4), rat(1, 4));
  EXPECT_THROW(validate_as(System::doubling(), c, 100, ValidationMode::exact_arc), Error);
}

TEST(Uniformity, FirstGeneratorsCertify) {
  for (SpaceKind s : {SpaceKind::circle, SpaceKind::cantor}) {
    System sys = s == SpaceKind::circle ? System::doubling() : System::shift(rat(1, 2));
    for (const auto& t : enumerate_F(s, 8)) {
      Observable f = t;
      for (RateKind k : {RateKind::norm_l1, RateKind::as_bounded}) {
        auto c = certify(sys, f, k, rat(1, 2), rat(1, 2));
        EXPECT_TRUE(replay_certificate(c, true).ok);
      }
    }
  }
}

TEST(Budget, TinyPLimitFails) {
  Limits saved = limits();
  limits().max_p = 2;
  try {
    certify(System::shift(rat(1, 2)), CylFn::indicator("1"), RateKind::as_bounded, rat(1, 8), rat(1, 8));
    limits() = saved;
    FAIL();
  } catch (const Error& e) {
    limits() = saved;
    EXPECT_EQ(e.code(), ErrorCode::budget_exceeded);
  }
}
