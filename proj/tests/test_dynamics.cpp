#include <gtest/gtest.h>

#include <random>

#include "ergodic/deviation.hpp"

using namespace ergodic;

namespace {

Pl identity() { return Pl({Rational(0), Rational(1)}, {Rational(0)}, {Rational(1)}); }

Pl hat(const Rational& s, const Rational& r, const Rational& e) {
  return FTerm::gen(IdealPoint::circle(s), r, e).to_pl();
}

Rational pl_at(const Pl& f, const Rational& x) { return f(frac(x)); }

// ||A_p h||_1 on the shift by summing over all words of length p + d - 1
Rational shift_l1_brute(const Rational& p1, const CylFn& h, std::uint64_t p) {
  std::size_t d = std::max<std::size_t>(h.depth(), 1), L = p + d - 1;
  CylFn g = h.extended(d);
  Rational total = 0;
  for (std::size_t x = 0; x < (std::size_t(1) << L); ++x) {
    Word w = CylFn::word_of(x, L);
    Rational s = 0;
    for (std::uint64_t k = 0; k < p; ++k) s += g(w.substr(k, d));
    total += word_measure(w, p1) * qabs(s) / Rational(Integer(static_cast<unsigned long>(p)));
  }
  return total;
}

// integral of |L| for L linear on [a, b]
Rational abs_linear(const Rational& a, const Rational& b, const Rational& ya, const Rational& yb) {
  if (sgn(ya) * sgn(yb) >= 0) return (b - a) * (qabs(ya) + qabs(yb)) / 2;
  return (b - a) * (ya * ya + yb * yb) / (2 * (qabs(ya) + qabs(yb)));
}

// ||A_p h||_1 on the doubling map from pointwise orbit evaluation only: A_p h
// is linear on dyadic cells of width 2^-(p-1+r) when h is linear on cells of
// width 2^-r; values at the cell ends come from two interior points.
Rational doubling_l1_brute(const Pl& h, std::uint64_t p, unsigned r) {
  Rational c = h.integral();
  auto avg = [&](const Rational& x) -> Rational {
    Rational s = 0, y = x;
    for (std::uint64_t k = 0; k < p; ++k) {
      s += pl_at(h, y) - c;
      y = frac(2 * y);
    }
    return s / Rational(Integer(static_cast<unsigned long>(p)));
  };
  std::uint64_t cells = std::uint64_t(1) << (p - 1 + r);
  Rational w(1, Integer(static_cast<unsigned long>(cells))), total = 0;
  for (std::uint64_t i = 0; i < cells; ++i) {
    Rational a = w * Rational(Integer(static_cast<unsigned long>(i))), b = a + w;
    Rational u = avg(a + w / 3), v = avg(a + 2 * w / 3);
    Rational ya = 2 * u - v, yb = 2 * v - u;
    total += abs_linear(a, b, ya, yb);
  }
  return total;
}

std::vector<IdealBall> random_balls(std::mt19937_64& rng, SpaceKind s, int count) {
  std::uniform_int_distribution<int> c(0, 63), rr(1, 20), len(0, 6), bit(0, 1);
  std::vector<IdealBall> out;
  for (int i = 0; i < count; ++i) {
    if (s == SpaceKind::circle) out.push_back({IdealPoint::circle(rat(c(rng), 64)), rat(rr(rng), 64)});
    else {
      Word w;
      int n = len(rng);
      for (int k = 0; k < n; ++k) w.push_back(bit(rng) ? '1' : '0');
      out.push_back({IdealPoint::cantor(w), canonical_cantor_radius(w.size())});
    }
  }
  return out;
}

}  // namespace

TEST(MeasurePreservation, ExactOnRandomUnions) {
  std::mt19937_64 rng(21);
  auto leb = ComputableMeasure::lebesgue();
  for (int t = 0; t < 120; ++t) {
    auto balls = random_balls(rng, SpaceKind::circle, 1 + t % 4);
    ArcSet S = std::get<ArcSet>(exact_set_of(SpaceKind::circle, balls));
    EXPECT_EQ(S.doubling_preimage().measure(), S.measure());
    // rational approximations of the rotation angle
    for (unsigned m : {4u, 12u, 30u}) {
      Rational a = frac(sqrt2_minus_1().approx(m));
      EXPECT_EQ(S.translated_preimage(a).measure(), S.measure());
    }
  }
  for (const Rational& p : {rat(1, 2), rat(1, 3), rat(5, 7)}) {
    for (int t = 0; t < 120; ++t) {
      auto balls = random_balls(rng, SpaceKind::cantor, 1 + t % 4);
      CylinderSet S = std::get<CylinderSet>(exact_set_of(SpaceKind::cantor, balls));
      EXPECT_EQ(S.shift_preimage().measure(p), S.measure(p));
    }
  }
}

TEST(Preimage, PointsMapIntoTheSet) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 50; ++t) {
    auto balls = random_balls(rng, SpaceKind::circle, 2);
    ArcSet S = std::get<ArcSet>(exact_set_of(SpaceKind::circle, balls)), P = S.doubling_preimage();
    for (int i = 0; i < 97; ++i) {
      Rational x = rat(2 * i + 1, 194);
      EXPECT_EQ(P.contains(x), S.contains(frac(2 * x)));
    }
  }
}

TEST(Map, ForwardImages) {
  auto d = apply_map(System::doubling(), SpacePoint::circle(rat(1, 3)), 20);
  EXPECT_TRUE(d.arc.contains(rat(2, 3)));
  EXPECT_LE(d.arc.width(), pow2(-20));
  auto r = apply_map(System::rotation(), SpacePoint::circle(Rational(0)), 10);
  EXPECT_LE(r.arc.width(), pow2(-10));
  EXPECT_TRUE(r.arc.contains(sqrt2_minus_1().approx(40)));
  auto s = apply_map(System::shift(rat(1, 2)), SpacePoint::cantor_periodic("", "01"), 3);
  EXPECT_EQ(s.prefix, "101");
}

TEST(Birkhoff, Examples) {
  EXPECT_EQ(birkhoff_eval(System::doubling(), identity(), SpacePoint::circle(rat(1, 3)), 2, 10), Interval::point(rat(1, 2)));
  Observable c = Pl(Rational(3));
  EXPECT_EQ(birkhoff_eval(System::rotation(), c, SpacePoint::circle(sqrt2_minus_1()), 17, 10), Interval::point(Rational(3)));
  Observable first = CylFn::indicator("1");
  EXPECT_EQ(birkhoff_eval(System::shift(rat(1, 2)), first, SpacePoint::cantor_periodic("", "10"), 4, 10),
            Interval::point(rat(1, 2)));
}

TEST(Birkhoff, RefinementIsNested) {
  System rot = System::rotation();
  Observable g = hat(rat(1, 2), rat(1, 4), rat(1, 8));
  SpacePoint x = SpacePoint::circle(sqrt2_minus_1());
  for (std::uint64_t n : {5u, 40u, 300u}) {
    Interval prev = birkhoff_eval(rot, g, x, n, 2);
    for (unsigned m = 4; m <= 24; m += 4) {
      Interval cur = birkhoff_eval(rot, g, x, n, m);
      EXPECT_LE(cur.width(), pow2(-long(m)));
      EXPECT_TRUE(cur.lo <= prev.hi && prev.lo <= cur.hi);
      prev = cur;
    }
  }
  System dbl = System::doubling();
  Observable id = identity();
  SpacePoint y = SpacePoint::circle(sqrt2_minus_1());
  Interval p0 = birkhoff_eval(dbl, hat(rat(1, 3), rat(1, 5), rat(1, 7)), y, 30, 3);
  Interval p1 = birkhoff_eval(dbl, hat(rat(1, 3), rat(1, 5), rat(1, 7)), y, 30, 12);
  EXPECT_TRUE(p1.lo <= p0.hi && p0.lo <= p1.hi);
}

TEST(Integral, Examples) {
  EXPECT_EQ(integral(System::doubling(), Observable(hat(rat(1, 2), rat(1, 4), rat(1, 8)))), rat(5, 8));
  EXPECT_EQ(integral(System::shift(rat(1, 2)), Observable(CylFn::indicator("1"))), rat(1, 2));
  EXPECT_EQ(integral(System::doubling(), Observable(identity())), rat(1, 2));
  EXPECT_EQ(integral(System::shift(rat(1, 3)), Observable(CylFn::indicator("10"))), rat(2, 9));
}

TEST(Norms, Examples) {
  Observable c = Pl(rat(7, 3));
  for (std::uint64_t p : {1u, 3u, 8u}) EXPECT_EQ(l_norm_birkhoff(System::doubling(), c, p, Norm::l1), Interval::point(0));
  EXPECT_EQ(l_norm_birkhoff(System::shift(rat(1, 2)), CylFn::indicator("1"), 2, Norm::l1), Interval::point(rat(1, 4)));
  EXPECT_EQ(l_norm_birkhoff(System::doubling(), identity(), 1, Norm::l1), Interval::point(rat(1, 4)));
}

TEST(Norms, ShiftMatchesWordEnumeration) {
  std::vector<CylFn> fs{CylFn::indicator("1"), CylFn::indicator("11"), CylFn(2, {Rational(0), Rational(1), Rational(1), Rational(0)}),
                        CylFn(3, {1, -2, 0, 3, rat(1, 2), 0, -1, 2})};
  for (const Rational& q : {rat(1, 2), rat(1, 3)}) {
    System s = System::shift(q);
    for (const auto& f : fs) {
      CylFn h = std::get<CylFn>(centered(s, f));
      for (std::uint64_t p = 1; p <= 8; ++p)
        EXPECT_EQ(l_norm_birkhoff(s, f, p, Norm::l1), Interval::point(shift_l1_brute(q, h, p))) << p;
    }
  }
}

TEST(Norms, DoublingMatchesPointwiseOracle) {
  std::vector<std::pair<Pl, unsigned>> fs{{identity(), 0u}, {hat(rat(1, 2), rat(1, 4), rat(1, 8)), 3u},
                                          {hat(rat(1, 4), rat(1, 8), rat(1, 16)), 4u}};
  for (const auto& [f, r] : fs)
    for (std::uint64_t p = 1; p <= 6; ++p)
      EXPECT_EQ(l_norm_birkhoff(System::doubling(), f, p, Norm::l1), Interval::point(doubling_l1_brute(f, p, r))) << p;
}

TEST(Norms, AveragingContracts) {
  std::vector<std::pair<System, Observable>> cases{
      {System::doubling(), identity()},
      {System::doubling(), hat(rat(1, 2), rat(1, 4), rat(1, 8))},
      {System::shift(rat(1, 2)), CylFn::indicator("1")},
      {System::shift(rat(1, 3)), CylFn::indicator("011")},
      {System::rotation(), hat(rat(1, 2), rat(1, 4), rat(1, 8))},
  };
  for (auto& [sys, f] : cases) {
    for (Norm n : {Norm::l1, Norm::l2}) {
      Interval base = l_norm_birkhoff(sys, f, 1, n);
      for (std::uint64_t p = 1; p <= 8; ++p) EXPECT_LE(l_norm_birkhoff(sys, f, p, n).lo, base.hi) << sys.id() << " " << p;
    }
  }
}

TEST(Norms, SubadditivityChain) {
  std::vector<std::pair<System, Observable>> cases{
      {System::doubling(), identity()},
      {System::doubling(), hat(rat(1, 2), rat(1, 4), rat(1, 8))},
      {System::shift(rat(1, 2)), CylFn::indicator("1")},
      {System::shift(rat(1, 2)), CylFn::indicator("11")},
  };
  for (auto& [sys, f] : cases) {
    NormOracle o = NormOracle::of(sys, f);
    Rational h1 = o.l1(1).hi;
    for (std::uint64_t p = 1; p <= 4; ++p)
      for (std::uint64_t n = 1; n <= 4; ++n)
        for (std::uint64_t k = 0; k < p; ++k) {
          // the enclosure's upper end against the lower end is the sound direction
          Interval lhs = o.l1(n * p + k);
          EXPECT_LE(lhs.hi, o.l1(p).lo + h1 / Rational(Integer(static_cast<unsigned long>(n))));
        }
  }
}

TEST(Generators, ValuesAndBounds) {
  FTerm g = FTerm::gen(IdealPoint::circle(rat(1, 2)), rat(1, 4), rat(1, 8));
  EXPECT_EQ(g.sup_bound(), Rational(1));
  Pl p = g.to_pl();
  EXPECT_EQ(p(rat(1, 2)), Rational(1));
  EXPECT_EQ(p(rat(3, 4) - rat(1, 100)), Rational(1));
  EXPECT_EQ(p(Rational(0)), Rational(0));
  EXPECT_EQ(p(rat(3, 4) + rat(1, 16)), rat(1, 2));
  EXPECT_EQ(sup_norm_bound(Observable(Pl(Rational(-3)))), Rational(3));
  FTerm h = FTerm::lin({{rat(1, 2), g}, {rat(1, 2), FTerm::gen(IdealPoint::circle(rat(1, 8)), rat(1, 8), rat(1, 4))}});
  EXPECT_LE(h.sup_bound(), Rational(1));
  EXPECT_LE(h.to_pl().sup_abs(), h.sup_bound());
}

TEST(Generators, EnumerationIsDeterministicAndBounded) {
  for (SpaceKind s : {SpaceKind::circle, SpaceKind::cantor}) {
    auto a = enumerate_F(s, 40), b = enumerate_F(s, 40);
    ASSERT_EQ(a.size(), 40u);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a[i] == b[i]);
    EXPECT_EQ(a[0].kind(), FTerm::Kind::one);
    EXPECT_EQ(enumerate_F(s, 1).size(), 1u);
    for (std::size_t i = 1; i < a.size(); i += 2) {
      ASSERT_EQ(a[i].kind(), FTerm::Kind::gen);
      const auto& g = a[i].generator();
      if (s == SpaceKind::circle) {
        Pl p = a[i].to_pl();
        EXPECT_GE(p.min_value(), Rational(0));
        EXPECT_LE(p.max_value(), Rational(1));
        for (int k = -9; k <= 9; ++k) EXPECT_EQ(pl_at(p, g.s.x + g.r * rat(k, 10)), Rational(1));
      } else {
        CylFn c = a[i].to_cyl();
        for (const auto& v : c.table()) EXPECT_TRUE(sgn(v) >= 0 && v <= 1);
        EXPECT_EQ(c(cylinder_word({g.s, g.r}) + std::string(c.depth(), '0')), Rational(1));
      }
    }
  }
}

TEST(Truncation, Examples) {
  EXPECT_EQ(std::get<Pl>(truncate(identity(), Rational(1))), identity());
  EXPECT_EQ(std::get<Pl>(truncate(Pl(Rational(5)), Rational(2))), Pl(Rational(2)));
  Pl f = Pl({Rational(0), rat(1, 2), Rational(1)}, {Rational(-3), Rational(4)}, {Rational(4), Rational(-3)});
  Pl t = std::get<Pl>(truncate(f, Rational(2)));
  EXPECT_EQ(t.sup_abs(), Rational(2));
  EXPECT_EQ(t(rat(1, 2)), Rational(2));
  EXPECT_EQ(t(Rational(0)), Rational(-2));
  // f crosses 2 at x = 5/14 and -2 at x = 1/14
  EXPECT_EQ(t(rat(5, 14)), Rational(2));
  EXPECT_EQ(t(rat(3, 14)), f(rat(3, 14)));
}

TEST(DeviationSets, Examples) {
  auto s = window_set(System::doubling(), centered(System::doubling(), identity()), 1, 1, rat(1, 8));
  EXPECT_EQ(std::get<ArcSet>(s), ArcSet::lifted(rat(3, 8), rat(5, 8)));
  System sh = System::shift(rat(1, 2));
  auto t = window_set(sh, centered(sh, CylFn::indicator("1")), 2, 2, rat(1, 4));
  EXPECT_EQ(std::get<CylinderSet>(t), CylinderSet::from_words({"01", "10"}));
  auto U = deviation_open(System::rotation(), Pl(rat(2, 3)), 5, rat(1, 100));
  ASSERT_TRUE(U.exact_prefix());
  EXPECT_EQ(U.exact_prefix()->size(), 1u);
  EXPECT_EQ((*U.exact_prefix())[0], whole_space_ball(SpaceKind::circle));
}

TEST(DeviationSets, ShiftMassMatchesWordEnumeration) {
  System s = System::shift(rat(1, 3));
  CylFn h = std::get<CylFn>(centered(s, CylFn::indicator("10")));
  for (std::uint64_t lo = 1; lo <= 4; ++lo)
    for (std::uint64_t hi = lo; hi <= 7; ++hi)
      for (const Rational& d : {rat(1, 8), rat(1, 4), rat(1, 2)}) {
        Rational mass = 0;
        std::size_t L = hi + 1;
        for (std::size_t x = 0; x < (std::size_t(1) << L); ++x) {
          Word w = CylFn::word_of(x, L);
          Rational S = 0;
          bool bad = false;
          for (std::uint64_t n = 1; n <= hi; ++n) {
            S += h(w.substr(n - 1, 2));
            bad |= n >= lo && qabs(S) > Rational(Integer(static_cast<unsigned long>(n))) * d;
          }
          if (bad) mass += word_measure(w, s.p());
        }
        EXPECT_EQ(shift_deviation_mass(s, h, lo, hi, d), mass);
      }
}
