#include <gtest/gtest.h>

#include "ergodic/measure.hpp"

using namespace ergodic;

TEST(Distance, Examples) {
  EXPECT_EQ(distance(IdealPoint::circle(rat(1, 4)), IdealPoint::circle(rat(3, 4))), rat(1, 2));
  EXPECT_EQ(distance(IdealPoint::circle(rat(1, 10)), IdealPoint::circle(rat(9, 10))), rat(1, 5));
  EXPECT_EQ(distance(IdealPoint::cantor(""), IdealPoint::cantor("1")), Rational(1));
  EXPECT_EQ(distance(IdealPoint::cantor("01"), IdealPoint::cantor("0")), rat(1, 2));
}

TEST(Distance, MetricAxiomsOnFirstPoints) {
  for (SpaceKind s : {SpaceKind::circle, SpaceKind::cantor}) {
    auto pts = first_points(s, 50);
    for (const auto& a : pts) {
      EXPECT_EQ(distance(a, a), Rational(0));
      for (const auto& b : pts) {
        EXPECT_EQ(distance(a, b), distance(b, a));
        if (!(a == b)) EXPECT_GT(distance(a, b), Rational(0));
        for (const auto& c : pts) EXPECT_LE(distance(a, c), distance(a, b) + distance(b, c));
      }
    }
  }
}

TEST(Numbering, BallCodecRoundTrips) {
  for (SpaceKind s : {SpaceKind::circle, SpaceKind::cantor}) {
    int seen = 0;
    for (Integer z = 0; seen < 100; ++z) {
      auto b = ball_from_index(s, z);
      if (!b) continue;
      ++seen;
      EXPECT_EQ(ball_index(*b), z);
      EXPECT_EQ(ball_from_index(s, ball_index(*b)), b);
    }
  }
}

TEST(Numbering, IdealPointsAreDenseInBalls) {
  for (SpaceKind s : {SpaceKind::circle, SpaceKind::cantor}) {
    for (const auto& b : first_balls(s, 100)) {
      bool found = false;
      for (Integer z = 0; z < 200000 && !found; ++z) {
        auto p = point_from_index(s, z);
        found = p && distance(*p, b.center) < b.radius;
      }
      EXPECT_TRUE(found) << b.center.str() << " " << to_string(b.radius);
    }
  }
}

TEST(Ball, MembershipExamples) {
  IdealBall b{IdealPoint::circle(rat(1, 2)), rat(1, 4)};
  EXPECT_EQ(ball_member(b, SpacePoint::circle(rat(1, 2)), 10), Membership::in);
  EXPECT_EQ(ball_member(b, SpacePoint::circle(Rational(0)), 10), Membership::out);
  IdealBall c{IdealPoint::cantor(""), rat(1, 4)};
  EXPECT_EQ(ball_member(c, SpacePoint::cantor_periodic("", "01"), 10), Membership::out);
  EXPECT_EQ(ball_member(c, SpacePoint::cantor_periodic("", "0"), 10), Membership::in);
}

TEST(Ball, CantorBallsAreCylinders) {
  EXPECT_EQ(cylinder_word({IdealPoint::cantor("0110"), rat(1, 4)}), "011");
  EXPECT_EQ(cylinder_word({IdealPoint::cantor("0110"), rat(3, 8)}), "01");
  EXPECT_EQ(cylinder_word(whole_space_ball(SpaceKind::cantor)), "");
}

TEST(Open, MembershipExamples) {
  auto whole = EffectiveOpen::whole(SpaceKind::circle);
  EXPECT_TRUE(open_contains(whole, SpacePoint::circle(sqrt2_minus_1()), 1, 8).in);
  auto never = EffectiveOpen::never(SpaceKind::circle);
  EXPECT_FALSE(open_contains(never, SpacePoint::circle(rat(1, 3)), 100, 8).in);
  auto arc = EffectiveOpen::from_balls(SpaceKind::circle, {{IdealPoint::circle(rat(1, 2)), rat(1, 8)}});
  EXPECT_TRUE(open_contains(arc, SpacePoint::circle(sqrt2_minus_1()), 1, 8).in);
}

TEST(Open, InAnswersAreSound) {
  auto balls = first_balls(SpaceKind::circle, 40);
  auto U = EffectiveOpen::from_balls(SpaceKind::circle, balls);
  CReal x = sqrt2_minus_1();
  for (unsigned m = 2; m < 30; m += 3) {
    auto r = open_contains(U, SpacePoint::circle(x), balls.size(), m);
    if (!r.in) continue;
    const IdealBall& b = balls[r.witness];
    Interval e = x.enclosure(m);
    // every point of the enclosure is inside the witness
    EXPECT_LT(qmax(circle_distance(e.lo, b.center.x), circle_distance(e.hi, b.center.x)), b.radius);
  }
}

TEST(Refine, ConstantStreamGivesItsCenter) {
  auto x = refine_to_point(SpaceKind::circle, [](unsigned m) {
    return IdealBall{IdealPoint::circle(rat(3, 7)), pow2(-long(m))};
  });
  for (unsigned m : {1u, 10u, 40u}) EXPECT_TRUE(x.real().enclosure(m).contains(rat(3, 7)));
}

TEST(Refine, BinaryTruncationsOfOneThird) {
  auto x = refine_to_point(SpaceKind::circle, [](unsigned m) {
    Rational c = Rational(floor_q(rat(1, 3) * Rational(pow2z(m)))) / Rational(pow2z(m));
    return IdealBall{IdealPoint::circle(c), pow2(-long(m))};
  });
  for (unsigned m = 1; m < 60; m += 7)
    EXPECT_EQ(creal_compare(x.real(), creal_from_rational(rat(1, 3)), m), Ordering3::indistinguishable);
}

TEST(Refine, NonNestedStreamIsRejected) {
  auto x = refine_to_point(SpaceKind::circle, [](unsigned m) {
    return IdealBall{IdealPoint::circle(m % 2 ? rat(1, 4) : rat(3, 4)), pow2(-long(m))};
  });
  try {
    x.real().approx(5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_nesting);
  }
}

TEST(Refine, CantorStream) {
  auto x = refine_to_point(SpaceKind::cantor, [](unsigned m) {
    Word w;
    for (unsigned i = 0; i <= m; ++i) w.push_back(i % 3 == 0 ? '1' : '0');
    return IdealBall{IdealPoint::cantor(w), canonical_cantor_radius(m + 1)};
  });
  EXPECT_EQ(x.prefix(7), "1001001");
}
