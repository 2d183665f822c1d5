#include <gtest/gtest.h>

#include <random>

#include "bext/geometry.hpp"
#include "oracles.hpp"

using namespace bext;

namespace {

QPoint P(long a, long b, long den = 1) { return {Q(a, den), Q(b, den)}; }

}  // namespace

TEST(Rational, Pow2) {
  EXPECT_EQ(pow2(3), Q(8));
  EXPECT_EQ(pow2(-3), Q(1, 8));
  EXPECT_EQ(pow2(0), Q(1));
}

TEST(Rational, SqrtTwoSigns) {
  EXPECT_EQ(sign_a_plus_b_sqrt2(Q(3), Q(-2)), 1);   // 3 - 2.83
  EXPECT_EQ(sign_a_plus_b_sqrt2(Q(2), Q(-2)), -1);
  EXPECT_EQ(sign_a_plus_b_sqrt2(Q(-1), Q(1)), 1);
  EXPECT_EQ(sign_a_plus_b_sqrt2(Q(0), Q(0)), 0);
  // (1 + sqrt 2) * 1 = 2.414...
  EXPECT_TRUE(one_plus_sqrt2_times_less(Q(1), Q(6)));   // 2.414 < 2.449
  EXPECT_FALSE(one_plus_sqrt2_times_less(Q(1), Q(5)));  // 2.414 > 2.236
}

TEST(Rational, DyadicRounding) {
  EXPECT_EQ(dyadic_floor(0.3, 2), Q(1, 4));
  EXPECT_EQ(dyadic_ceil(0.3, 2), Q(1, 2));
  EXPECT_EQ(dyadic_floor(-0.3, 2), Q(-1, 2));
  EXPECT_THROW(dyadic_floor(std::nan(""), 2), ValidationError);
  EXPECT_EQ(parse_rational("-3/6"), Q(-1, 2));
  EXPECT_THROW(parse_rational("x/2"), ValidationError);
}

TEST(Geometry, SegMeetsRectExamples) {
  QRect unit = QRect::closed(0, 1, 0, 1);
  EXPECT_TRUE(seg_meets_rect({P(-1, 1, 2), P(2, 1, 2)}, unit));
  EXPECT_FALSE(seg_meets_rect({P(2, 0), P(3, 1)}, unit));
  // Touching an open rectangle along its edge does not count.
  QRect open = QRect::open(0, 1, 0, 1);
  EXPECT_FALSE(seg_meets_rect({P(0, -1), P(0, 2)}, open));
  EXPECT_TRUE(seg_meets_rect({P(0, -1), P(0, 2)}, unit));
  // Through a corner only.
  EXPECT_FALSE(seg_meets_rect({P(-1, 1), P(1, -1)}, open));
  EXPECT_TRUE(seg_meets_rect({P(-1, 1), P(1, -1)}, unit));
  EXPECT_THROW(QRect::open(1, 1, 0, 1), ValidationError);
}

TEST(Geometry, SegMeetsRectAgreesWithClipping) {
  std::mt19937_64 rng(7);
  std::bernoulli_distribution coin(0.5);
  int hits = 0;
  for (int it = 0; it < 20000; ++it) {
    auto c = [&] { return oracle::random_dyadic(rng, -2, 10, 3); };
    Q x0 = c(), x1 = c(), y0 = c(), y1 = c();
    if (x0 == x1 || y0 == y1) continue;
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    QRect r(x0, x1, y0, y1, coin(rng) ? RectKind::Open : RectKind::Closed);
    Segment s{{c(), c()}, {c(), c()}};
    bool got = seg_meets_rect(s, r);
    ASSERT_EQ(got, oracle::clip_meets(s, r)) << s.a << ' ' << s.b;
    hits += got;
    if (!got) {
      // One-sided check: no sample point of the segment lies in r.
      for (int k = 0; k <= 16; ++k) ASSERT_FALSE(r.contains(s.at(Q(k, 16))));
    }
  }
  EXPECT_GT(hits, 1000);
}

TEST(Geometry, CrossingParams) {
  Segment s{P(0, 0), P(2, 0)};
  auto p = crossing_params(s, {P(1, -1), P(1, 1)});
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0], Q(1, 2));
  auto c = crossing_params(s, {P(1, 0), P(3, 0)});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], Q(1, 2));
  EXPECT_EQ(c[1], Q(1));
  EXPECT_TRUE(crossing_params(s, {P(0, 1), P(2, 1)}).empty());
}

TEST(Geometry, TaxicabArcs) {
  auto arcs = taxicab_arcs(P(0, 0), P(1, 1));
  ASSERT_EQ(arcs.size(), 2u);
  EXPECT_EQ(arcs[0].legs[0].b, P(0, 1));
  EXPECT_EQ(arcs[1].legs[0].b, P(1, 0));
  EXPECT_EQ(taxicab_arcs(P(0, 0), P(0, 3)).size(), 1u);
  EXPECT_THROW(taxicab_arcs(P(1, 1), P(1, 1)), ValidationError);
}

TEST(Geometry, DiameterAndWinding) {
  std::vector<QPoint> pts{P(0, 0), P(1, 0), P(1, 1)};
  EXPECT_EQ(polyline_diameter_sq(pts), Q(2));
  EXPECT_THROW(polyline_diameter_sq(std::span<const QPoint>{}), ValidationError);
  std::vector<QPoint> sq{P(0, 0), P(0, 1), P(1, 1), P(1, 0)};
  EXPECT_EQ(std::abs(winding_number(P(1, 1, 2), sq)), 1);
  EXPECT_EQ(winding_number(P(2, 1, 2), sq), 0);
  EXPECT_TRUE(on_polygon(P(0, 1, 2), sq));
}
