#include <gtest/gtest.h>

#include <random>

#include "bext/domain_io.hpp"
#include "bext/effective_sets.hpp"
#include "oracles.hpp"

using namespace bext;

namespace {

StagedSet table(std::initializer_list<std::pair<std::uint64_t, std::uint64_t>> entries, std::uint64_t n_max = 4,
                std::uint64_t s_max = 12) {
  StagedSet s(n_max, s_max);
  for (auto [n, st] : entries) s.add(n, st);
  return s;
}

QPoint P(long a, long b, long den = 1) { return {Q(a, den), Q(b, den)}; }

}  // namespace

TEST(StagedSet, MembershipIsMonotoneInStage) {
  StagedSet s = table({{0, 2}, {3, 0}});
  EXPECT_FALSE(member_at(s, 0, 1));
  EXPECT_TRUE(member_at(s, 0, 2));
  EXPECT_TRUE(member_at(s, 0, 9));
  EXPECT_TRUE(member_at(s, 3, 0));
  EXPECT_FALSE(member_at(s, 1, 12));
  EXPECT_THROW(member_at(s, 5, 0), ValidationError);
  std::mt19937_64 rng(3);
  for (int it = 0; it < 50; ++it) {
    StagedSet r = oracle::random_table(rng, 6, 12);
    for (std::uint64_t n = 0; n <= r.n_max(); ++n)
      for (std::uint64_t st = 0; st < 12; ++st)
        if (member_at(r, n, st)) EXPECT_TRUE(member_at(r, n, st + 1));
  }
}

TEST(StagedSet, RejectsBadTables) {
  StagedSet s(3, 5);
  s.add(1, 4);
  EXPECT_THROW(s.add(1, 2), ValidationError);
  EXPECT_THROW(s.add(4, 0), ValidationError);
  EXPECT_THROW(s.add(2, 6), ValidationError);
  EXPECT_THROW(load_stage_table("{\"n_max\": 3}"), ValidationError);
  EXPECT_THROW(load_stage_table("not json"), ValidationError);
  EXPECT_THROW(load_stage_table(R"({"n_max":3,"s_max":2,"entries":[[1,2],[1,0]]})"), ValidationError);
  EXPECT_THROW(load_stage_table(R"({"n_max":3,"s_max":2,"entries":[[-1,2]]})"), ValidationError);
  EXPECT_THROW(load_stage_table_file("/nonexistent/table.json"), UsageError);
}

TEST(StagedSet, JsonRoundTrip) {
  StagedSet s = table({{0, 2}, {2, 7}});
  EXPECT_EQ(load_stage_table(to_json(s).dump()), s);
}

TEST(Domain, VertexFormulas) {
  StagedSet s = table({{0, 2}});
  EXPECT_EQ(vertex(4, s), P(17, 0, 32));
  EXPECT_EQ(vertex(5, s), P(1, 1, 2));
  EXPECT_EQ(vertex(6, s), P(15, 0, 32));
  // j = 1 has not entered: a spike at 1/4.
  EXPECT_EQ(vertex(7, s), P(1, 0, 4));
  EXPECT_EQ(vertex(8, s), P(1, 1, 4));
  EXPECT_EQ(vertex(9, s), P(1, 0, 4));
  EXPECT_THROW(vertex(10, s, 1), ValidationError);
}

TEST(Domain, GapIdentityOverBattery) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 50; ++it) {
    std::size_t depth = 1 + it % 6;
    StagedSet s = oracle::random_table(rng, depth, 12);
    DomainModel dm = build_domain(s, depth);
    for (std::size_t j = 0; j < depth; ++j) {
      Q gap = dm.vertex(3 * j + 4).re - dm.vertex(3 * j + 6).re;
      auto st = s.stage_of(j);
      EXPECT_EQ(gap, st ? pow2(-static_cast<int>(j + 2 + *st)) : Q(0));
    }
  }
}

TEST(Domain, ConstituentLabels) {
  DomainModel dm = build_domain(table({{1, 0}}), 3);
  ASSERT_EQ(dm.constituents().size(), 2u * 3 + 4);
  EXPECT_EQ(dm.constituent(0).kind, ConstituentKind::SquareSide);
  EXPECT_EQ(dm.constituent(3).kind, ConstituentKind::BottomRun);
  EXPECT_EQ(dm.constituent(DomainModel::tent_constituent(0)).kind, ConstituentKind::Spike);
  EXPECT_EQ(dm.constituent(DomainModel::tent_constituent(1)).kind, ConstituentKind::Tent);
  EXPECT_EQ(dm.constituent(9).segments[0].b, P(0, 0));
  EXPECT_THROW(dm.constituent(10), ValidationError);
  EXPECT_THROW(build_domain(table({}), 0), UsageError);
  EXPECT_THROW(build_domain(table({}), 6), ValidationError);
  EXPECT_TRUE(boundary_simple_away_from_spikes(dm));
}

TEST(Domain, MembershipAndBoundary) {
  DomainModel dm = build_domain(table({{0, 2}}), 2);
  EXPECT_TRUE(point_in_D(dm, dm.interior_ref()));
  EXPECT_FALSE(point_in_D(dm, P(1, 1, 2)));      // tent apex
  EXPECT_FALSE(point_in_D(dm, P(1, 1, 4)));      // inside tent 0
  EXPECT_FALSE(point_in_D(dm, P(2, 0)));
  EXPECT_TRUE(point_in_D(dm, P(3, 1, 4)));       // between tent 0 and the right side
  const QPoint on_spike{Q(1, 4), Q(1, 8)};
  EXPECT_FALSE(point_in_D(dm, on_spike));
  EXPECT_TRUE(point_in_D(dm, {Q(1, 4) + Q(1, 1024), Q(1, 8)}));
  auto loc = constituent_of(dm, on_spike);
  EXPECT_TRUE(loc.on_boundary);
  EXPECT_EQ(*loc.constituent, DomainModel::tent_constituent(1));
  EXPECT_TRUE(constituent_of(dm, P(0, 1)).is_vertex);
}

TEST(Domain, JsonAndSvg) {
  DomainModel dm = build_domain(table({{0, 2}}), 1);
  json doc = domain_to_json(dm);
  DomainModel back = domain_from_json(json::parse(doc.dump()));
  EXPECT_EQ(back.vertices(), dm.vertices());
  doc["vertices"][4] = point_to_json(P(1, 0, 2));
  EXPECT_THROW(domain_from_json(doc), ValidationError);
  std::string svg = domain_to_svg(dm);
  EXPECT_NE(svg.find("class=\"tent\""), std::string::npos);
  std::string spikes = domain_to_svg(build_domain(table({}), 3));
  std::size_t count = 0;
  for (std::size_t at = spikes.find("class=\"spike\""); at != std::string::npos;
       at = spikes.find("class=\"spike\"", at + 1))
    ++count;
  EXPECT_EQ(count, 3u);
}

TEST(EffectiveSets, RectMeetsSigmaExamples) {
  DomainModel dm = build_domain(table({{0, 2}}), 2);
  EXPECT_TRUE(rect_meets_sigma(dm, QRect::open(Q(-1, 4), Q(1, 4), Q(1, 4), Q(3, 4)), 0));
  EXPECT_FALSE(rect_meets_sigma(dm, QRect::open(Q(1, 4), Q(3, 8), Q(1, 4), Q(3, 8)), 0));
  EXPECT_TRUE(rect_meets_sigma(dm, QRect::open(Q(33, 64), Q(35, 64), Q(-1, 64), Q(1, 64)), 4));
  EXPECT_THROW(rect_meets_sigma(dm, QRect::closed(0, 1, 0, 1), 0), UsageError);
  EXPECT_THROW(rect_meets_sigma(dm, QRect::open(0, 1, 0, 1), 99), ValidationError);
}

TEST(EffectiveSets, RectMeetsSigmaMatchesClipping) {
  std::mt19937_64 rng(5);
  DomainModel dm = build_domain(oracle::random_table(rng, 4, 6), 4);
  for (int it = 0; it < 3000; ++it) {
    auto c = [&] { return oracle::random_dyadic(rng, -8, 72, 6); };
    Q x0 = c(), x1 = c(), y0 = c(), y1 = c();
    if (x0 == x1 || y0 == y1) continue;
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    QRect r = QRect::open(x0, x1, y0, y1);
    bool any = false;
    for (const auto& con : dm.constituents()) {
      bool expect = false;
      for (const auto& s : con.segments) expect = expect || oracle::clip_meets(s, r);
      ASSERT_EQ(rect_meets_sigma(dm, r, con.index), expect);
      any = any || expect;
    }
    bool via_boundary = false;
    for (const auto& s : dm.boundary_segments()) via_boundary = via_boundary || seg_meets_rect(s, r);
    ASSERT_EQ(any, via_boundary);
  }
}

TEST(EffectiveSets, RectAvoidsRest) {
  DomainModel dm = build_domain(table({{0, 2}}), 2);
  for (std::size_t k = 0; k < dm.constituents().size(); ++k) {
    EXPECT_TRUE(rect_avoids_rest(dm, QRect::closed(Q(1, 4), Q(3, 8), Q(5, 8), Q(3, 4)), k));
    EXPECT_FALSE(rect_avoids_rest(dm, QRect::closed(Q(-1, 8), Q(1, 8), Q(-1, 8), Q(1, 8)), k));
  }
  QRect hug = QRect::closed(Q(-1, 16), Q(1, 16), Q(7, 16), Q(9, 16));
  EXPECT_TRUE(rect_avoids_rest(dm, hug, 0));
  EXPECT_FALSE(rect_avoids_rest(dm, hug, 2));
  EXPECT_THROW(rect_avoids_rest(dm, hug.as(RectKind::Open), 0), UsageError);
}

TEST(EffectiveSets, MjRect) {
  auto [m1, r1] = mj_rect(1);
  EXPECT_EQ(m1, Q(11, 64));
  EXPECT_EQ(r1, QRect::open(Q(-1, 2), Q(11, 64), Q(-1, 2), Q(11, 64)));
  EXPECT_EQ(mj_rect(2).first, Q(11, 128));
  EXPECT_THROW(mj_rect(0), UsageError);
  for (std::size_t j = 1; j < 20; ++j) {
    auto [m, r] = mj_rect(j);
    const int e = static_cast<int>(j);
    EXPECT_LT(pow2(-(e + 2)), m);
    EXPECT_LT(m, pow2(-(e + 1)));
    EXPECT_TRUE(r.contains(P(0, 0)));
  }
}

// Vertices beyond the j-th tent fall in R_j from index 3j+7 on, but tent
// j's own feet and apex (indices 3j+4..3j+6) stay outside, whatever the stage.
TEST(EffectiveSets, MjRectTailMembership) {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 30; ++it) {
    StagedSet s = oracle::random_table(rng, 6, 10);
    DomainModel dm = build_domain(s, 6);
    for (std::size_t j = 1; j < 5; ++j) {
      QRect r = mj_rect(j).second;
      for (std::size_t n = 3 * j + 7; n < dm.vertices().size(); ++n) EXPECT_TRUE(r.contains(dm.vertex(n)));
      EXPECT_FALSE(r.contains(dm.vertex(3 * j + 5)));
      EXPECT_FALSE(r.contains(dm.vertex(3 * j + 4)));
    }
  }
}

TEST(EffectiveSets, OpenDStreamFirstEmission) {
  DomainModel dm = build_domain(table({{0, 2}}), 2);
  RectStream st = enum_open_D(dm, 4);
  auto first = st.next();
  ASSERT_TRUE(first);
  EXPECT_EQ(st.level(), 2);
  EXPECT_TRUE(first->contains(dm.interior_ref()));
}

TEST(EffectiveSets, StreamsAreSound) {
  DomainModel dm = build_domain(table({{1, 3}}), 3);
  RectStream in_d = enum_open_D(dm, 5);
  std::size_t n = 0;
  while (auto r = in_d.next()) {
    ++n;
    ASSERT_FALSE(r->is_open());
    for (const auto& s : dm.boundary_segments()) ASSERT_FALSE(oracle::clip_meets(s, *r));
    for (const auto& c : r->corners()) ASSERT_TRUE(point_in_D(dm, c));
  }
  EXPECT_GT(n, 100u);
  RectStream on_x = enum_closed_X(dm, 5);
  n = 0;
  while (auto r = on_x.next()) {
    ++n;
    ASSERT_TRUE(r->is_open());
    bool meets = false;
    for (const auto& s : dm.boundary_segments()) meets = meets || oracle::clip_meets(s, *r);
    ASSERT_TRUE(meets);
  }
  EXPECT_GT(n, 100u);
}

TEST(EffectiveSets, OpenDStreamCoverage) {
  DomainModel dm = build_domain(table({{0, 1}}), 2);
  const int level = 5;
  std::vector<QRect> rects;
  RectStream st = enum_open_D(dm, level);
  while (auto r = st.next()) rects.push_back(*r);
  const Q reach = 2 * pow2(-level);
  std::size_t checked = 0;
  for (long a = 1; a < 128; a += 3) {
    for (long b = 1; b < 128; b += 3) {
      QPoint p{Q(a, 128), Q(b, 128)};
      if (!point_in_D(dm, p)) continue;
      if (oracle::dist_sq_to_boundary(dm, p) < reach * reach) continue;
      ++checked;
      bool covered = false;
      for (const auto& r : rects) covered = covered || r.contains(p);
      ASSERT_TRUE(covered) << p;
    }
  }
  EXPECT_GT(checked, 200u);
}
