#include <gtest/gtest.h>

#include <random>

#include "bext/connectivity.hpp"
#include "oracles.hpp"

using namespace bext;

namespace {

QPoint P(Q a, Q b) { return {std::move(a), std::move(b)}; }

StagedSet one_tent(std::uint64_t j, std::uint64_t s, std::uint64_t n_max = 3) {
  StagedSet t(n_max, 12);
  t.add(j, s);
  return t;
}

}  // namespace

TEST(Connectivity, GraphShape) {
  DomainModel dm = build_domain(one_tent(1, 2), 3);
  BoundaryGraph bg(dm);
  // 3J+4 vertices, two of them repeated (feet of the spikes at j = 0, 2).
  EXPECT_EQ(bg.nodes().size(), 3u * 3 + 4 - 2);
  EXPECT_EQ(bg.stems().size(), 2u);
  EXPECT_EQ(bg.edges().size(), bg.nodes().size());
}

TEST(Connectivity, MinArcDiameterExamples) {
  DomainModel dm = build_domain(one_tent(0, 2), 2);
  BoundaryGraph bg(dm);
  EXPECT_EQ(min_arc_diameter_sq(bg, P(Q(17, 32), 0), P(Q(15, 32), 0)), Q(257, 1024));
  EXPECT_EQ(min_arc_diameter_sq(bg, P(0, Q(1, 8)), P(0, Q(5, 8))), Q(1, 4));
  EXPECT_EQ(min_arc_diameter_sq(bg, P(0, 1), P(1, 1)), Q(1));
  // On the spike stem at 1/4, the way down and back along the bottom is short.
  EXPECT_EQ(min_arc_diameter_sq(bg, P(Q(1, 4), Q(1, 8)), P(Q(3, 8), 0)), Q(1, 64) + Q(1, 64));
  EXPECT_THROW(min_arc_diameter_sq(bg, P(Q(1, 3), Q(1, 3)), P(0, Q(1, 2))), ValidationError);
  EXPECT_THROW(min_arc_diameter_sq(bg, P(0, Q(1, 2)), P(0, Q(1, 2))), ValidationError);
}

TEST(Connectivity, ArcFloorBetweenFeet) {
  std::mt19937_64 rng(41);
  for (int it = 0; it < 50; ++it) {
    std::size_t depth = 1 + it % 6;
    DomainModel dm = build_domain(oracle::random_table(rng, depth, 12), depth);
    BoundaryGraph bg(dm);
    for (std::size_t j = 0; j < depth; ++j) {
      if (!dm.staged().contains(j)) continue;
      Q floor = pow2(-static_cast<int>(j + 1));
      EXPECT_GE(min_arc_diameter_sq(bg, dm.vertex(3 * j + 4), dm.vertex(3 * j + 6)), floor * floor);
    }
  }
}

// Sampled pairs whose every joining arc is long must be at least delta_k apart,
// and the closest sampled such pair is close to delta_k.
TEST(Connectivity, DeltaAgainstSampledPairs) {
  StagedSet s(2, 12);
  s.add(0, 1);
  DomainModel dm = build_domain(s, 3);
  BoundaryGraph bg(dm);
  ConnectivityOracle oracle(dm);
  const int per_edge = 40;
  std::vector<QPoint> pts;
  for (std::size_t e = 0; e < bg.edges().size(); ++e)
    for (int i = 0; i < per_edge; ++i) pts.push_back(bg.edge_segment(e).at(Q(i, per_edge)));
  const std::uint64_t k_lo = 1, k_hi = 4;
  std::vector<double> delta, sampled(k_hi + 1, 1e9);
  for (std::uint64_t k = 0; k <= k_hi; ++k) delta.push_back(oracle.delta(k).delta);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (pts[i] == pts[j]) continue;
      Q d2 = dist_sq(pts[i], pts[j]);
      if (d2 >= Q(1, 4)) continue;
      Q arc = min_arc_diameter_sq(bg, pts[i], pts[j]);
      double d = std::sqrt(to_double(d2));
      for (std::uint64_t k = k_lo; k <= k_hi; ++k) {
        Q T = pow2(-static_cast<int>(k));
        if (arc < T * T) continue;
        sampled[k] = std::min(sampled[k], d);
        ASSERT_GE(d, delta[k] * (1 - 1e-12)) << k << ' ' << pts[i] << ' ' << pts[j];
      }
    }
  }
  for (std::uint64_t k = k_lo; k <= k_hi; ++k) EXPECT_LE(sampled[k] - delta[k], 2.0 / per_edge) << k;
}

TEST(Connectivity, MlcTableIsValidAndMinimal) {
  DomainModel dm = build_domain(one_tent(1, 3), 3);
  ConnectivityOracle oracle(dm);
  BCF g = mlc_table(oracle, 6);
  EXPECT_TRUE(g.nondecreasing());
  EXPECT_TRUE(validate_bcf(oracle, g, 6).ok);
  for (std::uint64_t k = 0; k <= 6; ++k) EXPECT_GE(g.g[k], k + 1);
  // Tent j at stage s forces g(j + 1) > j + 2 + s.
  EXPECT_GT(g.g[2], 1u + 2 + 3);
  for (std::size_t k = 0; k < g.g.size(); ++k) {
    if (g.g[k] == 0) continue;
    BCF h = g;
    --h.g[k];
    bool expect_valid = h.nondecreasing() && oracle.separates(h.g[k], k);
    EXPECT_EQ(validate_bcf(oracle, h, 6).ok, expect_valid) << k;
  }
  BCF slack = g;
  for (auto& v : slack.g) ++v;
  EXPECT_TRUE(validate_bcf(oracle, slack, 6).ok);
}

TEST(Connectivity, ZeroFunctionHasCounterexample) {
  DomainModel dm = build_domain(one_tent(0, 5), 2);
  BCF zero{std::vector<std::uint64_t>(5, 0)};
  BcfVerdict v = validate_bcf(dm, zero, 4);
  ASSERT_FALSE(v.ok);
  ASSERT_TRUE(v.counterexample);
  EXPECT_LE(v.counterexample->distance, std::ldexp(1.0, -static_cast<int>(v.counterexample->k)));
  BCF down{{3, 2, 4}};
  EXPECT_EQ(validate_bcf(dm, down, 2).reason, "not increasing");
}

TEST(Connectivity, ReductionRecoversMembership) {
  std::mt19937_64 rng(43);
  for (int it = 0; it < 6; ++it) {
    std::size_t depth = 1 + it % 4;
    StagedSet s = oracle::random_table(rng, depth, 6);
    DomainModel dm = build_domain(s, depth);
    ConnectivityOracle oracle(dm);
    BCF g = mlc_table(oracle, depth + 1);
    auto ans = turing_reduce(oracle, dm, g);
    for (std::uint64_t n = 0; n < depth; ++n) {
      EXPECT_EQ(ans.at(n), s.contains(n)) << n;
      // A stage later than g(n+2) would put the feet within 2^-g(n+2) while
      // every arc between them stays at least 2^-(n+1) across.
      auto st = s.stage_of(n);
      if (!st) continue;
      EXPECT_LE(*st, g.g[n + 2]);
      Q feet = dm.vertex(3 * n + 4).re - dm.vertex(3 * n + 6).re;
      EXPECT_EQ(feet, pow2(-static_cast<int>(n + 2 + *st)));
    }
  }
  DomainModel dm = build_domain(one_tent(0, 2), 1);
  EXPECT_TRUE(turing_reduce(dm, mlc_table(dm, 2)).at(0));
  EXPECT_THROW(turing_reduce(dm, BCF{{1, 2}}), UsageError);
  EXPECT_THROW(turing_reduce(dm, BCF{{1, 1, 1}}), ValidationError);
}

TEST(Connectivity, BcfJson) {
  BCF g{{1, 3, 4}};
  EXPECT_EQ(bcf_from_json(json::parse(bcf_to_json(g).dump())), g);
  EXPECT_THROW(bcf_from_json(json::parse(R"({"g": [[1, 2]]})")), ValidationError);
  EXPECT_THROW(bcf_from_json(json::parse(R"({"g": []})")), ValidationError);
}
