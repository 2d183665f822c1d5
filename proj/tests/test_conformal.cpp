#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bext/conformal_io.hpp"
#include "bext/domain_io.hpp"
#include "oracles.hpp"

using namespace bext;

namespace {

constexpr double kPi = std::numbers::pi;

QPoint P(Q a, Q b) { return {std::move(a), std::move(b)}; }

const ConformalMap& square() {
  static const ConformalMap cm = solve_square_fixture();
  return cm;
}

const ConformalMap& spike_map() {
  static const ConformalMap cm = solve_map(build_domain(StagedSet(1, 12), 2));
  return cm;
}

double dist_to_polygon(cplx w, const std::vector<QPoint>& poly) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < poly.size(); ++k)
    d = std::min(d, detail::point_segment_distance(w, poly[k].to_complex(), poly[(k + 1) % poly.size()].to_complex()));
  return d;
}

/// Finest exact grid minimum of |phi(0) - phi(zeta/2)|, for comparison.
double fine_rho(const ConformalMap& cm, int grid) {
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) lo = std::min(lo, std::abs(cm.eval(std::polar(0.5, 2 * kPi * i / grid)) - cm.center()));
  return lo;
}

}  // namespace

TEST(Quadrature, LegendreIsExactToDegree2nMinus1) {
  auto r = gauss_legendre(16);
  for (int p = 0; p <= 31; ++p) {
    double s = 0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], p);
    EXPECT_NEAR(s, p % 2 ? 0.0 : 2.0 / (p + 1), 1e-13) << p;
  }
}

TEST(Quadrature, JacobiMoments) {
  for (double b : {0.5, 1.0, -0.5, 1.5}) {
    auto r = gauss_jacobi(12, 0, b);
    double m0 = 0, m1 = 0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) m0 += r.weights[i], m1 += r.weights[i] * r.nodes[i];
    EXPECT_NEAR(m0, std::pow(2, b + 1) / (b + 1), 1e-12);
    EXPECT_NEAR(m1, std::pow(2, b + 2) / (b + 2) - std::pow(2, b + 1) / (b + 1), 1e-12);
  }
}

TEST(SolveMap, SquareFixtureResidualAndSymmetry) {
  const auto& cm = square();
  EXPECT_LE(cm.error(), 1e-6);
  EXPECT_EQ(cm.center(), cplx(0.5, 0.5));
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 100; ++i) {
    cplx z(u(rng), u(rng));
    if (std::abs(z) >= 0.99) continue;
    const cplx c = cm.center();
    EXPECT_NEAR(std::abs(cm.eval(cplx(0, 1) * z) - (c + cplx(0, 1) * (cm.eval(z) - c))), 0, 1e-5);
    auto back = cm.inverse(cm.eval(z));
    ASSERT_TRUE(back.has_value());
    EXPECT_NEAR(std::abs(*back - z), 0, 1e-6);
  }
}

TEST(SolveMap, Normalization) {
  for (const ConformalMap* cm : {&square(), &spike_map()}) {
    EXPECT_EQ(cm->eval(0), cm->center());
    cplx d = cm->derivative(0);
    EXPECT_GT(d.real(), 0);
    EXPECT_NEAR(d.imag(), 0, 1e-12);
    for (int i = 0; i < 8; ++i) {
      cplx z = std::polar(1e-4, 2 * kPi * i / 8);
      EXPECT_NEAR(std::abs(std::arg((cm->eval(z) - cm->center()) / z)), 0, 1e-3);
    }
  }
}

TEST(SolveMap, PrevertexOrderIsMonotone) {
  for (const ConformalMap* cm : {&square(), &spike_map()}) {
    const auto& z = cm->prevertices();
    double total = 0;
    for (std::size_t k = 1; k <= z.size(); ++k) {
      double a = std::arg(z[k % z.size()] / z[k - 1]);
      EXPECT_GT(a, 0);
      total += a;
    }
    EXPECT_NEAR(total, 2 * kPi, 1e-12);
  }
}

TEST(SolveMap, SpikeDomainContainment) {
  auto rep = containment_check(spike_map());
  EXPECT_GT(rep.points, 2000u);
  EXPECT_EQ(rep.outside, 0u);
}

TEST(SolveMap, DepthAboveCrowdingBoundIsUsageError) {
  DomainModel dm = build_domain(StagedSet(5, 12), 6);
  EXPECT_THROW(solve_map(dm), UsageError);
  SolveOptions opt;
  opt.max_depth = 1;
  EXPECT_THROW(solve_map(build_domain(StagedSet(1, 12), 2), opt), UsageError);
}

TEST(SolveMap, RandomTablesSolve) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 4; ++t) {
    std::size_t depth = 1 + t % 3;
    DomainModel dm = build_domain(oracle::random_table(rng, depth, 6), depth);
    ConformalMap cm = solve_map(dm);
    EXPECT_LE(cm.error(), 1e-8) << cm.diagnostics();
    EXPECT_EQ(cm.depth(), depth);
    EXPECT_EQ(containment_check(cm, 8, 48).outside, 0u);
  }
}

TEST(SolveMap, MapDocumentRoundTrip) {
  const auto& cm = spike_map();
  json doc = map_to_json(cm);
  ConformalMap back = map_from_json(json::parse(doc.dump()));
  EXPECT_EQ(map_to_json(back).dump(), doc.dump());
  for (cplx z : {cplx(0.3, 0.2), cplx(-0.9, 0.1), cplx(0, -0.99)}) EXPECT_EQ(back.eval(z), cm.eval(z));
  doc["prevertices_ccw"][1][0] = 0.0;
  EXPECT_THROW(map_from_json(doc), ValidationError);
  EXPECT_THROW(map_from_json(json{{"format", "nope"}}), ValidationError);
}

TEST(BoundaryPoint, CornerPrevertexHitsCorner) {
  const auto& cm = square();
  const cplx zeta = cm.prevertices()[cm.ccw_index(2)];
  for (double p : {1e-2, 1e-3, 1e-4, 1e-5}) {
    Estimate e = boundary_point(cm, zeta, p);
    EXPECT_LE(e.error, p);
    EXPECT_LE(std::abs(e.value - cplx(1, 1)), e.error);
  }
}

TEST(BoundaryPoint, EveryCornerOfTheSpikeDomain) {
  const auto& cm = spike_map();
  for (std::size_t n = 0; n < cm.vertices().size(); ++n) {
    const cplx corner = cm.vertices()[n];
    if (corner == cplx(0, 0)) continue;  // nu_0: crowded, left out at finite depth
    Estimate e = boundary_point(cm, cm.prevertices()[n], 1e-3);
    EXPECT_LE(std::abs(e.value - corner), e.error) << n;
  }
}

TEST(BoundaryPoint, RejectsBadInput) {
  EXPECT_THROW(boundary_point(square(), cplx(0.5, 0), 1e-3), UsageError);
  EXPECT_THROW(boundary_point(square(), cplx(1, 0), 0), UsageError);
  EXPECT_THROW(boundary_point(square(), cplx(1, 0), 1e-30), SolverError);
}

TEST(Rho, PositiveAndBelowGridMinimum) {
  for (const ConformalMap* cm : {&square(), &spike_map()}) {
    const Q rho = rho_lower_bound(*cm);
    EXPECT_GT(rho, 0);
    EXPECT_LE(to_double(rho), fine_rho(*cm, 8192));
    // Refining the grid moves the bound by at most the coarse safety term.
    double lip = 0;
    for (int i = 0; i < 512; ++i) lip = std::max(lip, std::abs(cm->derivative(std::polar(0.5, 2 * kPi * i / 512))));
    const double safety = 1.5 * lip * kPi / 1024 + cm->error();
    EXPECT_LE(to_double(rho_lower_bound(*cm, 1024)) - to_double(rho), safety);
  }
  EXPECT_THROW(rho_lower_bound(square(), 4), UsageError);
}

TEST(ImageArc, EndpointsTouchBoundaryAndDiameterShrinks) {
  const auto& cm = spike_map();
  const cplx zeta = std::polar(1.0, 0.7);
  double last = std::numeric_limits<double>::infinity();
  for (double r : {0.4, 0.2, 0.1, 0.05, 0.01}) {
    auto arc = image_arc(cm, r, zeta, 64);
    ASSERT_EQ(arc.size(), 65u);
    EXPECT_LE(dist_to_polygon(arc.front().value, cm.polygon()), 1e-9);
    EXPECT_LE(dist_to_polygon(arc.back().value, cm.polygon()), 1e-9);
    const PolygonRegion region(cm.polygon());
    for (std::size_t i = 1; i + 1 < arc.size(); ++i) EXPECT_TRUE(region.contains(to_qpoint(arc[i].value)));
    double d = 0;
    for (auto& a : arc)
      for (auto& b : arc) d = std::max(d, std::abs(a.value - b.value));
    EXPECT_LT(d, last);
    last = d;
  }
  EXPECT_THROW(image_arc(cm, 1.0, zeta, 8), UsageError);
}

TEST(Recognize, ClauseOneViolation) {
  WitnessParams wp{Q(1, 2), Q(1, 4), Q(0)};
  auto rep = check_recognizably_bounds(square(), {P(1, Q(1, 4)), P(Q(1, 2), Q(1, 2)), P(1, Q(3, 4))}, wp);
  EXPECT_EQ(rep.clauses[0].verdict, Verdict::Fail);
  EXPECT_EQ(rep.overall, Verdict::Fail);
  wp = {Q(1, 4), Q(1, 4), Q(0)};
  EXPECT_EQ(check_recognizably_bounds(square(), {P(1, Q(1, 4)), P(1, Q(3, 4))}, wp).clauses[0].verdict, Verdict::Fail);
}

TEST(Recognize, BuiltCrosscutPassesOnSquare) {
  const auto& cm = square();
  for (Q turn : {Q(0), Q(1, 8), Q(3, 10)}) {
    WitnessParams wp{Q(1, 4), Q(3, 16), turn};
    auto rc = build_recognizing_crosscut(cm, wp);
    ASSERT_TRUE(rc.has_value());
    EXPECT_FALSE(PolygonRegion(cm.polygon()).crosscut_violation(rc->polyline).has_value());
    auto rep = check_recognizably_bounds(cm, rc->polyline, wp, rc->preimages);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(rep.clauses[i].verdict, Verdict::Pass) << i << " " << rep.clauses[i].note;
    EXPECT_EQ(rep.m_tilde, to_double(wp.r0) / 4);
  }
}

TEST(Recognize, FarCrosscutFailsClauseTwo) {
  WitnessParams wp{Q(1, 4), Q(3, 16), Q(0)};  // zeta = 1 lands on the side x = 1
  auto rep = check_recognizably_bounds(square(), {P(0, Q(1, 8)), P(Q(1, 2), Q(1, 8))}, wp);
  EXPECT_EQ(rep.clauses[0].verdict, Verdict::Pass);
  EXPECT_EQ(rep.clauses[1].verdict, Verdict::Fail);
  EXPECT_LT(rep.clauses[1].margin, 0);
  EXPECT_EQ(rep.overall, Verdict::Fail);
}

TEST(Recognize, ReportDocument) {
  WitnessParams wp{Q(1, 4), Q(3, 16), Q(0)};
  auto rc = build_recognizing_crosscut(square(), wp);
  ASSERT_TRUE(rc);
  json doc = recognize_report_to_json(check_recognizably_bounds(square(), rc->polyline, wp, rc->preimages));
  EXPECT_EQ(doc["overall"], "pass");
  EXPECT_EQ(doc["clauses"].size(), 4u);
  EXPECT_TRUE(doc["clauses"][2]["margin"].is_number());
}

TEST(Recognize, SpikeDomainCrosscuts) {
  const auto& cm = spike_map();
  const PolygonRegion region(cm.polygon());
  const Q rho = rho_lower_bound(cm);
  int passed = 0;
  for (int i = 0; i < 16; ++i) {
    WitnessParams wp{Q(1, 16), Q(3, 64), Q(2 * i + 1, 32)};
    auto rc = build_recognizing_crosscut(cm, wp);
    if (!rc) continue;
    const cplx zeta = wp.zeta();
    const double s = to_double(wp.s0), r = to_double(wp.r0);
    wp.m_tilde = 0.25 * r * std::abs(cm.eval((1 - s) * zeta) - cm.eval((1 - r) * zeta)) / (s - r);
    if (check_recognizably_bounds(cm, rc->polyline, wp, rc->preimages).overall != Verdict::Pass) continue;
    if (!acceptable_crosscut(region, rc->polyline, rho)) continue;
    ++passed;
    auto w = witness_bound_check(cm, rc->polyline, wp, 300, i);
    EXPECT_EQ(w.failures, 0u);
  }
  EXPECT_GE(passed, 8);
}

TEST(Witness, FixturePassesAndUndersizedFakeFails) {
  const auto& cm = square();
  WitnessParams wp{Q(1, 4), Q(3, 16), Q(1, 8)};
  auto rc = build_recognizing_crosscut(cm, wp);
  ASSERT_TRUE(rc);
  auto good = witness_bound_check(cm, rc->polyline, wp, 1000, 0);
  EXPECT_EQ(good.verdict, Verdict::Pass);
  EXPECT_EQ(good.pairs, 1000u);
  EXPECT_GT(good.worst_margin, 0);
  // A crosscut clipping the corner at 0 is far too small to trap D_{r0}(zeta)'s image.
  auto bad = witness_bound_check(cm, {P(0, Q(1, 64)), P(Q(1, 64), 0)}, wp, 1000, 0);
  EXPECT_EQ(bad.verdict, Verdict::Fail);
  EXPECT_GT(bad.failures, 0u);
  json doc = witness_report_to_json(bad);
  EXPECT_EQ(doc["verdict"], "fail");
}

TEST(Witness, CoincidentPairsAreTrivial) {
  // With r0 tiny every sampled pair is nearly equal.
  const auto& cm = square();
  WitnessParams wp{Q(1, 4), Q(1, 1 << 30), Q(0)};
  auto rep = witness_bound_check(cm, {P(1, Q(1, 4)), P(Q(1, 2), Q(1, 2)), P(1, Q(3, 4))}, wp, 200, 3);
  EXPECT_EQ(rep.verdict, Verdict::Pass);
}

TEST(Cover, ExactArcPredicates) {
  for (double th : {0.0, 0.3, 1.6, 3.1, 4.0, 5.9, -0.2}) {
    QPoint p = circle_point(th);
    EXPECT_EQ(norm_sq(p), Q(1));
    EXPECT_NEAR(std::remainder(detail::angle_of(p) - th, 2 * kPi), 0, 1e-11);
  }
  QRect r = QRect::open(Q(9, 10), Q(11, 10), Q(-1, 2), Q(1, 2));
  EXPECT_TRUE(arc_in_rect(circle_point(-0.3), circle_point(0.3), r));
  EXPECT_FALSE(arc_in_rect(circle_point(0.3), circle_point(-0.3), r));  // the long way round
  EXPECT_FALSE(arc_in_rect(circle_point(-0.3), circle_point(0.6), r));
  // Arc through an axis point that pokes out of a box around its chord.
  QRect thin = QRect::open(Q(99, 100), Q(11, 10), Q(-1, 2), Q(1, 2));
  EXPECT_FALSE(arc_in_rect(circle_point(-0.3), circle_point(0.3), thin));
}

TEST(Cover, IndependentCoverageCheck) {
  std::vector<QRect> four{QRect::open(Q(1, 2), Q(3, 2), Q(-1), Q(1)), QRect::open(Q(-3, 2), Q(-1, 2), Q(-1), Q(1)),
                          QRect::open(Q(-1), Q(1), Q(1, 2), Q(3, 2)), QRect::open(Q(-1), Q(1), Q(-3, 2), Q(-1, 2))};
  EXPECT_TRUE(covers_unit_circle(four));
  four[0] = QRect::open(Q(3, 4), Q(3, 2), Q(-1), Q(1));
  EXPECT_TRUE(covers_unit_circle(four));
  four[2] = QRect::open(Q(-1), Q(1), Q(3, 4), Q(3, 2));  // now a gap around angle pi/4
  EXPECT_FALSE(covers_unit_circle(four));
}

TEST(Cover, SquareCoversAndStrongEval) {
  const auto& cm = square();
  const Q rho = rho_lower_bound(cm);
  std::vector<Cover> covers;
  for (int k = 1; k <= 3; ++k) {
    covers.push_back(oscillation_cover(cm, k, rho));
    const Cover& c = covers.back();
    EXPECT_TRUE(verify_certificate(c)) << k;
    EXPECT_TRUE(covers_unit_circle(c.rects())) << k;
    for (const auto& e : c.elements) {
      EXPECT_LT(e.oscillation + 2 * e.error, std::ldexp(1.0, -k));
      EXPECT_TRUE(e.rect.is_open());
    }
    if (k > 1) EXPECT_GE(c.elements.size(), covers[k - 2].elements.size());
  }
  // The boundary arc trapped by an element has at most two straight legs,
  // each no longer than diam(C) < rho / (1 + sqrt 2).
  EXPECT_GT(double(covers[0].elements.size()), 4 * (1 + std::numbers::sqrt2) / to_double(rho) / 2);

  json doc = cover_to_json(covers[0]);
  Cover back = cover_from_json(json::parse(doc.dump()));
  EXPECT_EQ(cover_to_json(back).dump(), doc.dump());
  // Dropping the arcs owned by one element breaks the certificate.
  const std::size_t victim = doc["owner"][5].get<std::size_t>();
  json owners = json::array(), bps = json::array();
  for (std::size_t i = 0; i < doc["owner"].size(); ++i)
    if (doc["owner"][i] != victim) owners.push_back(doc["owner"][i]), bps.push_back(doc["breakpoints"][i]);
  doc["owner"] = owners, doc["breakpoints"] = bps;
  EXPECT_THROW(cover_from_json(doc), ValidationError);

  // An input inside an element of the k = 3 cover comes back at side <= 1/4.
  const Cover& c3 = covers[2];
  for (std::size_t i = 0; i < c3.elements.size(); i += 7) {
    const QRect& E = c3.elements[i].rect;
    const Q wx = (E.x_hi() - E.x_lo()) / 8, wy = (E.y_hi() - E.y_lo()) / 8;
    QRect R = QRect::open(E.x_lo() + wx, E.x_hi() - wx, E.y_lo() + wy, E.y_hi() - wy);
    StrongEvalOptions opt;
    opt.verify = true;
    auto ans = strong_eval(cm, covers, R, opt);
    ASSERT_TRUE(ans.has_value());
    EXPECT_EQ(ans->k, 3);
    EXPECT_LE(ans->out.x_hi() - ans->out.x_lo(), Q(1, 4));
    EXPECT_LE(ans->out.y_hi() - ans->out.y_lo(), Q(1, 4));
  }
  EXPECT_FALSE(strong_eval(cm, covers, QRect::open(Q(-2), Q(2), Q(-2), Q(2))).has_value());
  EXPECT_THROW(strong_eval(cm, covers, QRect::closed(Q(0), Q(1), Q(0), Q(1))), UsageError);

  // Nested inputs around a circle point converge on the boundary value.
  const double theta = 0.9;
  const QPoint z = circle_point(theta);
  const Estimate target = boundary_point(cm, std::polar(1.0, theta), 1e-9);
  Q last_side = Q(10);
  int answered = 0;
  for (int m = 4; m <= 24; m += 2) {
    const Q h = pow2(-m);
    auto ans = strong_eval(cm, covers, QRect::open(z.re - h, z.re + h, z.im - h, z.im + h));
    if (!ans) continue;
    ++answered;
    const Q side = std::max(ans->out.x_hi() - ans->out.x_lo(), ans->out.y_hi() - ans->out.y_lo());
    EXPECT_LE(side, last_side);
    last_side = side;
    EXPECT_LT(to_double(ans->out.x_lo()), target.value.real() + target.error);
    EXPECT_GT(to_double(ans->out.x_hi()), target.value.real() - target.error);
    EXPECT_LT(to_double(ans->out.y_lo()), target.value.imag() + target.error);
    EXPECT_GT(to_double(ans->out.y_hi()), target.value.imag() - target.error);
  }
  EXPECT_GE(answered, 8);
  EXPECT_LT(to_double(last_side), 1e-5);
}

TEST(Cover, RejectsUnreachableAccuracy) {
  EXPECT_THROW(oscillation_cover(square(), 40, rho_lower_bound(square())), UsageError);
  EXPECT_THROW(oscillation_cover(square(), -1, Q(1, 4)), UsageError);
}
