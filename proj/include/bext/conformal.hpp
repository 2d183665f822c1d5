#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bext/region.hpp"
#include "bext/sc_map.hpp"

namespace bext {

enum class Verdict { Pass, Fail, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

inline Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
  if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
  return Verdict::Pass;
}

struct Estimate {
  cplx value;
  double error = 0;
};

inline cplx unit_point(const Q& turn) { return std::polar(1.0, 2 * std::numbers::pi * to_double(turn)); }

/// Radial limit of phi at zeta: phi(r_m zeta) with r_m = 1 - 2^-m until the
/// Cauchy bar 4 |v_m - v_{m-1}| + map error drops to `precision`.
inline Estimate boundary_point(const ConformalMap& cm, cplx zeta, double precision) {
  if (std::abs(std::abs(zeta) - 1) > 1e-12) throw UsageError("boundary_point: zeta must be unimodular");
  if (!(precision > 0)) throw UsageError("boundary_point: precision must be positive");
  zeta /= std::abs(zeta);
  cplx prev = cm.eval(0.5 * zeta);
  double bar = 0;
  for (int m = 2; m <= 46; ++m) {
    cplx v = cm.eval((1 - std::ldexp(1.0, -m)) * zeta);
    bar = 4 * std::abs(v - prev) + cm.error();
    if (m >= 4 && bar <= precision) return {v, bar};
    prev = v;
  }
  throw SolverError("boundary_point: precision " + std::to_string(precision) + " unreachable at arg " +
                    std::to_string(std::arg(zeta)) + " (last bar " + std::to_string(bar) + ")");
}

/// Rational lower bound for min over unimodular zeta of |phi(0) - phi(zeta/2)|:
/// grid minimum minus a derivative-based continuity term and the map error.
inline Q rho_lower_bound(const ConformalMap& cm, int grid = 512) {
  if (grid < 8) throw UsageError("rho_lower_bound: grid too coarse");
  double lo = std::numeric_limits<double>::infinity(), lip = 0;
  for (int i = 0; i < grid; ++i) {
    cplx z = std::polar(0.5, 2 * std::numbers::pi * i / grid);
    lo = std::min(lo, std::abs(cm.eval(z) - cm.center()));
    lip = std::max(lip, std::abs(cm.derivative(z)));
  }
  // Any point of |z| = 1/2 is within pi/(2 grid) of a grid point along the arc.
  const double safety = 1.5 * lip * std::numbers::pi / (2.0 * grid) + cm.error();
  const Q bound = dyadic_floor(lo - safety, 30);
  if (bound <= 0) throw SolverError("rho_lower_bound: margin collapse, refine the grid");
  return bound;
}

/// Samples of the image of the unit disk's closure on the circle |z - zeta| = r.
/// The closed-disk part is zeta (1 - r e^{i psi}) with |psi| <= arccos(r/2).
inline std::vector<Estimate> image_arc(const ConformalMap& cm, double r, cplx zeta, int resolution) {
  if (!(r > 0 && r < 1)) throw UsageError("image_arc: r must lie in (0, 1)");
  if (resolution < 2) throw UsageError("image_arc: resolution must be at least 2");
  zeta /= std::abs(zeta);
  const double psi_max = std::acos(r / 2);
  std::vector<Estimate> out;
  for (int i = 0; i <= resolution; ++i) {
    double psi = -psi_max + 2 * psi_max * i / resolution;
    cplx z = zeta * (1.0 - std::polar(r, psi));
    if (std::abs(z) > 1) z /= std::abs(z);
    out.push_back({cm.eval(z), cm.error()});
  }
  return out;
}

/// Parameters of the recognizing conditions. The clause-4 threshold is a
/// stand-in; zero selects r0 / 4. A polyline only follows A_{s0,zeta} up to
/// its chord sag, hence the clause-3 band.
struct WitnessParams {
  Q s0, r0;
  Q turn;  // zeta = exp(2 pi i turn)
  double m_tilde = 0;
  double band = 0;  // clause-3 tolerance around |z - zeta| = s0; zero selects s0 / 256

  cplx zeta() const { return unit_point(turn); }
  double on_band() const { return band > 0 ? band : to_double(s0) / 256; }
  double threshold() const { return m_tilde > 0 ? m_tilde : to_double(r0) / 4; }
};

struct ClauseResult {
  Verdict verdict = Verdict::Inconclusive;
  double margin = 0;
  std::string note;
};

struct RecognizeReport {
  std::array<ClauseResult, 4> clauses;
  Verdict overall = Verdict::Inconclusive;
  double m_tilde = 0;
};

namespace detail {

inline double point_segment_distance(cplx p, cplx a, cplx b) {
  cplx d = b - a;
  double len2 = std::norm(d);
  double t = len2 == 0 ? 0 : std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

inline std::vector<cplx> to_complex(const std::vector<QPoint>& poly) {
  std::vector<cplx> out;
  for (const auto& p : poly) out.push_back(p.to_complex());
  return out;
}

inline double polyline_distance(cplx p, const std::vector<cplx>& poly) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) d = std::min(d, point_segment_distance(p, poly[i], poly[i + 1]));
  return d;
}

}  // namespace detail

/// Numeric check of the recognizing conditions for the polyline C.
///
/// Clause 3 reading: A+ is the part of phi(D) cut off by A_{s0,zeta} away
/// from phi(0), i.e. the image of the disk's points within s0 of zeta. Points
/// of C are pulled back through the inverse map (continuing from `hints`,
/// preimages of the polyline nodes, when given) and labelled inside / on /
/// outside the circle |z - zeta| = s0.
inline RecognizeReport check_recognizably_bounds(const ConformalMap& cm, const std::vector<QPoint>& poly,
                                                 const WitnessParams& wp, const std::vector<cplx>& hints = {}) {
  RecognizeReport rep;
  rep.m_tilde = wp.threshold();
  auto& c1 = rep.clauses[0];
  const bool ok1 = wp.r0 > 0 && wp.r0 < wp.s0 && wp.s0 < Q(1, 2);
  c1.verdict = ok1 ? Verdict::Pass : Verdict::Fail;
  c1.margin = std::min({to_double(wp.r0), to_double(wp.s0 - wp.r0), to_double(Q(1, 2) - wp.s0)});
  if (!ok1 || poly.size() < 2) {
    for (int i = 1; i < 4; ++i) rep.clauses[i].note = "skipped";
    if (poly.size() < 2) c1.note = "polyline too short";
    rep.overall = Verdict::Fail;
    return rep;
  }
  const cplx zeta = wp.zeta();
  const double s0 = to_double(wp.s0), r0 = to_double(wp.r0);
  const double err = cm.error();
  const auto C = detail::to_complex(poly);
  const double round = std::ldexp(1.0, -38);

  // Clause 2: the radial point at depth s0 lies on C.
  {
    auto& c = rep.clauses[1];
    const double tol = err + round;
    const double d = detail::polyline_distance(cm.eval((1 - s0) * zeta), C);
    c.margin = tol - d;
    c.verdict = d <= tol ? Verdict::Pass : (d > 4 * tol ? Verdict::Fail : Verdict::Inconclusive);
  }

  // Clause 3: label densely sampled points of C by their preimages.
  enum Label { Plus, On, Minus };
  std::vector<Label> labels;
  std::vector<cplx> plus_pts;
  std::vector<int> plus_run;
  double worst_band = std::numeric_limits<double>::infinity();
  bool lost = false;
  {
    double diam = 0;
    for (auto a : C)
      for (auto b : C) diam = std::max(diam, std::abs(a - b));
    const double spacing = std::max(diam / 120, 1e-12);
    const double band = wp.on_band();
    std::optional<cplx> prev;
    int run = -1;
    Label last = Minus;
    for (std::size_t i = 0; i + 1 < C.size() && !lost; ++i) {
      const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(C[i + 1] - C[i]) / spacing)));
      for (int s = 0; s < steps; ++s) {
        if (i == 0 && s == 0) continue;  // endpoints sit on the boundary
        const double f = static_cast<double>(s) / steps;
        const cplx p = C[i] + f * (C[i + 1] - C[i]);
        std::optional<cplx> hint = prev;
        if (hints.size() == C.size()) hint = hints[i] + f * (hints[i + 1] - hints[i]);
        auto z = cm.inverse(p, hint, 1e-12);
        if (!z) {
          lost = true;
          break;
        }
        prev = z;
        const double tau = std::max(band, 4 * (err + round) / std::max(std::abs(cm.derivative(*z)), 1e-300));
        const double d = std::abs(*z - zeta) - s0;
        Label l = d < -tau ? Plus : (d > tau ? Minus : On);
        worst_band = std::min(worst_band, std::abs(std::abs(d) - tau));
        if (l == Plus) {
          if (labels.empty() || last != Plus) ++run;
          plus_pts.push_back(p);
          plus_run.push_back(run);
        }
        labels.push_back(l);
        last = l;
      }
    }
    auto& c = rep.clauses[2];
    c.margin = worst_band;
    if (lost) {
      c.verdict = Verdict::Inconclusive;
      c.note = "inverse map failed along C";
    } else {
      auto runs = [&](Label want) {
        int n = 0;
        for (std::size_t i = 0; i < labels.size(); ++i)
          if (labels[i] == want && (i == 0 || labels[i - 1] != want)) ++n;
        return n;
      };
      const int on_runs = runs(On), plus_runs = runs(Plus);
      c.verdict = (on_runs == 1 && plus_runs == 2) ? Verdict::Pass : Verdict::Fail;
      c.note = "on-runs=" + std::to_string(on_runs) + " plus-runs=" + std::to_string(plus_runs);
    }
  }

  // Clause 4: the radial segment between depths s0 and r0 keeps m~ away from
  // the closure of C's part inside A+.
  {
    auto& c = rep.clauses[3];
    if (plus_pts.empty()) {
      c.verdict = lost ? Verdict::Inconclusive : Verdict::Fail;
      c.note = "no part of C in A+";
    } else {
      const int n = 96;
      std::vector<cplx> radial;
      for (int i = 0; i <= n; ++i) radial.push_back(cm.eval((1 - s0 + (s0 - r0) * i / n) * zeta));
      double gap = 0;
      for (int i = 0; i < n; ++i) gap = std::max(gap, std::abs(radial[i + 1] - radial[i]));
      double pgap = 0, d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < plus_pts.size(); ++j) {
        const bool linked = j + 1 < plus_pts.size() && plus_run[j + 1] == plus_run[j];
        if (linked) pgap = std::max(pgap, std::abs(plus_pts[j + 1] - plus_pts[j]));
        for (cplx q : radial)
          d = std::min(d, linked ? detail::point_segment_distance(q, plus_pts[j], plus_pts[j + 1])
                                 : std::abs(q - plus_pts[j]));
      }
      const double slack = 0.5 * gap + pgap + 2 * err;
      c.margin = d - rep.m_tilde;
      if (d - slack > rep.m_tilde)
        c.verdict = Verdict::Pass;
      else if (d + 2 * err < rep.m_tilde)
        c.verdict = Verdict::Fail;
      else
        c.verdict = Verdict::Inconclusive;
    }
  }

  rep.overall = Verdict::Pass;
  for (const auto& c : rep.clauses) rep.overall = combine(rep.overall, c.verdict);
  return rep;
}

/// A crosscut built from the map: the arc of |z - zeta| = s0 through
/// (1 - s0) zeta, continued by straight wings to unit-circle points at
/// distance 7 s0 / 8 from zeta, pushed forward and rounded onto rationals.
struct RecognizingCrosscut {
  std::vector<QPoint> polyline;
  std::vector<cplx> preimages;
  WitnessParams wp;
};

inline std::optional<RecognizingCrosscut> build_recognizing_crosscut(const ConformalMap& cm, const WitnessParams& wp,
                                                                     int arc_samples = 24, int wing_samples = 12) {
  if (!(wp.r0 > 0 && wp.r0 < wp.s0 && wp.s0 < Q(1, 2))) throw UsageError("recognizing crosscut: need 0 < r0 < s0 < 1/2");
  if (!(8 * wp.r0 < 7 * wp.s0)) throw UsageError("recognizing crosscut: r0 must stay below 7 s0 / 8");
  const PolygonRegion region(cm.polygon());
  const cplx zeta = wp.zeta();
  const double s0 = to_double(wp.s0);
  const double beta = std::numbers::pi / 3;
  const double gamma = 2 * std::asin(0.4375 * s0);
  std::vector<cplx> pre;
  const cplx start = zeta * std::polar(1.0, gamma), finish = zeta * std::polar(1.0, -gamma);
  const cplx a0 = zeta * (1.0 - std::polar(s0, -beta)), a1 = zeta * (1.0 - std::polar(s0, beta));
  pre.push_back(start);
  for (int i = 1; i <= wing_samples; ++i) pre.push_back(start + (a0 - start) * (double(i) / wing_samples));
  for (int i = 1; i <= arc_samples; ++i) pre.push_back(zeta * (1.0 - std::polar(s0, -beta + 2 * beta * i / arc_samples)));
  for (int i = 1; i < wing_samples; ++i) pre.push_back(a1 + (finish - a1) * (double(i) / wing_samples));
  pre.push_back(finish);

  RecognizingCrosscut rc;
  rc.wp = wp;
  for (std::size_t i = 0; i < pre.size(); ++i) {
    const cplx w = cm.eval(pre[i]);
    QPoint q = to_qpoint(w);
    if (i == 0 || i + 1 == pre.size()) q = region.snap(q);
    if (!rc.polyline.empty() && rc.polyline.back() == q) continue;
    rc.polyline.push_back(q);
    rc.preimages.push_back(pre[i]);
  }
  if (region.crosscut_violation(rc.polyline)) return std::nullopt;
  return rc;
}

/// Acceptability against a rational lower bound rho for |phi(0) - phi(zeta/2)|:
/// acceptably placed ends and (1 + sqrt 2) diam(C) < min(rho, cap), exactly.
inline bool acceptable_crosscut(const PolygonRegion& region, const std::vector<QPoint>& poly, const Q& rho,
                                std::optional<Q> cap = std::nullopt) {
  if (!region.acceptably_placed(poly.front(), poly.back())) return false;
  Q bound = cap && *cap < rho ? *cap : rho;
  return one_plus_sqrt2_times_less(polyline_diameter_sq(poly), bound * bound);
}

struct WitnessBoundReport {
  Verdict verdict = Verdict::Pass;
  std::size_t pairs = 0;
  std::size_t failures = 0;
  std::size_t inconclusive = 0;
  double worst_margin = std::numeric_limits<double>::infinity();  // (1+sqrt2) diam - |phi(z1) - phi(z2)|
  double diameter = 0;
};

/// Sample pairs in D_{r0}(zeta) intersected with the disk and compare their
/// image distance with (1 + sqrt 2) diam(C). The caller is responsible for
/// the recognizing and acceptability preconditions.
inline WitnessBoundReport witness_bound_check(const ConformalMap& cm, const std::vector<QPoint>& poly,
                                              const WitnessParams& wp, std::size_t pairs = 1000,
                                              std::uint64_t seed = 0, double tolerance = 1e-6) {
  WitnessBoundReport rep;
  rep.diameter = std::sqrt(to_double(polyline_diameter_sq(poly)));
  const double bound = (1 + std::numbers::sqrt2) * rep.diameter;
  const double slack = std::max(tolerance, 2 * cm.error());
  const cplx zeta = wp.zeta();
  const double r0 = to_double(wp.r0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  auto sample = [&] {
    for (;;) {
      cplx d(u(rng), u(rng));
      if (std::abs(d) >= 1) continue;
      cplx z = zeta + r0 * d;
      if (std::abs(z) < 1) return z;
    }
  };
  for (std::size_t i = 0; i < pairs; ++i) {
    const cplx z1 = sample(), z2 = sample();
    const double m = bound - std::abs(cm.eval(z1) - cm.eval(z2));
    rep.worst_margin = std::min(rep.worst_margin, m);
    ++rep.pairs;
    if (m < -slack)
      ++rep.failures;
    else if (m < -tolerance)
      ++rep.inconclusive;
  }
  rep.verdict = rep.failures ? Verdict::Fail : (rep.inconclusive ? Verdict::Inconclusive : Verdict::Pass);
  return rep;
}

struct ContainmentReport {
  std::size_t points = 0;
  std::size_t outside = 0;
  double min_margin = std::numeric_limits<double>::infinity();
};

/// Images of a polar grid, rounded to rationals, tested for exact membership
/// after stepping back from the boundary by the map error.
inline ContainmentReport containment_check(const ConformalMap& cm, int radii = 24, int angles = 96) {
  const PolygonRegion region(cm.polygon());
  ContainmentReport rep;
  for (int i = 1; i <= radii; ++i) {
    const double r = 1 - std::pow(0.7, i);
    for (int j = 0; j < angles; ++j) {
      const cplx w = cm.eval(std::polar(r, 2 * std::numbers::pi * (j + 0.5 * (i % 2)) / angles));
      double edge = std::numeric_limits<double>::infinity();
      const auto& v = region.vertices();
      for (std::size_t k = 0; k < v.size(); ++k)
        edge = std::min(edge, detail::point_segment_distance(w, v[k].to_complex(), v[(k + 1) % v.size()].to_complex()));
      ++rep.points;
      rep.min_margin = std::min(rep.min_margin, edge - cm.error());
      if (edge <= cm.error()) continue;  // within the error bar of X: no verdict either way
      if (!region.contains(to_qpoint(w))) ++rep.outside;
    }
  }
  return rep;
}

}  // namespace bext
