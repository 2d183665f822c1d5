#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "bext/conformal.hpp"

namespace bext {

/// Exact rational point of the unit circle near angle theta, through the
/// half-angle tangent chart (reflected for |theta| > pi/2).
inline QPoint circle_point(double theta, int bits = 40) {
  double t = std::remainder(theta, 2 * std::numbers::pi);
  bool flip = std::abs(t) > std::numbers::pi / 2;
  if (flip) t = std::remainder(t - std::numbers::pi, 2 * std::numbers::pi);
  Q u = dyadic_round(std::tan(t / 2), bits);
  Q d = 1 + u * u;
  QPoint p{(1 - u * u) / d, 2 * u / d};
  return flip ? QPoint{-p.re, -p.im} : p;
}

namespace detail {

/// Position on the circle as (quadrant, key); lexicographic order is angle
/// order on [0, 2 pi).
inline std::pair<int, Q> angle_key(const QPoint& p) {
  if (p.re > 0 && p.im >= 0) return {0, p.im};
  if (p.re <= 0 && p.im > 0) return {1, -p.re};
  if (p.re < 0 && p.im <= 0) return {2, -p.im};
  return {3, p.re};
}

/// Is b on the counter-clockwise arc from a to c (inclusive)?
inline bool ccw_between(const QPoint& a, const QPoint& b, const QPoint& c) {
  auto ka = angle_key(a), kb = angle_key(b), kc = angle_key(c);
  if (ka <= kc) return ka <= kb && kb <= kc;
  return kb >= ka || kb <= kc;
}

}  // namespace detail

/// Exact test that the counter-clockwise arc of the unit circle from a to b
/// (both exactly on the circle) lies in the open rectangle r: the arc is
/// monotone between axis points, so its bounding box is spanned by the ends
/// and the axis points it passes.
inline bool arc_in_rect(const QPoint& a, const QPoint& b, const QRect& r) {
  std::vector<QPoint> pts{a, b};
  for (const QPoint& axis : {QPoint{Q(1), Q(0)}, QPoint{Q(0), Q(1)}, QPoint{Q(-1), Q(0)}, QPoint{Q(0), Q(-1)}})
    if (!(a == b) && detail::ccw_between(a, axis, b)) pts.push_back(axis);
  const QRect open = r.as(RectKind::Open);
  for (const auto& p : pts)
    if (!open.contains(p)) return false;
  return true;
}

struct CoverElement {
  QRect rect;
  WitnessParams wp;
  std::vector<QPoint> crosscut;
  double oscillation = 0;  // sampled, over R intersected with the closed disk
  double error = 0;
};

struct Cover {
  int k = 0;
  std::vector<CoverElement> elements;
  /// Certificate: breakpoints[i] -> breakpoints[i + 1] (cyclically) is a
  /// counter-clockwise arc inside elements[owner[i]].rect.
  std::vector<QPoint> breakpoints;
  std::vector<std::size_t> owner;

  std::vector<QRect> rects() const {
    std::vector<QRect> out;
    for (const auto& e : elements) out.push_back(e.rect);
    return out;
  }
};

/// Exact check of a coverage certificate.
inline bool verify_certificate(const Cover& c) {
  const std::size_t n = c.breakpoints.size();
  if (n == 0 || c.owner.size() != n) return false;
  for (const auto& p : c.breakpoints)
    if (norm_sq(p) != 1) return false;
  // The breakpoints must go once around, counter-clockwise.
  int wraps = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = c.breakpoints[i];
    const auto& b = c.breakpoints[(i + 1) % n];
    if (c.owner[i] >= c.elements.size()) return false;
    if (!arc_in_rect(a, b, c.elements[c.owner[i]].rect)) return false;
    if (!(detail::angle_key(a) < detail::angle_key(b))) ++wraps;
  }
  return wraps == 1;
}

/// Independent exact test that open rectangles cover the unit circle. The
/// arcs between edge crossings are proposed in binary64; every proposed arc
/// is then checked exactly, so a true answer is certain.
inline bool covers_unit_circle(const std::vector<QRect>& rects) {
  const double two_pi = 2 * std::numbers::pi;
  std::vector<double> cuts;
  auto add = [&](double a) { cuts.push_back(std::fmod(std::fmod(a, two_pi) + two_pi, two_pi)); };
  for (const auto& r : rects) {
    for (const Q* x : {&r.x_lo(), &r.x_hi()}) {
      double v = to_double(*x);
      if (std::abs(v) <= 1) add(std::acos(v)), add(-std::acos(v));
    }
    for (const Q* y : {&r.y_lo(), &r.y_hi()}) {
      double v = to_double(*y);
      if (std::abs(v) <= 1) add(std::asin(v)), add(std::numbers::pi - std::asin(v));
    }
  }
  if (cuts.empty()) {
    const QPoint p{Q(1), Q(0)}, q{Q(-1), Q(0)};
    for (const auto& r : rects)
      if (arc_in_rect(p, q, r) && arc_in_rect(q, p, r)) return true;
    return false;
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const std::size_t n = cuts.size();
  std::vector<QPoint> mids;
  for (std::size_t i = 0; i < n; ++i) {
    double a = cuts[i], b = i + 1 < n ? cuts[i + 1] : cuts[0] + two_pi;
    mids.push_back(circle_point(0.5 * (a + b), 60));
  }
  // Consecutive midpoints straddle one cut; some rectangle must hold the arc.
  for (std::size_t i = 0; i < n; ++i) {
    const QPoint& a = mids[i];
    const QPoint& b = mids[(i + 1) % n];
    bool held = false;
    for (const auto& r : rects)
      if (arc_in_rect(a, b, r)) {
        held = true;
        break;
      }
    if (!held) return false;
  }
  return true;
}

struct CoverOptions {
  Q s0_start = Q(7, 16);
  Q shrink = Q(3, 4);        // ratio between successive s0 candidates
  int min_s0_exponent = 24;  // give up below s0 = 2^-24
};

namespace detail {

/// Points of R intersected with the closed disk used for the sampled
/// oscillation: cell centres of a grid plus circle points.
inline std::vector<cplx> rect_disk_samples(const QRect& r, int grid, double theta_hint, double reach) {
  std::vector<cplx> out;
  const double x0 = to_double(r.x_lo()), x1 = to_double(r.x_hi());
  const double y0 = to_double(r.y_lo()), y1 = to_double(r.y_hi());
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      cplx z(x0 + (x1 - x0) * (i + 0.5) / grid, y0 + (y1 - y0) * (j + 0.5) / grid);
      if (std::abs(z) <= 1) out.push_back(z);
    }
  const int m = 4 * grid;
  for (int i = 0; i <= m; ++i) {
    cplx z = std::polar(1.0, theta_hint - reach + 2 * reach * i / m);
    if (z.real() > x0 && z.real() < x1 && z.imag() > y0 && z.imag() < y1) out.push_back(z);
  }
  return out;
}

inline double sampled_diameter(const std::vector<cplx>& w) {
  double d = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j) d = std::max(d, std::abs(w[i] - w[j]));
  return d;
}

inline double angle_of(const QPoint& p) {
  double a = std::atan2(to_double(p.im), to_double(p.re));
  return a < 0 ? a + 2 * std::numbers::pi : a;
}

}  // namespace detail

/// Try to certify one cover element anchored at angle 2 pi turn that holds
/// the breakpoint `must_hold`. Uses r0 = 3 s0 / 4, a square R of half-side
/// 45 r0 / 64 (inside D_{r0}) and the clause-4 threshold r0 / 4 scaled by
/// the radial image scale between depths s0 and r0.
inline std::optional<CoverElement> cover_element(const ConformalMap& cm, const PolygonRegion& region, int k,
                                                 const Q& rho, const Q& turn, const QPoint& must_hold,
                                                 const Q& s0) {
  const Q cap = pow2(-k);
  WitnessParams wp{s0, 3 * s0 / 4, turn};
  const double theta = 2 * std::numbers::pi * to_double(turn);
  const QPoint anchor = circle_point(theta);
  const Q h = wp.r0 * 45 / 64;
  QRect R = QRect::open(anchor.re - h, anchor.re + h, anchor.im - h, anchor.im + h);
  if (!R.contains(must_hold)) return std::nullopt;
  // R inside D_{r0}(zeta): the anchor is within 2^-30 of zeta.
  const Q reach = wp.r0 - pow2(-30);
  for (const auto& c : R.corners())
    if (!(dist_sq(c, anchor) < reach * reach)) return std::nullopt;
  auto rc = build_recognizing_crosscut(cm, wp);
  if (!rc || !acceptable_crosscut(region, rc->polyline, rho, cap)) return std::nullopt;
  std::vector<cplx> img;
  for (cplx z : detail::rect_disk_samples(R, 8, theta, 2 * to_double(h))) img.push_back(cm.eval(z));
  const double osc = detail::sampled_diameter(img);
  if (!(osc + 2 * cm.error() < to_double(cap))) return std::nullopt;
  const cplx zeta = wp.zeta();
  const double s = to_double(wp.s0), r = to_double(wp.r0);
  wp.m_tilde = 0.25 * r * std::abs(cm.eval((1 - s) * zeta) - cm.eval((1 - r) * zeta)) / (s - r);
  if (check_recognizably_bounds(cm, rc->polyline, wp, rc->preimages).overall != Verdict::Pass) return std::nullopt;
  return CoverElement{R, wp, rc->polyline, osc, cm.error()};
}

/// Cover of the unit circle by open rational rectangles R, each anchored at
/// a rational angle zeta with zeta in R inside D_{r0}(zeta), where a
/// recognizing acceptable crosscut of diameter below 2^-k / (1 + sqrt 2) was
/// certified. The walk runs counter-clockwise from 1, stepping s0 down a ladder on failure.
inline Cover oscillation_cover(const ConformalMap& cm, int k, const Q& rho, const CoverOptions& opt = {}) {
  if (k < 0) throw UsageError("oscillation_cover: k must be a natural number");
  if (!(cm.error() * 64 < std::ldexp(1.0, -k)))
    throw UsageError("oscillation_cover: map error too large for k=" + std::to_string(k));
  const PolygonRegion region(cm.polygon());
  const double two_pi = 2 * std::numbers::pi;
  Cover cover;
  cover.k = k;
  const QPoint start{Q(1), Q(0)};
  QPoint cur = start;
  double cur_angle = 0;
  if (!(opt.shrink > 0 && opt.shrink < 1) || !(opt.s0_start > 0 && opt.s0_start < Q(1, 2)))
    throw UsageError("oscillation_cover: bad s0 ladder");
  std::vector<Q> ladder{opt.s0_start};
  while (ladder.back() >= pow2(-opt.min_s0_exponent)) ladder.push_back(dyadic_floor(to_double(ladder.back() * opt.shrink), 40));
  std::size_t rung_prev = 0;
  double h_prev = 0;
  for (int guard = 0; guard < 200000; ++guard) {
    std::optional<CoverElement> el;
    for (double lead : {0.9, 0.0}) {
      const double a = cur_angle + lead * h_prev;
      const Q turn = dyadic_round(a / two_pi, 24);
      for (std::size_t rung = rung_prev > 0 ? rung_prev - 1 : 0; rung < ladder.size() && !el; ++rung) {
        el = cover_element(cm, region, k, rho, turn, cur, ladder[rung]);
        if (el) rung_prev = rung;
      }
      if (el) break;
    }
    if (!el)
      throw SolverError("oscillation_cover: no element found for k=" + std::to_string(k) + " at arc angle " +
                        std::to_string(cur_angle));
    h_prev = to_double(el->wp.r0) / 2;
    cover.elements.push_back(*el);
    const QRect& R = cover.elements.back().rect;
    const std::size_t idx = cover.elements.size() - 1;
    // Closing arc back to 1?
    if (cur_angle + 4 * h_prev >= two_pi && arc_in_rect(cur, start, R)) {
      cover.breakpoints.push_back(cur);
      cover.owner.push_back(idx);
      return cover;
    }
    double lo = 0, hi = std::min(4 * h_prev, two_pi - cur_angle);
    QPoint best = cur;
    double best_angle = cur_angle;
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (lo + hi);
      QPoint p = circle_point(cur_angle + mid);
      if (arc_in_rect(cur, p, R)) {
        lo = mid, best = p, best_angle = cur_angle + mid;
      } else {
        hi = mid;
      }
    }
    if (best == cur) throw SolverError("oscillation_cover: walk stalled at arc angle " + std::to_string(cur_angle));
    cover.breakpoints.push_back(cur);
    cover.owner.push_back(idx);
    cur = best;
    cur_angle = detail::angle_of(best);
    if (best_angle > cur_angle + 1) cur_angle += two_pi;  // numerically wrapped past 1
  }
  throw SolverError("oscillation_cover: element budget exhausted for k=" + std::to_string(k));
}

struct StrongAnswer {
  QRect out;
  int k = 0;
  std::size_t element = 0;
};

struct StrongEvalOptions {
  int grid = 10;
  bool verify = false;  // re-sample on a shifted grid and demand containment
};

/// Rectangle-in/rectangle-out evaluation on the circle: when the open
/// rectangle R fits inside an element of the finest available cover, output a
/// rational rectangle holding every sampled value of phi on R intersected
/// with the closed disk, widened by the error bar and the local sample gap.
inline std::optional<StrongAnswer> strong_eval(const ConformalMap& cm, const std::vector<Cover>& covers, const QRect& R,
                                               const StrongEvalOptions& opt = {}) {
  if (!R.is_open()) throw UsageError("strong_eval: input rectangle must be open");
  const Cover* best = nullptr;
  std::size_t element = 0;
  for (const auto& c : covers) {
    if (best && c.k <= best->k) continue;
    for (std::size_t i = 0; i < c.elements.size(); ++i)
      if (c.elements[i].rect.includes(R)) {
        best = &c, element = i;
        break;
      }
  }
  if (!best) return std::nullopt;
  const double x0 = to_double(R.x_lo()), x1 = to_double(R.x_hi());
  const double y0 = to_double(R.y_lo()), y1 = to_double(R.y_hi());
  auto sample = [&](double shift, int g) {
    std::vector<cplx> pts;
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) {
        cplx z(x0 + (x1 - x0) * (i + shift) / g, y0 + (y1 - y0) * (j + shift) / g);
        if (std::abs(z) <= 1) pts.push_back(z);
      }
    // The circle's passage through R.
    const double c = std::atan2(0.5 * (y0 + y1), 0.5 * (x0 + x1));
    const double span = std::hypot(x1 - x0, y1 - y0);
    for (int i = 0; i <= 8 * g; ++i) {
      cplx z = std::polar(1.0, c - span + 2 * span * (i + shift) / (8 * g));
      if (z.real() > x0 && z.real() < x1 && z.imag() > y0 && z.imag() < y1) pts.push_back(z);
    }
    return pts;
  };
  const auto pts = sample(0.5, opt.grid);
  if (pts.empty()) return std::nullopt;
  std::vector<cplx> img;
  for (cplx z : pts) img.push_back(cm.eval(z));
  double lo_x = img[0].real(), hi_x = lo_x, lo_y = img[0].imag(), hi_y = lo_y;
  for (cplx w : img) {
    lo_x = std::min(lo_x, w.real()), hi_x = std::max(hi_x, w.real());
    lo_y = std::min(lo_y, w.imag()), hi_y = std::max(hi_y, w.imag());
  }
  double gap = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (std::abs(pts[i] - pts[j]) <= 1.5 * std::max(x1 - x0, y1 - y0) / opt.grid)
        gap = std::max(gap, std::abs(img[i] - img[j]));
  const double pad = std::min(gap, std::ldexp(1.0, -(best->k + 2))) + cm.error() + 1e-12;
  StrongAnswer ans{QRect::open(dyadic_floor(lo_x - pad), dyadic_ceil(hi_x + pad), dyadic_floor(lo_y - pad),
                               dyadic_ceil(hi_y + pad)),
                   best->k, element};
  auto inside = [&](cplx w) {
    const double e = cm.error();
    return to_double(ans.out.x_lo()) < w.real() - e && w.real() + e < to_double(ans.out.x_hi()) &&
           to_double(ans.out.y_lo()) < w.imag() - e && w.imag() + e < to_double(ans.out.y_hi());
  };
  for (cplx w : img)
    if (!inside(w)) throw SolverError("strong_eval: output misses a sampled value");
  if (opt.verify)
    for (cplx z : sample(0.25, opt.grid + 3))
      if (!inside(cm.eval(z))) throw SolverError("strong_eval: strong correctness violated on re-sampling");
  return ans;
}

}  // namespace bext
