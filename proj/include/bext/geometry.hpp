#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "bext/errors.hpp"
#include "bext/rational.hpp"

namespace bext {

/// Exact Gaussian-rational point re + i*im.
struct QPoint {
  Q re;
  Q im;

  QPoint() = default;
  QPoint(Q r, Q i) : re(std::move(r)), im(std::move(i)) {}

  friend bool operator==(const QPoint& a, const QPoint& b) { return a.re == b.re && a.im == b.im; }
  friend QPoint operator+(const QPoint& a, const QPoint& b) { return {a.re + b.re, a.im + b.im}; }
  friend QPoint operator-(const QPoint& a, const QPoint& b) { return {a.re - b.re, a.im - b.im}; }
  friend QPoint operator*(const Q& s, const QPoint& a) { return {s * a.re, s * a.im}; }

  /// Lexicographic order, used only for canonical sorting.
  friend bool operator<(const QPoint& a, const QPoint& b) {
    if (a.re != b.re) return a.re < b.re;
    return a.im < b.im;
  }

  std::complex<double> to_complex() const { return {to_double(re), to_double(im)}; }

  friend std::ostream& operator<<(std::ostream& os, const QPoint& p) {
    return os << '(' << p.re << ", " << p.im << ')';
  }
};

inline Q norm_sq(const QPoint& p) { return p.re * p.re + p.im * p.im; }
inline Q dist_sq(const QPoint& a, const QPoint& b) { return norm_sq(a - b); }

/// Rationalize a double-precision point onto the 2^-bits grid.
inline QPoint to_qpoint(std::complex<double> z, int bits = 40) {
  return {dyadic_round(z.real(), bits), dyadic_round(z.imag(), bits)};
}

/// Closed segment [a, b]; a == b is the singleton {a}.
struct Segment {
  QPoint a;
  QPoint b;

  bool degenerate() const { return a == b; }
  /// a + t (b - a)
  QPoint at(const Q& t) const { return a + t * (b - a); }
  friend bool operator==(const Segment& s, const Segment& t) { return s.a == t.a && s.b == t.b; }
};

/// Same point set, ignoring direction.
inline bool same_set(const Segment& s, const Segment& t) {
  return s == t || (s.a == t.b && s.b == t.a);
}

enum class RectKind { Open, Closed };

/// Axis-aligned rational rectangle; open or closed.
class QRect {
 public:
  QRect(Q x_lo, Q x_hi, Q y_lo, Q y_hi, RectKind kind)
      : x_lo_(std::move(x_lo)), x_hi_(std::move(x_hi)), y_lo_(std::move(y_lo)), y_hi_(std::move(y_hi)),
        kind_(kind) {
    if (!(x_lo_ < x_hi_) || !(y_lo_ < y_hi_)) throw ValidationError("degenerate rectangle");
  }

  static QRect open(Q x_lo, Q x_hi, Q y_lo, Q y_hi) {
    return {std::move(x_lo), std::move(x_hi), std::move(y_lo), std::move(y_hi), RectKind::Open};
  }
  static QRect closed(Q x_lo, Q x_hi, Q y_lo, Q y_hi) {
    return {std::move(x_lo), std::move(x_hi), std::move(y_lo), std::move(y_hi), RectKind::Closed};
  }

  const Q& x_lo() const { return x_lo_; }
  const Q& x_hi() const { return x_hi_; }
  const Q& y_lo() const { return y_lo_; }
  const Q& y_hi() const { return y_hi_; }
  RectKind kind() const { return kind_; }
  bool is_open() const { return kind_ == RectKind::Open; }

  QRect as(RectKind k) const { return {x_lo_, x_hi_, y_lo_, y_hi_, k}; }
  QRect closure() const { return as(RectKind::Closed); }

  std::array<QPoint, 4> corners() const {
    return {QPoint{x_lo_, y_lo_}, QPoint{x_hi_, y_lo_}, QPoint{x_hi_, y_hi_}, QPoint{x_lo_, y_hi_}};
  }

  bool contains(const QPoint& p) const {
    if (is_open()) return x_lo_ < p.re && p.re < x_hi_ && y_lo_ < p.im && p.im < y_hi_;
    return x_lo_ <= p.re && p.re <= x_hi_ && y_lo_ <= p.im && p.im <= y_hi_;
  }

  /// Point-set inclusion of `inner` in *this, honoring open/closed semantics.
  bool includes(const QRect& inner) const {
    auto le = [](const Q& a, const Q& b, bool strict) { return strict ? a < b : a <= b; };
    // An open inner rectangle fits in anything whose closure contains it. A
    // closed inner rectangle needs strict room inside an open outer one.
    bool strict = is_open() && !inner.is_open();
    return le(x_lo_, inner.x_lo_, strict) && le(inner.x_hi_, x_hi_, strict) &&
           le(y_lo_, inner.y_lo_, strict) && le(inner.y_hi_, y_hi_, strict);
  }

  friend bool operator==(const QRect& a, const QRect& b) {
    return a.kind_ == b.kind_ && a.x_lo_ == b.x_lo_ && a.x_hi_ == b.x_hi_ && a.y_lo_ == b.y_lo_ &&
           a.y_hi_ == b.y_hi_;
  }

 private:
  Q x_lo_, x_hi_, y_lo_, y_hi_;
  RectKind kind_;
};

/// Two open rectangles share a point iff their open intervals overlap on both axes.
inline bool open_rects_meet(const QRect& a, const QRect& b) {
  return a.x_lo() < b.x_hi() && b.x_lo() < a.x_hi() && a.y_lo() < b.y_hi() && b.y_lo() < a.y_hi();
}

/// Sign of the cross product (b - a) x (c - a).
inline int orient(const QPoint& a, const QPoint& b, const QPoint& c) {
  Q v = (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re);
  return v.sign();
}

inline bool on_segment(const QPoint& p, const Segment& s) {
  if (orient(s.a, s.b, p) != 0) return false;
  return std::min(s.a.re, s.b.re) <= p.re && p.re <= std::max(s.a.re, s.b.re) &&
         std::min(s.a.im, s.b.im) <= p.im && p.im <= std::max(s.a.im, s.b.im);
}

/// True iff s contains a point of r, with exact open/closed semantics.
///
/// Separating-axis test on the two coordinate axes and the segment normal.
/// For an open rectangle all three projections must overlap with positive
/// length; for a closed one touching is enough.
inline bool seg_meets_rect(const Segment& s, const QRect& r) {
  if (s.degenerate()) return r.contains(s.a);
  const Q& sx_lo = std::min(s.a.re, s.b.re);
  const Q& sx_hi = std::max(s.a.re, s.b.re);
  const Q& sy_lo = std::min(s.a.im, s.b.im);
  const Q& sy_hi = std::max(s.a.im, s.b.im);
  int pos = 0;
  int neg = 0;
  for (const auto& c : r.corners()) {
    int o = orient(s.a, s.b, c);
    if (o > 0) ++pos;
    if (o < 0) ++neg;
  }
  if (r.is_open()) {
    // Strict overlap also covers zero-length projections of axis-parallel segments.
    if (!(sx_lo < r.x_hi() && r.x_lo() < sx_hi)) return false;
    if (!(sy_lo < r.y_hi() && r.y_lo() < sy_hi)) return false;
    return pos > 0 && neg > 0;
  }
  if (sx_hi < r.x_lo() || r.x_hi() < sx_lo || sy_hi < r.y_lo() || r.y_hi() < sy_lo) return false;
  return !(pos == 4 || neg == 4);
}

/// Segment-segment intersection (closed segments).
inline bool segments_intersect(const Segment& s, const Segment& t) {
  if (s.degenerate()) return on_segment(s.a, t);
  if (t.degenerate()) return on_segment(t.a, s);
  int o1 = orient(s.a, s.b, t.a);
  int o2 = orient(s.a, s.b, t.b);
  int o3 = orient(t.a, t.b, s.a);
  int o4 = orient(t.a, t.b, s.b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  return on_segment(t.a, s) || on_segment(t.b, s) || on_segment(s.a, t) || on_segment(s.b, t);
}

/// Parameters t in [0,1] at which s meets t_seg: the single crossing point,
/// or both ends of a collinear overlap. Empty when disjoint.
inline std::vector<Q> crossing_params(const Segment& s, const Segment& t_seg) {
  std::vector<Q> out;
  if (s.degenerate()) {
    if (on_segment(s.a, t_seg)) out.emplace_back(0);
    return out;
  }
  const QPoint d = s.b - s.a;
  const QPoint e = t_seg.b - t_seg.a;
  Q denom = d.re * e.im - d.im * e.re;
  const QPoint w = t_seg.a - s.a;
  if (denom != 0) {
    Q t = (w.re * e.im - w.im * e.re) / denom;
    Q u = (w.re * d.im - w.im * d.re) / denom;
    if (t >= 0 && t <= 1 && u >= 0 && u <= 1) out.push_back(t);
    return out;
  }
  // Parallel: only collinear overlaps matter.
  if (orient(s.a, s.b, t_seg.a) != 0) return out;
  Q dd = norm_sq(d);
  auto param = [&](const QPoint& p) { return ((p.re - s.a.re) * d.re + (p.im - s.a.im) * d.im) / dd; };
  Q u0 = param(t_seg.a);
  Q u1 = t_seg.degenerate() ? u0 : param(t_seg.b);
  if (u0 > u1) std::swap(u0, u1);
  Q lo = std::max(u0, Q(0));
  Q hi = std::min(u1, Q(1));
  if (lo > hi) return out;
  out.push_back(lo);
  if (hi != lo) out.push_back(hi);
  return out;
}

/// Exact squared diameter of a finite point set (attained at vertex pairs for
/// any polyline through these points).
inline Q polyline_diameter_sq(std::span<const QPoint> pts) {
  if (pts.empty()) throw ValidationError("polyline_diameter_sq: empty point list");
  Q best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, dist_sq(pts[i], pts[j]));
  return best;
}

/// One- or two-leg axis-aligned path.
struct TaxicabArc {
  std::vector<Segment> legs;

  QPoint start() const { return legs.front().a; }
  QPoint end() const { return legs.back().b; }
  std::vector<QPoint> nodes() const {
    std::vector<QPoint> out{legs.front().a};
    for (const auto& l : legs) out.push_back(l.b);
    return out;
  }
};

/// The taxicab arcs from z1 to z2: vertical-then-horizontal and
/// horizontal-then-vertical. Collapses to a single straight arc when the
/// points share a coordinate.
inline std::vector<TaxicabArc> taxicab_arcs(const QPoint& z1, const QPoint& z2) {
  if (z1 == z2) throw ValidationError("taxicab_arcs: equal endpoints");
  if (z1.re == z2.re || z1.im == z2.im) return {TaxicabArc{{Segment{z1, z2}}}};
  QPoint c1{z1.re, z2.im};
  QPoint c2{z2.re, z1.im};
  return {TaxicabArc{{Segment{z1, c1}, Segment{c1, z2}}}, TaxicabArc{{Segment{z1, c2}, Segment{c2, z2}}}};
}

/// Winding number of the closed polygon `poly` (last vertex joins first)
/// around p. Precondition: p is not on the polygon.
inline int winding_number(const QPoint& p, std::span<const QPoint> poly) {
  int wn = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const QPoint& a = poly[i];
    const QPoint& b = poly[(i + 1) % n];
    if (a.im <= p.im) {
      if (b.im > p.im && orient(a, b, p) > 0) ++wn;
    } else {
      if (b.im <= p.im && orient(a, b, p) < 0) --wn;
    }
  }
  return wn;
}

inline bool on_polygon(const QPoint& p, std::span<const QPoint> poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    if (on_segment(p, Segment{poly[i], poly[(i + 1) % n]})) return true;
  return false;
}

}  // namespace bext
