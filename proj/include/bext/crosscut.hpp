#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bext/domain.hpp"
#include "bext/effective_sets.hpp"
#include "bext/json_util.hpp"

namespace bext {

/// Union of a chain of open rational boxes.
struct Wad {
  std::vector<QRect> boxes;
};

/// Chain of wads w_1..w_n.
struct ApproxCrosscut {
  std::vector<Wad> wads;
};

/// Rational polyline meeting the boundary exactly at its two endpoints.
struct Crosscut {
  std::vector<QPoint> polyline;
  std::pair<std::size_t, std::size_t> ends{0, 0};  // constituents of the endpoints
};

/// Verdict plus the name of the first violated clause.
struct Check {
  bool ok = true;
  std::string reason;

  explicit operator bool() const { return ok; }
  static Check pass() { return {}; }
  static Check fail(std::string why) { return {false, std::move(why)}; }
};

namespace detail {

inline bool wads_meet(const Wad& a, const Wad& b) {
  for (const auto& x : a.boxes)
    for (const auto& y : b.boxes)
      if (open_rects_meet(x, y)) return true;
  return false;
}

inline std::vector<QPoint> wad_corners(const Wad& w) {
  std::vector<QPoint> out;
  for (const auto& b : w.boxes)
    for (const auto& c : b.corners()) out.push_back(c);
  return out;
}

/// Interval of reals with open or closed ends.
struct Interval {
  Q lo, hi;
  bool lo_closed = true, hi_closed = true;

  bool empty() const { return hi < lo || (lo == hi && !(lo_closed && hi_closed)); }
  bool contains(const Q& t) const {
    bool above = lo < t || (lo == t && lo_closed);
    bool below = t < hi || (t == hi && hi_closed);
    return above && below;
  }
};

inline Interval intersect(const Interval& a, const Interval& b) {
  Interval r;
  if (a.lo > b.lo) {
    r.lo = a.lo;
    r.lo_closed = a.lo_closed;
  } else if (b.lo > a.lo) {
    r.lo = b.lo;
    r.lo_closed = b.lo_closed;
  } else {
    r.lo = a.lo;
    r.lo_closed = a.lo_closed && b.lo_closed;
  }
  if (a.hi < b.hi) {
    r.hi = a.hi;
    r.hi_closed = a.hi_closed;
  } else if (b.hi < a.hi) {
    r.hi = b.hi;
    r.hi_closed = b.hi_closed;
  } else {
    r.hi = a.hi;
    r.hi_closed = a.hi_closed && b.hi_closed;
  }
  return r;
}

/// Parameters t in [0,1] with s(t) inside the open box.
inline std::optional<Interval> params_in_box(const Segment& s, const QRect& box) {
  const QPoint d = s.b - s.a;
  const Q ps[4] = {-d.re, d.re, -d.im, d.im};
  const Q qs[4] = {s.a.re - box.x_lo(), box.x_hi() - s.a.re, s.a.im - box.y_lo(), box.y_hi() - s.a.im};
  Interval iv{Q(0), Q(1), true, true};
  for (int i = 0; i < 4; ++i) {
    if (ps[i] == 0) {
      if (!(qs[i] > 0)) return std::nullopt;
      continue;
    }
    Q t = qs[i] / ps[i];
    if (ps[i] < 0) {
      if (t >= iv.lo) {
        iv.lo = t;
        iv.lo_closed = false;
      }
    } else if (t <= iv.hi) {
      iv.hi = t;
      iv.hi_closed = false;
    }
  }
  if (iv.empty()) return std::nullopt;
  return iv;
}

/// Sorted disjoint union.
inline std::vector<Interval> merge(std::vector<Interval> ivs) {
  std::sort(ivs.begin(), ivs.end(), [](const Interval& a, const Interval& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.lo_closed && !b.lo_closed;
  });
  std::vector<Interval> out;
  for (auto& iv : ivs) {
    if (!out.empty()) {
      Interval& cur = out.back();
      bool touch = iv.lo < cur.hi || (iv.lo == cur.hi && (cur.hi_closed || iv.lo_closed));
      if (touch) {
        if (iv.hi > cur.hi) {
          cur.hi = iv.hi;
          cur.hi_closed = iv.hi_closed;
        } else if (iv.hi == cur.hi) {
          cur.hi_closed = cur.hi_closed || iv.hi_closed;
        }
        continue;
      }
    }
    out.push_back(iv);
  }
  return out;
}

/// Right-hand unit-ish normal (max-norm 1); interior side for the clockwise boundary.
inline QPoint right_normal(const Segment& s) {
  const QPoint d = s.b - s.a;
  Q m = std::max(abs_q(d.re), abs_q(d.im));
  return {d.im / m, -d.re / m};
}

}  // namespace detail

/// True iff the closed segment contains no point of D. Between consecutive
/// boundary contacts the segment is either inside D or outside, so one
/// midpoint probe per piece decides it.
inline bool segment_avoids_D(const DomainModel& dm, const Segment& seg) {
  if (seg.degenerate()) return !point_in_D(dm, seg.a);
  std::vector<Q> ts{Q(0), Q(1)};
  for (const auto& b : dm.boundary_segments())
    for (auto& t : crossing_params(seg, b)) ts.push_back(t);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  if (point_in_D(dm, seg.a) || point_in_D(dm, seg.b)) return false;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i)
    if (point_in_D(dm, seg.at((ts[i] + ts[i + 1]) / 2))) return false;
  return true;
}

/// Check the crosscut conditions on a rational polyline and fill in the
/// endpoint constituents. Throws ValidationError naming the violation.
inline Crosscut validate_crosscut(const DomainModel& dm, std::vector<QPoint> poly) {
  if (poly.size() < 2) throw ValidationError("crosscut: need at least two points");
  for (std::size_t i = 0; i + 1 < poly.size(); ++i)
    if (poly[i] == poly[i + 1]) throw ValidationError("crosscut: repeated point");
  if (poly.front() == poly.back()) throw ValidationError("crosscut: endpoints coincide");
  auto end_loc = [&](const QPoint& p) {
    auto loc = constituent_of(dm, p);
    if (!loc.on_boundary) throw ValidationError("crosscut: endpoint off the boundary");
    if (loc.is_vertex) throw ValidationError("crosscut: endpoint is a vertex");
    return *loc.constituent;
  };
  Crosscut c;
  c.ends = {end_loc(poly.front()), end_loc(poly.back())};
  const std::size_t m = poly.size() - 1;
  for (std::size_t i = 1; i < m; ++i)
    if (!point_in_D(dm, poly[i])) throw ValidationError("crosscut: interior node outside D");
  for (std::size_t i = 0; i < m; ++i) {
    Segment s{poly[i], poly[i + 1]};
    for (const auto& b : dm.boundary_segments()) {
      for (const auto& t : crossing_params(s, b)) {
        bool allowed = (t == 0 && i == 0) || (t == 1 && i + 1 == m);
        if (!allowed) throw ValidationError("crosscut: meets the boundary away from its endpoints");
      }
    }
    if (!point_in_D(dm, s.at(Q(1, 2)))) throw ValidationError("crosscut: leaves D");
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      Segment a{poly[i], poly[i + 1]};
      Segment b{poly[j], poly[j + 1]};
      auto ps = crossing_params(a, b);
      if (ps.empty()) continue;
      if (j == i + 1 && ps.size() == 1 && ps[0] == 1) continue;
      throw ValidationError("crosscut: polyline is not simple");
    }
  }
  c.polyline = std::move(poly);
  return c;
}

/// Crosscut p -> p' -> q' -> q where p', q' are p, q pushed inward by
/// `inset` along the boundary normal. Empty when the result is not a crosscut.
inline std::optional<Crosscut> make_crosscut(const DomainModel& dm, const QPoint& p, const QPoint& q,
                                             const Q& inset) {
  auto push = [&](const QPoint& z) -> std::optional<QPoint> {
    for (const auto& s : dm.boundary_segments())
      if (on_segment(z, s)) return z + inset * detail::right_normal(s);
    return std::nullopt;
  };
  auto pp = push(p);
  auto qq = push(q);
  if (!pp || !qq || *pp == *qq) return std::nullopt;
  try {
    return validate_crosscut(dm, {p, *pp, *qq, q});
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

/// Validate the approximate-crosscut conditions: every wad is a chain of
/// open boxes, the wads form a simple chain, interior wads close up inside
/// D, and the end wads meet the boundary.
inline Check is_approx_crosscut(const DomainModel& dm, const ApproxCrosscut& a) {
  const auto& w = a.wads;
  if (w.empty()) return Check::fail("empty chain");
  for (const auto& wad : w) {
    if (wad.boxes.empty()) return Check::fail("empty wad");
    for (const auto& b : wad.boxes)
      if (!b.is_open()) return Check::fail("box not open");
    for (std::size_t i = 0; i + 1 < wad.boxes.size(); ++i)
      if (!open_rects_meet(wad.boxes[i], wad.boxes[i + 1])) return Check::fail("wad not connected");
  }
  for (std::size_t j = 0; j < w.size(); ++j) {
    for (std::size_t k = j + 1; k < w.size(); ++k) {
      bool meet = detail::wads_meet(w[j], w[k]);
      if (k == j + 1 && !meet) return Check::fail("consecutive wads disjoint");
      if (k > j + 1 && meet) return Check::fail("not simple");
    }
  }
  for (std::size_t j = 1; j + 1 < w.size(); ++j)
    for (const auto& b : w[j].boxes)
      if (!closed_rect_in_D(dm, b)) return Check::fail("closure escapes D");
  auto touches = [&](const Wad& wad) {
    for (const auto& b : wad.boxes)
      if (open_rect_meets_X(dm, b)) return true;
    return false;
  };
  if (!touches(w.front()) || !touches(w.back())) return Check::fail("end wad misses the boundary");
  return Check::pass();
}

/// Can the polyline be cut at 0 = t_0 < ... < t_n = end so that the j-th
/// piece lies in w_j? Decided by propagating the reachable set of cut
/// parameters through the components of each wad's parameter set.
inline bool approximates(const ApproxCrosscut& a, const Crosscut& c) {
  using detail::Interval;
  const auto& poly = c.polyline;
  if (poly.size() < 2 || a.wads.empty()) return false;
  const std::size_t m = poly.size() - 1;
  std::vector<Interval> reach{Interval{Q(0), Q(0), true, true}};
  for (const auto& wad : a.wads) {
    std::vector<Interval> pieces;
    for (std::size_t i = 0; i < m; ++i) {
      Segment s{poly[i], poly[i + 1]};
      for (const auto& b : wad.boxes) {
        auto iv = detail::params_in_box(s, b);
        if (!iv) continue;
        iv->lo += i;
        iv->hi += i;
        pieces.push_back(*iv);
      }
    }
    std::vector<Interval> next;
    for (const auto& comp : detail::merge(std::move(pieces))) {
      std::optional<Q> inf;
      for (const auto& r : reach) {
        Interval x = detail::intersect(r, comp);
        if (x.empty()) continue;
        if (!inf || x.lo < *inf) inf = x.lo;
      }
      if (!inf) continue;
      Interval n{*inf, comp.hi, false, comp.hi_closed};
      if (!n.empty()) next.push_back(n);
    }
    reach = detail::merge(std::move(next));
    if (reach.empty()) return false;
  }
  const Q end(static_cast<long>(m));
  for (const auto& r : reach)
    if (r.contains(end)) return true;
  return false;
}

/// Largest squared wad diameter.
inline Q error_of(const ApproxCrosscut& a) {
  if (a.wads.empty()) throw ValidationError("error_of: empty chain");
  Q best = 0;
  for (const auto& w : a.wads) {
    if (w.boxes.empty()) throw ValidationError("error_of: empty wad");
    auto pts = detail::wad_corners(w);
    best = std::max(best, polyline_diameter_sq(pts));
  }
  return best;
}

/// The constituent sigma that U conservatively intersects: U meets sigma
/// and its closure holds no vertex and no point of another constituent.
inline std::optional<std::size_t> conservatively_intersects(const DomainModel& dm, const Wad& u) {
  if (u.boxes.empty()) return std::nullopt;
  for (const auto& c : dm.constituents()) {
    bool meets = false;
    for (const auto& b : u.boxes) meets = meets || rect_meets_sigma(dm, b.as(RectKind::Open), c.index);
    if (!meets) continue;
    for (const auto& b : u.boxes)
      if (!rect_avoids_rest(dm, b.closure(), c.index)) return std::nullopt;
    return c.index;
  }
  return std::nullopt;
}

/// Non-vertex boundary points joined by a taxicab arc avoiding D.
inline bool acceptably_placed_points(const DomainModel& dm, const QPoint& p, const QPoint& q) {
  if (!dm.on_boundary(p) || !dm.on_boundary(q)) throw ValidationError("acceptably_placed: off-boundary input");
  if (p == q) throw ValidationError("acceptably_placed: points coincide");
  if (dm.is_vertex(p) || dm.is_vertex(q)) return false;
  for (const auto& arc : taxicab_arcs(p, q)) {
    bool clear = true;
    for (const auto& leg : arc.legs) clear = clear && segment_avoids_D(dm, leg);
    if (clear) return true;
  }
  return false;
}

/// A fixed non-vertex point of sigma_k; `which` selects one of two.
inline QPoint representative_point(const DomainModel& dm, std::size_t k, int which = 0) {
  return dm.constituent(k).segments[0].at(which == 0 ? Q(1, 3) : Q(2, 3));
}

/// Constituent-level acceptability, read off one representative pair.
inline bool acceptably_placed_constituents(const DomainModel& dm, std::size_t k, std::size_t k2) {
  QPoint p = representative_point(dm, k, 0);
  QPoint q = representative_point(dm, k2, k == k2 ? 1 : 0);
  return acceptably_placed_points(dm, p, q);
}

/// Squared diameter of the union of the closed boxes of a chain.
inline Q chain_diameter_sq(const ApproxCrosscut& a) {
  std::vector<QPoint> pts;
  for (const auto& w : a.wads)
    for (const auto& c : detail::wad_corners(w)) pts.push_back(c);
  return polyline_diameter_sq(pts);
}

/// Membership in the filtered family: a valid approximate crosscut whose end
/// wads conservatively intersect acceptably placed constituents and whose
/// closed union has (1 + sqrt 2) * diameter < rho_lb.
inline Check star_accepts(const DomainModel& dm, const ApproxCrosscut& a, const Q& rho_lb) {
  if (rho_lb <= 0) throw UsageError("star_filter: rho_lb must be positive");
  if (auto v = is_approx_crosscut(dm, a); !v) return v;
  auto s1 = conservatively_intersects(dm, a.wads.front());
  auto s2 = conservatively_intersects(dm, a.wads.back());
  if (!s1 || !s2) return Check::fail("end wad does not intersect conservatively");
  if (!acceptably_placed_constituents(dm, *s1, *s2)) return Check::fail("end constituents not acceptably placed");
  if (!one_plus_sqrt2_times_less(chain_diameter_sq(a), rho_lb * rho_lb)) return Check::fail("diameter too large");
  return Check::pass();
}

inline std::vector<ApproxCrosscut> star_filter(const DomainModel& dm, const std::vector<ApproxCrosscut>& chains,
                                               const Q& rho_lb) {
  if (rho_lb <= 0) throw UsageError("star_filter: rho_lb must be positive");
  std::vector<ApproxCrosscut> out;
  for (const auto& a : chains)
    if (star_accepts(dm, a, rho_lb)) out.push_back(a);
  return out;
}

/// Thicken a crosscut into a chain: open boxes of half-side `half` centred
/// at points spaced at most `half` apart along C, grouped `per_wad` at a time.
inline ApproxCrosscut chain_from_crosscut(const Crosscut& c, const Q& half, std::size_t per_wad = 4) {
  if (half <= 0 || per_wad == 0) throw UsageError("chain_from_crosscut: bad thickness");
  std::vector<QPoint> centers{c.polyline.front()};
  for (std::size_t i = 0; i + 1 < c.polyline.size(); ++i) {
    Segment s{c.polyline[i], c.polyline[i + 1]};
    const QPoint d = s.b - s.a;
    Q span = std::max(abs_q(d.re), abs_q(d.im)) / half;
    Z steps = numerator(span) / denominator(span);
    if (Q(steps) < span) steps += 1;
    for (Z k = 1; k <= steps; ++k) centers.push_back(s.at(Q(k, steps)));
  }
  // The last wad absorbs any remainder.
  const std::size_t n = std::max<std::size_t>(1, centers.size() / per_wad);
  ApproxCrosscut a;
  a.wads.resize(n);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const QPoint& z = centers[i];
    a.wads[std::min(i / per_wad, n - 1)].boxes.push_back(
        QRect::open(z.re - half, z.re + half, z.im - half, z.im + half));
  }
  return a;
}

/// Which sides of C lie inside the Jordan curve C + tau.
struct SideReport {
  QPoint plus_probe;   // left of C at the probed segment
  QPoint minus_probe;  // right of C
  bool plus_interior = false;
  bool minus_interior = false;

  bool exactly_one() const { return plus_interior != minus_interior; }
};

/// Classify probe points on both sides of C against the closed curve
/// C + tau by exact winding number.
inline SideReport interior_side_check(const DomainModel& dm, const Crosscut& c, const TaxicabArc& tau) {
  const auto& poly = c.polyline;
  validate_crosscut(dm, poly);
  std::vector<QPoint> tn = tau.nodes();
  if (tau.start() == poly.back() && tau.end() == poly.front()) {
  } else if (tau.start() == poly.front() && tau.end() == poly.back()) {
    std::reverse(tn.begin(), tn.end());
  } else {
    throw UsageError("interior_side_check: taxicab arc does not join the crosscut endpoints");
  }
  for (const auto& leg : tau.legs)
    if (!segment_avoids_D(dm, leg)) throw ValidationError("interior_side_check: taxicab arc meets D");

  std::vector<QPoint> jordan = poly;
  for (std::size_t i = 1; i + 1 < tn.size(); ++i) jordan.push_back(tn[i]);
  const std::size_t n = jordan.size();
  std::vector<Segment> edges;
  for (std::size_t i = 0; i < n; ++i) edges.push_back({jordan[i], jordan[(i + 1) % n]});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      auto ps = crossing_params(edges[i], edges[j]);
      if (ps.empty()) continue;
      bool next = j == i + 1 && ps.size() == 1 && ps[0] == 1;
      bool wrap = i == 0 && j == n - 1 && ps.size() == 1 && ps[0] == 0;
      if (n > 2 && (next || wrap)) continue;
      throw ValidationError("interior_side_check: C + tau is not a simple closed curve");
    }
  }

  const std::size_t m = poly.size() - 1;
  const Segment mid_seg{poly[(m - 1) / 2], poly[(m - 1) / 2 + 1]};
  const QPoint mid = mid_seg.at(Q(1, 2));
  const QPoint nrm = detail::right_normal(mid_seg);
  for (int e = 4; e < 64; ++e) {
    const Q eps = pow2(-e);
    const QPoint minus = mid + eps * nrm;
    const QPoint plus = mid - eps * nrm;
    const Segment probe{plus, minus};
    bool clean = point_in_D(dm, plus) && point_in_D(dm, minus);
    for (const auto& b : dm.boundary_segments()) clean = clean && !segments_intersect(probe, b);
    for (const auto& ed : edges)
      for (const auto& t : crossing_params(probe, ed)) clean = clean && t == Q(1, 2);
    if (!clean) continue;
    SideReport r;
    r.plus_probe = plus;
    r.minus_probe = minus;
    r.plus_interior = winding_number(plus, jordan) != 0;
    r.minus_interior = winding_number(minus, jordan) != 0;
    return r;
  }
  throw ValidationError("interior_side_check: no clean probe found");
}

inline json crosscut_to_json(const Crosscut& c) {
  json pts = json::array();
  for (const auto& p : c.polyline) pts.push_back(point_to_json(p));
  return {{"format", "bext-crosscut/1"}, {"polyline", pts}, {"ends", json::array({c.ends.first, c.ends.second})}};
}

inline Crosscut crosscut_from_json(const DomainModel& dm, const json& doc) {
  try {
    std::vector<QPoint> pts;
    for (const auto& p : doc.at("polyline")) pts.push_back(point_from_json(p));
    return validate_crosscut(dm, std::move(pts));
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("crosscut document: ") + ex.what());
  }
}

inline json chain_to_json(const ApproxCrosscut& a) {
  json wads = json::array();
  for (const auto& w : a.wads) {
    json boxes = json::array();
    for (const auto& b : w.boxes) boxes.push_back(rect_to_json(b));
    wads.push_back(boxes);
  }
  return {{"format", "bext-chain/1"}, {"wads", wads}};
}

inline ApproxCrosscut chain_from_json(const json& doc) {
  try {
    ApproxCrosscut a;
    for (const auto& w : doc.at("wads")) {
      Wad wad;
      for (const auto& b : w) wad.boxes.push_back(rect_from_json(b));
      a.wads.push_back(std::move(wad));
    }
    return a;
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("chain document: ") + ex.what());
  }
}

}  // namespace bext
