#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "bext/geometry.hpp"

namespace bext {

/// Exact predicates on the bounded region of a clockwise rational polygon.
/// Doubled spike edges are allowed; their crossings cancel in the winding.
class PolygonRegion {
 public:
  explicit PolygonRegion(std::vector<QPoint> cw) : v_(std::move(cw)) {
    for (std::size_t i = 0; i < v_.size(); ++i) segs_.push_back({v_[i], v_[(i + 1) % v_.size()]});
  }

  const std::vector<QPoint>& vertices() const { return v_; }
  const std::vector<Segment>& segments() const { return segs_; }

  bool on_boundary(const QPoint& p) const { return on_polygon(p, v_); }
  bool is_vertex(const QPoint& p) const { return std::find(v_.begin(), v_.end(), p) != v_.end(); }
  bool contains(const QPoint& p) const { return !on_boundary(p) && winding_number(p, v_) != 0; }

  bool segment_avoids(const Segment& seg) const {
    if (contains(seg.a) || contains(seg.b)) return false;
    if (seg.degenerate()) return true;
    std::vector<Q> ts{Q(0), Q(1)};
    for (const auto& b : segs_)
      for (auto& t : crossing_params(seg, b)) ts.push_back(t);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
      if (contains(seg.at((ts[i] + ts[i + 1]) / 2))) return false;
    return true;
  }

  /// Non-vertex boundary points joined by a taxicab arc that avoids the region.
  bool acceptably_placed(const QPoint& p, const QPoint& q) const {
    if (p == q || is_vertex(p) || is_vertex(q) || !on_boundary(p) || !on_boundary(q)) return false;
    for (const auto& arc : taxicab_arcs(p, q)) {
      bool clear = true;
      for (const auto& leg : arc.legs) clear = clear && segment_avoids(leg);
      if (clear) return true;
    }
    return false;
  }

  /// Empty when `poly` is a crosscut (ends on the boundary away from
  /// vertices, interior inside, simple); otherwise the first violation.
  std::optional<std::string> crosscut_violation(const std::vector<QPoint>& poly) const {
    if (poly.size() < 2) return "too few points";
    for (std::size_t i = 0; i + 1 < poly.size(); ++i)
      if (poly[i] == poly[i + 1]) return "repeated point";
    if (poly.front() == poly.back()) return "endpoints coincide";
    for (const auto* e : {&poly.front(), &poly.back()}) {
      if (!on_boundary(*e)) return "endpoint off the boundary";
      if (is_vertex(*e)) return "endpoint is a vertex";
    }
    const std::size_t m = poly.size() - 1;
    for (std::size_t i = 1; i < m; ++i)
      if (!contains(poly[i])) return "interior node outside";
    for (std::size_t i = 0; i < m; ++i) {
      Segment s{poly[i], poly[i + 1]};
      for (const auto& b : segs_)
        for (const auto& t : crossing_params(s, b))
          if (!((t == 0 && i == 0) || (t == 1 && i + 1 == m))) return "meets the boundary away from its endpoints";
      if (!contains(s.at(Q(1, 2)))) return "leaves the region";
    }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) {
        auto ps = crossing_params(Segment{poly[i], poly[i + 1]}, Segment{poly[j], poly[j + 1]});
        if (ps.empty()) continue;
        if (j == i + 1 && ps.size() == 1 && ps[0] == 1) continue;
        return "not simple";
      }
    return std::nullopt;
  }

  /// Exact foot of the perpendicular from p on the nearest boundary segment
  /// (nearness judged in binary64).
  QPoint snap(const QPoint& p) const {
    const Segment* best = nullptr;
    double bd = 0;
    Q bt;
    for (const auto& s : segs_) {
      const QPoint d = s.b - s.a;
      Q t = ((p.re - s.a.re) * d.re + (p.im - s.a.im) * d.im) / norm_sq(d);
      if (t < 0) t = 0;
      if (t > 1) t = 1;
      double dd = to_double(dist_sq(s.at(t), p));
      if (!best || dd < bd) best = &s, bd = dd, bt = t;
    }
    return best->at(bt);
  }

 private:
  std::vector<QPoint> v_;
  std::vector<Segment> segs_;
};

}  // namespace bext
