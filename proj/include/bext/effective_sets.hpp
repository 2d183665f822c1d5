#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "bext/domain.hpp"

namespace bext {

/// Does the open rectangle r contain a point of sigma_k?
inline bool rect_meets_sigma(const DomainModel& dm, const QRect& r, std::size_t k) {
  if (!r.is_open()) throw UsageError("rect_meets_sigma: rectangle must be open");
  for (const auto& s : dm.constituent(k).segments)
    if (seg_meets_rect(s, r)) return true;
  return false;
}

/// Is the closed rectangle r free of every vertex and of every constituent
/// other than sigma_k? On the truncated boundary this is a finite check.
inline bool rect_avoids_rest(const DomainModel& dm, const QRect& r, std::size_t k) {
  if (r.is_open()) throw UsageError("rect_avoids_rest: rectangle must be closed");
  (void)dm.constituent(k);
  for (const auto& v : dm.vertices())
    if (r.contains(v)) return false;
  for (const auto& c : dm.constituents()) {
    if (c.index == k) continue;
    for (const auto& s : c.segments)
      if (seg_meets_rect(s, r)) return false;
  }
  return true;
}

/// m_j = 2^-(j+3) + 2^-(j+5) + 2^-(j+2) - 2^-(j+4) = 11 * 2^-(j+5) and the
/// open square R_j = (-2^-j, m_j)^2 that swallows the boundary tail near 0.
inline std::pair<Q, QRect> mj_rect(std::size_t j) {
  if (j == 0) throw UsageError("mj_rect: j must be at least 1");
  const int e = static_cast<int>(j);
  Q m = pow2(-(e + 3)) + pow2(-(e + 5)) + pow2(-(e + 2)) - pow2(-(e + 4));
  Q lo = -pow2(-e);
  return {m, QRect::open(lo, m, lo, m)};
}

/// Closed rectangle included in D: no boundary contact and one corner inside.
inline bool closed_rect_in_D(const DomainModel& dm, const QRect& r) {
  const QRect c = r.closure();
  for (const auto& s : dm.boundary_segments())
    if (seg_meets_rect(s, c)) return false;
  return point_in_D(dm, c.corners()[0]);
}

inline bool open_rect_meets_X(const DomainModel& dm, const QRect& r) {
  const QRect o = r.as(RectKind::Open);
  for (const auto& s : dm.boundary_segments())
    if (seg_meets_rect(s, o)) return true;
  return false;
}

/// Deterministic dyadic-grid enumeration of rational rectangles satisfying a
/// membership predicate. Level L visits the grid nodes of spacing 2^-L in
/// [-1/8, 9/8]^2, nearest to the interior reference point first.
class RectStream {
 public:
  enum class Family { ClosedInD, OpenMeetingX };

  RectStream(const DomainModel& dm, Family family, int max_level)
      : dm_(&dm), family_(family), max_level_(max_level) {
    load_level();
  }

  /// Next emitted rectangle, or nullopt once max_level is exhausted.
  std::optional<QRect> next() {
    while (level_ <= max_level_) {
      while (cursor_ < nodes_.size()) {
        const QPoint& c = nodes_[cursor_++];
        QRect r = candidate(c);
        bool ok = family_ == Family::ClosedInD ? closed_rect_in_D(*dm_, r) : open_rect_meets_X(*dm_, r);
        if (ok) {
          ++emitted_;
          return r;
        }
      }
      ++level_;
      load_level();
    }
    return std::nullopt;
  }

  /// Grid level of the most recent emission (or the level being scanned).
  int level() const { return level_; }
  std::size_t emitted() const { return emitted_; }

 private:
  QRect candidate(const QPoint& c) const {
    const Q h = pow2(-level_);
    if (family_ == Family::ClosedInD) {
      const Q half = h / 2;
      return QRect::closed(c.re - half, c.re + half, c.im - half, c.im + half);
    }
    return QRect::open(c.re - h, c.re + h, c.im - h, c.im + h);
  }

  void load_level() {
    nodes_.clear();
    cursor_ = 0;
    if (level_ > max_level_) return;
    const Q h = pow2(-level_);
    const Q hi(9, 8);
    // Smallest multiple of h that is >= -1/8.
    const Q start = -h * Q((Z(1) << level_) >> 3);
    for (Q x = start; x <= hi; x += h)
      for (Q y = start; y <= hi; y += h) nodes_.push_back({x, y});
    const QPoint ref = dm_->interior_ref();
    std::stable_sort(nodes_.begin(), nodes_.end(), [&](const QPoint& a, const QPoint& b) {
      Q da = dist_sq(a, ref);
      Q db = dist_sq(b, ref);
      if (da != db) return da < db;
      return a < b;
    });
  }

  const DomainModel* dm_;
  Family family_;
  int max_level_;
  int level_ = 0;
  std::vector<QPoint> nodes_;
  std::size_t cursor_ = 0;
  std::size_t emitted_ = 0;
};

/// Closed rational rectangles included in D.
inline RectStream enum_open_D(const DomainModel& dm, int max_level = 8) {
  return {dm, RectStream::Family::ClosedInD, max_level};
}

/// Open rational rectangles that meet X.
inline RectStream enum_closed_X(const DomainModel& dm, int max_level = 8) {
  return {dm, RectStream::Family::OpenMeetingX, max_level};
}

}  // namespace bext
