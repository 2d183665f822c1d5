#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bext/errors.hpp"
#include "bext/geometry.hpp"
#include "bext/staged_set.hpp"

namespace bext {

enum class ConstituentKind { SquareSide, BottomRun, Tent, Spike };

inline const char* to_string(ConstituentKind k) {
  switch (k) {
    case ConstituentKind::SquareSide: return "square-side";
    case ConstituentKind::BottomRun: return "bottom-run";
    case ConstituentKind::Tent: return "tent";
    case ConstituentKind::Spike: return "spike";
  }
  return "?";
}

inline ConstituentKind constituent_kind_from_string(const std::string& s) {
  if (s == "square-side") return ConstituentKind::SquareSide;
  if (s == "bottom-run") return ConstituentKind::BottomRun;
  if (s == "tent") return ConstituentKind::Tent;
  if (s == "spike") return ConstituentKind::Spike;
  throw ValidationError("unknown constituent kind '" + s + "'");
}

/// A significant constituent: one side run, or the two legs of a tent/spike.
struct Constituent {
  std::size_t index = 0;
  ConstituentKind kind = ConstituentKind::SquareSide;
  std::vector<Segment> segments;
  std::optional<std::size_t> tent_index;

  bool contains(const QPoint& p) const {
    for (const auto& s : segments)
      if (on_segment(p, s)) return true;
    return false;
  }
  /// Distinct segments (a spike's two legs coincide).
  std::vector<Segment> distinct_segments() const {
    std::vector<Segment> out;
    for (const auto& s : segments) {
      bool dup = false;
      for (const auto& t : out) dup = dup || same_set(s, t);
      if (!dup) out.push_back(s);
    }
    return out;
  }
};

/// nu_n of the construction for a given stage table. Tent j has its right
/// foot at nu_{3j+4}, apex nu_{3j+5} = 2^-(j+1) (1+i), left foot nu_{3j+6};
/// the feet are pushed apart by 2^-(j+3+s) when j enters at stage s.
inline QPoint vertex(std::size_t n, const StagedSet& set) {
  switch (n) {
    case 0: return {0, 0};
    case 1: return {0, 1};
    case 2: return {1, 1};
    case 3: return {1, 0};
    default: break;
  }
  const std::size_t j = (n - 4) / 3;
  const std::size_t r = (n - 4) % 3;
  if (j > set.n_max()) throw ValidationError("vertex: index " + std::to_string(n) + " beyond the stage table");
  const Q station = pow2(-static_cast<int>(j + 1));
  if (r == 1) return {station, station};
  auto st = set.stage_of(j);
  if (!st) return {station, 0};
  const Q shift = pow2(-static_cast<int>(j + 3 + *st));
  return {r == 0 ? Q(station + shift) : Q(station - shift), 0};
}

/// vertex() restricted to the truncation depth.
inline QPoint vertex(std::size_t n, const StagedSet& set, std::size_t depth) {
  if (n > 3 * depth + 3) throw ValidationError("vertex: index " + std::to_string(n) + " beyond truncation");
  return vertex(n, set);
}

/// Where a point sits relative to the boundary X.
struct BoundaryLocation {
  bool on_boundary = false;
  bool is_vertex = false;
  std::optional<std::size_t> constituent;
};

/// Truncated counterexample domain: boundary X, its constituents, and an
/// interior reference point.
class DomainModel {
 public:
  const StagedSet& staged() const { return staged_; }
  std::size_t depth() const { return depth_; }
  const std::vector<QPoint>& vertices() const { return vertices_; }
  const QPoint& vertex(std::size_t n) const {
    if (n >= vertices_.size()) throw ValidationError("vertex index beyond truncation");
    return vertices_[n];
  }
  /// [nu_0,nu_1], ..., [nu_{3J+2}, nu_{3J+3}], [nu_{3J+3}, nu_0].
  const std::vector<Segment>& boundary_segments() const { return boundary_; }
  const std::vector<Constituent>& constituents() const { return constituents_; }
  const Constituent& constituent(std::size_t k) const {
    if (k >= constituents_.size()) throw ValidationError("constituent index " + std::to_string(k) + " out of range");
    return constituents_[k];
  }
  const QPoint& interior_ref() const { return interior_ref_; }

  /// Index of the constituent holding tent/spike j.
  static std::size_t tent_constituent(std::size_t j) { return 2 * j + 4; }

  bool is_vertex(const QPoint& p) const {
    for (const auto& v : vertices_)
      if (v == p) return true;
    return false;
  }

  bool on_boundary(const QPoint& p) const { return on_polygon(p, vertices_); }

  /// Boundary segments with the doubled spike legs listed once.
  std::vector<Segment> distinct_segments() const {
    std::vector<Segment> out;
    for (const auto& s : boundary_) {
      bool dup = false;
      for (const auto& t : out) dup = dup || same_set(s, t);
      if (!dup) out.push_back(s);
    }
    return out;
  }

 private:
  friend DomainModel build_domain(const StagedSet& set, std::size_t depth);
  explicit DomainModel(StagedSet s) : staged_(std::move(s)) {}

  StagedSet staged_;
  std::size_t depth_ = 0;
  std::vector<QPoint> vertices_;
  std::vector<Segment> boundary_;
  std::vector<Constituent> constituents_;
  QPoint interior_ref_{Q(1, 2), Q(3, 4)};
};

/// Build the depth-J truncation: tents/spikes 0..J-1, with the tail that
/// accumulates at 0 replaced by the closing segment [nu_{3J+3}, 0].
///
/// Constituents are labelled clockwise from sigma_0 = [0, i]: the three
/// square sides, then alternately a bottom run and a tent/spike going
/// toward 0; the closing segment belongs to the final bottom run.
inline DomainModel build_domain(const StagedSet& set, std::size_t depth) {
  if (depth < 1) throw UsageError("build_domain: depth must be at least 1");
  if (depth > set.n_max() + 1)
    throw ValidationError("build_domain: depth " + std::to_string(depth) + " exceeds the stage table population");
  DomainModel dm(set);
  dm.depth_ = depth;
  const std::size_t nv = 3 * depth + 4;
  for (std::size_t n = 0; n < nv; ++n) dm.vertices_.push_back(vertex(n, set));

  for (std::size_t j = 0; j < depth; ++j) {
    // The push-out never reaches the neighbouring station 2^-(j+2).
    auto st = set.stage_of(j);
    if (st) {
      Q shift = pow2(-static_cast<int>(j + 3 + *st));
      if (!(shift < pow2(-static_cast<int>(j + 2)))) throw ValidationError("build_domain: tent foot collides");
    }
  }

  for (std::size_t n = 0; n + 1 < nv; ++n) dm.boundary_.push_back({dm.vertices_[n], dm.vertices_[n + 1]});
  dm.boundary_.push_back({dm.vertices_[nv - 1], dm.vertices_[0]});

  const auto& v = dm.vertices_;
  auto add = [&](ConstituentKind kind, std::vector<Segment> segs, std::optional<std::size_t> tent) {
    dm.constituents_.push_back({dm.constituents_.size(), kind, std::move(segs), tent});
  };
  add(ConstituentKind::SquareSide, {{v[0], v[1]}}, std::nullopt);
  add(ConstituentKind::SquareSide, {{v[1], v[2]}}, std::nullopt);
  add(ConstituentKind::SquareSide, {{v[2], v[3]}}, std::nullopt);
  add(ConstituentKind::BottomRun, {{v[3], v[4]}}, std::nullopt);
  for (std::size_t j = 0; j < depth; ++j) {
    const QPoint& right = v[3 * j + 4];
    const QPoint& apex = v[3 * j + 5];
    const QPoint& left = v[3 * j + 6];
    add(right == left ? ConstituentKind::Spike : ConstituentKind::Tent, {{right, apex}, {apex, left}}, j);
    if (j + 1 < depth)
      add(ConstituentKind::BottomRun, {{left, v[3 * j + 7]}}, std::nullopt);
    else
      add(ConstituentKind::BottomRun, {{left, v[0]}}, std::nullopt);
  }
  return dm;
}

/// Classify p: off the boundary, a vertex, or interior to exactly one
/// constituent.
inline BoundaryLocation constituent_of(const DomainModel& dm, const QPoint& p) {
  BoundaryLocation loc;
  if (dm.is_vertex(p)) {
    loc.on_boundary = true;
    loc.is_vertex = true;
    return loc;
  }
  for (const auto& c : dm.constituents()) {
    if (c.contains(p)) {
      loc.on_boundary = true;
      loc.constituent = c.index;
      return loc;
    }
  }
  return loc;
}

/// Exact membership in the bounded component D. Spikes are doubled edges of
/// the boundary polygon, so their crossings cancel in the winding count.
inline bool point_in_D(const DomainModel& dm, const QPoint& p) {
  if (dm.on_boundary(p)) return false;
  return winding_number(p, dm.vertices()) != 0;
}

/// True when no two non-adjacent boundary segments meet, ignoring the
/// coincident legs of spikes.
inline bool boundary_simple_away_from_spikes(const DomainModel& dm) {
  const auto& segs = dm.boundary_segments();
  const std::size_t n = segs.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (same_set(segs[i], segs[j])) continue;
      if (!segments_intersect(segs[i], segs[j])) continue;
      if (adjacent) {
        // Adjacent segments may only share their common vertex, unless they
        // fold back onto each other (a spike).
        const QPoint& shared = (j == i + 1) ? segs[i].b : segs[i].a;
        auto params = crossing_params(segs[i], segs[j]);
        if (params.size() == 1 && segs[i].at(params[0]) == shared) continue;
        return false;
      }
      // Spike feet coincide; the segments on either side of a spike meet there.
      bool spike_contact = false;
      for (const auto& c : dm.constituents()) {
        if (c.kind != ConstituentKind::Spike) continue;
        const QPoint& foot = c.segments[0].a;
        auto pi = crossing_params(segs[i], segs[j]);
        if (pi.size() == 1 && segs[i].at(pi[0]) == foot) spike_contact = true;
      }
      if (!spike_contact) return false;
    }
  }
  return true;
}

}  // namespace bext
