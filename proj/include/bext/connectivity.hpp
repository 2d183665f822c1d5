#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bext/domain.hpp"
#include "bext/json_util.hpp"

namespace bext {

/// Cycle-plus-stems graph of the truncated boundary: nodes are the distinct
/// vertices, edges the distinct boundary segments (a spike is a single stem
/// edge hanging off its foot).
class BoundaryGraph {
 public:
  explicit BoundaryGraph(const DomainModel& dm) {
    for (const auto& v : dm.vertices())
      if (std::find(nodes_.begin(), nodes_.end(), v) == nodes_.end()) nodes_.push_back(v);
    for (const auto& s : dm.distinct_segments()) edges_.push_back({index_of(s.a), index_of(s.b)});
    std::vector<int> degree(nodes_.size(), 0);
    for (const auto& [a, b] : edges_) {
      ++degree[a];
      ++degree[b];
    }
    for (std::size_t e = 0; e < edges_.size(); ++e)
      if (degree[edges_[e].first] == 1 || degree[edges_[e].second] == 1) stems_.push_back(e);
  }

  const std::vector<QPoint>& nodes() const { return nodes_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
  const std::vector<std::size_t>& stems() const { return stems_; }
  Segment edge_segment(std::size_t e) const { return {nodes_[edges_[e].first], nodes_[edges_[e].second]}; }

  bool on_graph(const QPoint& p) const {
    for (std::size_t e = 0; e < edges_.size(); ++e)
      if (on_segment(p, edge_segment(e))) return true;
    return false;
  }

  /// Node sequences of every simple path from p to q in the graph refined
  /// at p and q (at most two on a cycle with stems).
  std::vector<std::vector<QPoint>> arcs(const QPoint& p, const QPoint& q) const {
    if (!on_graph(p) || !on_graph(q)) throw ValidationError("boundary arc: off-boundary input");
    if (p == q) throw ValidationError("boundary arc: points coincide");
    std::vector<QPoint> nodes = nodes_;
    std::vector<std::pair<std::size_t, std::size_t>> edges = edges_;
    auto insert = [&](const QPoint& z) -> std::size_t {
      for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i] == z) return i;
      for (std::size_t e = 0; e < edges.size(); ++e) {
        auto [a, b] = edges[e];
        if (!on_segment(z, {nodes[a], nodes[b]})) continue;
        nodes.push_back(z);
        const std::size_t n = nodes.size() - 1;
        edges[e] = {a, n};
        edges.push_back({n, b});
        return n;
      }
      throw ValidationError("boundary arc: off-boundary input");
    };
    const std::size_t src = insert(p);
    const std::size_t dst = insert(q);
    std::vector<std::vector<std::size_t>> adj(nodes.size());
    for (const auto& [a, b] : edges) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    std::vector<std::vector<QPoint>> out;
    std::vector<std::size_t> path{src};
    std::vector<bool> used(nodes.size(), false);
    used[src] = true;
    std::function<void(std::size_t)> dfs = [&](std::size_t u) {
      if (u == dst) {
        std::vector<QPoint> pts;
        for (auto i : path) pts.push_back(nodes[i]);
        out.push_back(std::move(pts));
        return;
      }
      for (auto w : adj[u]) {
        if (used[w]) continue;
        used[w] = true;
        path.push_back(w);
        dfs(w);
        path.pop_back();
        used[w] = false;
      }
    };
    dfs(src);
    return out;
  }

 private:
  std::size_t index_of(const QPoint& p) const {
    return static_cast<std::size_t>(std::find(nodes_.begin(), nodes_.end(), p) - nodes_.begin());
  }

  std::vector<QPoint> nodes_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::vector<std::size_t> stems_;
};

/// Exact squared diameter of the smallest boundary arc joining p and q.
inline Q min_arc_diameter_sq(const BoundaryGraph& bg, const QPoint& p, const QPoint& q) {
  std::optional<Q> best;
  for (const auto& arc : bg.arcs(p, q)) {
    Q d = polyline_diameter_sq(arc);
    if (!best || d < *best) best = d;
  }
  if (!best) throw ValidationError("boundary arc: points are not connected");
  return *best;
}

/// Table k -> g(k), k = 0..size()-1.
struct BCF {
  std::vector<std::uint64_t> g;

  std::size_t k_max() const { return g.empty() ? 0 : g.size() - 1; }
  bool nondecreasing() const {
    for (std::size_t k = 0; k + 1 < g.size(); ++k)
      if (g[k + 1] < g[k]) return false;
    return true;
  }
  friend bool operator==(const BCF&, const BCF&) = default;
};

/// A pair of boundary points breaking the defining implication at level k.
struct Counterexample {
  std::complex<double> p;
  std::complex<double> q;
  std::uint64_t k = 0;
  double distance = 0;
};

struct BcfVerdict {
  bool ok = true;
  std::string reason;
  std::optional<Counterexample> counterexample;
};

/// delta_k: the least distance between boundary points every joining arc of
/// which has diameter >= 2^-k (capped at 2^-k, which is always attained).
struct DeltaResult {
  double delta = 0;
  std::complex<double> p;
  std::complex<double> q;
  bool capped = false;
};

/// Brute-force modulus-of-connectivity oracle on the truncated boundary.
///
/// For each pair of graph edges (e1, e2) and each boundary path between
/// them, the set of (t, u) where that path still has diameter >= T is a
/// union of products of closed intervals: the path diameter is the max of
/// the fixed node-set diameter and |p(t) - v|, |q(u) - v| over its nodes v,
/// and {t : |p(t) - v| < T for all v} is one open interval. Minimizing the
/// convex |p(t) - q(u)|^2 over those boxes gives delta_k exactly up to the
/// working precision of ~200 bits.
class ConnectivityOracle {
 public:
  using R = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<64>,
                                          boost::multiprecision::et_off>;

  explicit ConnectivityOracle(const DomainModel& dm) : bg_(dm) { prepare(); }

  const BoundaryGraph& graph() const { return bg_; }

  const DeltaResult& delta(std::uint64_t k) {
    auto it = cache_.find(k);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(k, compute(k)).first->second;
  }

  /// Least m with 2^-m < delta_k. At least k + 1 since delta_k <= 2^-k.
  std::uint64_t g_min(std::uint64_t k) {
    delta(k);
    const R& d2 = delta_sq_.at(k);
    std::uint64_t m = k + 1;
    while (!strictly_below(pow2_sq(m), d2)) ++m;
    return m;
  }

  /// Is 2^-m < delta_k?
  bool separates(std::uint64_t m, std::uint64_t k) {
    delta(k);
    return strictly_below(pow2_sq(m), delta_sq_.at(k));
  }

 private:
  struct PathInfo {
    std::vector<std::pair<R, R>> nodes;
    Q diameter_sq;
  };
  struct PairInfo {
    std::size_t e1, e2;
    std::pair<R, R> a1, d1, a2, d2;
    std::vector<PathInfo> paths;
    double gap = 0;  // double-precision distance between the two edges
  };
  using Span = std::pair<R, R>;  // closed interval inside [0, 1]

  static R to_r(const Q& q) {
    R r;
    mpfr_set_q(r.backend().data(), q.backend().data(), MPFR_RNDN);
    return r;
  }
  static R pow2_sq(std::uint64_t m) { return ldexp(R(1), -2 * static_cast<int>(m)); }

  /// a < b, with exact ties (rational geometry makes them common) counted as not below.
  static bool strictly_below(const R& a, const R& b) {
    static const R slack = ldexp(R(1), -150);
    return a < b - slack * b;
  }

  static double seg_gap(const Segment& s, const Segment& t) {
    if (segments_intersect(s, t)) return 0;
    auto pd = [](std::complex<double> p, std::complex<double> a, std::complex<double> b) {
      std::complex<double> d = b - a;
      double tt = std::clamp(std::real((p - a) * std::conj(d)) / std::norm(d), 0.0, 1.0);
      return std::abs(p - (a + tt * d));
    };
    auto A = s.a.to_complex(), B = s.b.to_complex(), C = t.a.to_complex(), D = t.b.to_complex();
    return std::min({pd(A, C, D), pd(B, C, D), pd(C, A, B), pd(D, A, B)});
  }

  void prepare() {
    const auto& edges = bg_.edges();
    for (std::size_t e1 = 0; e1 < edges.size(); ++e1) {
      for (std::size_t e2 = e1 + 1; e2 < edges.size(); ++e2) {
        Segment s1 = bg_.edge_segment(e1);
        Segment s2 = bg_.edge_segment(e2);
        PairInfo info;
        info.e1 = e1;
        info.e2 = e2;
        info.a1 = {to_r(s1.a.re), to_r(s1.a.im)};
        info.d1 = {to_r(s1.b.re - s1.a.re), to_r(s1.b.im - s1.a.im)};
        info.a2 = {to_r(s2.a.re), to_r(s2.a.im)};
        info.d2 = {to_r(s2.b.re - s2.a.re), to_r(s2.b.im - s2.a.im)};
        info.gap = seg_gap(s1, s2);
        // Interior points of the two edges share the same paths.
        for (const auto& arc : bg_.arcs(s1.at(Q(1, 2)), s2.at(Q(1, 2)))) {
          PathInfo path;
          std::vector<QPoint> inner(arc.begin() + 1, arc.end() - 1);
          path.diameter_sq = polyline_diameter_sq(inner);
          for (const auto& v : inner) path.nodes.push_back({to_r(v.re), to_r(v.im)});
          info.paths.push_back(std::move(path));
        }
        pairs_.push_back(std::move(info));
      }
    }
  }

  /// Parameters in [0,1] where max_v |a + t d - v| >= T.
  static std::vector<Span> far_set(const std::pair<R, R>& a, const std::pair<R, R>& d,
                                   const std::vector<std::pair<R, R>>& nodes, const R& T2) {
    const R A = d.first * d.first + d.second * d.second;
    R lo = -1, hi = 2;
    for (const auto& v : nodes) {
      R wx = a.first - v.first, wy = a.second - v.second;
      R B = d.first * wx + d.second * wy;
      R C = wx * wx + wy * wy - T2;
      R disc = B * B - A * C;
      if (disc <= 0) return {{R(0), R(1)}};
      R sq = sqrt(disc);
      lo = std::max(lo, R((-B - sq) / A));
      hi = std::min(hi, R((-B + sq) / A));
      if (lo >= hi) return {{R(0), R(1)}};
    }
    std::vector<Span> out;
    if (lo >= 0) out.push_back({R(0), std::min(lo, R(1))});
    if (hi <= 1) out.push_back({std::max(hi, R(0)), R(1)});
    return out;
  }

  static std::vector<Span> intersect(const std::vector<Span>& a, const std::vector<Span>& b) {
    std::vector<Span> out;
    for (const auto& x : a)
      for (const auto& y : b) {
        R lo = std::max(x.first, y.first), hi = std::min(x.second, y.second);
        if (lo <= hi) out.push_back({lo, hi});
      }
    return out;
  }

  struct Best {
    R d2;
    R t, u;
    bool set = false;
  };

  /// min |a1 + t d1 - a2 - u d2|^2 over a box.
  static void minimize_box(const PairInfo& pr, const Span& ts, const Span& us, Best& best) {
    const R cx = pr.a1.first - pr.a2.first, cy = pr.a1.second - pr.a2.second;
    const R& d1x = pr.d1.first;
    const R& d1y = pr.d1.second;
    const R& d2x = pr.d2.first;
    const R& d2y = pr.d2.second;
    const R aa = d1x * d1x + d1y * d1y, bb = d2x * d2x + d2y * d2y, ab = d1x * d2x + d1y * d2y;
    auto f = [&](const R& t, const R& u) {
      R x = cx + t * d1x - u * d2x, y = cy + t * d1y - u * d2y;
      return R(x * x + y * y);
    };
    auto offer = [&](const R& t, const R& u) {
      R v = f(t, u);
      if (!best.set || v < best.d2) best = {v, t, u, true};
    };
    auto clamp = [](const R& x, const Span& s) { return std::min(std::max(x, s.first), s.second); };
    // Best u for fixed t, best t for fixed u.
    auto u_for = [&](const R& t) { return clamp(R(((cx + t * d1x) * d2x + (cy + t * d1y) * d2y) / bb), us); };
    auto t_for = [&](const R& u) {
      return clamp(R(-((cx - u * d2x) * d1x + (cy - u * d2y) * d1y) / aa), ts);
    };
    for (const R& t : {ts.first, ts.second}) offer(t, u_for(t));
    for (const R& u : {us.first, us.second}) offer(t_for(u), u);
    const R det = aa * bb - ab * ab;
    if (det > ldexp(R(1), -200) * aa * bb) {
      const R rc1 = -(cx * d1x + cy * d1y), rc2 = cx * d2x + cy * d2y;
      R t = (rc1 * bb + ab * rc2) / det;
      R u = (aa * rc2 + ab * rc1) / det;
      if (t >= ts.first && t <= ts.second && u >= us.first && u <= us.second) offer(t, u);
    }
  }

  DeltaResult compute(std::uint64_t k) {
    const R T = ldexp(R(1), -static_cast<int>(k));
    const R T2 = T * T;
    const Q Tq = pow2(-static_cast<int>(k));
    const Q T2q = Tq * Tq;
    const double Td = std::ldexp(1.0, -static_cast<int>(k));
    Best best;
    const PairInfo* arg = nullptr;
    for (const auto& pr : pairs_) {
      if (pr.gap > Td * (1 + 1e-9) + 1e-300) continue;
      std::vector<std::pair<std::vector<Span>, std::vector<Span>>> live;
      for (const auto& path : pr.paths) {
        if (path.diameter_sq >= T2q) continue;
        live.push_back({far_set(pr.a1, pr.d1, path.nodes, T2), far_set(pr.a2, pr.d2, path.nodes, T2)});
      }
      // Each live path must be made long by p (t side) or by q (u side).
      const std::size_t n = live.size();
      for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
        std::vector<Span> ts{{R(0), R(1)}}, us{{R(0), R(1)}};
        for (std::size_t i = 0; i < n; ++i) {
          if (mask & (std::size_t(1) << i))
            us = intersect(us, live[i].second);
          else
            ts = intersect(ts, live[i].first);
        }
        for (const auto& t : ts)
          for (const auto& u : us) {
            Best before = best;
            minimize_box(pr, t, u, best);
            if (!before.set || best.d2 < before.d2) arg = &pr;
          }
      }
    }
    DeltaResult res;
    if (!best.set || best.d2 >= T2) {
      // The pair (0, i 2^-k) on [0, i] is always bad and at distance exactly 2^-k.
      res.delta = Td;
      res.p = {0, 0};
      res.q = {0, Td};
      res.capped = true;
      delta_sq_[k] = T2;
      return res;
    }
    if (best.d2 <= 0) throw SolverError("connectivity oracle: zero separation between distinct boundary points");
    delta_sq_[k] = best.d2;
    res.delta = static_cast<double>(sqrt(best.d2));
    auto at = [](const std::pair<R, R>& a, const std::pair<R, R>& d, const R& t) {
      return std::complex<double>(static_cast<double>(a.first + t * d.first),
                                  static_cast<double>(a.second + t * d.second));
    };
    res.p = at(arg->a1, arg->d1, best.t);
    res.q = at(arg->a2, arg->d2, best.u);
    return res;
  }

  BoundaryGraph bg_;
  std::vector<PairInfo> pairs_;
  std::map<std::uint64_t, DeltaResult> cache_;
  std::map<std::uint64_t, R> delta_sq_;
};

/// The pointwise-least nondecreasing boundary connectivity function of the
/// truncated boundary for k = 0..k_max.
inline BCF mlc_table(ConnectivityOracle& oracle, std::uint64_t k_max) {
  BCF out;
  std::uint64_t running = 0;
  for (std::uint64_t k = 0; k <= k_max; ++k) {
    running = std::max(running, oracle.g_min(k));
    out.g.push_back(running);
  }
  return out;
}

inline BCF mlc_table(const DomainModel& dm, std::uint64_t k_max) {
  ConnectivityOracle oracle(dm);
  return mlc_table(oracle, k_max);
}

/// Check g on k = 0..min(k_max, g.k_max()).
inline BcfVerdict validate_bcf(ConnectivityOracle& oracle, const BCF& g, std::uint64_t k_max) {
  BcfVerdict v;
  if (g.g.empty()) return {false, "empty table", std::nullopt};
  if (!g.nondecreasing()) return {false, "not increasing", std::nullopt};
  const std::uint64_t top = std::min<std::uint64_t>(k_max, g.k_max());
  for (std::uint64_t k = 0; k <= top; ++k) {
    if (oracle.separates(g.g[k], k)) continue;
    const DeltaResult& d = oracle.delta(k);
    v.ok = false;
    v.reason = "violated at k=" + std::to_string(k);
    v.counterexample = Counterexample{d.p, d.q, k, d.delta};
    return v;
  }
  return v;
}

inline BcfVerdict validate_bcf(const DomainModel& dm, const BCF& g, std::uint64_t k_max) {
  ConnectivityOracle oracle(dm);
  return validate_bcf(oracle, g, k_max);
}

/// Decide membership of n < J in the staged set from a valid g: n is in
/// iff it has entered by stage g(n + 2).
inline std::map<std::uint64_t, bool> turing_reduce(ConnectivityOracle& oracle, const DomainModel& dm, const BCF& g) {
  const std::uint64_t depth = dm.depth();
  if (g.g.size() < depth + 2) throw UsageError("turing_reduce: g must be tabulated up to k = J + 1");
  BcfVerdict v = validate_bcf(oracle, g, g.k_max());
  if (!v.ok) throw ValidationError("turing_reduce: invalid boundary connectivity function (" + v.reason + ")");
  std::map<std::uint64_t, bool> out;
  for (std::uint64_t n = 0; n < depth; ++n) out[n] = member_at(dm.staged(), n, g.g[n + 2]);
  return out;
}

inline std::map<std::uint64_t, bool> turing_reduce(const DomainModel& dm, const BCF& g) {
  ConnectivityOracle oracle(dm);
  return turing_reduce(oracle, dm, g);
}

inline json bcf_to_json(const BCF& g) {
  json rows = json::array();
  for (std::size_t k = 0; k < g.g.size(); ++k) rows.push_back({k, g.g[k]});
  return {{"format", "bext-bcf/1"}, {"g", rows}};
}

inline BCF bcf_from_json(const json& doc) {
  try {
    BCF g;
    const auto& rows = doc.is_array() ? doc : doc.at("g");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (!r.is_array() || r.size() != 2 || !r[0].is_number_unsigned() || !r[1].is_number_unsigned())
        throw ValidationError("bcf document: rows must be [k, g(k)] pairs of naturals");
      if (r[0].get<std::uint64_t>() != i) throw ValidationError("bcf document: k must run 0, 1, 2, ...");
      g.g.push_back(r[1].get<std::uint64_t>());
    }
    if (g.g.empty()) throw ValidationError("bcf document: empty table");
    return g;
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("bcf document: ") + ex.what());
  }
}

}  // namespace bext
