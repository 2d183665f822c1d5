#pragma once

#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bext/domain.hpp"
#include "bext/quadrature.hpp"

namespace bext {

using cplx = std::complex<double>;

namespace detail {
struct ScProblem;
}

struct SolveOptions {
  double eps = 1e-8;          // accuracy demanded of the finished map
  std::size_t max_depth = 5;  // crowding bound on J
  int nodes = 16;             // quadrature order; the check uses nodes + 8
  int probes = 100;           // round-trip probes for the residual
};

/// Disk Schwarz-Christoffel map
///   phi(z) = c + C * int_0^z prod_k (1 - t/z_k)^{beta_k} dt
/// with C > 0, so phi(0) = c and phi'(0) > 0. Vertices are stored
/// counter-clockwise; a slit tip has beta = 1.
class ConformalMap {
 public:
  const std::vector<cplx>& vertices() const { return w_; }
  const std::vector<double>& betas() const { return beta_; }
  const std::vector<cplx>& prevertices() const { return z_; }
  /// Polygon in the library's clockwise convention, exact.
  const std::vector<QPoint>& polygon() const { return poly_; }
  const QPoint& center_exact() const { return center_q_; }
  cplx center() const { return center_; }
  double scale() const { return C_; }
  /// Self-consistency error bar attached to every evaluation.
  double error() const { return err_; }
  double requested_eps() const { return eps_; }
  const std::string& kind() const { return kind_; }
  /// Clockwise vertex index of counter-clockwise vertex m.
  std::size_t cw_index(std::size_t m) const { return m == 0 ? 0 : w_.size() - m; }
  std::size_t ccw_index(std::size_t n) const { return n == 0 ? 0 : w_.size() - n; }
  std::optional<std::size_t> depth() const { return depth_; }
  /// Smallest angular gap between consecutive prevertices.
  double min_prevertex_gap() const {
    double g = 2 * std::numbers::pi;
    for (std::size_t k = 0; k < z_.size(); ++k) {
      double a = std::arg(z_[(k + 1) % z_.size()] / z_[k]);
      if (a <= 0) a += 2 * std::numbers::pi;
      g = std::min(g, a);
    }
    return g;
  }

  /// Integrand prod_k (1 - t/z_k)^{beta_k}, skipping factor `skip`.
  cplx integrand(cplx t, int skip = -1) const {
    cplx s = 0;
    for (std::size_t k = 0; k < z_.size(); ++k) {
      if (static_cast<int>(k) == skip || beta_[k] == 0) continue;
      s += beta_[k] * std::log(1.0 - t / z_[k]);
    }
    return std::exp(s);
  }

  /// int_a^b of the integrand along the chord; ja / jb flag an endpoint that
  /// is prevertex ja / jb.
  cplx integral(cplx a, int ja, cplx b, int jb, bool check_rule = false) const {
    if (ja >= 0 && jb >= 0) {
      cplx m = 0.5 * (a + b);
      return from_singular(ja, m, check_rule) - from_singular(jb, m, check_rule);
    }
    if (ja >= 0) return from_singular(ja, b, check_rule);
    if (jb >= 0) return -from_singular(jb, a, check_rule);
    return regular(a, b, check_rule);
  }

  cplx eval(cplx z) const { return eval_with(z, false); }
  cplx derivative(cplx z) const { return C_ * integrand(z); }

  /// Evaluation with the higher-order rule, used to estimate quadrature error.
  cplx eval_check(cplx z) const { return eval_with(z, true); }

  /// Numerical inverse by damped Newton; `hint` is a preimage guess.
  std::optional<cplx> inverse(cplx w, std::optional<cplx> hint = std::nullopt, double tol = 1e-13) const {
    std::vector<cplx> starts;
    if (hint) starts.push_back(*hint);
    std::vector<std::pair<double, std::size_t>> near;
    for (std::size_t i = 0; i < seeds_.size(); ++i) near.push_back({std::abs(seed_images_[i] - w), i});
    std::partial_sort(near.begin(), near.begin() + std::min<std::size_t>(6, near.size()), near.end());
    for (std::size_t i = 0; i < std::min<std::size_t>(6, near.size()); ++i) starts.push_back(seeds_[near[i].second]);
    for (cplx z : starts) {
      if (auto r = newton(w, z, tol)) return r;
    }
    return std::nullopt;
  }

  std::string diagnostics() const {
    std::ostringstream os;
    os << "vertices=" << w_.size() << " min_prevertex_gap=" << min_prevertex_gap() << " residual=" << err_;
    return os.str();
  }

 private:
  friend ConformalMap solve_map_polygon(const std::vector<QPoint>&, const QPoint&, const SolveOptions&,
                                        const std::vector<cplx>&, bool);
  friend class ConformalMapIO;
  friend struct detail::ScProblem;
  friend ConformalMap solve_map(const DomainModel&, const SolveOptions&);

  cplx eval_with(cplx z, bool check_rule) const {
    if (std::abs(z) <= 0.5) return center_ + C_ * integral(0, -1, z, -1, check_rule);
    std::size_t j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < z_.size(); ++k) {
      double d = std::abs(z - z_[k]);
      if (d < best) best = d, j = k;
    }
    if (best == 0) return w_[j];
    if (best >= std::abs(z)) return center_ + C_ * integral(0, -1, z, -1, check_rule);
    return w_[j] + C_ * integral(z_[j], static_cast<int>(j), z, -1, check_rule);
  }

  double nearest_gap(cplx t, int skip = -1) const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < z_.size(); ++k)
      if (static_cast<int>(k) != skip && beta_[k] != 0) d = std::min(d, std::abs(t - z_[k]));
    return d;
  }

  cplx panel(cplx a, cplx b, const GaussRule& r) const {
    cplx mid = 0.5 * (a + b), half = 0.5 * (b - a), s = 0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * integrand(mid + half * r.nodes[i]);
    return half * s;
  }

  cplx regular(cplx a, cplx b, bool check_rule) const {
    const GaussRule& r = check_rule ? legendre_hi_ : legendre_;
    cplx s = 0, cur = a;
    for (int steps = 0; cur != b; ++steps) {
      if (steps > 20000) throw SolverError("sc map: quadrature path too long (crowding)");
      double left = std::abs(b - cur);
      double h = std::min(left, 0.5 * nearest_gap(cur));
      if (h <= 0) throw SolverError("sc map: quadrature path meets a prevertex");
      cplx next = (h >= left) ? b : cur + (b - cur) * (h / left);
      s += panel(cur, next, r);
      cur = next;
    }
    return s;
  }

  /// int from prevertex j to b: one Gauss-Jacobi panel off the singular
  /// end, then regular panels.
  cplx from_singular(std::size_t j, cplx b, bool check_rule) const {
    const cplx zj = z_[j];
    const double len = std::abs(b - zj);
    if (len == 0) return 0;
    const cplx u = (b - zj) / len;
    const double h = std::min(len, 0.5 * nearest_gap(zj, static_cast<int>(j)));
    const GaussRule& r = check_rule ? jacobi_hi_[j] : jacobi_[j];
    const cplx c = -h * u / (2.0 * zj);
    cplx s = 0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      cplx t = zj + 0.5 * h * u * (1 + r.nodes[i]);
      s += r.weights[i] * integrand(t, static_cast<int>(j));
    }
    s *= 0.5 * h * u * (beta_[j] == 0 ? cplx(1) : std::exp(beta_[j] * std::log(c)));
    if (h >= len) return s;
    return s + regular(zj + h * u, b, check_rule);
  }

  std::optional<cplx> newton(cplx w, cplx z, double tol) const {
    cplx f = eval(z) - w;
    for (int it = 0; it < 80; ++it) {
      if (std::abs(f) <= tol) return z;
      cplx d = derivative(z);
      if (d == cplx(0)) return std::nullopt;
      cplx step = f / d;
      double lam = 1;
      bool improved = false;
      for (int half = 0; half < 40; ++half, lam *= 0.5) {
        cplx zn = z - lam * step;
        if (std::abs(zn) >= 1) continue;
        cplx fn = eval(zn) - w;
        if (std::abs(fn) < std::abs(f)) {
          z = zn, f = fn, improved = true;
          break;
        }
      }
      if (!improved) return std::abs(f) <= 100 * tol ? std::optional<cplx>(z) : std::nullopt;
    }
    return std::abs(f) <= 100 * tol ? std::optional<cplx>(z) : std::nullopt;
  }

  void build_rules(int n) {
    legendre_ = gauss_legendre(n);
    legendre_hi_ = gauss_legendre(n + 8);
    jacobi_.clear();
    jacobi_hi_.clear();
    for (double b : beta_) {
      jacobi_.push_back(gauss_jacobi(n, 0, b));
      jacobi_hi_.push_back(gauss_jacobi(n + 8, 0, b));
    }
  }

  void build_seeds() {
    seeds_.clear();
    seed_images_.clear();
    const double radii[] = {0, 0.3, 0.55, 0.7, 0.8, 0.88, 0.93, 0.96, 0.98, 0.99, 0.995};
    for (double r : radii) {
      int m = r == 0 ? 1 : 96;
      for (int i = 0; i < m; ++i) seeds_.push_back(std::polar(r, 2 * std::numbers::pi * i / m));
    }
    // Extra seeds hugging the crowded arcs between prevertices.
    for (std::size_t k = 0; k < z_.size(); ++k) {
      cplx a = z_[k], b = z_[(k + 1) % z_.size()];
      double gap = std::arg(b / a);
      if (gap <= 0) gap += 2 * std::numbers::pi;
      for (double f : {0.04, 0.46, 0.95})
        for (double r : {1 - 0.3 * gap, 1 - 0.1 * gap, 1 - 0.03 * gap})
          if (r > 0) seeds_.push_back(a * std::polar(r, f * gap));
    }
    for (cplx s : seeds_) seed_images_.push_back(eval(s));
  }

  std::vector<cplx> w_;
  std::vector<double> beta_;
  std::vector<cplx> z_;
  std::vector<QPoint> poly_;
  QPoint center_q_;
  cplx center_ = 0;
  double C_ = 1;
  double err_ = 0;
  double eps_ = 0;
  std::string kind_ = "schwarz-christoffel-disk";
  std::optional<std::size_t> depth_;
  GaussRule legendre_, legendre_hi_;
  std::vector<GaussRule> jacobi_, jacobi_hi_;
  std::vector<cplx> seeds_, seed_images_;
};

namespace detail {

/// Turning-angle exponents of a counter-clockwise polygon; a reversal is a
/// slit tip (interior angle 2 pi).
inline std::vector<double> sc_betas(const std::vector<cplx>& w) {
  const std::size_t n = w.size();
  std::vector<double> beta(n);
  double total = 0;
  for (std::size_t k = 0; k < n; ++k) {
    cplx in = w[k] - w[(k + n - 1) % n];
    cplx out = w[(k + 1) % n] - w[k];
    cplx r = out / in;
    double turn = (std::abs(r.imag()) <= 1e-15 * std::abs(r) && r.real() < 0) ? -std::numbers::pi : std::arg(r);
    beta[k] = -turn / std::numbers::pi;
    total += beta[k];
  }
  if (std::abs(total + 2) > 1e-9) throw ValidationError("sc map: polygon is not positively oriented");
  return beta;
}

/// Unknowns y_k = log(gap_k / gap_{k+1}); z_{n-1} = 1 is pinned.
struct ScProblem {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  ConformalMap* map;
  std::vector<cplx> w;
  cplx center;

  int inputs() const { return static_cast<int>(w.size()) - 1; }
  int values() const { return inputs(); }

  static std::vector<cplx> prevertices(const Eigen::VectorXd& y) {
    const std::size_t n = y.size() + 1;
    std::vector<double> c(n, 1.0);
    for (std::size_t k = 1; k < n; ++k) c[k] = c[k - 1] * std::exp(-y[k - 1]);
    double sum = 0;
    for (double v : c) sum += v;
    std::vector<cplx> z(n);
    double theta = 0;
    for (std::size_t k = 0; k < n; ++k) {
      theta += 2 * std::numbers::pi * c[k] / sum;
      z[k] = std::polar(1.0, k + 1 == n ? 0.0 : theta);
    }
    return z;
  }

  int operator()(const Eigen::VectorXd& y, Eigen::VectorXd& f) const {
    for (int i = 0; i < y.size(); ++i)
      if (!std::isfinite(y[i]) || std::abs(y[i]) > 60) {
        f.setConstant(1e6);
        return 0;
      }
    map->z_ = prevertices(y);
    const std::size_t n = w.size();
    try {
      cplx I0 = map->integral(map->z_[0], 0, map->z_[1], 1);
      double L0 = std::abs(w[1] - w[0]);
      for (std::size_t k = 1; k + 2 < n; ++k) {
        cplx Ik = map->integral(map->z_[k], static_cast<int>(k), map->z_[k + 1], static_cast<int>(k + 1));
        f[k - 1] = std::log(std::abs(Ik) / std::abs(I0)) - std::log(std::abs(w[k + 1] - w[k]) / L0);
      }
      cplx C = (w[1] - w[0]) / I0;
      cplx A = w[0] - C * map->integral(0, -1, map->z_[0], 0);
      f[n - 3] = (A - center).real();
      f[n - 2] = (A - center).imag();
    } catch (const SolverError&) {
      f.setConstant(1e6);
    }
    for (int i = 0; i < f.size(); ++i)
      if (!std::isfinite(f[i])) f[i] = 1e6;
    return 0;
  }
};

}  // namespace detail

namespace detail {

/// Unknowns y from counter-clockwise prevertices (any rotation).
inline Eigen::VectorXd y_from_prevertices(const std::vector<cplx>& z) {
  const std::size_t n = z.size();
  std::vector<double> gap(n);
  for (std::size_t k = 0; k < n; ++k) {
    double a = std::arg(z[k] / z[(k + n - 1) % n]);
    if (a <= 0) a += 2 * std::numbers::pi;
    gap[k] = a;
  }
  Eigen::VectorXd y(static_cast<int>(n) - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) y[k] = std::log(gap[k] / gap[k + 1]);
  return y;
}

}  // namespace detail

/// Solve the parameter problem for a clockwise rational polygon with the
/// given interior centre, starting from `guess` (counter-clockwise
/// prevertices) when supplied. Throws SolverError with crowding diagnostics
/// when the residual stays above opt.eps.
inline ConformalMap solve_map_polygon(const std::vector<QPoint>& cw, const QPoint& center, const SolveOptions& opt,
                                      const std::vector<cplx>& guess = {}, bool finish = true) {
  if (cw.size() < 3) throw UsageError("solve_map: polygon needs at least three vertices");
  if (winding_number(center, cw) == 0 || on_polygon(center, cw))
    throw ValidationError("solve_map: centre is not interior");
  if (!(opt.eps > 0)) throw UsageError("solve_map: eps must be positive");
  ConformalMap m;
  m.poly_ = cw;
  m.center_q_ = center;
  m.center_ = center.to_complex();
  m.eps_ = opt.eps;
  const std::size_t n = cw.size();
  for (std::size_t k = 0; k < n; ++k) m.w_.push_back(cw[k == 0 ? 0 : n - k].to_complex());
  m.beta_ = detail::sc_betas(m.w_);
  m.build_rules(opt.nodes);

  detail::ScProblem prob{&m, m.w_, m.center_};
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<int>(n) - 1);
  if (!guess.empty()) {
    if (guess.size() != n) throw UsageError("solve_map: guess has the wrong number of prevertices");
    y = detail::y_from_prevertices(guess);
  }
  Eigen::HybridNonLinearSolver<detail::ScProblem> solver(prob);
  solver.parameters.xtol = 1e-14;
  solver.parameters.maxfev = 400 * static_cast<int>(n);
  solver.solveNumericalDiff(y);
  Eigen::VectorXd f(y.size());
  prob(y, f);
  const double fres = f.lpNorm<Eigen::Infinity>();
  m.z_ = detail::ScProblem::prevertices(y);
  const cplx I0 = m.integral(m.z_[0], 0, m.z_[1], 1);
  const cplx C = (m.w_[1] - m.w_[0]) / I0;
  const cplx rot = std::polar(1.0, std::arg(C));
  for (auto& z : m.z_) z *= rot;
  m.C_ = std::abs(C);
  m.err_ = fres;

  auto fail = [&](const std::string& why) {
    std::ostringstream os;
    os << "solve_map: " << why << " (" << m.diagnostics() << " parameter_residual=" << fres << ")";
    throw SolverError(os.str());
  };
  if (!(fres < 1e-6)) fail("parameter problem did not converge");
  if (!finish) return m;
  m.build_seeds();

  // Error bar: vertex images reached from 0, rule-order disagreement and
  // the round trip through the numerical inverse.
  double err = fres;
  for (std::size_t k = 0; k < n; ++k) {
    cplx v = m.center_ - m.C_ * m.integral(m.z_[k], static_cast<int>(k), 0, -1);
    err = std::max(err, std::abs(v - m.w_[k]));
  }
  const double golden = std::numbers::pi * (3 - std::sqrt(5.0));
  for (int p = 0; p < opt.probes; ++p) {
    double r = 0.97 * std::sqrt((p + 0.5) / opt.probes);
    cplx z = std::polar(r, golden * p);
    cplx w = m.eval(z);
    err = std::max(err, std::abs(w - m.eval_check(z)));
    auto back = m.inverse(w);
    if (!back) fail("numerical inverse failed at a probe");
    err = std::max(err, std::abs(m.eval(*back) - w));
    err = std::max(err, std::abs(*back - z) * std::abs(m.derivative(z)));
  }
  m.err_ = 2 * err + 1e-14;
  if (!(m.err_ <= opt.eps)) fail("residual above tolerance");
  return m;
}

/// Continuation in the depth: the depth-j solution seeds depth j + 1, whose
/// three new prevertices split the arc between those of 0 and nu_{3j+3}.
inline ConformalMap solve_map(const DomainModel& dm, const SolveOptions& opt = {}) {
  if (dm.depth() > opt.max_depth)
    throw UsageError("solve_map: depth " + std::to_string(dm.depth()) + " exceeds the crowding bound " +
                     std::to_string(opt.max_depth));
  std::vector<cplx> guess;
  for (std::size_t j = 1; j < dm.depth(); ++j) {
    DomainModel dj = build_domain(dm.staged(), j);
    ConformalMap mj = solve_map_polygon(dj.vertices(), dj.interior_ref(), opt, guess, false);
    const auto& z = mj.prevertices();
    guess.assign(z.begin(), z.end());
    double gap = std::arg(z[1] / z[0]);
    if (gap <= 0) gap += 2 * std::numbers::pi;
    std::vector<cplx> fresh;
    for (double f : {0.04, 0.46, 0.95}) fresh.push_back(z[0] * std::polar(1.0, f * gap));
    guess.insert(guess.begin() + 1, fresh.begin(), fresh.end());
  }
  ConformalMap m = solve_map_polygon(dm.vertices(), dm.interior_ref(), opt, guess);
  m.depth_ = dm.depth();
  return m;
}

/// The unit square with centre (1 + i)/2.
inline std::vector<QPoint> square_fixture() {
  return {{Q(0), Q(0)}, {Q(0), Q(1)}, {Q(1), Q(1)}, {Q(1), Q(0)}};
}

inline ConformalMap solve_square_fixture(const SolveOptions& opt = {}) {
  return solve_map_polygon(square_fixture(), {Q(1, 2), Q(1, 2)}, opt);
}

}  // namespace bext
