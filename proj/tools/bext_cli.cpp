// bext: command-line front end.
//
//   bext gen       --table T.json --depth J [--out DIR]
//   bext analyze   --domain D.json [--kmax K] [--bcf G.json] [--out DIR]
//   bext conformal (--domain D.json | --fixture square) [--kmax K] [--eps E] [--seed S] [--out DIR]
//   bext enum      --domain D.json --name open-D|closed-X [--count N] [--level L]
//   bext check     --name CHECK --domain D.json [--seed S] [--out DIR]
//
// Exit codes: 0 ok, 1 validation, 2 solver, 3 usage. Errors go to stderr as
// one line "bext: <kind>: <message>".

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <random>
#include <string>

#include "bext/connectivity.hpp"
#include "bext/conformal_io.hpp"
#include "bext/crosscut.hpp"
#include "bext/domain_io.hpp"
#include "bext/effective_sets.hpp"

using namespace bext;

namespace {

enum Exit { kOk = 0, kValidation = 1, kSolver = 2, kUsage = 3 };

struct RunConfig {
  std::string table, domain, bcf, fixture, name;
  std::size_t depth = 0;
  int kmax = -1;  // -1: per-command default
  double eps = 1e-8;
  std::string out = ".";
  std::uint64_t seed = 0;
  std::size_t count = 20;
  int level = 8;
};

/// Raised when a check ran to completion and found a violation.
struct CheckFailed : ValidationError {
  using ValidationError::ValidationError;
};

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

std::string out_path(const RunConfig& cfg, const std::string& file) {
  std::filesystem::create_directories(cfg.out);
  return (std::filesystem::path(cfg.out) / file).string();
}

DomainModel load_domain(const RunConfig& cfg) {
  if (cfg.domain.empty()) throw UsageError("--domain is required");
  return load_domain_file(cfg.domain);
}

int cmd_gen(const RunConfig& cfg) {
  if (cfg.depth < 1) throw UsageError("--depth must be at least 1");
  const StagedSet set = load_stage_table_file(cfg.table);
  const DomainModel dm = build_domain(set, cfg.depth);
  write_json_file(out_path(cfg, "domain.json"), domain_to_json(dm));
  write_text_file(out_path(cfg, "domain.svg"), domain_to_svg(dm));
  std::size_t tents = 0, spikes = 0;
  for (const auto& c : dm.constituents()) {
    tents += c.kind == ConstituentKind::Tent;
    spikes += c.kind == ConstituentKind::Spike;
  }
  std::cout << "depth=" << dm.depth() << " vertices=" << dm.vertices().size() << " tents=" << tents
            << " spikes=" << spikes << "\n";
  return kOk;
}

int cmd_analyze(const RunConfig& cfg) {
  const DomainModel dm = load_domain(cfg);
  const std::uint64_t J = dm.depth();
  const std::uint64_t kmax = cfg.kmax >= 0 ? static_cast<std::uint64_t>(cfg.kmax) : J + 1;
  ConnectivityOracle oracle(dm);
  json report;
  BCF g;
  if (!cfg.bcf.empty()) {
    g = bcf_from_json(read_json_file(cfg.bcf));
    report["source"] = "user";
  } else {
    g = mlc_table(oracle, kmax);
    report["source"] = "mlc_table";
    write_json_file(out_path(cfg, "bcf.json"), bcf_to_json(g));
  }
  report["bcf"] = bcf_to_json(g);
  const BcfVerdict v = validate_bcf(oracle, g, kmax);
  report["valid"] = v.ok;
  report["reason"] = v.reason;
  if (v.counterexample) {
    const auto& c = *v.counterexample;
    report["counterexample"] = {{"k", c.k},
                                {"p", cplx_to_json(c.p)},
                                {"q", cplx_to_json(c.q)},
                                {"distance", c.distance}};
  }
  bool agree = true;
  if (v.ok && g.g.size() >= J + 2) {
    json rows = json::array();
    for (auto [n, in] : turing_reduce(oracle, dm, g)) {
      const bool truth = dm.staged().contains(n);
      agree = agree && in == truth;
      rows.push_back({{"n", n}, {"member", in}, {"ground_truth", truth}});
    }
    report["reduction"] = rows;
    report["agrees"] = agree;
  }
  write_json_file(out_path(cfg, "analysis.json"), report);
  if (!v.ok) {
    std::string msg = "bcf rejected: " + v.reason;
    if (v.counterexample) {
      const auto& c = *v.counterexample;
      std::ostringstream os;
      os.precision(17);
      os << " (p=" << c.p.real() << "," << c.p.imag() << " q=" << c.q.real() << "," << c.q.imag()
         << " distance=" << c.distance << ")";
      msg += os.str();
    }
    throw CheckFailed(msg);
  }
  if (!report.contains("reduction")) throw UsageError("g must be tabulated up to k = J + 1 for the reduction");
  if (!agree) throw CheckFailed("reduction disagrees with the stage table");
  std::cout << "bcf valid; reduction agrees on n < " << J << "\n";
  return kOk;
}

int cmd_conformal(const RunConfig& cfg) {
  const int kmax = cfg.kmax >= 0 ? cfg.kmax : 4;
  SolveOptions opt;
  opt.eps = cfg.eps;
  ConformalMap cm = [&] {
    if (cfg.fixture == "square") return solve_square_fixture(opt);
    if (!cfg.fixture.empty()) throw UsageError("unknown fixture '" + cfg.fixture + "'");
    return solve_map(load_domain(cfg), opt);
  }();
  write_json_file(out_path(cfg, "map.json"), map_to_json(cm));
  const Q rho = rho_lower_bound(cm);

  std::vector<Cover> covers;
  json cover_docs = json::array();
  for (int k = 1; k <= kmax; ++k) {
    covers.push_back(oscillation_cover(cm, k, rho));
    cover_docs.push_back(cover_to_json(covers.back()));
  }
  write_json_file(out_path(cfg, "covers.json"), {{"format", "bext-covers/1"}, {"covers", cover_docs}});

  // Strong evaluation on random rectangles around circle points.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi);
  std::uniform_int_distribution<int> size(3, 12);
  json transcript = json::array();
  StrongEvalOptions seo;
  seo.verify = true;
  for (std::size_t i = 0; i < cfg.count && !covers.empty(); ++i) {
    const QPoint z = circle_point(ang(rng), 30);
    const Q h = pow2(-size(rng));
    const QRect R = QRect::open(z.re - h, z.re + h, z.im - h, z.im + h);
    auto ans = strong_eval(cm, covers, R, seo);
    json row = {{"input", rect_to_json(R)}};
    if (ans)
      row["output"] = rect_to_json(ans->out), row["k"] = ans->k, row["element"] = ans->element;
    else
      row["output"] = nullptr;
    transcript.push_back(row);
  }
  write_json_file(out_path(cfg, "strong_eval.json"), {{"format", "bext-strong-eval/1"}, {"runs", transcript}});

  // Theorem checks on a spread of certified crosscuts from the coarsest cover.
  json checks = json::array();
  if (!covers.empty()) {
    const Cover& c = covers.front();
    const std::size_t stride = std::max<std::size_t>(1, c.elements.size() / 12);
    for (std::size_t i = 0; i < c.elements.size(); i += stride) {
      const auto& e = c.elements[i];
      checks.push_back({{"element", i},
                        {"witness", witness_params_to_json(e.wp)},
                        {"recognize", recognize_report_to_json(check_recognizably_bounds(cm, e.crosscut, e.wp))},
                        {"witness_bound", witness_report_to_json(witness_bound_check(cm, e.crosscut, e.wp, 1000,
                                                                                     cfg.seed + i))}});
    }
  }
  const ContainmentReport cont = containment_check(cm);
  std::vector<std::size_t> counts;
  for (const auto& c : covers) counts.push_back(c.elements.size());
  json reports = {{"format", "bext-conformal-report/1"},
                  {"map_error", cm.error()},
                  {"rho_lower_bound", q_to_json(rho)},
                  {"containment", {{"points", cont.points}, {"outside", cont.outside}, {"min_margin", cont.min_margin}}},
                  {"cover_sizes", counts},
                  {"crosscut_checks", checks},
                  {"notes", json::array({"the boundary point nu_0 = 0 is excluded from witness checks at finite depth"})}};
  write_json_file(out_path(cfg, "reports.json"), reports);
  std::cout << "map error=" << cm.error() << " covers=";
  for (std::size_t i = 0; i < counts.size(); ++i) std::cout << (i ? "/" : "") << counts[i];
  std::cout << "\n";
  if (cont.outside) throw SolverError("map image leaves the domain at " + std::to_string(cont.outside) + " points");
  return kOk;
}

int cmd_enum(const RunConfig& cfg) {
  const DomainModel dm = load_domain(cfg);
  RectStream s = cfg.name == "open-D"     ? enum_open_D(dm, cfg.level)
                 : cfg.name == "closed-X" ? enum_closed_X(dm, cfg.level)
                                          : throw UsageError("--name must be open-D or closed-X");
  json rows = json::array();
  while (rows.size() < cfg.count) {
    auto r = s.next();
    if (!r) break;
    rows.push_back(rect_to_json(*r));
  }
  std::cout << json{{"family", cfg.name}, {"rectangles", rows}}.dump() << "\n";
  return kOk;
}

struct CheckResult {
  bool ok = true;
  json detail;
};

CheckResult check_named(const RunConfig& cfg, const DomainModel& dm) {
  std::mt19937_64 rng(cfg.seed);
  auto random_point_on = [&](std::size_t k) {
    const auto& segs = dm.constituent(k).segments;
    std::uniform_int_distribution<std::size_t> pick(0, segs.size() - 1);
    std::uniform_int_distribution<long> num(1, 1023);
    return segs[pick(rng)].at(Q(num(rng), 1024));
  };
  std::uniform_int_distribution<std::size_t> pick_k(0, dm.constituents().size() - 1);
  const std::string& name = cfg.name;

  if (name == "gap-identity") {
    json rows = json::array();
    bool ok = true;
    for (std::size_t j = 0; j < dm.depth(); ++j) {
      auto st = dm.staged().stage_of(j);
      const Q gap = dm.vertex(3 * j + 4).re - dm.vertex(3 * j + 6).re;
      const Q want = st ? pow2(-static_cast<int>(j + 2 + *st)) : Q(0);
      ok = ok && gap == want;
      rows.push_back({{"j", j}, {"gap", q_to_json(gap)}, {"expected", q_to_json(want)}});
    }
    return {ok, rows};
  }
  if (name == "arc-floor") {
    BoundaryGraph bg(dm);
    json rows = json::array();
    bool ok = true;
    for (std::size_t j = 0; j < dm.depth(); ++j) {
      if (!dm.staged().contains(j)) continue;
      const Q d2 = min_arc_diameter_sq(bg, dm.vertex(3 * j + 4), dm.vertex(3 * j + 6));
      const Q floor = pow2(-static_cast<int>(j + 1));
      ok = ok && d2 >= floor * floor;
      rows.push_back({{"j", j}, {"diameter_sq", q_to_json(d2)}, {"floor", q_to_json(floor)}});
    }
    return {ok, rows};
  }
  if (name == "constituent-invariance") {
    std::size_t bad = 0, n = 0;
    for (; n < 200;) {
      const std::size_t k1 = pick_k(rng), k2 = pick_k(rng);
      const QPoint p = random_point_on(k1), q = random_point_on(k2);
      if (p == q) continue;
      ++n;
      bad += acceptably_placed_points(dm, p, q) != acceptably_placed_constituents(dm, k1, k2);
    }
    return {bad == 0, {{"pairs", n}, {"disagreements", bad}}};
  }
  if (name == "interior-side") {
    std::size_t cases = 0, bad = 0;
    for (int guard = 0; guard < 100000 && cases < 100; ++guard) {
      const QPoint p = random_point_on(pick_k(rng)), q = random_point_on(pick_k(rng));
      if (p == q || !acceptably_placed_points(dm, p, q)) continue;
      auto c = make_crosscut(dm, p, q, Q(1, 256));
      if (!c) continue;
      for (const auto& tau : taxicab_arcs(q, p)) {
        bool clear = true;
        for (const auto& leg : tau.legs) clear = clear && segment_avoids_D(dm, leg);
        if (!clear) continue;
        ++cases;
        bad += !interior_side_check(dm, *c, tau).exactly_one();
        break;
      }
    }
    return {bad == 0 && cases > 0, {{"pairs", cases}, {"both_or_neither", bad}}};
  }
  if (name == "star-filter") {
    // Chains kept by the filter must thicken acceptable crosscuts.
    const ConformalMap cm = solve_map(dm);
    const Q rho = rho_lower_bound(cm);
    std::vector<ApproxCrosscut> chains;
    std::vector<Crosscut> cuts;
    // Only short crosscuts can pass the diameter clause.
    for (int guard = 0; guard < 200000 && chains.size() < 60; ++guard) {
      const QPoint p = random_point_on(pick_k(rng)), q = random_point_on(pick_k(rng));
      if (p == q || dist_sq(p, q) > Q(1, 64) || !acceptably_placed_points(dm, p, q)) continue;
      auto c = make_crosscut(dm, p, q, Q(1, 512));
      if (!c) continue;
      cuts.push_back(*c);
      chains.push_back(chain_from_crosscut(*c, Q(1, 2048)));
    }
    std::size_t kept = 0, bad = 0;
    const PolygonRegion region(cm.polygon());
    for (std::size_t i = 0; i < chains.size(); ++i) {
      if (!star_accepts(dm, chains[i], rho)) continue;
      ++kept;
      const auto& poly = cuts[i].polyline;
      bad += !acceptable_crosscut(region, poly, rho);
    }
    return {bad == 0, {{"chains", chains.size()}, {"kept", kept}, {"not_acceptable", bad}, {"rho", q_to_json(rho)}}};
  }
  if (name == "containment") {
    const ConformalMap cm = solve_map(dm);
    const ContainmentReport r = containment_check(cm);
    return {r.outside == 0, {{"points", r.points}, {"outside", r.outside}, {"min_margin", r.min_margin}}};
  }
  if (name == "witness-bound") {
    const ConformalMap cm = solve_map(dm);
    const Cover c = oscillation_cover(cm, 1, rho_lower_bound(cm));
    json rows = json::array();
    bool ok = true;
    for (std::size_t i = 0; i < c.elements.size(); i += std::max<std::size_t>(1, c.elements.size() / 10)) {
      const auto& e = c.elements[i];
      auto w = witness_bound_check(cm, e.crosscut, e.wp, 1000, cfg.seed + i);
      ok = ok && w.failures == 0;
      rows.push_back(witness_report_to_json(w));
    }
    return {ok, rows};
  }
  throw UsageError("unknown check '" + name +
                   "' (gap-identity, arc-floor, constituent-invariance, interior-side, star-filter, containment, "
                   "witness-bound)");
}

int cmd_check(const RunConfig& cfg) {
  const DomainModel dm = load_domain(cfg);
  CheckResult r = check_named(cfg, dm);
  json doc = {{"check", cfg.name}, {"seed", cfg.seed}, {"ok", r.ok}, {"detail", r.detail}};
  write_json_file(out_path(cfg, "check-" + cfg.name + ".json"), doc);
  if (!r.ok) throw CheckFailed("check " + cfg.name + " failed");
  std::cout << "check " << cfg.name << ": ok\n";
  return kOk;
}

int fail(int code, const char* kind, const std::string& msg) {
  std::cerr << "bext: " << kind << ": " << one_line(msg) << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary-extension toolkit for the truncated tent/spike domains"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--seed", cfg.seed, "random seed");
  };

  auto* gen = app.add_subcommand("gen", "build a domain document and SVG from a stage table");
  gen->add_option("--table", cfg.table, "stage table document")->required();
  gen->add_option("--depth", cfg.depth, "truncation depth J")->required();
  common(gen);

  auto* analyze = app.add_subcommand("analyze", "tabulate and validate a boundary connectivity function");
  analyze->add_option("--domain", cfg.domain, "domain document")->required();
  analyze->add_option("--kmax", cfg.kmax, "largest k (default J + 1)")->check(CLI::NonNegativeNumber);
  analyze->add_option("--bcf", cfg.bcf, "validate this g instead of the tabulated one");
  common(analyze);

  auto* conformal = app.add_subcommand("conformal", "solve the conformal map, build covers, run checks");
  conformal->add_option("--domain", cfg.domain, "domain document");
  conformal->add_option("--fixture", cfg.fixture, "built-in polygon (square)");
  conformal->add_option("--kmax", cfg.kmax, "covers for k = 1..kmax (default 4)")->check(CLI::Range(0, 12));
  conformal->add_option("--eps", cfg.eps, "map accuracy")->check(CLI::PositiveNumber);
  conformal->add_option("--samples", cfg.count, "strong evaluation demo inputs");
  common(conformal);

  auto* en = app.add_subcommand("enum", "print a prefix of a rectangle stream");
  en->add_option("--domain", cfg.domain, "domain document")->required();
  en->add_option("--name", cfg.name, "open-D or closed-X")->required();
  en->add_option("--count", cfg.count, "number of rectangles");
  en->add_option("--level", cfg.level, "deepest grid level")->check(CLI::Range(0, 16));

  auto* check = app.add_subcommand("check", "run a named check on a domain");
  check->add_option("--name", cfg.name, "check name")->required();
  check->add_option("--domain", cfg.domain, "domain document")->required();
  common(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "usage", e.what());
  }

  try {
    if (*gen) return cmd_gen(cfg);
    if (*analyze) return cmd_analyze(cfg);
    if (*conformal) {
      if (cfg.domain.empty() == cfg.fixture.empty()) throw UsageError("give exactly one of --domain and --fixture");
      return cmd_conformal(cfg);
    }
    if (*en) return cmd_enum(cfg);
    if (*check) return cmd_check(cfg);
  } catch (const UsageError& e) {
    return fail(kUsage, "usage", e.what());
  } catch (const SolverError& e) {
    return fail(kSolver, "solver", e.what());
  } catch (const ValidationError& e) {
    return fail(kValidation, "validation", e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(kUsage, "usage", e.what());
  }
  return kUsage;
}
