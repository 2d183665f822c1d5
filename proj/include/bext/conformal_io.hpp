#pragma once

#include <string>
#include <vector>

#include "bext/cover.hpp"
#include "bext/json_util.hpp"

namespace bext {

inline json cplx_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx cplx_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError("expected a pair of numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

/// Serialization of solved maps. Loading rebuilds the quadrature and the
/// inverse seeds, then re-checks the vertex images against the stored error.
class ConformalMapIO {
 public:
  static json to_json(const ConformalMap& m) {
    json poly = json::array(), pre = json::array(), beta = json::array();
    for (const auto& p : m.poly_) poly.push_back(point_to_json(p));
    for (auto z : m.z_) pre.push_back(cplx_to_json(z));
    for (double b : m.beta_) beta.push_back(b);
    return {{"format", "bext-map/1"},
            {"kind", m.kind_},
            {"polygon_cw", poly},
            {"center", point_to_json(m.center_q_)},
            {"depth", m.depth_ ? json(*m.depth_) : json(nullptr)},
            {"betas_ccw", beta},
            {"prevertices_ccw", pre},
            {"scale", m.C_},
            {"error", m.err_},
            {"eps", m.eps_}};
  }

  static ConformalMap from_json(const json& doc, int nodes = 16) {
    try {
      if (doc.value("format", "") != "bext-map/1") throw ValidationError("map document: unknown format");
      ConformalMap m;
      for (const auto& p : doc.at("polygon_cw")) m.poly_.push_back(point_from_json(p));
      m.center_q_ = point_from_json(doc.at("center"));
      m.center_ = m.center_q_.to_complex();
      if (!doc.at("depth").is_null()) m.depth_ = doc.at("depth").get<std::size_t>();
      const std::size_t n = m.poly_.size();
      if (n < 3) throw ValidationError("map document: polygon too small");
      for (std::size_t k = 0; k < n; ++k) m.w_.push_back(m.poly_[k == 0 ? 0 : n - k].to_complex());
      m.beta_ = detail::sc_betas(m.w_);
      for (const auto& z : doc.at("prevertices_ccw")) m.z_.push_back(cplx_from_json(z));
      if (m.z_.size() != n) throw ValidationError("map document: prevertex count mismatch");
      m.C_ = doc.at("scale").get<double>();
      m.err_ = doc.at("error").get<double>();
      m.eps_ = doc.at("eps").get<double>();
      m.kind_ = doc.at("kind").get<std::string>();
      m.build_rules(nodes);
      for (std::size_t k = 0; k < n; ++k) {
        cplx v = m.center_ - m.C_ * m.integral(m.z_[k], static_cast<int>(k), 0, -1);
        if (std::abs(v - m.w_[k]) > std::max(m.err_, 1e-12))
          throw ValidationError("map document: prevertices do not reproduce vertex " + std::to_string(k));
      }
      m.build_seeds();
      return m;
    } catch (const json::exception& ex) {
      throw ValidationError(std::string("map document: ") + ex.what());
    }
  }
};

inline json map_to_json(const ConformalMap& m) { return ConformalMapIO::to_json(m); }
inline ConformalMap map_from_json(const json& doc) { return ConformalMapIO::from_json(doc); }

inline json witness_params_to_json(const WitnessParams& wp) {
  return {{"s0", q_to_json(wp.s0)}, {"r0", q_to_json(wp.r0)}, {"turn", q_to_json(wp.turn)},
          {"m_tilde", wp.threshold()}, {"band", wp.on_band()}};
}

inline WitnessParams witness_params_from_json(const json& j) {
  WitnessParams wp{q_from_json(j.at("s0")), q_from_json(j.at("r0")), q_from_json(j.at("turn"))};
  wp.m_tilde = j.value("m_tilde", 0.0);
  wp.band = j.value("band", 0.0);
  return wp;
}

inline json cover_to_json(const Cover& c) {
  json els = json::array();
  for (const auto& e : c.elements) {
    json cc = json::array();
    for (const auto& p : e.crosscut) cc.push_back(point_to_json(p));
    els.push_back({{"rect", rect_to_json(e.rect)},
                   {"witness", witness_params_to_json(e.wp)},
                   {"crosscut", cc},
                   {"oscillation", e.oscillation},
                   {"error", e.error}});
  }
  json bps = json::array();
  for (const auto& p : c.breakpoints) bps.push_back(point_to_json(p));
  return {{"format", "bext-cover/1"}, {"k", c.k}, {"elements", els}, {"breakpoints", bps}, {"owner", c.owner}};
}

inline Cover cover_from_json(const json& doc) {
  try {
    if (doc.value("format", "") != "bext-cover/1") throw ValidationError("cover document: unknown format");
    Cover c;
    c.k = doc.at("k").get<int>();
    for (const auto& e : doc.at("elements")) {
      CoverElement el{rect_from_json(e.at("rect")), witness_params_from_json(e.at("witness")), {},
                      e.at("oscillation").get<double>(), e.at("error").get<double>()};
      for (const auto& p : e.at("crosscut")) el.crosscut.push_back(point_from_json(p));
      c.elements.push_back(std::move(el));
    }
    for (const auto& p : doc.at("breakpoints")) c.breakpoints.push_back(point_from_json(p));
    c.owner = doc.at("owner").get<std::vector<std::size_t>>();
    if (!verify_certificate(c)) throw ValidationError("cover document: coverage certificate does not verify");
    return c;
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("cover document: ") + ex.what());
  }
}

inline json recognize_report_to_json(const RecognizeReport& r) {
  json cl = json::array();
  for (std::size_t i = 0; i < r.clauses.size(); ++i)
    cl.push_back({{"clause", i + 1},
                  {"verdict", to_string(r.clauses[i].verdict)},
                  {"margin", r.clauses[i].margin},
                  {"note", r.clauses[i].note}});
  return {{"overall", to_string(r.overall)}, {"m_tilde", r.m_tilde}, {"clauses", cl}};
}

inline json witness_report_to_json(const WitnessBoundReport& r) {
  return {{"verdict", to_string(r.verdict)}, {"pairs", r.pairs},          {"failures", r.failures},
          {"inconclusive", r.inconclusive},  {"worst_margin", r.worst_margin}, {"diameter", r.diameter}};
}

}  // namespace bext
