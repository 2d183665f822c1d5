#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include "bext/domain.hpp"
#include "bext/json_util.hpp"

namespace bext {

inline json domain_to_json(const DomainModel& dm) {
  json verts = json::array();
  for (const auto& v : dm.vertices()) verts.push_back(point_to_json(v));
  json cons = json::array();
  for (const auto& c : dm.constituents()) {
    json segs = json::array();
    for (const auto& s : c.segments) segs.push_back(json::array({point_to_json(s.a), point_to_json(s.b)}));
    cons.push_back({{"k", c.index},
                    {"kind", to_string(c.kind)},
                    {"segments", segs},
                    {"tent_index", c.tent_index ? json(*c.tent_index) : json(nullptr)}});
  }
  return {{"format", "bext-domain/1"},
          {"stage_table", to_json(dm.staged())},
          {"depth", dm.depth()},
          {"vertices", verts},
          {"interior_ref", point_to_json(dm.interior_ref())},
          {"constituents", cons}};
}

/// Rebuild from the stage table and depth, then check that the stored
/// geometry agrees with the construction.
inline DomainModel domain_from_json(const json& doc) {
  try {
    if (doc.value("format", "") != "bext-domain/1") throw ValidationError("domain document: unknown format");
    StagedSet set = stage_table_from_json(doc.at("stage_table"));
    DomainModel dm = build_domain(set, doc.at("depth").get<std::size_t>());
    const auto& verts = doc.at("vertices");
    if (verts.size() != dm.vertices().size()) throw ValidationError("domain document: vertex count mismatch");
    for (std::size_t n = 0; n < verts.size(); ++n)
      if (!(point_from_json(verts[n]) == dm.vertex(n)))
        throw ValidationError("domain document: vertex " + std::to_string(n) + " disagrees with the stage table");
    const auto& cons = doc.at("constituents");
    if (cons.size() != dm.constituents().size()) throw ValidationError("domain document: constituent count mismatch");
    for (std::size_t k = 0; k < cons.size(); ++k)
      if (constituent_kind_from_string(cons[k].at("kind").get<std::string>()) != dm.constituent(k).kind)
        throw ValidationError("domain document: constituent " + std::to_string(k) + " label mismatch");
    return dm;
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("domain document: ") + ex.what());
  }
}

inline DomainModel load_domain_file(const std::string& path) { return domain_from_json(read_json_file(path)); }

struct SvgViewport {
  double x_min = -0.125;
  double y_min = -0.125;
  double width = 1.25;
  double height = 1.25;
  int pixels = 600;
};

/// Line drawing of X: one path per constituent, classed by kind.
inline std::string domain_to_svg(const DomainModel& dm, const SvgViewport& vp = {}) {
  const double scale = vp.pixels / std::max(vp.width, vp.height);
  auto px = [&](const QPoint& p) {
    double x = (to_double(p.re) - vp.x_min) * scale;
    double y = (vp.y_min + vp.height - to_double(p.im)) * scale;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f %.3f", x, y);
    return std::string(buf);
  };
  std::ostringstream os;
  const int w = static_cast<int>(vp.width * scale + 0.5);
  const int h = static_cast<int>(vp.height * scale + 0.5);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 "
     << w << ' ' << h << "\">\n";
  os << "  <rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  for (const auto& c : dm.constituents()) {
    const char* color = c.kind == ConstituentKind::Tent    ? "#c0392b"
                        : c.kind == ConstituentKind::Spike ? "#2471a3"
                                                           : "black";
    os << "  <path class=\"" << to_string(c.kind) << "\" data-k=\"" << c.index << "\" d=\"M " << px(c.segments[0].a);
    for (const auto& s : c.segments) os << " L " << px(s.b);
    os << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
  }
  const std::string ref = px(dm.interior_ref());
  const auto cut = ref.find(' ');
  os << "  <circle class=\"interior-ref\" cx=\"" << ref.substr(0, cut) << "\" cy=\"" << ref.substr(cut + 1)
     << "\" r=\"2\" fill=\"gray\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace bext
