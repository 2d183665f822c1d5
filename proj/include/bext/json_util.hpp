#pragma once

#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "bext/errors.hpp"
#include "bext/geometry.hpp"
#include "json.hpp"

namespace bext {

using nlohmann::json;

namespace detail {

inline json integer_to_json(const Z& z) {
  if (z >= std::numeric_limits<std::int64_t>::min() && z <= std::numeric_limits<std::int64_t>::max())
    return z.convert_to<std::int64_t>();
  return z.str();
}

inline Z integer_from_json(const json& j) {
  if (j.is_number_integer()) return Z(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      return Z(j.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  throw ValidationError("expected an integer, got " + j.dump());
}

}  // namespace detail

/// Rationals travel as [numerator, denominator]; components outside int64
/// are written as decimal strings.
inline json q_to_json(const Q& q) {
  return json::array({detail::integer_to_json(numerator(q)), detail::integer_to_json(denominator(q))});
}

inline Q q_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("expected a [num, den] pair, got " + j.dump());
  Z num = detail::integer_from_json(j[0]);
  Z den = detail::integer_from_json(j[1]);
  if (den == 0) throw ValidationError("zero denominator");
  return Q(num, den);
}

inline json point_to_json(const QPoint& p) { return json::array({q_to_json(p.re), q_to_json(p.im)}); }

inline QPoint point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("expected a point [re, im], got " + j.dump());
  return {q_from_json(j[0]), q_from_json(j[1])};
}

inline json rect_to_json(const QRect& r) {
  return {{"kind", r.is_open() ? "open" : "closed"},
          {"x", json::array({q_to_json(r.x_lo()), q_to_json(r.x_hi())})},
          {"y", json::array({q_to_json(r.y_lo()), q_to_json(r.y_hi())})}};
}

inline QRect rect_from_json(const json& j) {
  try {
    RectKind kind = j.at("kind").get<std::string>() == "open" ? RectKind::Open : RectKind::Closed;
    return {q_from_json(j.at("x").at(0)), q_from_json(j.at("x").at(1)), q_from_json(j.at("y").at(0)),
            q_from_json(j.at("y").at(1)), kind};
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("malformed rectangle: ") + ex.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& ex) {
    throw ValidationError("malformed document '" + path + "': " + ex.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
}

inline void write_json_file(const std::string& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

}  // namespace bext
