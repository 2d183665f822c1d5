#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "bext/errors.hpp"
#include "json.hpp"

namespace bext {

/// Finite record of a computably enumerable set: "n enters A at stage s".
class StagedSet {
 public:
  StagedSet(std::uint64_t n_max, std::uint64_t s_max) : n_max_(n_max), s_max_(s_max) {}

  /// Record that n enters at stage s. Throws on duplicates and range errors.
  void add(std::uint64_t n, std::uint64_t s) {
    if (n > n_max_) throw ValidationError("stage table: n=" + std::to_string(n) + " exceeds n_max");
    if (s > s_max_) throw ValidationError("stage table: stage " + std::to_string(s) + " exceeds s_max");
    if (!entries_.emplace(n, s).second)
      throw ValidationError("stage table: duplicate entry for n=" + std::to_string(n));
  }

  std::uint64_t n_max() const { return n_max_; }
  std::uint64_t s_max() const { return s_max_; }
  const std::map<std::uint64_t, std::uint64_t>& entries() const { return entries_; }

  std::optional<std::uint64_t> stage_of(std::uint64_t n) const {
    auto it = entries_.find(n);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(std::uint64_t n) const { return entries_.count(n) != 0; }

  friend bool operator==(const StagedSet&, const StagedSet&) = default;

 private:
  std::uint64_t n_max_;
  std::uint64_t s_max_;
  std::map<std::uint64_t, std::uint64_t> entries_;
};

/// n is in A_s: it entered at some stage s' <= s.
inline bool member_at(const StagedSet& set, std::uint64_t n, std::uint64_t s) {
  if (n > set.n_max()) throw ValidationError("member_at: n=" + std::to_string(n) + " out of range");
  auto st = set.stage_of(n);
  return st && *st <= s;
}

inline nlohmann::json to_json(const StagedSet& set) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [n, s] : set.entries()) entries.push_back({n, s});
  return {{"n_max", set.n_max()}, {"s_max", set.s_max()}, {"entries", entries}};
}

inline StagedSet stage_table_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw ValidationError("stage table: document is not an object");
    for (const char* key : {"n_max", "s_max", "entries"})
      if (!doc.contains(key)) throw ValidationError(std::string("stage table: missing field '") + key + "'");
    if (!doc["n_max"].is_number_unsigned() || !doc["s_max"].is_number_unsigned())
      throw ValidationError("stage table: n_max and s_max must be naturals");
    StagedSet set(doc["n_max"].get<std::uint64_t>(), doc["s_max"].get<std::uint64_t>());
    const auto& entries = doc["entries"];
    if (!entries.is_array()) throw ValidationError("stage table: entries must be a list");
    for (const auto& e : entries) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned())
        throw ValidationError("stage table: each entry must be a pair [n, s] of naturals");
      set.add(e[0].get<std::uint64_t>(), e[1].get<std::uint64_t>());
    }
    return set;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("stage table: ") + ex.what());
  }
}

/// Parse a stage-table document from UTF-8 JSON text.
inline StagedSet load_stage_table(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ValidationError(std::string("stage table: malformed document: ") + ex.what());
  }
  return stage_table_from_json(doc);
}

inline StagedSet load_stage_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open stage table '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_stage_table(buf.str());
}

}  // namespace bext
