#include "privacycube/geo/continents.hpp"

#include <utility>

namespace privacycube::geo {
namespace {

struct Row {
  const char* code;
  Continent continent;
};

constexpr Row kBuiltin[] = {
#include "continent_table.inc"
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

const ContinentMap& ContinentMap::builtin() {
  static const ContinentMap map = [] {
    ContinentMap m;
    for (const auto& row : kBuiltin) m.table_.emplace(row.code, row.continent);
    return m;
  }();
  return map;
}

std::optional<Continent> ContinentMap::lookup(std::string_view country) const {
  auto it = table_.find(country);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

void ContinentMap::apply_overrides(std::string_view csv) {
  std::size_t line_no = 0;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    auto line = trim(csv.substr(0, nl));
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) {
      throw ContinentMapError("continent map line " + std::to_string(line_no) +
                              ": expected \"CC,continent\"");
    }
    const auto code = trim(line.substr(0, comma));
    const auto cont = enum_from_string<Continent>(trim(line.substr(comma + 1)));
    if (code.size() != 2 || !cont) {
      throw ContinentMapError("continent map line " + std::to_string(line_no) +
                              ": bad code or continent");
    }
    table_.insert_or_assign(std::string(code), *cont);
  }
}

std::optional<Continent> country_to_continent(std::string_view country) {
  return ContinentMap::builtin().lookup(country);
}

}  // namespace privacycube::geo
