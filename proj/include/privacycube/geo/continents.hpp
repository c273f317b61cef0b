#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "privacycube/core/enum_traits.hpp"

namespace privacycube::geo {

enum class Continent { AF, AN, AS, EU, NA, OC, SA };

class ContinentMapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ISO 3166-1 alpha-2 country code -> continent.
class ContinentMap {
 public:
  // All 249 assigned alpha-2 codes.
  static const ContinentMap& builtin();

  std::optional<Continent> lookup(std::string_view country) const;
  std::size_t size() const { return table_.size(); }
  const std::map<std::string, Continent, std::less<>>& entries() const { return table_; }

  // Rows "CC,continent"; '#' comments and blank lines ignored. Later rows
  // replace existing codes. Throws ContinentMapError naming the line.
  void apply_overrides(std::string_view csv);

 private:
  std::map<std::string, Continent, std::less<>> table_;
};

std::optional<Continent> country_to_continent(std::string_view country);

}  // namespace privacycube::geo

namespace privacycube {

template <>
struct EnumTraits<geo::Continent> {
  static constexpr std::array<std::string_view, 7> names{"AF", "AN", "AS", "EU",
                                                         "NA", "OC", "SA"};
};

}  // namespace privacycube
