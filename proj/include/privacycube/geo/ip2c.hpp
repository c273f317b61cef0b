#pragma once

#include <array>
#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "privacycube/core/net.hpp"
#include "privacycube/geo/continents.hpp"

namespace privacycube::geo {

// Two uppercase ASCII letters.
class CountryCode {
 public:
  constexpr CountryCode() = default;
  static std::optional<CountryCode> parse(std::string_view text);

  std::string to_string() const { return {code_[0], code_[1]}; }
  friend constexpr auto operator<=>(const CountryCode&, const CountryCode&) = default;

 private:
  std::array<char, 2> code_{'Z', 'Z'};
};

struct Ip2cEntry {
  std::uint32_t range_start = 0;
  std::uint32_t range_end = 0;
  CountryCode country;

  bool operator==(const Ip2cEntry&) const = default;
};

class Ip2cError : public std::runtime_error {
 public:
  enum class Kind { MalformedRow, OverlappingRanges, EmptyTable };

  Ip2cError(Kind kind, std::size_t line, const std::string& message);

  Kind kind() const { return kind_; }
  // 1-based source line; 0 when not tied to a line.
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

// Sorted, non-overlapping IPv4 ranges. Immutable once built.
class Ip2cTable {
 public:
  // Validates and sorts. Throws Ip2cError.
  Ip2cTable(std::vector<Ip2cEntry> entries, std::string source_version,
            std::chrono::system_clock::time_point loaded_at = std::chrono::system_clock::now());

  const std::vector<Ip2cEntry>& entries() const { return entries_; }
  const std::string& source_version() const { return source_version_; }
  std::chrono::system_clock::time_point loaded_at() const { return loaded_at_; }

  // Binary search; nullptr when no range covers `ip`.
  const Ip2cEntry* find(Ipv4 ip) const;

 private:
  std::vector<Ip2cEntry> entries_;
  std::string source_version_;
  std::chrono::system_clock::time_point loaded_at_;
};

// Rows "start_ip,end_ip,CC" with dotted-quad or decimal addresses; no header;
// '#' comments and blank lines ignored. When `source_version` is empty it is
// derived from a content hash, so identical files get identical versions.
Ip2cTable load_ip2c(std::string_view csv, std::string source_version = {});

std::string content_version(std::string_view bytes);

struct GeoResult {
  enum class Kind { Country, Private, Unknown };

  Kind kind = Kind::Unknown;
  CountryCode country;               // Kind::Country only
  Continent continent = Continent::AF;  // Kind::Country only

  static GeoResult private_range() { return {Kind::Private, {}, Continent::AF}; }
  static GeoResult unknown() { return {Kind::Unknown, {}, Continent::AF}; }
  static GeoResult in_country(CountryCode c, Continent k) { return {Kind::Country, c, k}; }

  bool operator==(const GeoResult&) const = default;
};

// Private/reserved addresses short-circuit before the range search. A
// covering range whose country has no continent mapping resolves Unknown.
GeoResult resolve_country(const Ip2cTable& table, Ipv4 ip,
                          const ContinentMap& continents = ContinentMap::builtin());

// Batch lookup, parallel over `ips` with OpenMP.
std::vector<GeoResult> resolve_all(const Ip2cTable& table, std::span<const Ipv4> ips,
                                   const ContinentMap& continents = ContinentMap::builtin());

// Single-threaded reference for resolve_all.
std::vector<GeoResult> resolve_all_serial(const Ip2cTable& table, std::span<const Ipv4> ips,
                                          const ContinentMap& continents = ContinentMap::builtin());

}  // namespace privacycube::geo
