#include "privacycube/geo/ip2c.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace privacycube::geo {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<std::uint32_t> parse_address(std::string_view text) {
  if (text.find('.') != std::string_view::npos) {
    if (auto ip = Ipv4::parse(text)) return ip->value();
    return std::nullopt;
  }
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || v > 0xffffffffULL) {
    return std::nullopt;
  }
  return static_cast<std::uint32_t>(v);
}

bool by_start(const Ip2cEntry& a, const Ip2cEntry& b) { return a.range_start < b.range_start; }

}  // namespace

std::optional<CountryCode> CountryCode::parse(std::string_view text) {
  if (text.size() != 2) return std::nullopt;
  CountryCode c;
  for (std::size_t i = 0; i < 2; ++i) {
    char ch = text[i];
    if (ch >= 'a' && ch <= 'z') ch = static_cast<char>(ch - 'a' + 'A');
    if (ch < 'A' || ch > 'Z') return std::nullopt;
    c.code_[i] = ch;
  }
  return c;
}

Ip2cError::Ip2cError(Kind kind, std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? "ip2c line " + std::to_string(line) + ": " + message
                                  : "ip2c: " + message),
      kind_(kind),
      line_(line) {}

Ip2cTable::Ip2cTable(std::vector<Ip2cEntry> entries, std::string source_version,
                     std::chrono::system_clock::time_point loaded_at)
    : entries_(std::move(entries)),
      source_version_(std::move(source_version)),
      loaded_at_(loaded_at) {
  if (entries_.empty()) throw Ip2cError(Ip2cError::Kind::EmptyTable, 0, "no ranges");
  std::sort(entries_.begin(), entries_.end(), by_start);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].range_start > entries_[i].range_end) {
      throw Ip2cError(Ip2cError::Kind::MalformedRow, 0, "inverted range");
    }
    if (i > 0 && entries_[i].range_start <= entries_[i - 1].range_end) {
      throw Ip2cError(Ip2cError::Kind::OverlappingRanges, 0,
                      Ipv4(entries_[i].range_start).to_string() + " overlaps the previous range");
    }
  }
}

const Ip2cEntry* Ip2cTable::find(Ipv4 ip) const {
  const auto v = ip.value();
  auto it = std::upper_bound(entries_.begin(), entries_.end(), v,
                             [](std::uint32_t x, const Ip2cEntry& e) { return x < e.range_start; });
  if (it == entries_.begin()) return nullptr;
  --it;
  return v <= it->range_end ? &*it : nullptr;
}

std::string content_version(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Ip2cTable load_ip2c(std::string_view csv, std::string source_version) {
  if (source_version.empty()) source_version = content_version(csv);

  struct Row {
    Ip2cEntry entry;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::size_t line_no = 0;
  std::string_view rest = csv;
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    const auto line = trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    std::string_view fields[3];
    std::string_view cursor = line;
    for (int i = 0; i < 3; ++i) {
      const auto comma = cursor.find(',');
      if ((comma == std::string_view::npos) != (i == 2)) {
        throw Ip2cError(Ip2cError::Kind::MalformedRow, line_no,
                        "expected \"start_ip,end_ip,country_code\"");
      }
      fields[i] = trim(cursor.substr(0, comma));
      if (comma != std::string_view::npos) cursor = cursor.substr(comma + 1);
    }
    const auto start = parse_address(fields[0]);
    const auto end = parse_address(fields[1]);
    const auto country = CountryCode::parse(fields[2]);
    if (!start || !end || !country) {
      throw Ip2cError(Ip2cError::Kind::MalformedRow, line_no, "unparseable address or country");
    }
    if (*start > *end) throw Ip2cError(Ip2cError::Kind::MalformedRow, line_no, "inverted range");
    rows.push_back({{*start, *end, *country}, line_no});
  }
  if (rows.empty()) throw Ip2cError(Ip2cError::Kind::EmptyTable, 0, "no ranges");

  std::sort(rows.begin(), rows.end(),
            [](const Row& a, const Row& b) { return by_start(a.entry, b.entry); });
  std::vector<Ip2cEntry> entries;
  entries.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].entry.range_start <= rows[i - 1].entry.range_end) {
      throw Ip2cError(Ip2cError::Kind::OverlappingRanges, std::max(rows[i].line, rows[i - 1].line),
                      "range overlaps the row on line " +
                          std::to_string(std::min(rows[i].line, rows[i - 1].line)));
    }
    entries.push_back(rows[i].entry);
  }
  return Ip2cTable(std::move(entries), std::move(source_version));
}

GeoResult resolve_country(const Ip2cTable& table, Ipv4 ip, const ContinentMap& continents) {
  if (is_private_or_reserved(ip)) return GeoResult::private_range();
  const auto* entry = table.find(ip);
  if (entry == nullptr) return GeoResult::unknown();
  const auto continent = continents.lookup(entry->country.to_string());
  if (!continent) return GeoResult::unknown();
  return GeoResult::in_country(entry->country, *continent);
}

std::vector<GeoResult> resolve_all(const Ip2cTable& table, std::span<const Ipv4> ips,
                                   const ContinentMap& continents) {
  std::vector<GeoResult> out(ips.size());
  const auto n = static_cast<std::int64_t>(ips.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = resolve_country(table, ips[static_cast<std::size_t>(i)], continents);
  }
  return out;
}

std::vector<GeoResult> resolve_all_serial(const Ip2cTable& table, std::span<const Ipv4> ips,
                                          const ContinentMap& continents) {
  std::vector<GeoResult> out;
  out.reserve(ips.size());
  for (const auto ip : ips) out.push_back(resolve_country(table, ip, continents));
  return out;
}

}  // namespace privacycube::geo
