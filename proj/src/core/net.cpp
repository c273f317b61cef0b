#include "privacycube/core/net.hpp"

#include <charconv>
#include <cstdio>

namespace privacycube {
namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::optional<Ipv4> Ipv4::parse(std::string_view text) {
  std::uint32_t value = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    if (octet > 0) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
    const char* start = p;
    while (p != end && *p >= '0' && *p <= '9') ++p;
    const auto digits = p - start;
    if (digits == 0 || digits > 3) return std::nullopt;
    unsigned v = 0;
    std::from_chars(start, p, v);
    if (v > 255) return std::nullopt;
    value = (value << 8) | v;
  }
  if (p != end) return std::nullopt;
  return Ipv4(value);
}

std::string Ipv4::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", (value_ >> 24) & 0xff, (value_ >> 16) & 0xff,
                (value_ >> 8) & 0xff, value_ & 0xff);
  return buf;
}

std::optional<Ipv4Prefix> Ipv4Prefix::parse(std::string_view text) {
  const auto slash = text.find('/');
  auto ip = Ipv4::parse(text.substr(0, slash));
  if (!ip) return std::nullopt;
  if (slash == std::string_view::npos) return Ipv4Prefix(*ip, 32);
  const auto len_text = text.substr(slash + 1);
  if (len_text.empty() || len_text.size() > 2) return std::nullopt;
  int len = -1;
  auto [ptr, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), len);
  if (ec != std::errc{} || ptr != len_text.data() + len_text.size() || len < 0 || len > 32) {
    return std::nullopt;
  }
  return Ipv4Prefix(*ip, len);
}

std::string Ipv4Prefix::to_string() const {
  return base_.to_string() + "/" + std::to_string(length_);
}

std::optional<MacAddress> MacAddress::parse(std::string_view text) {
  if (text.size() != 17) return std::nullopt;
  std::array<std::uint8_t, 6> octets{};
  const char sep = text[2];
  if (sep != ':' && sep != '-') return std::nullopt;
  for (int i = 0; i < 6; ++i) {
    const auto pos = static_cast<std::size_t>(i * 3);
    if (i > 0 && text[pos - 1] != sep) return std::nullopt;
    const int hi = hex_value(text[pos]);
    const int lo = hex_value(text[pos + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    octets[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return MacAddress(octets);
}

std::string MacAddress::to_string() const {
  char buf[18];
  std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x", octets_[0], octets_[1],
                octets_[2], octets_[3], octets_[4], octets_[5]);
  return buf;
}

bool is_rfc1918(Ipv4 ip) {
  static constexpr Ipv4Prefix kBlocks[] = {
      {Ipv4(10, 0, 0, 0), 8}, {Ipv4(172, 16, 0, 0), 12}, {Ipv4(192, 168, 0, 0), 16}};
  for (const auto& p : kBlocks) {
    if (p.contains(ip)) return true;
  }
  return false;
}

bool is_private_or_reserved(Ipv4 ip) {
  static constexpr Ipv4Prefix kBlocks[] = {
      {Ipv4(0, 0, 0, 0), 8},       {Ipv4(10, 0, 0, 0), 8},     {Ipv4(100, 64, 0, 0), 10},
      {Ipv4(127, 0, 0, 0), 8},     {Ipv4(169, 254, 0, 0), 16}, {Ipv4(172, 16, 0, 0), 12},
      {Ipv4(192, 0, 0, 0), 24},    {Ipv4(192, 0, 2, 0), 24},   {Ipv4(192, 168, 0, 0), 16},
      {Ipv4(198, 18, 0, 0), 15},   {Ipv4(198, 51, 100, 0), 24}, {Ipv4(203, 0, 113, 0), 24},
      {Ipv4(224, 0, 0, 0), 4},     {Ipv4(240, 0, 0, 0), 4},
  };
  for (const auto& p : kBlocks) {
    if (p.contains(ip)) return true;
  }
  return false;
}

}  // namespace privacycube
