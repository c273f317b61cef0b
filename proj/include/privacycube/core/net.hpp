#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace privacycube {

// IPv4 address in host byte order.
class Ipv4 {
 public:
  constexpr Ipv4() = default;
  constexpr explicit Ipv4(std::uint32_t value) : value_(value) {}
  constexpr Ipv4(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
      : value_((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) |
               (std::uint32_t{c} << 8) | std::uint32_t{d}) {}

  // Strict dotted quad: four decimal octets, no leading '+', no spaces.
  static std::optional<Ipv4> parse(std::string_view text);

  constexpr std::uint32_t value() const { return value_; }
  std::string to_string() const;

  friend constexpr auto operator<=>(Ipv4, Ipv4) = default;

 private:
  std::uint32_t value_ = 0;
};

class Ipv4Prefix {
 public:
  constexpr Ipv4Prefix() = default;
  // Host bits of `base` are cleared.
  constexpr Ipv4Prefix(Ipv4 base, int length)
      : base_(Ipv4(base.value() & mask_for(length))), length_(length) {}

  // "a.b.c.d/n"; a bare address is treated as /32.
  static std::optional<Ipv4Prefix> parse(std::string_view text);

  constexpr Ipv4 base() const { return base_; }
  constexpr int length() const { return length_; }
  constexpr bool contains(Ipv4 ip) const {
    return (ip.value() & mask_for(length_)) == base_.value();
  }
  std::string to_string() const;

  friend constexpr auto operator<=>(const Ipv4Prefix&, const Ipv4Prefix&) = default;

 private:
  static constexpr std::uint32_t mask_for(int length) {
    return length <= 0 ? 0u : (length >= 32 ? 0xffffffffu : ~(0xffffffffu >> length));
  }

  Ipv4 base_{};
  int length_ = 32;
};

class MacAddress {
 public:
  constexpr MacAddress() = default;
  constexpr explicit MacAddress(std::array<std::uint8_t, 6> octets) : octets_(octets) {}

  // Six hex pairs separated by ':' or '-', either case.
  static std::optional<MacAddress> parse(std::string_view text);

  constexpr const std::array<std::uint8_t, 6>& octets() const { return octets_; }
  // Lowercase, colon separated.
  std::string to_string() const;

  friend constexpr auto operator<=>(const MacAddress&, const MacAddress&) = default;

 private:
  std::array<std::uint8_t, 6> octets_{};
};

// RFC1918 blocks: the default notion of "local".
bool is_rfc1918(Ipv4 ip);

// RFC1918 plus loopback, link-local, CGNAT, "this network", multicast,
// reserved and broadcast. Such addresses never reach a geo table.
bool is_private_or_reserved(Ipv4 ip);

}  // namespace privacycube

template <>
struct std::hash<privacycube::Ipv4> {
  std::size_t operator()(privacycube::Ipv4 ip) const noexcept {
    return std::hash<std::uint32_t>{}(ip.value());
  }
};

template <>
struct std::hash<privacycube::MacAddress> {
  std::size_t operator()(const privacycube::MacAddress& mac) const noexcept {
    std::uint64_t v = 0;
    for (auto o : mac.octets()) v = (v << 8) | o;
    return std::hash<std::uint64_t>{}(v);
  }
};
