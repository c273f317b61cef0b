#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "privacycube/core/enum_traits.hpp"
#include "privacycube/core/net.hpp"

namespace privacycube::flow {

enum class Protocol { TCP, UDP, Other };
enum class Direction { Outbound, Inbound };

// Header-level view of one packet. Payload bytes are never retained.
struct PacketSummary {
  double timestamp = 0.0;
  std::optional<MacAddress> src_mac;
  std::optional<MacAddress> dst_mac;
  Ipv4 src_ip;
  std::uint16_t src_port = 0;
  Ipv4 dst_ip;
  std::uint16_t dst_port = 0;
  Protocol protocol = Protocol::Other;
  std::uint32_t length = 0;

  bool operator==(const PacketSummary&) const = default;
};

// One activity episode between a local and a remote endpoint.
struct FlowRecord {
  double timestamp = 0.0;
  Ipv4 local_ip;
  Ipv4 remote_ip;
  std::uint16_t local_port = 0;
  std::uint16_t remote_port = 0;
  Protocol protocol = Protocol::Other;
  Direction direction = Direction::Outbound;
  std::uint64_t byte_count = 0;
  // Hardware address of the local endpoint, when the source carries one.
  std::optional<MacAddress> local_mac;

  bool operator==(const FlowRecord&) const = default;
};

nlohmann::json to_json(const FlowRecord& flow);
FlowRecord flow_from_json(const nlohmann::json& j);

}  // namespace privacycube::flow

namespace privacycube {

template <>
struct EnumTraits<flow::Protocol> {
  static constexpr std::array<std::string_view, 3> names{"tcp", "udp", "other"};
};

template <>
struct EnumTraits<flow::Direction> {
  static constexpr std::array<std::string_view, 2> names{"Outbound", "Inbound"};
};

}  // namespace privacycube
