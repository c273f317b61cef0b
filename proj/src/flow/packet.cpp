#include "privacycube/flow/packet.hpp"

#include "privacycube/core/json_fields.hpp"

namespace privacycube::flow {

namespace jf = json_fields;
using nlohmann::json;

json to_json(const FlowRecord& flow) {
  json j;
  j["ts"] = flow.timestamp;
  j["local_ip"] = flow.local_ip.to_string();
  j["remote_ip"] = flow.remote_ip.to_string();
  j["local_port"] = flow.local_port;
  j["remote_port"] = flow.remote_port;
  j["proto"] = std::string(to_string(flow.protocol));
  j["direction"] = std::string(to_string(flow.direction));
  j["bytes"] = flow.byte_count;
  if (flow.local_mac) j["local_mac"] = flow.local_mac->to_string();
  return j;
}

FlowRecord flow_from_json(const json& j) {
  auto ip_field = [&](std::string_view key) {
    const auto path = std::string(key);
    auto ip = Ipv4::parse(jf::as_string(jf::require(j, key, ""), path));
    if (!ip) throw jf::FieldError(jf::FieldError::Kind::BadValue, path, "expected IPv4 address");
    return *ip;
  };
  auto port_field = [&](std::string_view key) {
    const auto v = jf::as_integer(jf::require(j, key, ""), std::string(key));
    if (v < 0 || v > 65535) {
      throw jf::FieldError(jf::FieldError::Kind::BadValue, std::string(key), "port out of range");
    }
    return static_cast<std::uint16_t>(v);
  };

  FlowRecord f;
  f.timestamp = jf::as_number(jf::require(j, "ts", ""), "ts");
  f.local_ip = ip_field("local_ip");
  f.remote_ip = ip_field("remote_ip");
  f.local_port = port_field("local_port");
  f.remote_port = port_field("remote_port");
  f.protocol = jf::as_enum<Protocol>(jf::require(j, "proto", ""), "proto");
  f.direction = jf::as_enum<Direction>(jf::require(j, "direction", ""), "direction");
  const auto bytes = jf::as_integer(jf::require(j, "bytes", ""), "bytes");
  if (bytes < 0) throw jf::FieldError(jf::FieldError::Kind::BadValue, "bytes", "negative");
  f.byte_count = static_cast<std::uint64_t>(bytes);
  if (const auto* mac = jf::optional_field(j, "local_mac")) {
    auto parsed = MacAddress::parse(jf::as_string(*mac, "local_mac"));
    if (!parsed) throw jf::FieldError(jf::FieldError::Kind::BadValue, "local_mac", "bad MAC");
    f.local_mac = *parsed;
  }
  return f;
}

}  // namespace privacycube::flow
