#include "privacycube/flow/coalesce.hpp"

namespace privacycube::flow {

std::optional<FlowRecord> FlowAssembler::push(const PacketSummary& packet) {
  ++stats_.packets;
  const auto ends = classify_endpoints(packet.src_ip, packet.dst_ip, local_);
  if (!ends) {
    ++stats_.dropped;
    return std::nullopt;
  }
  const bool outbound = ends->direction == Direction::Outbound;
  const std::uint16_t local_port = outbound ? packet.src_port : packet.dst_port;
  const std::uint16_t remote_port = outbound ? packet.dst_port : packet.src_port;
  const Key key{ends->local_ip.value(), local_port, ends->remote_ip.value(), remote_port,
                static_cast<int>(packet.protocol)};

  if (packet.timestamp - last_prune_ > idle_gap_) prune(packet.timestamp);

  auto [it, inserted] = last_seen_.try_emplace(key, packet.timestamp);
  const bool opens = inserted || packet.timestamp - it->second > idle_gap_;
  if (packet.timestamp > it->second) it->second = packet.timestamp;
  if (!opens) return std::nullopt;

  ++stats_.episodes;
  FlowRecord rec;
  rec.timestamp = packet.timestamp;
  rec.local_ip = ends->local_ip;
  rec.remote_ip = ends->remote_ip;
  rec.local_port = local_port;
  rec.remote_port = remote_port;
  rec.protocol = packet.protocol;
  rec.direction = ends->direction;
  rec.byte_count = packet.length;
  rec.local_mac = outbound ? packet.src_mac : packet.dst_mac;
  return rec;
}

void FlowAssembler::prune(double now) {
  std::erase_if(last_seen_, [&](const auto& kv) { return now - kv.second > idle_gap_; });
  last_prune_ = now;
}

}  // namespace privacycube::flow
