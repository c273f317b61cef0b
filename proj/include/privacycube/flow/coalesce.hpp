#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <tuple>

#include "privacycube/flow/classify.hpp"
#include "privacycube/flow/packet.hpp"

namespace privacycube::flow {

inline constexpr double kDefaultIdleGapSeconds = 10.0;

struct AssemblerStats {
  std::uint64_t packets = 0;
  std::uint64_t dropped = 0;   // both-local or both-remote
  std::uint64_t episodes = 0;  // FlowRecords emitted
};

// Turns packets into FlowRecords. Packets sharing a 5-tuple (either direction)
// belong to one episode until the tuple is idle for longer than the gap. A
// FlowRecord is emitted when an episode opens; it carries the opening packet's
// timestamp, direction and length.
class FlowAssembler {
 public:
  explicit FlowAssembler(LocalNetwork local, double idle_gap = kDefaultIdleGapSeconds)
      : local_(std::move(local)), idle_gap_(idle_gap) {}

  std::optional<FlowRecord> push(const PacketSummary& packet);

  const AssemblerStats& stats() const { return stats_; }
  std::size_t open_episodes() const { return last_seen_.size(); }

 private:
  using Key = std::tuple<std::uint32_t, std::uint16_t, std::uint32_t, std::uint16_t, int>;

  void prune(double now);

  LocalNetwork local_;
  double idle_gap_;
  std::map<Key, double> last_seen_;
  double last_prune_ = 0.0;
  AssemblerStats stats_;
};

}  // namespace privacycube::flow
