#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>

#include "privacycube/cube/cube_state.hpp"
#include "privacycube/flow/packet.hpp"
#include "privacycube/gateway/broker.hpp"
#include "privacycube/gateway/event_log.hpp"
#include "privacycube/geo/resolver.hpp"
#include "privacycube/notify/emit_policy.hpp"
#include "privacycube/policy/corpus.hpp"

namespace privacycube::gateway {

struct RoomChange {
  policy::RoomId room = policy::RoomId::LivingRoom;
  double timestamp = 0.0;
};

struct Tick {
  double now = 0.0;
};

struct GeoRefreshEvent {
  geo::RefreshOutcome outcome;
  double timestamp = 0.0;
};

struct SourceError {
  std::string message;
  double timestamp = 0.0;
};

using PipelineEvent =
    std::variant<flow::FlowRecord, cube::TapEvent, RoomChange, Tick, GeoRefreshEvent, SourceError>;

struct PipelineOptions {
  double emit_window_seconds = notify::kDefaultEmitWindowSeconds;
  double led_timeout_seconds = cube::kDefaultLedTimeoutSeconds;
};

struct PipelineStats {
  std::uint64_t flows = 0;
  std::uint64_t attributed = 0;
  std::uint64_t notifications = 0;
  std::uint64_t suppressed = 0;  // attributed flows inside the emit window
  std::uint64_t taps = 0;
  std::uint64_t state_changes = 0;
  std::uint64_t errors = 0;
};

// The single sequencer. Events are applied strictly in the order handle() is
// called; each is logged before anything derived from it is published.
class Pipeline {
 public:
  Pipeline(std::shared_ptr<const policy::PolicyCorpus> corpus, const geo::GeoResolver& resolver,
           Broker& broker, EventLog* log, PipelineOptions options = {});

  // Logs and publishes the initial snapshot.
  void start(double ts);
  void handle(const PipelineEvent& event);

  const cube::CubeState& cube() const { return cube_; }
  const PipelineStats& stats() const { return stats_; }
  const std::string& last_snapshot() const { return last_snapshot_; }

 private:
  void on_flow(const flow::FlowRecord& flow);
  void on_tap(const cube::TapEvent& tap);
  void advance(double now);
  void publish_state_if_changed(double ts);
  void log(RecordKind kind, double ts, nlohmann::json payload);

  std::shared_ptr<const policy::PolicyCorpus> corpus_;
  const geo::GeoResolver& resolver_;
  Broker& broker_;
  EventLog* log_;
  notify::EmitPolicy emit_;
  cube::CubeState cube_;
  std::string last_snapshot_;
  double clock_ = 0.0;
  PipelineStats stats_;
};

}  // namespace privacycube::gateway
