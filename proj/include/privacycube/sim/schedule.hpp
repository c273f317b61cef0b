#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "privacycube/core/net.hpp"
#include "privacycube/flow/packet.hpp"
#include "privacycube/policy/corpus.hpp"

namespace privacycube::sim {

inline constexpr double kSecondsPerDay = 86400.0;

struct SimEntry {
  std::string device_id;
  double interval_seconds = 300.0;
  double jitter_seconds = 0.0;
  Ipv4 remote_ip;

  bool operator==(const SimEntry&) const = default;
};

struct RotationStep {
  policy::RoomId room = policy::RoomId::LivingRoom;
  double days = 1.0;

  bool operator==(const RotationStep&) const = default;
};

// Scheduled device activity. `time_scale` multiplies rotation durations
// (time_scale = 10/86400 turns one day into 10 s); entry intervals are in
// simulated seconds and are not scaled.
struct SimSchedule {
  std::uint64_t seed = 0;
  double time_scale = 1.0;
  std::vector<RotationStep> rotation;
  std::vector<SimEntry> entries;

  double day_seconds() const { return kSecondsPerDay * time_scale; }
  // Length of one full rotation in simulated seconds; 0 without rotation.
  double rotation_period() const;

  bool operator==(const SimSchedule&) const = default;
};

class ScheduleError : public std::runtime_error {
 public:
  enum class Kind { SchemaError, UnknownDevice };

  ScheduleError(Kind kind, std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), kind_(kind), path_(std::move(path)) {}

  Kind kind() const { return kind_; }
  const std::string& path() const { return path_; }

 private:
  Kind kind_;
  std::string path_;
};

SimSchedule load_schedule(std::string_view document, const policy::PolicyCorpus& corpus);
SimSchedule load_schedule_file(const std::string& path, const policy::PolicyCorpus& corpus);

struct SimEvent {
  double timestamp = 0.0;
  std::string device_id;
  flow::FlowRecord flow;

  bool operator==(const SimEvent&) const = default;
};

struct RoomTransition {
  double timestamp = 0.0;
  policy::RoomId room = policy::RoomId::LivingRoom;

  bool operator==(const RoomTransition&) const = default;
};

// Room the rotation places the cube in at time t (cycling); nullopt without rotation.
std::optional<policy::RoomId> room_at(const SimSchedule& schedule, double t);

// Rotation boundaries in (0, t_end]; the initial room at t = 0 is room_at(schedule, 0).
std::vector<RoomTransition> room_transitions(const SimSchedule& schedule, double t_end);

// Entry k-th event at k*interval + jitter_k (k >= 1, jitter_k drawn from a
// generator seeded by schedule.seed and the entry index), kept while < t_end.
// With a rotation, a device fires only while the current room is one it is
// placed in. Output is sorted by time, ties by entry order.
std::vector<SimEvent> generate(const SimSchedule& schedule, const policy::PolicyCorpus& corpus,
                               double t_end);

}  // namespace privacycube::sim
