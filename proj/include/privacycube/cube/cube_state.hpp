#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "privacycube/geo/continents.hpp"
#include "privacycube/notify/notification.hpp"
#include "privacycube/policy/corpus.hpp"

namespace privacycube::cube {

inline constexpr std::string_view kStateTopic = "privacycube/state";
inline constexpr std::string_view kTapsTopic = "privacycube/ui/taps";
inline constexpr double kDefaultLedTimeoutSeconds = 30.0;

// Face labels: T resources, D data types, A access, U usage, L location + retention.
inline constexpr std::array<std::string_view, 5> kFaceLabels{"T", "D", "A", "U", "L"};

struct TapEvent {
  policy::RoomId room = policy::RoomId::LivingRoom;
  int slot = 1;  // 1..8
  double timestamp = 0.0;

  bool operator==(const TapEvent&) const = default;
};

// {"room": "...", "slot": n, "ts": t}. Throws std::invalid_argument.
TapEvent tap_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TapEvent& tap);

enum class SlotState { Empty, Idle, Lit };

struct SlotView {
  SlotState state = SlotState::Empty;
  std::string device_id;
  std::string icon;
  std::string accent_color;

  bool operator==(const SlotView&) const = default;
};

// Rendered faces of one room page.
struct PageView {
  std::array<SlotView, policy::kRoomCapacity> top_face;
  std::map<policy::DataTypeTag, std::array<policy::RiskColor, policy::kRoomCapacity>> type_face;
  std::map<policy::AccessParty, bool> access_face;
  std::map<policy::UsagePurpose, bool> usage_face;
  std::map<geo::Continent, bool> map_regions;
  std::map<policy::RetentionPeriod, bool> time_bar;

  bool operator==(const PageView&) const = default;
};

// What one device currently lights. Active devices accumulate everything
// their notifications carried since they became active; selected devices
// contribute their profile.
struct Contribution {
  std::map<policy::DataTypeTag, policy::RiskAnnotation> data_types;
  std::set<policy::AccessParty> access;
  std::set<policy::UsagePurpose> usage;
  std::set<policy::RetentionPeriod> retention;
  std::set<geo::Continent> regions;

  bool empty() const {
    return data_types.empty() && access.empty() && usage.empty() && retention.empty() &&
           regions.empty();
  }
  bool operator==(const Contribution&) const = default;
};

struct CubeConfig {
  double led_timeout_seconds = kDefaultLedTimeoutSeconds;
};

enum class ApplyResult { Applied, UnknownDevice };

// Five-face model of the cube across all room pages. Value type: copies are
// independent states. Element counts per room are maintained incrementally.
class CubeState {
 public:
  explicit CubeState(std::shared_ptr<const policy::PolicyCorpus> corpus, CubeConfig config = {});

  // Lights the device on every page it is placed on and records activity.
  // Unknown devices are counted and leave the state unchanged.
  ApplyResult apply_notification(const notify::Notification& n, double now);

  // Refreshes the activity time of an already-active device.
  void touch(std::string_view device_id, double now);

  // Toggles selection of the device in the tapped slot; empty slot is a no-op.
  void apply_tap(const TapEvent& tap);

  void select_room(policy::RoomId room) { selected_room_ = room; }

  // Expires devices silent for longer than the LED timeout.
  void tick(double now);

  policy::RoomId selected_room() const { return selected_room_; }
  const std::set<std::string, std::less<>>& selections() const { return selections_; }
  bool is_active(std::string_view device_id) const;
  bool is_contributing(std::string_view device_id) const;
  std::optional<double> last_activity(std::string_view device_id) const;
  std::uint64_t unknown_device_count() const { return unknown_devices_; }
  const CubeConfig& config() const { return config_; }
  const policy::PolicyCorpus& corpus() const { return *corpus_; }

  // Effective contribution of a device right now (empty when idle).
  Contribution contribution(std::string_view device_id) const;

  PageView page(policy::RoomId room) const;
  // Number of contributing devices placed in the room.
  int active_count(policy::RoomId room) const;

  nlohmann::json snapshot_json() const;
  // Canonical JSON of the selected room's faces, room list and badges.
  std::string snapshot() const { return snapshot_json().dump(); }

  bool operator==(const CubeState& other) const;

 private:
  struct DeviceRuntime {
    bool active = false;
    double last_activity = 0.0;
    Contribution observed;

    bool operator==(const DeviceRuntime&) const = default;
  };

  struct RoomCounters {
    std::array<int, 8> access{};
    std::array<int, 8> usage{};
    std::array<int, 7> regions{};
    std::array<int, 5> retention{};
    int contributing = 0;

    bool operator==(const RoomCounters&) const = default;
  };

  Contribution effective(const policy::DeviceProfile& profile) const;
  // Runs `mutate`, then moves the device's room counters from its old to its
  // new effective contribution.
  template <class F>
  void update_device(const policy::DeviceProfile& profile, F&& mutate);
  void adjust(policy::RoomId room, const Contribution& c, bool contributing, int delta);

  std::shared_ptr<const policy::PolicyCorpus> corpus_;
  CubeConfig config_;
  policy::RoomId selected_room_ = policy::RoomId::LivingRoom;
  std::set<std::string, std::less<>> selections_;
  std::map<std::string, DeviceRuntime, std::less<>> devices_;
  std::map<policy::RoomId, RoomCounters> counters_;
  std::uint64_t unknown_devices_ = 0;
};

}  // namespace privacycube::cube
