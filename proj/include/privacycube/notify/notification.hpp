#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "privacycube/flow/packet.hpp"
#include "privacycube/geo/ip2c.hpp"
#include "privacycube/policy/corpus.hpp"

namespace privacycube::notify {

inline constexpr std::string_view kNotificationsTopic = "privacycube/notifications";

// The per-activity object published to the cube. Everything except
// data_storage, timestamp and direction is copied from the device profile.
struct Notification {
  std::string device_id;
  std::string device_type;
  std::string device_name;
  std::set<policy::RoomId> placement_area;
  std::map<policy::DataTypeTag, policy::RiskAnnotation> data_types;
  std::set<policy::UsagePurpose> data_usage;
  std::set<policy::AccessParty> data_access;
  policy::RetentionPeriod retention_time = policy::RetentionPeriod::EventBased;
  std::optional<policy::CollectionCadence> cadence;
  geo::GeoResult data_storage;
  double timestamp = 0.0;
  flow::Direction direction = flow::Direction::Outbound;

  bool operator==(const Notification&) const = default;
};

Notification build_notification(const policy::DeviceProfile& profile, const flow::FlowRecord& flow,
                                const geo::GeoResult& geo);

class DecodeError : public std::runtime_error {
 public:
  enum class Kind { Malformed, MissingField, UnknownEnumValue, WrongType, BadValue };

  DecodeError(Kind kind, std::string path, const std::string& message);

  Kind kind() const { return kind_; }
  const std::string& path() const { return path_; }

 private:
  Kind kind_;
  std::string path_;
};

nlohmann::json to_json(const Notification& n);
Notification notification_from_json(const nlohmann::json& j);

// Canonical bytes: sorted keys, no whitespace, enum arrays in declaration
// order, optional fields omitted when absent.
std::string encode_notification(const Notification& n);
Notification decode_notification(std::string_view bytes);

}  // namespace privacycube::notify
