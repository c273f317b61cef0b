#include "privacycube/notify/notification.hpp"

#include "privacycube/core/json_fields.hpp"

namespace privacycube::notify {
namespace {

using nlohmann::json;
namespace jf = json_fields;
using namespace policy;

DecodeError::Kind translate(jf::FieldError::Kind k) {
  switch (k) {
    case jf::FieldError::Kind::Missing:
      return DecodeError::Kind::MissingField;
    case jf::FieldError::Kind::WrongType:
      return DecodeError::Kind::WrongType;
    case jf::FieldError::Kind::UnknownEnumValue:
      return DecodeError::Kind::UnknownEnumValue;
    case jf::FieldError::Kind::BadValue:
      return DecodeError::Kind::BadValue;
  }
  return DecodeError::Kind::Malformed;
}

constexpr std::string_view kUnknownLocation = "Unknown";
constexpr std::string_view kPrivateLocation = "Private";

json storage_json(const geo::GeoResult& g) {
  json s = json::object();
  switch (g.kind) {
    case geo::GeoResult::Kind::Country:
      s["Location"] = std::string(to_string(g.continent));
      s["Country"] = g.country.to_string();
      break;
    case geo::GeoResult::Kind::Private:
      s["Location"] = std::string(kPrivateLocation);
      break;
    case geo::GeoResult::Kind::Unknown:
      s["Location"] = std::string(kUnknownLocation);
      break;
  }
  return s;
}

geo::GeoResult storage_from_json(const json& s) {
  jf::as_object(s, "DataStorage");
  const auto location = jf::as_string(jf::require(s, "Location", "DataStorage"), "DataStorage.Location");
  const auto* country = jf::optional_field(s, "Country");
  if (location == kUnknownLocation || location == kPrivateLocation) {
    if (country != nullptr) {
      throw jf::FieldError(jf::FieldError::Kind::BadValue, "DataStorage.Country",
                           "country given without a continent");
    }
    return location == kUnknownLocation ? geo::GeoResult::unknown()
                                        : geo::GeoResult::private_range();
  }
  const auto continent = jf::enum_named<geo::Continent>(location, "DataStorage.Location");
  if (country == nullptr) {
    throw jf::FieldError(jf::FieldError::Kind::Missing, "DataStorage.Country", "missing field");
  }
  const auto code = geo::CountryCode::parse(jf::as_string(*country, "DataStorage.Country"));
  if (!code) {
    throw jf::FieldError(jf::FieldError::Kind::BadValue, "DataStorage.Country",
                         "expected two-letter country code");
  }
  return geo::GeoResult::in_country(*code, continent);
}

}  // namespace

DecodeError::DecodeError(Kind kind, std::string path, const std::string& message)
    : std::runtime_error(message), kind_(kind), path_(std::move(path)) {}

Notification build_notification(const DeviceProfile& profile, const flow::FlowRecord& flow,
                                const geo::GeoResult& geo) {
  Notification n;
  n.device_id = profile.device_id;
  n.device_type = profile.device_icon;
  n.device_name = profile.display_name;
  n.placement_area = profile.rooms;
  n.data_types = profile.data_types;
  n.data_usage = profile.usage;
  n.data_access = profile.access;
  n.retention_time = profile.retention;
  n.cadence = profile.cadence;
  n.data_storage = geo;
  n.timestamp = flow.timestamp;
  n.direction = flow.direction;
  return n;
}

json to_json(const Notification& n) {
  json j;
  j["DeviceId"] = n.device_id;
  j["DeviceType"] = n.device_type;
  j["DeviceName"] = n.device_name;
  j["PlacementArea"] = jf::enum_set_json(n.placement_area);
  json types = json::object();
  for (const auto& [tag, risk] : n.data_types) {
    types[std::string(to_string(tag))] = std::string(to_string(risk));
  }
  j["DataTypes"] = std::move(types);
  j["DataUsage"] = jf::enum_set_json(n.data_usage);
  j["DataAccess"] = jf::enum_set_json(n.data_access);
  j["RetentionTime"] = std::string(to_string(n.retention_time));
  if (n.cadence) j["Cadence"] = std::string(to_string(*n.cadence));
  j["DataStorage"] = storage_json(n.data_storage);
  j["Timestamp"] = n.timestamp;
  j["Direction"] = std::string(to_string(n.direction));
  return j;
}

Notification notification_from_json(const json& j) {
  try {
    jf::as_object(j, "$");
    Notification n;
    n.device_id = jf::as_string(jf::require(j, "DeviceId", ""), "DeviceId");
    n.device_type = jf::as_string(jf::require(j, "DeviceType", ""), "DeviceType");
    n.device_name = jf::as_string(jf::require(j, "DeviceName", ""), "DeviceName");
    n.placement_area = jf::as_enum_set<RoomId>(jf::require(j, "PlacementArea", ""), "PlacementArea");
    const auto& types = jf::as_object(jf::require(j, "DataTypes", ""), "DataTypes");
    for (const auto& [key, value] : types.items()) {
      const auto path = jf::join("DataTypes", key);
      n.data_types.emplace(jf::enum_named<DataTypeTag>(key, path),
                           jf::as_enum<RiskAnnotation>(value, path));
    }
    n.data_usage = jf::as_enum_set<UsagePurpose>(jf::require(j, "DataUsage", ""), "DataUsage");
    n.data_access = jf::as_enum_set<AccessParty>(jf::require(j, "DataAccess", ""), "DataAccess");
    n.retention_time =
        jf::as_enum<RetentionPeriod>(jf::require(j, "RetentionTime", ""), "RetentionTime");
    if (const auto* cadence = jf::optional_field(j, "Cadence")) {
      n.cadence = jf::as_enum<CollectionCadence>(*cadence, "Cadence");
    }
    n.data_storage = storage_from_json(jf::require(j, "DataStorage", ""));
    n.timestamp = jf::as_number(jf::require(j, "Timestamp", ""), "Timestamp");
    n.direction = jf::as_enum<flow::Direction>(jf::require(j, "Direction", ""), "Direction");
    return n;
  } catch (const jf::FieldError& e) {
    throw DecodeError(translate(e.kind()), e.path(), e.what());
  }
}

std::string encode_notification(const Notification& n) { return to_json(n).dump(); }

Notification decode_notification(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw DecodeError(DecodeError::Kind::Malformed, "$", e.what());
  }
  return notification_from_json(j);
}

}  // namespace privacycube::notify
