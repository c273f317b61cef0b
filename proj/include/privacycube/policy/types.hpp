#pragma once

#include <array>
#include <string_view>

#include "privacycube/core/enum_traits.hpp"

namespace privacycube::policy {

enum class DataTypeTag { Location, Presence, Visual, Audio, Biometrics, Health, Usage, Environment };

enum class AccessParty {
  ResourceOwner,
  TrustedParty,
  ServiceProvider,
  DeviceManufacturer,
  LawEnforcement,
  Public,
  ThirdParty,
  MarketingOrganisation,
};

enum class UsagePurpose {
  Revenue,
  Analytics,
  Research,
  Surveillance,
  Security,
  TargetedAds,
  Lifestyle,
  Productivity,
};

// Declaration order is duration order.
enum class RetentionPeriod { EventBased, OneMonth, ThreeMonths, OneYear, Indefinite };

enum class CollectionCadence { EverySecond, EveryHour, EveryDay, EventBased };

enum class RiskAnnotation { PII, Neutral, NonPII };

enum class RiskColor { Red, Yellow, Green, Off };

enum class RoomId { LivingRoom, Kitchen, Bathroom, Bedroom };

inline constexpr std::size_t kRoomCapacity = 8;

// Traffic-light mapping of data sensitivity onto LED color. Never yields Off.
constexpr RiskColor classify_risk(RiskAnnotation annotation) {
  switch (annotation) {
    case RiskAnnotation::PII:
      return RiskColor::Red;
    case RiskAnnotation::Neutral:
      return RiskColor::Yellow;
    case RiskAnnotation::NonPII:
      return RiskColor::Green;
  }
  return RiskColor::Off;  // unreachable for valid enumerators
}

}  // namespace privacycube::policy

namespace privacycube {

template <>
struct EnumTraits<policy::DataTypeTag> {
  static constexpr std::array<std::string_view, 8> names{
      "Location", "Presence", "Visual", "Audio", "Biometrics", "Health", "Usage", "Environment"};
};

template <>
struct EnumTraits<policy::AccessParty> {
  static constexpr std::array<std::string_view, 8> names{
      "ResourceOwner",  "TrustedParty", "ServiceProvider", "DeviceManufacturer",
      "LawEnforcement", "Public",       "ThirdParty",      "MarketingOrganisation"};
};

template <>
struct EnumTraits<policy::UsagePurpose> {
  static constexpr std::array<std::string_view, 8> names{
      "Revenue",  "Analytics",   "Research",  "Surveillance",
      "Security", "TargetedAds", "Lifestyle", "Productivity"};
};

template <>
struct EnumTraits<policy::RetentionPeriod> {
  static constexpr std::array<std::string_view, 5> names{"EventBased", "OneMonth", "ThreeMonths",
                                                         "OneYear", "Indefinite"};
};

template <>
struct EnumTraits<policy::CollectionCadence> {
  static constexpr std::array<std::string_view, 4> names{"EverySecond", "EveryHour", "EveryDay",
                                                         "EventBased"};
};

template <>
struct EnumTraits<policy::RiskAnnotation> {
  static constexpr std::array<std::string_view, 3> names{"PII", "Neutral", "NonPII"};
};

template <>
struct EnumTraits<policy::RiskColor> {
  static constexpr std::array<std::string_view, 4> names{"Red", "Yellow", "Green", "Off"};
};

template <>
struct EnumTraits<policy::RoomId> {
  static constexpr std::array<std::string_view, 4> names{"LivingRoom", "Kitchen", "Bathroom",
                                                         "Bedroom"};
};

}  // namespace privacycube
