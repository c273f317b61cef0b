#include <doctest.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "privacycube/geo/resolver.hpp"
#include "privacycube/notify/emit_policy.hpp"
#include "privacycube/notify/notification.hpp"

using namespace privacycube;
using namespace privacycube::notify;
using namespace privacycube::policy;
using nlohmann::json;

namespace {

Notification lock_notification() {
  Notification n;
  n.device_id = "smart_lock";
  n.device_type = "lock";
  n.device_name = "Smart Lock";
  n.placement_area = {RoomId::Kitchen, RoomId::LivingRoom};
  n.data_types = {{DataTypeTag::Environment, RiskAnnotation::NonPII},
                  {DataTypeTag::Location, RiskAnnotation::PII}};
  n.data_usage = {UsagePurpose::Security, UsagePurpose::Revenue};
  n.data_access = {AccessParty::ThirdParty, AccessParty::ResourceOwner};
  n.retention_time = RetentionPeriod::OneMonth;
  n.data_storage = geo::GeoResult::in_country(*geo::CountryCode::parse("US"), geo::Continent::NA);
  n.timestamp = 1700000100.5;
  n.direction = flow::Direction::Outbound;
  return n;
}

DecodeError::Kind decode_error_kind(const std::string& bytes, std::string* path = nullptr) {
  try {
    decode_notification(bytes);
  } catch (const DecodeError& e) {
    if (path) *path = e.path();
    return e.kind();
  }
  FAIL("notification unexpectedly decoded");
  return DecodeError::Kind::Malformed;
}

}  // namespace

TEST_SUITE("notify") {
  TEST_CASE("canonical bytes: sorted keys, declaration-ordered arrays, no whitespace") {
    const std::string expected =
        R"({"DataAccess":["ResourceOwner","ThirdParty"],)"
        R"("DataStorage":{"Country":"US","Location":"NA"},)"
        R"("DataTypes":{"Environment":"NonPII","Location":"PII"},)"
        R"("DataUsage":["Revenue","Security"],)"
        R"("DeviceId":"smart_lock","DeviceName":"Smart Lock","DeviceType":"lock",)"
        R"("Direction":"Outbound",)"
        R"("PlacementArea":["LivingRoom","Kitchen"],)"
        R"("RetentionTime":"OneMonth","Timestamp":1700000100.5})";
    CHECK(encode_notification(lock_notification()) == expected);

    auto with_cadence = lock_notification();
    with_cadence.cadence = CollectionCadence::EveryHour;
    const auto bytes = encode_notification(with_cadence);
    CHECK(bytes.find(R"("Cadence":"EveryHour")") != std::string::npos);
    CHECK(decode_notification(bytes) == with_cadence);
  }

  TEST_CASE("storage variants encode as Location with optional Country") {
    auto n = lock_notification();
    n.data_storage = geo::GeoResult::unknown();
    CHECK(to_json(n)["DataStorage"] == json{{"Location", "Unknown"}});
    n.data_storage = geo::GeoResult::private_range();
    CHECK(to_json(n)["DataStorage"] == json{{"Location", "Private"}});
    CHECK(decode_notification(encode_notification(n)) == n);
  }

  TEST_CASE("property: decode(encode(n)) == n and encoding is stable") {
    testsupport::Rng rng(1000);
    for (int i = 0; i < 1000; ++i) {
      CAPTURE(i);
      const auto n = testsupport::random_notification(rng);
      const auto bytes = encode_notification(n);
      const auto back = decode_notification(bytes);
      CHECK(back == n);
      CHECK(encode_notification(back) == bytes);
    }
  }

  TEST_CASE("speaker flow builds the profile groups plus storage from the remote address") {
    const auto corpus =
        load_corpus_file(testsupport::data_path("corpus/default_corpus.json").string());
    const geo::GeoResolver resolver(std::make_shared<const geo::Ip2cTable>(
        geo::load_ip2c(testsupport::read_text(testsupport::data_path("ip2c/sample_ip2c.csv")))));
    const auto* speaker = corpus.find("smart_speaker");
    REQUIRE(speaker);

    flow::FlowRecord f;
    f.timestamp = 1700000000.0;
    f.local_ip = *Ipv4::parse("192.168.1.10");
    f.remote_ip = *Ipv4::parse("52.94.236.248");
    f.local_port = 50432;
    f.remote_port = 443;
    f.protocol = flow::Protocol::TCP;
    f.direction = flow::Direction::Outbound;

    const auto n = build_notification(*speaker, f, resolver.resolve(f.remote_ip));
    CHECK(n.device_id == "smart_speaker");
    CHECK(n.device_type == speaker->device_icon);
    CHECK(n.device_name == speaker->display_name);
    CHECK(n.placement_area == speaker->rooms);
    CHECK(n.placement_area.size() == 4);
    CHECK(n.data_types == speaker->data_types);
    CHECK(n.data_usage == speaker->usage);
    CHECK(n.data_access == speaker->access);
    CHECK(n.retention_time == RetentionPeriod::Indefinite);
    CHECK(n.cadence == CollectionCadence::EventBased);
    CHECK(n.data_storage.country.to_string() == "US");
    CHECK(n.data_storage.continent == geo::Continent::NA);
    CHECK(n.timestamp == 1700000000.0);
    CHECK(n.direction == flow::Direction::Outbound);

    const auto j = to_json(n);
    for (const char* key : {"DeviceType", "DeviceName", "PlacementArea", "DataTypes", "DataUsage",
                            "DataAccess", "RetentionTime", "DataStorage"}) {
      CAPTURE(key);
      CHECK(j.contains(key));
    }
  }

  TEST_CASE("decode errors carry kind and path") {
    const auto good = to_json(lock_notification());
    std::string path;

    CHECK(decode_error_kind("{\"DeviceId\":") == DecodeError::Kind::Malformed);
    CHECK(decode_error_kind("[1,2]") == DecodeError::Kind::WrongType);

    auto missing = good;
    missing.erase("RetentionTime");
    CHECK(decode_error_kind(missing.dump(), &path) == DecodeError::Kind::MissingField);
    CHECK(path == "RetentionTime");

    auto bad_enum = good;
    bad_enum["DataAccess"] = {"Everyone"};
    CHECK(decode_error_kind(bad_enum.dump(), &path) == DecodeError::Kind::UnknownEnumValue);
    CHECK(path == "DataAccess[0]");

    auto bad_tag = good;
    bad_tag["DataTypes"]["Smell"] = "PII";
    CHECK(decode_error_kind(bad_tag.dump(), &path) == DecodeError::Kind::UnknownEnumValue);
    CHECK(path == "DataTypes.Smell");

    auto wrong_type = good;
    wrong_type["Timestamp"] = "noon";
    CHECK(decode_error_kind(wrong_type.dump(), &path) == DecodeError::Kind::WrongType);
    CHECK(path == "Timestamp");

    auto no_country = good;
    no_country["DataStorage"].erase("Country");
    CHECK(decode_error_kind(no_country.dump(), &path) == DecodeError::Kind::MissingField);
    CHECK(path == "DataStorage.Country");

    auto bad_country = good;
    bad_country["DataStorage"]["Country"] = "USA";
    CHECK(decode_error_kind(bad_country.dump()) == DecodeError::Kind::BadValue);
  }

  TEST_CASE("emit window: flows at 0, 30, 61, 90 with a 60 s window") {
    const std::vector<double> times{0, 30, 61, 90};
    EmitPolicy policy(60);
    std::vector<double> emitted;
    for (double t : times) {
      if (policy.should_emit("speaker", t)) emitted.push_back(t);
    }
    CHECK(emitted == testsupport::oracle_emissions(times, 60));
    CHECK(emitted == std::vector<double>{0, 61});
  }

  TEST_CASE("emit window is per device and exact at the boundary") {
    EmitPolicy policy(60);
    CHECK(policy.should_emit("a", 100));
    CHECK(policy.should_emit("b", 100));
    CHECK_FALSE(policy.should_emit("a", 159.999));
    CHECK(policy.should_emit("a", 160));
  }

  TEST_CASE("property: emit policy agrees with the exhaustive rule") {
    testsupport::Rng rng(60);
    for (int iter = 0; iter < 300; ++iter) {
      CAPTURE(iter);
      const double window = std::uniform_real_distribution<double>(0.5, 120)(rng);
      std::map<std::string, std::vector<double>> per_device;
      std::vector<std::pair<std::string, double>> stream;
      double t = 0;
      for (int i = 0; i < 100; ++i) {
        t += std::uniform_real_distribution<double>(0, 40)(rng);
        const auto dev = "d" + std::to_string(testsupport::uniform_int(rng, 0, 3));
        stream.emplace_back(dev, t);
        per_device[dev].push_back(t);
      }
      EmitPolicy policy(window);
      std::map<std::string, std::vector<double>> got;
      for (const auto& [dev, ts] : stream) {
        if (policy.should_emit(dev, ts)) got[dev].push_back(ts);
      }
      for (const auto& [dev, ts] : per_device) {
        CAPTURE(dev);
        CHECK(got[dev] == testsupport::oracle_emissions(ts, window));
      }
    }
  }
}
