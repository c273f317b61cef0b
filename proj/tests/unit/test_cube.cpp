#include <doctest.h>

#include <json.hpp>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "privacycube/cube/cube_state.hpp"

using namespace privacycube;
using namespace privacycube::cube;
using namespace privacycube::policy;
using nlohmann::json;
using testsupport::CubeEvent;

namespace {

std::shared_ptr<const PolicyCorpus> bundled_corpus() {
  static const auto corpus = std::make_shared<const PolicyCorpus>(
      load_corpus_file(testsupport::data_path("corpus/default_corpus.json").string()));
  return corpus;
}

notify::Notification notification_for(const DeviceProfile& p, geo::GeoResult storage, double ts) {
  flow::FlowRecord f;
  f.timestamp = ts;
  return notify::build_notification(p, f, storage);
}

geo::GeoResult in(const char* country, geo::Continent c) {
  return geo::GeoResult::in_country(*geo::CountryCode::parse(country), c);
}

int slot_of(const PolicyCorpus& c, RoomId room, std::string_view id) {
  const auto page = c.room_page(room);
  for (std::size_t i = 0; i < page.size(); ++i) {
    if (page[i] == id) return static_cast<int>(i) + 1;
  }
  return 0;
}

void apply_event(CubeState& cube, const CubeEvent& ev) {
  if (const auto* e = std::get_if<testsupport::NotifyEvent>(&ev)) {
    cube.apply_notification(e->n, e->now);
  } else if (const auto* e = std::get_if<testsupport::TapStep>(&ev)) {
    cube.apply_tap(e->tap);
  } else {
    cube.tick(std::get<testsupport::TickStep>(ev).now);
  }
}

}  // namespace

TEST_SUITE("cube") {
  TEST_CASE("notification lights the device on every page it is placed on") {
    const auto corpus = bundled_corpus();
    CubeState cube(corpus);
    const auto& speaker = *corpus->find("smart_speaker");
    REQUIRE(cube.apply_notification(notification_for(speaker, in("US", geo::Continent::NA), 10), 10) ==
            ApplyResult::Applied);
    for (auto room : enum_values<RoomId>()) {
      CAPTURE(room);
      const auto v = cube.page(room);
      const int slot = slot_of(*corpus, room, "smart_speaker");
      REQUIRE(slot > 0);
      CHECK(v.top_face[slot - 1].state == SlotState::Lit);
      CHECK(v.type_face.at(DataTypeTag::Audio)[slot - 1] == RiskColor::Red);
      CHECK(v.type_face.at(DataTypeTag::Presence)[slot - 1] == RiskColor::Yellow);
      CHECK(v.map_regions.at(geo::Continent::NA));
      CHECK(v.time_bar.at(RetentionPeriod::Indefinite));
      CHECK(v.access_face.at(AccessParty::LawEnforcement));
      CHECK_FALSE(v.access_face.at(AccessParty::Public));
      CHECK(cube.active_count(room) == 1);
    }
  }

  TEST_CASE("unknown devices are counted and change nothing") {
    CubeState cube(bundled_corpus());
    const auto before = cube.snapshot();
    notify::Notification n;
    n.device_id = "ghost";
    CHECK(cube.apply_notification(n, 1) == ApplyResult::UnknownDevice);
    CHECK(cube.unknown_device_count() == 1);
    CHECK(cube.snapshot() == before);
  }

  TEST_CASE("faces are the union over active devices") {
    const auto corpus = bundled_corpus();
    CubeState cube(corpus);
    const auto& lock = *corpus->find("smart_lock");
    const auto& speaker = *corpus->find("smart_speaker");
    cube.apply_notification(notification_for(lock, in("US", geo::Continent::NA), 0), 0);
    cube.apply_notification(notification_for(speaker, in("IE", geo::Continent::EU), 5), 5);
    const auto v = cube.page(RoomId::LivingRoom);
    for (auto a : enum_values<AccessParty>()) {
      CAPTURE(a);
      CHECK(v.access_face.at(a) == (lock.access.count(a) + speaker.access.count(a) > 0));
    }
    CHECK(v.map_regions.at(geo::Continent::NA));
    CHECK(v.map_regions.at(geo::Continent::EU));
    CHECK_FALSE(v.map_regions.at(geo::Continent::AS));

    // Lock expires; the speaker keeps its share lit.
    cube.touch("smart_speaker", 25);
    cube.tick(31);
    CHECK_FALSE(cube.is_active("smart_lock"));
    CHECK(cube.is_active("smart_speaker"));
    const auto after = cube.page(RoomId::LivingRoom);
    CHECK_FALSE(after.map_regions.at(geo::Continent::NA));
    CHECK(after.map_regions.at(geo::Continent::EU));
    CHECK(after.access_face.at(AccessParty::LawEnforcement) ==
          (speaker.access.count(AccessParty::LawEnforcement) > 0));
    CHECK(after.top_face[slot_of(*corpus, RoomId::LivingRoom, "smart_lock") - 1].state == SlotState::Idle);
  }

  TEST_CASE("timeout is strict: exactly at the limit stays lit") {
    const auto corpus = bundled_corpus();
    CubeState cube(corpus, CubeConfig{30});
    cube.apply_notification(notification_for(*corpus->find("smart_lock"), geo::GeoResult::unknown(), 0), 0);
    cube.tick(30);
    CHECK(cube.is_active("smart_lock"));
    cube.tick(30.001);
    CHECK_FALSE(cube.is_active("smart_lock"));
    CHECK(cube.snapshot() == CubeState(corpus).snapshot());
  }

  TEST_CASE("tap toggles selection and shows the profile") {
    const auto corpus = bundled_corpus();
    CubeState cube(corpus);
    const auto blank = cube.snapshot();
    const int slot = slot_of(*corpus, RoomId::LivingRoom, "smart_lock");
    cube.apply_tap({RoomId::LivingRoom, slot, 1});
    CHECK(cube.selections().count("smart_lock") == 1);
    const auto v = cube.page(RoomId::LivingRoom);
    CHECK(v.top_face[slot - 1].state == SlotState::Lit);
    CHECK(v.type_face.at(DataTypeTag::Biometrics)[slot - 1] == RiskColor::Red);
    CHECK(v.type_face.at(DataTypeTag::Environment)[slot - 1] == RiskColor::Green);
    CHECK(v.time_bar.at(RetentionPeriod::Indefinite));
    // Selection is by device, so it shows on the device's other pages too.
    CHECK(cube.active_count(RoomId::LivingRoom) == 1);

    cube.apply_tap({RoomId::LivingRoom, slot, 2});
    CHECK(cube.selections().empty());
    CHECK(cube.snapshot() == blank);
  }

  TEST_CASE("tap on an empty slot is a no-op") {
    testsupport::Rng rng(5);
    const auto corpus = std::make_shared<const PolicyCorpus>(testsupport::random_corpus(rng, 1));
    CubeState cube(corpus);
    const auto before = cube.snapshot();
    cube.apply_tap({RoomId::Bedroom, 8, 0});
    CHECK(cube.snapshot() == before);
  }

  TEST_CASE("snapshot lists rooms, selected room and all five faces") {
    const auto corpus = bundled_corpus();
    CubeState cube(corpus);
    cube.select_room(RoomId::Kitchen);
    const auto j = json::parse(cube.snapshot());
    CHECK(j["selected_room"] == "Kitchen");
    REQUIRE(j["rooms"].size() == 4);
    CHECK(j["rooms"][0] == json{{"room", "LivingRoom"}, {"devices", 8}, {"active", 0}});
    for (auto face : kFaceLabels) CHECK(j["faces"].contains(std::string(face)));
    CHECK(j["faces"]["T"].size() == 8);
    CHECK(j["faces"]["T"][2]["device_id"] == "smart_fridge");
    CHECK(j["faces"]["D"]["Location"].size() == 8);
    CHECK(j["faces"]["L"]["map"]["EU"] == "Off");
  }

  TEST_CASE("snapshot is deterministic and copies are independent") {
    const auto corpus = bundled_corpus();
    auto run = [&] {
      CubeState cube(corpus);
      cube.apply_notification(notification_for(*corpus->find("smart_tv"), in("JP", geo::Continent::AS), 3), 3);
      cube.apply_tap({RoomId::Bedroom, 2, 4});
      cube.select_room(RoomId::Bedroom);
      return cube;
    };
    const auto a = run();
    auto b = run();
    CHECK(a.snapshot() == b.snapshot());
    CHECK(a == b);
    b.tick(1000);
    CHECK(a.is_active("smart_tv"));
    CHECK_FALSE(b.is_active("smart_tv"));
    CHECK_FALSE(a == b);
  }

  TEST_CASE("tap json parsing") {
    const auto t = tap_from_json(json::parse(R"({"room":"Kitchen","slot":3,"ts":12.5})"));
    CHECK(t == TapEvent{RoomId::Kitchen, 3, 12.5});
    CHECK(tap_from_json(to_json(t)) == t);
    for (const char* bad : {R"({"room":"Garage","slot":1,"ts":0})", R"({"room":"Kitchen","slot":0,"ts":0})",
                            R"({"room":"Kitchen","slot":9,"ts":0})", R"({"room":"Kitchen","slot":1.5,"ts":0})",
                            R"({"room":"Kitchen","slot":1})", R"([1])"}) {
      CAPTURE(bad);
      CHECK_THROWS_AS(tap_from_json(json::parse(bad)), std::invalid_argument);
    }
  }

  TEST_CASE("property: incremental pages equal a from-scratch replay") {
    testsupport::Rng rng(2024);
    for (int iter = 0; iter < 100; ++iter) {
      CAPTURE(iter);
      const auto corpus = std::make_shared<const PolicyCorpus>(
          testsupport::random_corpus(rng, testsupport::uniform_int(rng, 1, 4)));
      const double timeout = testsupport::uniform_int(rng, 1, 30);
      CubeState cube(corpus, CubeConfig{timeout});
      std::vector<CubeEvent> history;
      double now = 0;
      const int steps = testsupport::uniform_int(rng, 1, 50);
      for (int s = 0; s < steps; ++s) {
        now += testsupport::uniform_int(rng, 0, 10);
        CubeEvent ev;
        switch (testsupport::uniform_int(rng, 0, 2)) {
          case 0: {
            auto n = testsupport::random_notification(rng);
            const auto& profiles = corpus->profiles();
            n.device_id = testsupport::coin(rng, 0.9)
                              ? profiles[testsupport::uniform_int(rng, 0, static_cast<int>(profiles.size()) - 1)].device_id
                              : "ghost";
            ev = testsupport::NotifyEvent{n, now};
            break;
          }
          case 1:
            ev = testsupport::TapStep{{testsupport::random_enum<RoomId>(rng), testsupport::uniform_int(rng, 1, 8), now}};
            break;
          default:
            ev = testsupport::TickStep{now};
        }
        apply_event(cube, ev);
        history.push_back(ev);
      }
      for (auto room : enum_values<RoomId>()) {
        CAPTURE(room);
        CHECK(cube.page(room) == testsupport::oracle_page(*corpus, history, timeout, room));
      }
    }
  }
}
