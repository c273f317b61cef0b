#include <doctest.h>

#include <thread>

#include "fixtures.hpp"
#include "privacycube/gateway/event_log.hpp"

using namespace privacycube;
using namespace privacycube::gateway;
using nlohmann::json;
namespace fs = std::filesystem;

TEST_SUITE("event_log") {
  TEST_CASE("records carry seq, kind, ts, payload and wall") {
    testsupport::TempDir dir;
    auto log = EventLog::open_run(dir.path());
    CHECK(log.run_dir().parent_path() == dir.path());
    CHECK(log.append(RecordKind::Flow, 1.5, json{{"a", 1}}) == 1);
    CHECK(log.append(RecordKind::Tap, 2.0, json{{"b", 2}}) == 2);
    CHECK(log.last_seq() == 2);

    const auto records = read_log(log.run_dir());
    REQUIRE(records.size() == 2);
    CHECK(records[0]["seq"] == 1);
    CHECK(records[0]["kind"] == "Flow");
    CHECK(records[0]["ts"] == 1.5);
    CHECK(records[0]["payload"] == json{{"a", 1}});
    CHECK(records[0]["wall"].get<std::string>().back() == 'Z');
    CHECK(records[1]["kind"] == "Tap");
  }

  TEST_CASE("each run gets its own directory") {
    testsupport::TempDir dir;
    auto a = EventLog::open_run(dir.path());
    auto b = EventLog::open_run(dir.path());
    CHECK(a.run_dir() != b.run_dir());
    CHECK(fs::is_directory(a.run_dir()));
    CHECK(fs::is_directory(b.run_dir()));
  }

  TEST_CASE("segments rotate by size and read back in order") {
    testsupport::TempDir dir;
    auto log = EventLog::open_run(dir.path(), 512);
    for (int i = 0; i < 100; ++i) log.append(RecordKind::StateChange, i, json{{"i", i}});
    std::size_t segments = 0;
    for (const auto& e : fs::directory_iterator(log.run_dir())) {
      ++segments;
      CHECK(fs::file_size(e.path()) <= 512);
    }
    CHECK(segments > 1);
    const auto records = read_log(log.run_dir());
    REQUIRE(records.size() == 100);
    for (int i = 0; i < 100; ++i) {
      CHECK(records[static_cast<std::size_t>(i)]["seq"] == i + 1);
      CHECK(records[static_cast<std::size_t>(i)]["payload"]["i"] == i);
    }
  }

  TEST_CASE("concurrent appends get unique, gap-free sequence numbers") {
    testsupport::TempDir dir;
    auto log = EventLog::open_run(dir.path());
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&log, t] {
        for (int i = 0; i < 250; ++i) log.append(RecordKind::Flow, t, json{{"t", t}});
      });
    }
    for (auto& th : threads) th.join();
    const auto records = read_log(log.run_dir());
    REQUIRE(records.size() == 1000);
    for (std::size_t i = 0; i < records.size(); ++i) CHECK(records[i]["seq"] == i + 1);
  }

  TEST_CASE("malformed logs are rejected") {
    testsupport::TempDir dir;
    testsupport::write_text(dir / "bad.jsonl", "{\"seq\":1,\"kind\":\"Flow\",\"payload\":{}}\nnot json\n");
    CHECK_THROWS_AS(read_log(dir / "bad.jsonl"), LogError);
    testsupport::write_text(dir / "shape.jsonl", "{\"kind\":\"Flow\"}\n");
    CHECK_THROWS_AS(read_log(dir / "shape.jsonl"), LogError);
    CHECK_THROWS_AS(read_log(dir / "missing.jsonl"), LogError);
  }

  TEST_CASE("verify ignores wall time and finds the first divergence") {
    testsupport::TempDir dir;
    auto write = [&](const std::string& name, const std::vector<json>& payloads) {
      auto log = EventLog::open_run(dir / name);
      for (std::size_t i = 0; i < payloads.size(); ++i) {
        log.append(RecordKind::Flow, static_cast<double>(i), payloads[i]);
      }
      return log.run_dir();
    };
    const auto a = write("a", {json{{"x", 1}}, json{{"x", 2}}, json{{"x", 3}}});
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    const auto b = write("b", {json{{"x", 1}}, json{{"x", 2}}, json{{"x", 3}}});
    const auto c = write("c", {json{{"x", 1}}, json{{"x", 9}}, json{{"x", 3}}});
    const auto d = write("d", {json{{"x", 1}}, json{{"x", 2}}});

    CHECK(replay_verify(a, b).equal);
    const auto diverged = replay_verify(a, c);
    CHECK_FALSE(diverged.equal);
    CHECK(diverged.seq == 2u);
    const auto shorter = replay_verify(a, d);
    CHECK_FALSE(shorter.equal);
    CHECK(shorter.seq == 3u);

    // Two empty runs agree.
    const auto e = write("e", {});
    const auto f = write("f", {});
    CHECK(replay_verify(e, f).equal);
  }
}
