#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "generators.hpp"
#include "pcap_writer.hpp"
#include "privacycube/flow/attribute.hpp"
#include "privacycube/flow/capture.hpp"
#include "privacycube/flow/classify.hpp"
#include "privacycube/flow/coalesce.hpp"

using namespace privacycube;
using namespace privacycube::flow;
using nlohmann::json;
using testsupport::build_frame;
using testsupport::build_pcap;
using testsupport::FrameSpec;
using testsupport::PcapRecord;

namespace {

constexpr std::uint32_t kLan = 0xC0A8010A;     // 192.168.1.10
constexpr std::uint32_t kRemote = 0x345EECF8;  // 52.94.236.248

std::vector<PacketSummary> read_pcap_bytes(const std::string& bytes, ReadStats* stats = nullptr) {
  testsupport::TempDir dir;
  const auto path = dir / "c.pcap";
  testsupport::write_text(path, bytes);
  return read_capture(CaptureFile{path.string()}, stats);
}

CaptureError::Kind open_error_kind(const std::string& bytes) {
  try {
    read_pcap_bytes(bytes);
  } catch (const CaptureError& e) {
    return e.kind();
  }
  FAIL("capture unexpectedly accepted");
  return CaptureError::Kind::SourceUnreadable;
}

std::vector<FlowRecord> replay(const CaptureSource& source, const LocalNetwork& local) {
  FlowAssembler assembler(local);
  std::vector<FlowRecord> out;
  for (const auto& p : read_capture(source)) {
    if (auto f = assembler.push(p)) out.push_back(*f);
  }
  return out;
}

}  // namespace

TEST_SUITE("flow") {
  TEST_CASE("pcap in both byte orders and both time resolutions") {
    const FrameSpec spec{.src_ip = kLan, .dst_ip = kRemote, .src_port = 50432, .dst_port = 443};
    const std::vector<PcapRecord> micro{{1700000000, 250000, build_frame(spec)}};
    const std::vector<PcapRecord> nano{{1700000000, 250000000, build_frame(spec)}};
    for (bool big : {false, true}) {
      for (bool ns : {false, true}) {
        CAPTURE(big);
        CAPTURE(ns);
        ReadStats stats;
        const auto out = read_pcap_bytes(build_pcap(ns ? nano : micro, big, ns), &stats);
        REQUIRE(out.size() == 1);
        CHECK(out[0].timestamp == doctest::Approx(1700000000.25).epsilon(1e-12));
        CHECK(out[0].src_ip == Ipv4(kLan));
        CHECK(out[0].dst_ip == Ipv4(kRemote));
        CHECK(out[0].src_port == 50432);
        CHECK(out[0].dst_port == 443);
        CHECK(out[0].protocol == Protocol::TCP);
        CHECK(out[0].length == 40);
        CHECK(out[0].src_mac == MacAddress({0x02, 0, 0, 0, 0, 0x01}));
        CHECK(stats.records == 1);
        CHECK(stats.parse_errors == 0);
      }
    }
  }

  TEST_CASE("header-only capture yields an empty stream") {
    ReadStats stats;
    CHECK(read_pcap_bytes(build_pcap({}), &stats).empty());
    CHECK(stats.records == 0);
    CHECK(stats.parse_errors == 0);
  }

  TEST_CASE("truncated or foreign file headers are MalformedCapture") {
    const auto good = build_pcap({});
    CHECK(open_error_kind(good.substr(0, 10)) == CaptureError::Kind::MalformedCapture);
    CHECK(open_error_kind("") == CaptureError::Kind::MalformedCapture);
    auto bad_magic = good;
    bad_magic[0] = 'X';
    CHECK(open_error_kind(bad_magic) == CaptureError::Kind::MalformedCapture);
    CHECK(open_error_kind(build_pcap({}, false, false, 101)) == CaptureError::Kind::MalformedCapture);
    CHECK_THROWS_AS(read_capture(CaptureFile{"/nonexistent/x.pcap"}), CaptureError);
    try {
      read_capture(FlowLog{"/nonexistent/x.jsonl"});
    } catch (const CaptureError& e) {
      CHECK(e.kind() == CaptureError::Kind::SourceUnreadable);
    }
  }

  TEST_CASE("truncated records stop the read and are counted") {
    const FrameSpec spec{.src_ip = kLan, .dst_ip = kRemote};
    const auto two = build_pcap({{1, 0, build_frame(spec)}, {2, 0, build_frame(spec)}});
    const auto one_record = build_pcap({{1, 0, build_frame(spec)}}).size();

    ReadStats stats;
    // Second record header cut in half.
    CHECK(read_pcap_bytes(two.substr(0, one_record + 8), &stats).size() == 1);
    CHECK(stats.parse_errors == 1);
    // Second record body cut short.
    CHECK(read_pcap_bytes(two.substr(0, two.size() - 5), &stats).size() == 1);
    CHECK(stats.parse_errors == 1);
  }

  TEST_CASE("oversized record length is a parse error") {
    const FrameSpec spec{.src_ip = kLan, .dst_ip = kRemote};
    auto bytes = build_pcap({{1, 0, build_frame(spec)}, {2, 0, build_frame(spec)}});
    const auto first_len = build_pcap({{1, 0, build_frame(spec)}}).size();
    // incl_len of the second record, little endian.
    bytes[first_len + 8] = 0;
    bytes[first_len + 9] = 0;
    bytes[first_len + 10] = 0x10;
    bytes[first_len + 11] = 0;
    ReadStats stats;
    CHECK(read_pcap_bytes(bytes, &stats).size() == 1);
    CHECK(stats.parse_errors == 1);
  }

  TEST_CASE("non-IPv4 frames are skipped and bad IPv4 headers counted") {
    auto arp = build_frame(FrameSpec{});
    arp[12] = 0x08;
    arp[13] = 0x06;
    auto bad_version = build_frame(FrameSpec{.src_ip = kLan, .dst_ip = kRemote});
    bad_version[14] = 0x65;
    const FrameSpec udp{.src_ip = kLan, .dst_ip = kRemote, .proto = 17, .src_port = 5353,
                        .dst_port = 53, .payload = 12, .vlan = true};
    ReadStats stats;
    const auto out = read_pcap_bytes(
        build_pcap({{1, 0, arp}, {2, 0, bad_version}, {3, 0, build_frame(udp)}}), &stats);
    REQUIRE(out.size() == 1);
    CHECK(out[0].protocol == Protocol::UDP);
    CHECK(out[0].src_port == 5353);
    CHECK(out[0].length == 40);
    CHECK(stats.skipped == 1);
    CHECK(stats.parse_errors == 1);
  }

  TEST_CASE("flow log with three valid lines gives three summaries") {
    testsupport::TempDir dir;
    const auto path = dir / "f.jsonl";
    testsupport::write_text(
        path,
        R"({"ts":1.5,"src":"192.168.1.10:1000","dst":"52.94.236.248:443","proto":"tcp","bytes":60})"
        "\n\n"
        R"({"ts":2,"src":"52.94.236.248:443","dst":"192.168.1.10:1000","proto":"tcp","bytes":1500})"
        "\n"
        R"({"ts":3,"src":"192.168.1.20:53","dst":"8.8.8.8:53","proto":"udp","bytes":0})"
        "\n");
    ReadStats stats;
    const auto out = read_capture(FlowLog{path.string()}, &stats);
    REQUIRE(out.size() == 3);
    CHECK(out[0].timestamp == 1.5);
    CHECK(out[1].src_ip == Ipv4(kRemote));
    CHECK(out[2].protocol == Protocol::UDP);
    CHECK_FALSE(out[0].src_mac.has_value());
    CHECK(stats.parse_errors == 0);
  }

  TEST_CASE("malformed flow log lines are counted and skipped") {
    for (const char* line : {
             "not json",
             "[]",
             R"({"src":"1.2.3.4:1","dst":"5.6.7.8:2","proto":"tcp","bytes":1})",
             R"({"ts":"1","src":"1.2.3.4:1","dst":"5.6.7.8:2","proto":"tcp","bytes":1})",
             R"({"ts":1,"src":"1.2.3.4","dst":"5.6.7.8:2","proto":"tcp","bytes":1})",
             R"({"ts":1,"src":"1.2.3.4:70000","dst":"5.6.7.8:2","proto":"tcp","bytes":1})",
             R"({"ts":1,"src":"1.2.3.4:1","dst":"5.6.7.8:2","proto":"icmp","bytes":1})",
             R"({"ts":1,"src":"1.2.3.4:1","dst":"5.6.7.8:2","proto":"tcp","bytes":-1})",
         }) {
      CAPTURE(line);
      CHECK_THROWS_AS(parse_flow_log_line(line), std::invalid_argument);
    }
  }

  TEST_CASE("bundled sample capture") {
    const auto out = read_capture(CaptureFile{testsupport::data_path("captures/sample.pcap").string()});
    REQUIRE(out.size() == 1);
    CHECK(out[0].src_ip.to_string() == "192.168.1.10");
    CHECK(out[0].dst_ip.to_string() == "52.94.236.248");
    CHECK(out[0].dst_port == 443);
  }

  TEST_CASE("classify: outbound, inbound and drop") {
    const LocalNetwork local;
    const auto out = classify_endpoints(Ipv4(kLan), Ipv4(kRemote), local);
    REQUIRE(out);
    CHECK(out->direction == Direction::Outbound);
    CHECK(out->local_ip == Ipv4(kLan));
    CHECK(out->remote_ip == Ipv4(kRemote));

    const auto in = classify_endpoints(Ipv4(kRemote), Ipv4(kLan), local);
    REQUIRE(in);
    CHECK(in->direction == Direction::Inbound);
    CHECK(in->local_ip == Ipv4(kLan));

    CHECK_FALSE(classify_endpoints(Ipv4(kLan), Ipv4(192, 168, 1, 1), local));
    CHECK_FALSE(classify_endpoints(Ipv4(kRemote), Ipv4(8, 8, 8, 8), local));

    // Extra prefixes extend the local set.
    const LocalNetwork lab({*Ipv4Prefix::parse("100.64.0.0/10")});
    CHECK(classify_endpoints(Ipv4(100, 64, 3, 4), Ipv4(kRemote), lab)->direction == Direction::Outbound);
    CHECK_FALSE(classify_endpoints(Ipv4(100, 64, 3, 4), Ipv4(kRemote), local));
  }

  TEST_CASE("assembler opens a new episode only after the idle gap") {
    FlowAssembler a(LocalNetwork{}, 10.0);
    auto pkt = [](double ts, bool outbound) {
      PacketSummary p;
      p.timestamp = ts;
      p.src_ip = Ipv4(outbound ? kLan : kRemote);
      p.dst_ip = Ipv4(outbound ? kRemote : kLan);
      p.src_port = outbound ? 1000 : 443;
      p.dst_port = outbound ? 443 : 1000;
      p.protocol = Protocol::TCP;
      p.length = 60;
      p.src_mac = MacAddress({2, 0, 0, 0, 0, outbound ? std::uint8_t{1} : std::uint8_t{2}});
      p.dst_mac = MacAddress({2, 0, 0, 0, 0, outbound ? std::uint8_t{2} : std::uint8_t{1}});
      return p;
    };
    const auto first = a.push(pkt(0, true));
    REQUIRE(first);
    CHECK(first->local_mac == MacAddress({2, 0, 0, 0, 0, 1}));
    CHECK_FALSE(a.push(pkt(5, false)));   // reply belongs to the same episode
    CHECK_FALSE(a.push(pkt(15, true)));   // 10 s since last packet, not more
    const auto reopened = a.push(pkt(25.5, false));
    REQUIRE(reopened);
    CHECK(reopened->direction == Direction::Inbound);
    CHECK(reopened->local_mac == MacAddress({2, 0, 0, 0, 0, 1}));
    CHECK(reopened->local_port == 1000);
    CHECK(a.stats().episodes == 2);
    CHECK(a.stats().packets == 4);
  }

  TEST_CASE("flow record json round-trip") {
    FlowRecord f;
    f.timestamp = 1700000000.125;
    f.local_ip = Ipv4(kLan);
    f.remote_ip = Ipv4(kRemote);
    f.local_port = 1;
    f.remote_port = 2;
    f.protocol = Protocol::UDP;
    f.direction = Direction::Inbound;
    f.byte_count = 99;
    CHECK(flow_from_json(to_json(f)) == f);
    f.local_mac = MacAddress({2, 0, 0x5e, 0x10, 0, 0x0c});
    CHECK(flow_from_json(to_json(f)) == f);
  }

  TEST_CASE("1000-flow replay: 600 attributed, 400 unattributed") {
    const auto corpus_path = testsupport::data_path("corpus/default_corpus.json");
    const auto corpus = policy::load_corpus_file(corpus_path.string());

    // Bound addresses straight from the corpus document.
    std::vector<std::string> bound;
    const auto doc = json::parse(testsupport::read_text(corpus_path));
    for (const auto& d : doc["devices"]) {
      for (const auto& b : d["bindings"]) {
        const auto s = b.get<std::string>();
        if (s.rfind("ip:", 0) == 0) bound.push_back(s.substr(3));
      }
    }
    REQUIRE_FALSE(bound.empty());

    testsupport::Rng rng(600400);
    std::vector<bool> is_bound(1000, false);
    std::fill(is_bound.begin(), is_bound.begin() + 600, true);
    std::shuffle(is_bound.begin(), is_bound.end(), rng);

    std::ostringstream log;
    for (int i = 0; i < 1000; ++i) {
      const std::string src =
          is_bound[i] ? bound[testsupport::uniform_int(rng, 0, static_cast<int>(bound.size()) - 1)]
                      : "192.168.77." + std::to_string(testsupport::uniform_int(rng, 1, 254));
      log << json{{"ts", 1700000000.0 + i * 0.5},
                  {"src", src + ":" + std::to_string(20000 + i)},
                  {"dst", "52.94.236.248:443"},
                  {"proto", "tcp"},
                  {"bytes", 60}}
                 .dump()
          << "\n";
    }
    testsupport::TempDir dir;
    const auto path = dir / "replay.jsonl";
    testsupport::write_text(path, log.str());

    // Independent count: scan the file text.
    const std::set<std::string> bound_set(bound.begin(), bound.end());
    int expected_attributed = 0;
    int lines = 0;
    {
      std::istringstream in(testsupport::read_text(path));
      std::string line;
      while (std::getline(in, line)) {
        ++lines;
        const auto src = json::parse(line)["src"].get<std::string>();
        expected_attributed += bound_set.count(src.substr(0, src.find(':'))) ? 1 : 0;
      }
    }
    REQUIRE(lines == 1000);
    REQUIRE(expected_attributed == 600);

    const auto flows = replay(FlowLog{path.string()}, LocalNetwork(corpus.local_prefixes()));
    REQUIRE(flows.size() == 1000);
    int attributed = 0;
    int unattributed = 0;
    for (const auto& f : flows) {
      const auto a = attribute_flow(corpus, f);
      if (const auto* hit = std::get_if<AttributedFlow>(&a)) {
        ++attributed;
        CHECK(corpus.find(hit->device_id)->bindings.count(policy::Binding(f.local_ip)) == 1);
      } else {
        ++unattributed;
      }
    }
    CHECK(attributed == expected_attributed);
    CHECK(unattributed == 1000 - expected_attributed);
  }

  TEST_CASE("property: replay is deterministic with non-decreasing timestamps") {
    testsupport::Rng rng(31337);
    for (int iter = 0; iter < 20; ++iter) {
      CAPTURE(iter);
      std::vector<PcapRecord> records;
      std::uint32_t sec = 1700000000;
      const int n = testsupport::uniform_int(rng, 1, 200);
      for (int i = 0; i < n; ++i) {
        sec += static_cast<std::uint32_t>(testsupport::uniform_int(rng, 0, 15));
        FrameSpec f;
        const bool outbound = testsupport::coin(rng);
        const std::uint32_t lan = 0xC0A80100 | static_cast<std::uint32_t>(testsupport::uniform_int(rng, 2, 5));
        const std::uint32_t remote = testsupport::coin(rng, 0.9)
                                         ? 0x34000000 | static_cast<std::uint32_t>(testsupport::uniform_int(rng, 0, 3))
                                         : 0xC0A80101;
        f.src_ip = outbound ? lan : remote;
        f.dst_ip = outbound ? remote : lan;
        f.proto = testsupport::coin(rng) ? 6 : 17;
        f.src_port = static_cast<std::uint16_t>(testsupport::uniform_int(rng, 1000, 1003));
        f.dst_port = 443;
        records.push_back({sec, static_cast<std::uint32_t>(testsupport::uniform_int(rng, 0, 999999)),
                           build_frame(f)});
      }
      // Keep capture order non-decreasing, as a capture tool would.
      std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return std::pair(a.sec, a.frac) < std::pair(b.sec, b.frac);
      });
      testsupport::TempDir dir;
      const auto path = dir / "r.pcap";
      testsupport::write_text(path, build_pcap(records));

      const auto first = replay(CaptureFile{path.string()}, LocalNetwork{});
      const auto second = replay(CaptureFile{path.string()}, LocalNetwork{});
      CHECK(first == second);
      CHECK(std::is_sorted(first.begin(), first.end(),
                           [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; }));
    }
  }
}
