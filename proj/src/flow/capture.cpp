#include "privacycube/flow/capture.hpp"

#include <array>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstring>
#include <fstream>

#include <arpa/inet.h>
#include <linux/if_ether.h>
#include <linux/if_packet.h>
#include <net/if.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <json.hpp>

namespace privacycube::flow {
namespace {

constexpr std::uint32_t kPcapMagicMicro = 0xa1b2c3d4;
constexpr std::uint32_t kPcapMagicNano = 0xa1b23c4d;
constexpr std::uint32_t kLinkTypeEthernet = 1;
constexpr std::uint32_t kMaxRecordBytes = 262144;

constexpr std::uint16_t kEtherTypeIpv4 = 0x0800;
constexpr std::uint16_t kEtherTypeVlan = 0x8100;

std::uint16_t be16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

std::uint32_t le32(const std::uint8_t* p) {
  return (std::uint32_t{p[3]} << 24) | (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[1]} << 8) |
         std::uint32_t{p[0]};
}

MacAddress mac_at(const std::uint8_t* p) {
  std::array<std::uint8_t, 6> o{};
  std::memcpy(o.data(), p, 6);
  return MacAddress(o);
}

class PcapFileReader final : public PacketReader {
 public:
  explicit PcapFileReader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) {
      throw CaptureError(CaptureError::Kind::SourceUnreadable, "cannot open capture " + path);
    }
    std::array<std::uint8_t, 24> header{};
    if (!in_.read(reinterpret_cast<char*>(header.data()), header.size())) {
      throw CaptureError(CaptureError::Kind::MalformedCapture,
                         "truncated pcap file header in " + path);
    }
    const std::uint32_t magic = le32(header.data());
    if (magic == kPcapMagicMicro || magic == kPcapMagicNano) {
      big_endian_ = false;
    } else if (be32(header.data()) == kPcapMagicMicro || be32(header.data()) == kPcapMagicNano) {
      big_endian_ = true;
    } else {
      throw CaptureError(CaptureError::Kind::MalformedCapture, "not a pcap file: " + path);
    }
    nanos_ = read32(header.data()) == kPcapMagicNano;
    const std::uint32_t link = read32(header.data() + 20);
    if (link != kLinkTypeEthernet) {
      throw CaptureError(CaptureError::Kind::MalformedCapture,
                         "unsupported link type " + std::to_string(link) + " in " + path);
    }
  }

  std::optional<PacketSummary> next() override {
    while (!done_) {
      std::array<std::uint8_t, 16> rec{};
      in_.read(reinterpret_cast<char*>(rec.data()), rec.size());
      if (in_.gcount() == 0) {
        done_ = true;
        break;
      }
      if (in_.gcount() != static_cast<std::streamsize>(rec.size())) {
        ++stats_.parse_errors;
        done_ = true;
        break;
      }
      const std::uint32_t sec = read32(rec.data());
      const std::uint32_t frac = read32(rec.data() + 4);
      const std::uint32_t incl = read32(rec.data() + 8);
      if (incl > kMaxRecordBytes) {
        // No way to resynchronise after a corrupt length.
        ++stats_.parse_errors;
        done_ = true;
        break;
      }
      frame_.resize(incl);
      in_.read(reinterpret_cast<char*>(frame_.data()), incl);
      if (in_.gcount() != static_cast<std::streamsize>(incl)) {
        ++stats_.parse_errors;
        done_ = true;
        break;
      }
      const double ts = static_cast<double>(sec) + static_cast<double>(frac) / (nanos_ ? 1e9 : 1e6);
      try {
        if (auto summary = parse_ethernet_frame(frame_, ts)) {
          ++stats_.records;
          return summary;
        }
        ++stats_.skipped;
      } catch (const std::invalid_argument&) {
        ++stats_.parse_errors;
      }
    }
    return std::nullopt;
  }

 private:
  std::uint32_t read32(const std::uint8_t* p) const { return big_endian_ ? be32(p) : le32(p); }

  std::ifstream in_;
  bool big_endian_ = false;
  bool nanos_ = false;
  bool done_ = false;
  std::vector<std::uint8_t> frame_;
};

class FlowLogReader final : public PacketReader {
 public:
  explicit FlowLogReader(const std::string& path) : in_(path) {
    if (!in_) {
      throw CaptureError(CaptureError::Kind::SourceUnreadable, "cannot open flow log " + path);
    }
  }

  std::optional<PacketSummary> next() override {
    std::string line;
    while (std::getline(in_, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        auto summary = parse_flow_log_line(line);
        ++stats_.records;
        return summary;
      } catch (const std::invalid_argument&) {
        ++stats_.parse_errors;
      }
    }
    return std::nullopt;
  }

 private:
  std::ifstream in_;
};

class LiveReader final : public PacketReader {
 public:
  explicit LiveReader(const std::string& name) {
    const unsigned index = if_nametoindex(name.c_str());
    if (index == 0) {
      throw CaptureError(CaptureError::Kind::SourceUnreadable, "no such interface " + name);
    }
    fd_ = ::socket(AF_PACKET, SOCK_RAW, htons(ETH_P_ALL));
    if (fd_ < 0) {
      throw CaptureError(CaptureError::Kind::SourceUnreadable,
                         "cannot open raw socket on " + name + ": " + std::strerror(errno));
    }
    sockaddr_ll addr{};
    addr.sll_family = AF_PACKET;
    addr.sll_protocol = htons(ETH_P_ALL);
    addr.sll_ifindex = static_cast<int>(index);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
      const std::string err = std::strerror(errno);
      ::close(fd_);
      throw CaptureError(CaptureError::Kind::SourceUnreadable, "cannot bind " + name + ": " + err);
    }
    frame_.resize(65536);
  }

  ~LiveReader() override {
    if (fd_ >= 0) ::close(fd_);
  }

  std::optional<PacketSummary> next() override {
    while (!stopped_.load()) {
      pollfd pfd{fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, 200);
      if (ready < 0 && errno != EINTR) return std::nullopt;
      if (ready <= 0) continue;
      const auto n = ::recv(fd_, frame_.data(), frame_.size(), 0);
      if (n <= 0) continue;
      const auto now = std::chrono::system_clock::now().time_since_epoch();
      const double ts = std::chrono::duration<double>(now).count();
      try {
        if (auto summary =
                parse_ethernet_frame(std::span(frame_.data(), static_cast<std::size_t>(n)), ts)) {
          ++stats_.records;
          return summary;
        }
        ++stats_.skipped;
      } catch (const std::invalid_argument&) {
        ++stats_.parse_errors;
      }
    }
    return std::nullopt;
  }

  void stop() override { stopped_.store(true); }

 private:
  int fd_ = -1;
  std::atomic<bool> stopped_{false};
  std::vector<std::uint8_t> frame_;
};

std::pair<Ipv4, std::uint16_t> parse_host_port(std::string_view text, const char* field) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument(std::string(field) + ": expected \"ip:port\"");
  }
  auto ip = Ipv4::parse(text.substr(0, colon));
  const auto port_text = text.substr(colon + 1);
  unsigned port = 0;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (!ip || port_text.empty() || ec != std::errc{} ||
      ptr != port_text.data() + port_text.size() || port > 65535) {
    throw std::invalid_argument(std::string(field) + ": expected \"ip:port\"");
  }
  return {*ip, static_cast<std::uint16_t>(port)};
}

}  // namespace

std::optional<PacketSummary> parse_ethernet_frame(std::span<const std::uint8_t> frame,
                                                  double timestamp) {
  if (frame.size() < 14) throw std::invalid_argument("truncated ethernet header");
  std::size_t offset = 12;
  std::uint16_t ether_type = be16(frame.data() + offset);
  offset += 2;
  if (ether_type == kEtherTypeVlan) {
    if (frame.size() < offset + 4) throw std::invalid_argument("truncated vlan tag");
    ether_type = be16(frame.data() + offset + 2);
    offset += 4;
  }
  if (ether_type != kEtherTypeIpv4) return std::nullopt;

  const auto ip = frame.subspan(offset);
  if (ip.size() < 20) throw std::invalid_argument("truncated ipv4 header");
  if ((ip[0] >> 4) != 4) throw std::invalid_argument("ipv4 ethertype with wrong version");
  const std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0f) * 4;
  if (ihl < 20 || ip.size() < ihl) throw std::invalid_argument("bad ipv4 header length");
  const std::uint16_t total_length = be16(ip.data() + 2);
  if (total_length < ihl) throw std::invalid_argument("ipv4 total length below header length");

  PacketSummary s;
  s.timestamp = timestamp;
  s.dst_mac = mac_at(frame.data());
  s.src_mac = mac_at(frame.data() + 6);
  s.src_ip = Ipv4(be32(ip.data() + 12));
  s.dst_ip = Ipv4(be32(ip.data() + 16));
  s.length = total_length;

  const std::uint8_t proto = ip[9];
  const bool first_fragment = (be16(ip.data() + 6) & 0x1fff) == 0;
  s.protocol = proto == 6 ? Protocol::TCP : proto == 17 ? Protocol::UDP : Protocol::Other;
  if (s.protocol != Protocol::Other && first_fragment && ip.size() >= ihl + 4) {
    s.src_port = be16(ip.data() + ihl);
    s.dst_port = be16(ip.data() + ihl + 2);
  }
  return s;
}

PacketSummary parse_flow_log_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("flow log line is not an object");
  auto field = [&](const char* key) -> const nlohmann::json& {
    auto it = j.find(key);
    if (it == j.end()) throw std::invalid_argument(std::string("missing ") + key);
    return *it;
  };

  PacketSummary s;
  const auto& ts = field("ts");
  if (!ts.is_number()) throw std::invalid_argument("ts: expected number");
  s.timestamp = ts.get<double>();
  const auto& src = field("src");
  const auto& dst = field("dst");
  if (!src.is_string() || !dst.is_string()) throw std::invalid_argument("src/dst: expected string");
  std::tie(s.src_ip, s.src_port) = parse_host_port(src.get<std::string>(), "src");
  std::tie(s.dst_ip, s.dst_port) = parse_host_port(dst.get<std::string>(), "dst");
  const auto& proto = field("proto");
  if (!proto.is_string()) throw std::invalid_argument("proto: expected string");
  auto p = enum_from_string<Protocol>(proto.get<std::string>());
  if (!p) throw std::invalid_argument("proto: expected tcp|udp|other");
  s.protocol = *p;
  const auto& bytes = field("bytes");
  if (!bytes.is_number_integer() || bytes.get<long long>() < 0 ||
      bytes.get<long long>() > 0xffffffffLL) {
    throw std::invalid_argument("bytes: expected non-negative integer");
  }
  s.length = static_cast<std::uint32_t>(bytes.get<long long>());
  return s;
}

std::unique_ptr<PacketReader> open_source(const CaptureSource& source) {
  return std::visit(
      [](const auto& s) -> std::unique_ptr<PacketReader> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CaptureFile>) {
          return std::make_unique<PcapFileReader>(s.path);
        } else if constexpr (std::is_same_v<T, FlowLog>) {
          return std::make_unique<FlowLogReader>(s.path);
        } else {
          return std::make_unique<LiveReader>(s.name);
        }
      },
      source);
}

std::vector<PacketSummary> read_capture(const CaptureSource& source, ReadStats* stats) {
  if (std::holds_alternative<LiveInterface>(source)) {
    throw std::invalid_argument("read_capture drains file sources only");
  }
  auto reader = open_source(source);
  std::vector<PacketSummary> out;
  while (auto s = reader->next()) out.push_back(*s);
  if (stats != nullptr) *stats = reader->stats();
  return out;
}

}  // namespace privacycube::flow
