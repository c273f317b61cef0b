#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "privacycube/flow/packet.hpp"

namespace privacycube::flow {

struct CaptureFile {
  std::string path;
};
struct FlowLog {
  std::string path;
};
struct LiveInterface {
  std::string name;
};

using CaptureSource = std::variant<CaptureFile, FlowLog, LiveInterface>;

class CaptureError : public std::runtime_error {
 public:
  enum class Kind { SourceUnreadable, MalformedCapture };

  CaptureError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct ReadStats {
  std::uint64_t records = 0;       // summaries yielded
  std::uint64_t parse_errors = 0;  // malformed records, skipped
  std::uint64_t skipped = 0;       // well-formed but not IPv4 (ARP, IPv6, ...)
};

class PacketReader {
 public:
  virtual ~PacketReader() = default;

  // nullopt at end of input (or after stop() for live sources).
  virtual std::optional<PacketSummary> next() = 0;
  // Safe to call from another thread.
  virtual void stop() {}

  const ReadStats& stats() const { return stats_; }

 protected:
  ReadStats stats_;
};

// Throws CaptureError on unreadable sources or a truncated pcap file header.
std::unique_ptr<PacketReader> open_source(const CaptureSource& source);

// Drains a file source.
std::vector<PacketSummary> read_capture(const CaptureSource& source, ReadStats* stats = nullptr);

// Ethernet II frame (optionally one 802.1Q tag) carrying IPv4.
// nullopt for non-IPv4 frames; throws std::invalid_argument for truncated or
// inconsistent headers.
std::optional<PacketSummary> parse_ethernet_frame(std::span<const std::uint8_t> frame,
                                                  double timestamp);

// One flow-log line: {"ts":..,"src":"ip:port","dst":"ip:port","proto":..,"bytes":..}.
// Throws std::invalid_argument when malformed.
PacketSummary parse_flow_log_line(std::string_view line);

}  // namespace privacycube::flow
