#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "privacycube/core/enum_traits.hpp"

namespace privacycube::gateway {

enum class RecordKind { Flow, Notification, Tap, StateChange, GeoRefresh, Error };

inline constexpr std::size_t kDefaultSegmentBytes = 64u * 1024u * 1024u;

// Append-only JSONL log, one directory per run, rotated into numbered
// segments by size. Each line is
//   {"kind":..,"payload":..,"seq":..,"ts":..,"wall":..}
// where ts is event time and wall is the wall clock at append.
class EventLog {
 public:
  // Creates a fresh run directory under `log_dir`.
  static EventLog open_run(const std::filesystem::path& log_dir,
                           std::size_t max_segment_bytes = kDefaultSegmentBytes);

  EventLog(EventLog&&) noexcept;
  EventLog& operator=(EventLog&&) = delete;
  ~EventLog();

  // Thread-safe. The line is flushed before this returns.
  std::uint64_t append(RecordKind kind, double ts, nlohmann::json payload);

  const std::filesystem::path& run_dir() const { return run_dir_; }
  std::uint64_t last_seq() const;

 private:
  EventLog(std::filesystem::path run_dir, std::size_t max_segment_bytes);
  void open_segment();

  std::filesystem::path run_dir_;
  std::size_t max_segment_bytes_;
  mutable std::mutex mutex_;
  std::ofstream out_;
  std::size_t segment_index_ = 0;
  std::size_t segment_bytes_ = 0;
  std::uint64_t seq_ = 0;
};

class LogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads a segment file or a run directory (segments in order). Throws
// LogError (MalformedLog) on unreadable paths or bad lines.
std::vector<nlohmann::json> read_log(const std::filesystem::path& path);

struct VerifyResult {
  bool equal = true;
  std::optional<std::uint64_t> seq;  // first diverging record
  std::string detail;
};

// Record-by-record comparison ignoring the wall-clock field.
VerifyResult replay_verify(const std::filesystem::path& log_a, const std::filesystem::path& log_b);

}  // namespace privacycube::gateway

namespace privacycube {

template <>
struct EnumTraits<gateway::RecordKind> {
  static constexpr std::array<std::string_view, 6> names{
      "Flow", "Notification", "Tap", "StateChange", "GeoRefresh", "Error"};
};

}  // namespace privacycube
