#include "privacycube/gateway/event_log.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>

#include <unistd.h>

namespace privacycube::gateway {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_stamp(const char* format) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, format, &tm);
  return buf;
}

std::string wall_clock() {
  const auto now = std::chrono::system_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  char frac[8];
  std::snprintf(frac, sizeof frac, ".%03lldZ", static_cast<long long>(ms));
  return utc_stamp("%Y-%m-%dT%H:%M:%S") + frac;
}

std::vector<fs::path> segments_of(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("events-") && name.ends_with(".jsonl")) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

json without_wall(json record) {
  record.erase("wall");
  return record;
}

}  // namespace

EventLog EventLog::open_run(const fs::path& log_dir, std::size_t max_segment_bytes) {
  std::error_code ec;
  fs::create_directories(log_dir, ec);
  if (ec) throw LogError("cannot create log directory " + log_dir.string() + ": " + ec.message());
  const auto base = "run-" + utc_stamp("%Y%m%dT%H%M%SZ") + "-" + std::to_string(::getpid());
  for (int attempt = 0; attempt < 1000; ++attempt) {
    auto dir = log_dir / (attempt == 0 ? base : base + "-" + std::to_string(attempt));
    if (fs::create_directory(dir, ec)) return EventLog(dir, max_segment_bytes);
    if (ec) throw LogError("cannot create run directory " + dir.string() + ": " + ec.message());
  }
  throw LogError("cannot allocate a run directory under " + log_dir.string());
}

EventLog::EventLog(fs::path run_dir, std::size_t max_segment_bytes)
    : run_dir_(std::move(run_dir)), max_segment_bytes_(max_segment_bytes) {
  open_segment();
}

EventLog::EventLog(EventLog&& other) noexcept
    : run_dir_(std::move(other.run_dir_)),
      max_segment_bytes_(other.max_segment_bytes_),
      out_(std::move(other.out_)),
      segment_index_(other.segment_index_),
      segment_bytes_(other.segment_bytes_),
      seq_(other.seq_) {}

EventLog::~EventLog() = default;

void EventLog::open_segment() {
  char name[32];
  std::snprintf(name, sizeof name, "events-%06zu.jsonl", segment_index_);
  out_ = std::ofstream(run_dir_ / name, std::ios::app);
  if (!out_) throw LogError("cannot open log segment " + (run_dir_ / name).string());
  segment_bytes_ = 0;
}

std::uint64_t EventLog::append(RecordKind kind, double ts, json payload) {
  std::lock_guard lock(mutex_);
  const std::uint64_t seq = ++seq_;
  json record{{"seq", seq},
              {"kind", std::string(to_string(kind))},
              {"ts", ts},
              {"payload", std::move(payload)},
              {"wall", wall_clock()}};
  const auto line = record.dump() + "\n";
  if (segment_bytes_ > 0 && segment_bytes_ + line.size() > max_segment_bytes_) {
    ++segment_index_;
    open_segment();
  }
  out_ << line;
  out_.flush();
  if (!out_) throw LogError("write to event log failed in " + run_dir_.string());
  segment_bytes_ += line.size();
  return seq;
}

std::uint64_t EventLog::last_seq() const {
  std::lock_guard lock(mutex_);
  return seq_;
}

std::vector<json> read_log(const fs::path& path) {
  std::vector<fs::path> files;
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    files = segments_of(path);
  } else if (fs::is_regular_file(path, ec)) {
    files.push_back(path);
  } else {
    throw LogError("MalformedLog: cannot read " + path.string());
  }

  std::vector<json> records;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw LogError("MalformedLog: cannot read " + file.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto where = file.string() + ":" + std::to_string(line_no);
      json record;
      try {
        record = json::parse(line);
      } catch (const json::parse_error& e) {
        throw LogError("MalformedLog: " + where + ": " + e.what());
      }
      if (!record.is_object() || !record.contains("seq") || !record["seq"].is_number_unsigned() ||
          !record.contains("kind") || !record.contains("payload")) {
        throw LogError("MalformedLog: " + where + ": not an event record");
      }
      records.push_back(std::move(record));
    }
  }
  return records;
}

VerifyResult replay_verify(const fs::path& log_a, const fs::path& log_b) {
  const auto a = read_log(log_a);
  const auto b = read_log(log_b);
  const auto common = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (without_wall(a[i]) != without_wall(b[i])) {
      const auto seq = a[i]["seq"].get<std::uint64_t>();
      std::string detail = "record seq " + std::to_string(seq) + " differs";
      if (a[i].value("kind", json()) != b[i].value("kind", json())) {
        detail += " (kind " + a[i]["kind"].dump() + " vs " + b[i]["kind"].dump() + ")";
      }
      return {false, seq, detail};
    }
  }
  if (a.size() != b.size()) {
    const auto& longer = a.size() > b.size() ? a : b;
    return {false, longer[common]["seq"].get<std::uint64_t>(),
            "log A has " + std::to_string(a.size()) + " records, log B has " +
                std::to_string(b.size())};
  }
  return {};
}

}  // namespace privacycube::gateway
