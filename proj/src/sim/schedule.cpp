#include "privacycube/sim/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "privacycube/core/json_fields.hpp"

namespace privacycube::sim {
namespace {

using nlohmann::json;
namespace jf = json_fields;

constexpr std::uint16_t kSimLocalPortBase = 49152;
constexpr std::uint16_t kSimRemotePort = 443;

double positive(const json& v, const std::string& path, bool allow_zero = false) {
  const double d = jf::as_number(v, path);
  if (!std::isfinite(d) || d < 0.0 || (!allow_zero && d == 0.0)) {
    throw jf::FieldError(jf::FieldError::Kind::BadValue, path,
                         allow_zero ? "must be >= 0" : "must be > 0");
  }
  return d;
}

// Uniform in [0, 1] from the top 53 bits; independent of the standard
// library's distribution implementations.
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740991.0);
}

flow::FlowRecord synthetic_flow(const policy::DeviceProfile& profile, const SimEntry& entry,
                                std::size_t entry_index, double t) {
  flow::FlowRecord f;
  f.timestamp = t;
  for (const auto& b : profile.bindings) {
    if (const auto* ip = std::get_if<Ipv4>(&b); ip && f.local_ip == Ipv4{}) f.local_ip = *ip;
    if (const auto* mac = std::get_if<MacAddress>(&b); mac && !f.local_mac) f.local_mac = *mac;
  }
  f.remote_ip = entry.remote_ip;
  f.local_port = static_cast<std::uint16_t>(kSimLocalPortBase + entry_index % 16384);
  f.remote_port = kSimRemotePort;
  f.protocol = flow::Protocol::TCP;
  f.direction = flow::Direction::Outbound;
  f.byte_count = 0;
  return f;
}

}  // namespace

double SimSchedule::rotation_period() const {
  double days = 0.0;
  for (const auto& step : rotation) days += step.days;
  return days * day_seconds();
}

SimSchedule load_schedule(std::string_view document, const policy::PolicyCorpus& corpus) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ScheduleError(ScheduleError::Kind::SchemaError, "$", e.what());
  }

  SimSchedule s;
  try {
    jf::as_object(doc, "$");
    const auto seed = jf::as_integer(jf::require(doc, "seed", ""), "seed");
    s.seed = static_cast<std::uint64_t>(seed);
    s.time_scale = positive(jf::require(doc, "time_scale", ""), "time_scale");
    if (const auto* rotation = jf::optional_field(doc, "rotation")) {
      jf::as_array(*rotation, "rotation");
      for (std::size_t i = 0; i < rotation->size(); ++i) {
        const auto path = jf::index("rotation", i);
        const auto& step = jf::as_array((*rotation)[i], path);
        if (step.size() != 2) {
          throw jf::FieldError(jf::FieldError::Kind::BadValue, path, "expected [room, days]");
        }
        s.rotation.push_back({jf::as_enum<policy::RoomId>(step[0], jf::index(path, 0)),
                              positive(step[1], jf::index(path, 1))});
      }
    }
    const auto& entries = jf::as_array(jf::require(doc, "entries", ""), "entries");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto path = jf::index("entries", i);
      const auto& e = entries[i];
      SimEntry entry;
      entry.device_id = jf::as_string(jf::require(e, "device_id", path), jf::join(path, "device_id"));
      entry.interval_seconds =
          positive(jf::require(e, "interval_seconds", path), jf::join(path, "interval_seconds"));
      entry.jitter_seconds = positive(jf::require(e, "jitter_seconds", path),
                                      jf::join(path, "jitter_seconds"), /*allow_zero=*/true);
      const auto ip_path = jf::join(path, "remote_ip");
      auto ip = Ipv4::parse(jf::as_string(jf::require(e, "remote_ip", path), ip_path));
      if (!ip) throw jf::FieldError(jf::FieldError::Kind::BadValue, ip_path, "expected IPv4");
      entry.remote_ip = *ip;
      if (corpus.find(entry.device_id) == nullptr) {
        throw ScheduleError(ScheduleError::Kind::UnknownDevice, jf::join(path, "device_id"),
                            "device \"" + entry.device_id + "\" is not in the corpus");
      }
      s.entries.push_back(std::move(entry));
    }
  } catch (const jf::FieldError& e) {
    throw ScheduleError(ScheduleError::Kind::SchemaError, e.path(), e.what());
  }
  return s;
}

SimSchedule load_schedule_file(const std::string& path, const policy::PolicyCorpus& corpus) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read schedule " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_schedule(ss.str(), corpus);
}

std::optional<policy::RoomId> room_at(const SimSchedule& schedule, double t) {
  if (schedule.rotation.empty()) return std::nullopt;
  const double period = schedule.rotation_period();
  double pos = std::fmod(t, period);
  if (pos < 0) pos += period;
  const double day = schedule.day_seconds();
  double cumulative_days = 0.0;
  for (const auto& step : schedule.rotation) {
    cumulative_days += step.days;
    if (pos < cumulative_days * day) return step.room;
  }
  return schedule.rotation.back().room;
}

std::vector<RoomTransition> room_transitions(const SimSchedule& schedule, double t_end) {
  std::vector<RoomTransition> out;
  if (schedule.rotation.empty()) return out;
  const double period = schedule.rotation_period();
  const double day = schedule.day_seconds();
  for (double base = 0.0; base < t_end; base += period) {
    double cumulative_days = 0.0;
    for (std::size_t i = 0; i < schedule.rotation.size(); ++i) {
      cumulative_days += schedule.rotation[i].days;
      const double t = base + cumulative_days * day;
      if (t > t_end) return out;
      const auto& next = schedule.rotation[(i + 1) % schedule.rotation.size()];
      out.push_back({t, next.room});
    }
  }
  return out;
}

std::vector<SimEvent> generate(const SimSchedule& schedule, const policy::PolicyCorpus& corpus,
                               double t_end) {
  struct Keyed {
    SimEvent event;
    std::size_t entry;
  };
  std::vector<Keyed> events;
  for (std::size_t idx = 0; idx < schedule.entries.size(); ++idx) {
    const auto& entry = schedule.entries[idx];
    const auto* profile = corpus.find(entry.device_id);
    if (profile == nullptr) continue;
    std::seed_seq seq{static_cast<std::uint32_t>(schedule.seed),
                      static_cast<std::uint32_t>(schedule.seed >> 32),
                      static_cast<std::uint32_t>(idx)};
    std::mt19937_64 rng(seq);
    for (std::uint64_t k = 1;; ++k) {
      const double base = static_cast<double>(k) * entry.interval_seconds;
      if (base >= t_end) break;
      const double t = base + (entry.jitter_seconds > 0 ? unit_draw(rng) * entry.jitter_seconds : 0.0);
      if (t >= t_end) continue;
      if (const auto room = room_at(schedule, t); room && !profile->rooms.contains(*room)) continue;
      events.push_back({{t, entry.device_id, synthetic_flow(*profile, entry, idx, t)}, idx});
    }
  }
  std::stable_sort(events.begin(), events.end(), [](const Keyed& a, const Keyed& b) {
    if (a.event.timestamp != b.event.timestamp) return a.event.timestamp < b.event.timestamp;
    return a.entry < b.entry;
  });
  std::vector<SimEvent> out;
  out.reserve(events.size());
  for (auto& k : events) out.push_back(std::move(k.event));
  return out;
}

}  // namespace privacycube::sim
