#include "privacycube/cube/cube_state.hpp"

#include <stdexcept>

namespace privacycube::cube {

using nlohmann::json;
using namespace policy;

namespace {

constexpr std::string_view on_off(bool on) { return on ? "On" : "Off"; }

constexpr std::string_view slot_state_name(SlotState s) {
  switch (s) {
    case SlotState::Empty:
      return "Empty";
    case SlotState::Idle:
      return "Idle";
    case SlotState::Lit:
      return "Lit";
  }
  return "Empty";
}

void merge_into(Contribution& into, const Contribution& from) {
  for (const auto& [tag, risk] : from.data_types) into.data_types.insert_or_assign(tag, risk);
  into.access.insert(from.access.begin(), from.access.end());
  into.usage.insert(from.usage.begin(), from.usage.end());
  into.retention.insert(from.retention.begin(), from.retention.end());
  into.regions.insert(from.regions.begin(), from.regions.end());
}

}  // namespace

TapEvent tap_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("tap: expected object");
  const auto room = j.find("room");
  const auto slot = j.find("slot");
  const auto ts = j.find("ts");
  if (room == j.end() || slot == j.end() || ts == j.end()) {
    throw std::invalid_argument("tap: requires room, slot and ts");
  }
  if (!room->is_string() || !slot->is_number_integer() || !ts->is_number()) {
    throw std::invalid_argument("tap: wrong field type");
  }
  const auto parsed_room = enum_from_string<RoomId>(room->get<std::string>());
  if (!parsed_room) throw std::invalid_argument("tap: unknown room");
  const auto s = slot->get<long long>();
  if (s < 1 || s > static_cast<long long>(kRoomCapacity)) {
    throw std::invalid_argument("tap: slot out of range 1..8");
  }
  return TapEvent{*parsed_room, static_cast<int>(s), ts->get<double>()};
}

json to_json(const TapEvent& tap) {
  return json{{"room", std::string(to_string(tap.room))}, {"slot", tap.slot}, {"ts", tap.timestamp}};
}

CubeState::CubeState(std::shared_ptr<const PolicyCorpus> corpus, CubeConfig config)
    : corpus_(std::move(corpus)), config_(config) {
  if (!corpus_) throw std::invalid_argument("CubeState requires a corpus");
  for (RoomId room : enum_values<RoomId>()) counters_[room] = {};
}

Contribution CubeState::effective(const DeviceProfile& profile) const {
  Contribution c;
  auto it = devices_.find(profile.device_id);
  const bool active = it != devices_.end() && it->second.active;
  if (selections_.contains(profile.device_id)) {
    c.data_types = profile.data_types;
    c.access = profile.access;
    c.usage = profile.usage;
    c.retention = {profile.retention};
  }
  if (active) merge_into(c, it->second.observed);
  return c;
}

void CubeState::adjust(RoomId room, const Contribution& c, bool contributing, int delta) {
  auto& k = counters_[room];
  for (auto a : c.access) k.access[enum_index(a)] += delta;
  for (auto u : c.usage) k.usage[enum_index(u)] += delta;
  for (auto r : c.regions) k.regions[enum_index(r)] += delta;
  for (auto r : c.retention) k.retention[enum_index(r)] += delta;
  if (contributing) k.contributing += delta;
}

template <class F>
void CubeState::update_device(const DeviceProfile& profile, F&& mutate) {
  const bool was = is_contributing(profile.device_id);
  const auto before = effective(profile);
  mutate();
  const bool now = is_contributing(profile.device_id);
  const auto after = effective(profile);
  if (was == now && before == after) return;
  for (RoomId room : profile.rooms) {
    adjust(room, before, was, -1);
    adjust(room, after, now, +1);
  }
}

ApplyResult CubeState::apply_notification(const notify::Notification& n, double now) {
  const auto* profile = corpus_->find(n.device_id);
  if (profile == nullptr) {
    ++unknown_devices_;
    return ApplyResult::UnknownDevice;
  }
  update_device(*profile, [&] {
    auto& rt = devices_[profile->device_id];
    rt.active = true;
    rt.last_activity = now;
    for (const auto& [tag, risk] : n.data_types) rt.observed.data_types.insert_or_assign(tag, risk);
    rt.observed.access.insert(n.data_access.begin(), n.data_access.end());
    rt.observed.usage.insert(n.data_usage.begin(), n.data_usage.end());
    rt.observed.retention.insert(n.retention_time);
    if (n.data_storage.kind == geo::GeoResult::Kind::Country) {
      rt.observed.regions.insert(n.data_storage.continent);
    }
  });
  return ApplyResult::Applied;
}

void CubeState::touch(std::string_view device_id, double now) {
  auto it = devices_.find(device_id);
  if (it != devices_.end() && it->second.active) it->second.last_activity = now;
}

void CubeState::apply_tap(const TapEvent& tap) {
  const auto* profile = corpus_->device_at(tap.room, tap.slot);
  if (profile == nullptr) return;
  update_device(*profile, [&] {
    if (auto it = selections_.find(profile->device_id); it != selections_.end()) {
      selections_.erase(it);
    } else {
      selections_.insert(profile->device_id);
    }
  });
}

void CubeState::tick(double now) {
  for (auto& [id, rt] : devices_) {
    if (!rt.active || now - rt.last_activity <= config_.led_timeout_seconds) continue;
    const auto* profile = corpus_->find(id);
    update_device(*profile, [&] {
      rt.active = false;
      rt.observed = {};
    });
  }
}

bool CubeState::is_active(std::string_view device_id) const {
  auto it = devices_.find(device_id);
  return it != devices_.end() && it->second.active;
}

bool CubeState::is_contributing(std::string_view device_id) const {
  return is_active(device_id) || selections_.contains(device_id);
}

std::optional<double> CubeState::last_activity(std::string_view device_id) const {
  auto it = devices_.find(device_id);
  if (it == devices_.end()) return std::nullopt;
  return it->second.last_activity;
}

Contribution CubeState::contribution(std::string_view device_id) const {
  const auto* profile = corpus_->find(device_id);
  return profile == nullptr ? Contribution{} : effective(*profile);
}

int CubeState::active_count(RoomId room) const { return counters_.at(room).contributing; }

PageView CubeState::page(RoomId room) const {
  PageView v;
  const auto& k = counters_.at(room);
  for (auto tag : enum_values<DataTypeTag>()) {
    v.type_face[tag].fill(RiskColor::Off);
  }
  const auto ids = corpus_->room_page(room);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto* profile = corpus_->find(ids[i]);
    auto& slot = v.top_face[i];
    slot.device_id = profile->device_id;
    slot.icon = profile->device_icon;
    slot.accent_color = profile->accent_color;
    slot.state = is_contributing(profile->device_id) ? SlotState::Lit : SlotState::Idle;
    if (slot.state == SlotState::Lit) {
      for (const auto& [tag, risk] : effective(*profile).data_types) {
        v.type_face[tag][i] = classify_risk(risk);
      }
    }
  }
  for (auto a : enum_values<AccessParty>()) v.access_face[a] = k.access[enum_index(a)] > 0;
  for (auto u : enum_values<UsagePurpose>()) v.usage_face[u] = k.usage[enum_index(u)] > 0;
  for (auto c : enum_values<geo::Continent>()) v.map_regions[c] = k.regions[enum_index(c)] > 0;
  for (auto r : enum_values<RetentionPeriod>()) v.time_bar[r] = k.retention[enum_index(r)] > 0;
  return v;
}

json CubeState::snapshot_json() const {
  const auto v = page(selected_room_);

  json top = json::array();
  for (std::size_t i = 0; i < v.top_face.size(); ++i) {
    const auto& s = v.top_face[i];
    json slot{{"slot", i + 1}, {"state", std::string(slot_state_name(s.state))}};
    if (s.state != SlotState::Empty) {
      slot["device_id"] = s.device_id;
      slot["icon"] = s.icon;
      slot["accent_color"] = s.accent_color;
    }
    top.push_back(std::move(slot));
  }

  json types = json::object();
  for (const auto& [tag, cells] : v.type_face) {
    json bar = json::array();
    for (auto c : cells) bar.push_back(std::string(to_string(c)));
    types[std::string(to_string(tag))] = std::move(bar);
  }
  json access = json::object();
  for (const auto& [a, on] : v.access_face) access[std::string(to_string(a))] = on_off(on);
  json usage = json::object();
  for (const auto& [u, on] : v.usage_face) usage[std::string(to_string(u))] = on_off(on);
  json regions = json::object();
  for (const auto& [c, on] : v.map_regions) regions[std::string(to_string(c))] = on_off(on);
  json time_bar = json::object();
  for (const auto& [r, on] : v.time_bar) time_bar[std::string(to_string(r))] = on_off(on);

  json rooms = json::array();
  for (RoomId room : enum_values<RoomId>()) {
    rooms.push_back({{"room", std::string(to_string(room))},
                     {"devices", corpus_->room_page(room).size()},
                     {"active", active_count(room)}});
  }

  json selected = json::array();
  for (const auto& id : selections_) selected.push_back(id);

  return json{
      {"selected_room", std::string(to_string(selected_room_))},
      {"rooms", std::move(rooms)},
      {"selections", std::move(selected)},
      {"faces",
       {{"T", std::move(top)},
        {"D", std::move(types)},
        {"A", std::move(access)},
        {"U", std::move(usage)},
        {"L", {{"map", std::move(regions)}, {"time_bar", std::move(time_bar)}}}}},
  };
}

bool CubeState::operator==(const CubeState& other) const {
  return *corpus_ == *other.corpus_ && selected_room_ == other.selected_room_ &&
         selections_ == other.selections_ && devices_ == other.devices_ &&
         counters_ == other.counters_;
}

}  // namespace privacycube::cube
