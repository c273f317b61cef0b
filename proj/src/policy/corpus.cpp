#include "privacycube/policy/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "privacycube/core/json_fields.hpp"

namespace privacycube::policy {
namespace {

using nlohmann::json;
namespace jf = json_fields;

CorpusError schema_error(const jf::FieldError& e) {
  return CorpusError(CorpusError::Kind::SchemaError, e.path(), e.what());
}

DeviceProfile parse_profile(const json& obj, const std::string& path) {
  DeviceProfile p;
  p.device_id = jf::as_string(jf::require(obj, "device_id", path), jf::join(path, "device_id"));
  if (p.device_id.empty()) {
    throw jf::FieldError(jf::FieldError::Kind::BadValue, jf::join(path, "device_id"),
                         "must not be empty");
  }
  p.display_name =
      jf::as_string(jf::require(obj, "display_name", path), jf::join(path, "display_name"));
  p.device_icon =
      jf::as_string(jf::require(obj, "device_icon", path), jf::join(path, "device_icon"));
  p.policy_url = jf::as_string(jf::require(obj, "policy_url", path), jf::join(path, "policy_url"));
  p.accent_color =
      jf::as_string(jf::require(obj, "accent_color", path), jf::join(path, "accent_color"));

  const auto bindings_path = jf::join(path, "bindings");
  const auto& bindings = jf::as_array(jf::require(obj, "bindings", path), bindings_path);
  for (std::size_t i = 0; i < bindings.size(); ++i) {
    const auto bp = jf::index(bindings_path, i);
    auto b = parse_binding(jf::as_string(bindings[i], bp));
    if (!b) {
      throw jf::FieldError(jf::FieldError::Kind::BadValue, bp,
                           "expected \"mac:xx:xx:xx:xx:xx:xx\" or \"ip:a.b.c.d\"");
    }
    if (!p.bindings.insert(*b).second) {
      throw jf::FieldError(jf::FieldError::Kind::BadValue, bp, "duplicate binding");
    }
  }

  const auto types_path = jf::join(path, "data_types");
  const auto& types = jf::as_object(jf::require(obj, "data_types", path), types_path);
  for (const auto& [key, value] : types.items()) {
    const auto tp = jf::join(types_path, key);
    p.data_types.emplace(jf::enum_named<DataTypeTag>(key, tp), jf::as_enum<RiskAnnotation>(value, tp));
  }
  if (p.data_types.empty()) {
    throw jf::FieldError(jf::FieldError::Kind::BadValue, types_path, "must not be empty");
  }

  p.access = jf::as_enum_set<AccessParty>(jf::require(obj, "access", path), jf::join(path, "access"));
  p.usage = jf::as_enum_set<UsagePurpose>(jf::require(obj, "usage", path), jf::join(path, "usage"));
  p.retention = jf::as_enum<RetentionPeriod>(jf::require(obj, "retention", path),
                                             jf::join(path, "retention"));
  if (const auto* cadence = jf::optional_field(obj, "cadence")) {
    p.cadence = jf::as_enum<CollectionCadence>(*cadence, jf::join(path, "cadence"));
  }
  return p;
}

}  // namespace

CorpusError::CorpusError(Kind kind, std::string path, const std::string& message)
    : std::runtime_error(std::string(kind_name(kind)) + " at " + path + ": " + message),
      kind_(kind),
      path_(std::move(path)) {}

std::string_view kind_name(CorpusError::Kind kind) {
  switch (kind) {
    case CorpusError::Kind::SchemaError:
      return "SchemaError";
    case CorpusError::Kind::RoomCapacityExceeded:
      return "RoomCapacityExceeded";
    case CorpusError::Kind::DuplicateBinding:
      return "DuplicateBinding";
    case CorpusError::Kind::DanglingDeviceId:
      return "DanglingDeviceId";
  }
  return "CorpusError";
}

std::optional<Binding> parse_binding(std::string_view text) {
  if (text.starts_with("mac:")) {
    if (auto mac = MacAddress::parse(text.substr(4))) return Binding(*mac);
  } else if (text.starts_with("ip:")) {
    if (auto ip = Ipv4::parse(text.substr(3))) return Binding(*ip);
  }
  return std::nullopt;
}

std::string format_binding(const Binding& binding) {
  if (const auto* mac = std::get_if<MacAddress>(&binding)) return "mac:" + mac->to_string();
  return "ip:" + std::get<Ipv4>(binding).to_string();
}

PolicyCorpus PolicyCorpus::build(std::vector<DeviceProfile> profiles,
                                 std::vector<Ipv4Prefix> local_prefixes, RoomPages pages) {
  PolicyCorpus c;
  std::sort(profiles.begin(), profiles.end(),
            [](const auto& a, const auto& b) { return a.device_id < b.device_id; });
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    auto& p = profiles[i];
    const auto path = "devices[" + p.device_id + "]";
    if (p.data_types.empty()) {
      throw CorpusError(CorpusError::Kind::SchemaError, path + ".data_types", "must not be empty");
    }
    if (!c.by_id_.emplace(p.device_id, i).second) {
      throw CorpusError(CorpusError::Kind::SchemaError, path, "duplicate device_id");
    }
    p.rooms.clear();
    p.ordinal_per_room.clear();
    for (const auto& b : p.bindings) {
      bool fresh = true;
      if (const auto* mac = std::get_if<MacAddress>(&b)) {
        fresh = c.by_mac_.emplace(*mac, i).second;
      } else {
        fresh = c.by_ip_.emplace(std::get<Ipv4>(b), i).second;
      }
      if (!fresh) {
        throw CorpusError(CorpusError::Kind::DuplicateBinding, path + ".bindings",
                          format_binding(b) + " is already bound to another device");
      }
    }
  }

  for (auto& [room, page] : pages) {
    const auto path = "rooms." + std::string(privacycube::to_string(room));
    if (page.size() > kRoomCapacity) {
      throw CorpusError(CorpusError::Kind::RoomCapacityExceeded, path,
                        std::to_string(page.size()) + " devices, at most " +
                            std::to_string(kRoomCapacity) + " allowed");
    }
    for (std::size_t slot = 0; slot < page.size(); ++slot) {
      const auto it = c.by_id_.find(page[slot]);
      if (it == c.by_id_.end()) {
        throw CorpusError(CorpusError::Kind::DanglingDeviceId, path + "[" + std::to_string(slot) + "]",
                          "unknown device \"" + page[slot] + "\"");
      }
      auto& p = profiles[it->second];
      if (!p.rooms.insert(room).second) {
        throw CorpusError(CorpusError::Kind::SchemaError, path + "[" + std::to_string(slot) + "]",
                          "device \"" + page[slot] + "\" listed twice in one room");
      }
      p.ordinal_per_room[room] = static_cast<int>(slot) + 1;
    }
  }
  std::erase_if(pages, [](const auto& kv) { return kv.second.empty(); });

  c.profiles_ = std::move(profiles);
  c.local_prefixes_ = std::move(local_prefixes);
  c.pages_ = std::move(pages);
  return c;
}

std::span<const std::string> PolicyCorpus::room_page(RoomId room) const {
  auto it = pages_.find(room);
  if (it == pages_.end()) return {};
  return it->second;
}

const DeviceProfile* PolicyCorpus::find(std::string_view device_id) const {
  auto it = by_id_.find(device_id);
  return it == by_id_.end() ? nullptr : &profiles_[it->second];
}

const DeviceProfile* PolicyCorpus::device_at(RoomId room, int slot) const {
  const auto page = room_page(room);
  if (slot < 1 || static_cast<std::size_t>(slot) > page.size()) return nullptr;
  return find(page[static_cast<std::size_t>(slot) - 1]);
}

const DeviceProfile* PolicyCorpus::find_by_mac(const MacAddress& mac) const {
  auto it = by_mac_.find(mac);
  return it == by_mac_.end() ? nullptr : &profiles_[it->second];
}

const DeviceProfile* PolicyCorpus::find_by_ip(Ipv4 ip) const {
  auto it = by_ip_.find(ip);
  return it == by_ip_.end() ? nullptr : &profiles_[it->second];
}

bool PolicyCorpus::operator==(const PolicyCorpus& other) const {
  return profiles_ == other.profiles_ && local_prefixes_ == other.local_prefixes_ &&
         pages_ == other.pages_;
}

PolicyCorpus load_corpus(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw CorpusError(CorpusError::Kind::SchemaError, "$", e.what());
  }

  std::vector<DeviceProfile> profiles;
  std::vector<Ipv4Prefix> prefixes;
  PolicyCorpus::RoomPages pages;
  try {
    jf::as_object(doc, "$");
    const auto& pref = jf::as_array(jf::require(doc, "local_prefixes", ""), "local_prefixes");
    for (std::size_t i = 0; i < pref.size(); ++i) {
      const auto path = jf::index("local_prefixes", i);
      auto p = Ipv4Prefix::parse(jf::as_string(pref[i], path));
      if (!p) throw jf::FieldError(jf::FieldError::Kind::BadValue, path, "expected CIDR prefix");
      prefixes.push_back(*p);
    }

    const auto& rooms = jf::as_object(jf::require(doc, "rooms", ""), "rooms");
    for (const auto& [key, value] : rooms.items()) {
      const auto path = jf::join("rooms", key);
      const auto room = jf::enum_named<RoomId>(key, path);
      auto& page = pages[room];
      const auto& arr = jf::as_array(value, path);
      for (std::size_t i = 0; i < arr.size(); ++i) {
        page.push_back(jf::as_string(arr[i], jf::index(path, i)));
      }
    }

    const auto& devices = jf::as_array(jf::require(doc, "devices", ""), "devices");
    for (std::size_t i = 0; i < devices.size(); ++i) {
      profiles.push_back(parse_profile(devices[i], jf::index("devices", i)));
    }
  } catch (const jf::FieldError& e) {
    throw schema_error(e);
  }
  return PolicyCorpus::build(std::move(profiles), std::move(prefixes), std::move(pages));
}

PolicyCorpus load_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read corpus file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_corpus(ss.str());
}

std::string serialize_corpus(const PolicyCorpus& corpus) {
  json doc;
  json prefixes = json::array();
  for (const auto& p : corpus.local_prefixes()) prefixes.push_back(p.to_string());
  doc["local_prefixes"] = std::move(prefixes);

  json rooms = json::object();
  for (const auto& [room, page] : corpus.room_pages()) {
    rooms[std::string(privacycube::to_string(room))] = page;
  }
  doc["rooms"] = std::move(rooms);

  json devices = json::array();
  for (const auto& p : corpus.profiles()) {
    json d;
    d["device_id"] = p.device_id;
    d["display_name"] = p.display_name;
    d["device_icon"] = p.device_icon;
    d["policy_url"] = p.policy_url;
    d["accent_color"] = p.accent_color;
    json bindings = json::array();
    for (const auto& b : p.bindings) bindings.push_back(format_binding(b));
    d["bindings"] = std::move(bindings);
    json types = json::object();
    for (const auto& [tag, risk] : p.data_types) {
      types[std::string(privacycube::to_string(tag))] = std::string(privacycube::to_string(risk));
    }
    d["data_types"] = std::move(types);
    d["access"] = jf::enum_set_json(p.access);
    d["usage"] = jf::enum_set_json(p.usage);
    d["retention"] = std::string(privacycube::to_string(p.retention));
    if (p.cadence) d["cadence"] = std::string(privacycube::to_string(*p.cadence));
    devices.push_back(std::move(d));
  }
  doc["devices"] = std::move(devices);
  return doc.dump();
}

const DeviceProfile* lookup_profile(const PolicyCorpus& corpus, const Endpoint& endpoint) {
  if (endpoint.mac) {
    if (const auto* p = corpus.find_by_mac(*endpoint.mac)) return p;
  }
  if (endpoint.ip) return corpus.find_by_ip(*endpoint.ip);
  return nullptr;
}

}  // namespace privacycube::policy
