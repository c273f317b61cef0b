#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "privacycube/core/net.hpp"
#include "privacycube/policy/types.hpp"

namespace privacycube::policy {

using Binding = std::variant<MacAddress, Ipv4>;

// "mac:aa:bb:cc:dd:ee:ff" or "ip:10.0.0.12".
std::optional<Binding> parse_binding(std::string_view text);
std::string format_binding(const Binding& binding);

struct DeviceProfile {
  std::string device_id;
  std::string display_name;
  std::string device_icon;
  std::string policy_url;
  std::string accent_color;
  // Derived from the corpus room pages when the corpus is built.
  std::set<RoomId> rooms;
  std::map<RoomId, int> ordinal_per_room;
  std::set<Binding> bindings;
  std::map<DataTypeTag, RiskAnnotation> data_types;
  std::set<AccessParty> access;
  std::set<UsagePurpose> usage;
  RetentionPeriod retention = RetentionPeriod::EventBased;
  std::optional<CollectionCadence> cadence;

  bool operator==(const DeviceProfile&) const = default;
};

class CorpusError : public std::runtime_error {
 public:
  enum class Kind { SchemaError, RoomCapacityExceeded, DuplicateBinding, DanglingDeviceId };

  CorpusError(Kind kind, std::string path, const std::string& message);

  Kind kind() const { return kind_; }
  // JSON-style location of the offending field, e.g. "devices[3].data_types".
  const std::string& path() const { return path_; }

 private:
  Kind kind_;
  std::string path_;
};

std::string_view kind_name(CorpusError::Kind kind);

struct Endpoint {
  std::optional<MacAddress> mac;
  std::optional<Ipv4> ip;
};

// Validated, immutable set of device profiles plus per-room pages.
class PolicyCorpus {
 public:
  using RoomPages = std::map<RoomId, std::vector<std::string>>;

  // Validates and indexes. Profile rooms/ordinals are recomputed from `pages`.
  static PolicyCorpus build(std::vector<DeviceProfile> profiles,
                            std::vector<Ipv4Prefix> local_prefixes, RoomPages pages);

  // Sorted by device_id.
  const std::vector<DeviceProfile>& profiles() const { return profiles_; }
  const std::vector<Ipv4Prefix>& local_prefixes() const { return local_prefixes_; }
  const RoomPages& room_pages() const { return pages_; }
  std::span<const std::string> room_page(RoomId room) const;

  const DeviceProfile* find(std::string_view device_id) const;
  // `slot` is 1-based; nullptr for an empty or out-of-range slot.
  const DeviceProfile* device_at(RoomId room, int slot) const;

  const DeviceProfile* find_by_mac(const MacAddress& mac) const;
  const DeviceProfile* find_by_ip(Ipv4 ip) const;

  bool operator==(const PolicyCorpus& other) const;

 private:
  PolicyCorpus() = default;

  std::vector<DeviceProfile> profiles_;
  std::vector<Ipv4Prefix> local_prefixes_;
  RoomPages pages_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
  std::unordered_map<MacAddress, std::size_t> by_mac_;
  std::unordered_map<Ipv4, std::size_t> by_ip_;
};

PolicyCorpus load_corpus(std::string_view document);
PolicyCorpus load_corpus_file(const std::string& path);

// Canonical form: sorted keys, compact, devices ordered by id, enum arrays in
// declaration order.
std::string serialize_corpus(const PolicyCorpus& corpus);

// MAC match wins over IP match. nullptr means Unknown.
const DeviceProfile* lookup_profile(const PolicyCorpus& corpus, const Endpoint& endpoint);

}  // namespace privacycube::policy
