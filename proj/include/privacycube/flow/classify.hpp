#pragma once

#include <optional>
#include <vector>

#include "privacycube/core/net.hpp"
#include "privacycube/flow/packet.hpp"

namespace privacycube::flow {

// RFC1918 plus any extra prefixes from the corpus.
class LocalNetwork {
 public:
  explicit LocalNetwork(std::vector<Ipv4Prefix> extra = {}) : extra_(std::move(extra)) {}

  bool contains(Ipv4 ip) const {
    if (is_rfc1918(ip)) return true;
    for (const auto& p : extra_) {
      if (p.contains(ip)) return true;
    }
    return false;
  }

 private:
  std::vector<Ipv4Prefix> extra_;
};

struct ClassifiedEndpoints {
  Ipv4 local_ip;
  Ipv4 remote_ip;
  Direction direction;

  bool operator==(const ClassifiedEndpoints&) const = default;
};

// nullopt (Drop) when both or neither endpoint is local.
std::optional<ClassifiedEndpoints> classify_endpoints(Ipv4 src, Ipv4 dst,
                                                      const LocalNetwork& local);

}  // namespace privacycube::flow
