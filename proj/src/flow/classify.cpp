#include "privacycube/flow/classify.hpp"

namespace privacycube::flow {

std::optional<ClassifiedEndpoints> classify_endpoints(Ipv4 src, Ipv4 dst,
                                                      const LocalNetwork& local) {
  const bool src_local = local.contains(src);
  const bool dst_local = local.contains(dst);
  if (src_local == dst_local) return std::nullopt;
  if (src_local) return ClassifiedEndpoints{src, dst, Direction::Outbound};
  return ClassifiedEndpoints{dst, src, Direction::Inbound};
}

}  // namespace privacycube::flow
