#include "privacycube/flow/attribute.hpp"

namespace privacycube::flow {

Attribution attribute_flow(const policy::PolicyCorpus& corpus, const FlowRecord& flow) {
  const auto* profile =
      policy::lookup_profile(corpus, policy::Endpoint{flow.local_mac, flow.local_ip});
  if (profile == nullptr) return UnattributedFlow{flow};
  return AttributedFlow{profile->device_id, flow};
}

}  // namespace privacycube::flow
