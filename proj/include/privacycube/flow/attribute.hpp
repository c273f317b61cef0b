#pragma once

#include <string>
#include <variant>

#include "privacycube/flow/packet.hpp"
#include "privacycube/policy/corpus.hpp"

namespace privacycube::flow {

struct AttributedFlow {
  std::string device_id;
  FlowRecord flow;
};

struct UnattributedFlow {
  FlowRecord flow;
};

using Attribution = std::variant<AttributedFlow, UnattributedFlow>;

// Joins the flow's local endpoint (MAC first, then IP) against the corpus.
Attribution attribute_flow(const policy::PolicyCorpus& corpus, const FlowRecord& flow);

}  // namespace privacycube::flow
