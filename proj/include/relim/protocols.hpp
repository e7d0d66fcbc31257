#pragma once

#include <string>
#include <vector>

#include "relim/protocol_engine.hpp"

namespace relim {

// Built-in protocols by name: all-no, always-yes, constant-message,
// type-broadcast, parity-of-type-0-count.
ProtocolSpec make_protocol(const std::string& name, int rounds, int bandwidth = 1);
std::vector<std::string> protocol_names();

// Yes iff the vertex has a type-0 pair into each of its two other layers.
bool local_wedge(const VertexInput& in);

}  // namespace relim
