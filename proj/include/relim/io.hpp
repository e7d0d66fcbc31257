#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "relim/core_model.hpp"
#include "relim/hard_distributions.hpp"
#include "relim/info_theory.hpp"
#include "relim/params.hpp"
#include "relim/protocol_engine.hpp"
#include "relim/round_elimination.hpp"

namespace relim {

using json = nlohmann::json;

// {"n", "r", "pairs": [[layer, index, layer, index, type], ...]}, non-default
// types only. Layers are written as "A"/"B"/"C"; 0/1/2 are accepted too.
json instance_to_json(const TypedTripartiteGraph& g);
InstanceData instance_data_from_json(const json& j);
// Throws ValidationError listing every violation.
TypedTripartiteGraph instance_from_json(const json& j);

json sidecar_json(const HardInstance& h, const Auxiliaries* aux, bool collision);

// One JSON object per line: {"round", "from", "to", "bits", "len"}.
std::string transcript_to_jsonl(const Transcript& t);
Transcript transcript_from_jsonl(std::istream& in);

// {"coords": [...], "entries": [[outcome..., prob], ...]}. String outcomes
// are coded per coordinate in order of first appearance.
JointTable joint_table_from_json(const json& j);
json joint_table_to_json(const JointTable& t);

// {"canonical": {"n0", "r"}} or {"n0", "levels": [{"n", "d", "alpha", "beta", "gamma"}, ...]}
ParamSchedule params_from_json(const json& j);
json params_to_json(const ParamSchedule& p);
json feasibility_to_json(const FeasibilityReport& r);

json report_to_json(const EliminationReport& r);

std::string vertex_str(VertexId v);
VertexId parse_vertex(const std::string& s);

}  // namespace relim
