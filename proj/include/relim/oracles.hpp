#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "relim/hard_distributions.hpp"
#include "relim/protocol_engine.hpp"
#include "relim/round_elimination.hpp"

namespace relim {

struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WeightedInstance {
  mpq_class weight;
  HardInstance instance;
};

// All n_0^3 * 8 equiprobable outcomes of G_0(n_0).
std::vector<WeightedInstance> g0_support(std::int64_t n0);
EnumerableDistribution enumerate_g0(std::int64_t n0);
// One canonical level-1 instance per G_0 edge pattern, weight 1/8 each.
// Valid only for protocols that ignore vertex identities.
EnumerableDistribution reduced_g1_support(const ParamSchedule& p);

mpq_class exact_g0_triangle_prob(std::int64_t n0);
// Pr[triangle | event]; throws ZeroProbabilityCondition on a null event.
mpq_class exact_g0_triangle_prob_given(std::int64_t n0, const std::function<bool(const HardInstance&)>& event);

// A vertex's full G_0 input: the type-0 partner index toward each of its two
// other layers, 0 for none.
struct G0InputKey {
  VertexId v;
  std::int64_t toward[2] = {0, 0};
  auto operator<=>(const G0InputKey&) const = default;
};
G0InputKey g0_input_key(const VertexInput& in);

struct ZeroRoundResult {
  mpq_class best;
  std::map<G0InputKey, bool> witness;  // Yes-entries; anything else says No
  std::int64_t strategies = 0;         // joint strategies evaluated
  bool exhaustive = false;             // plain enumeration, no reduction
};
// Exhaustive when the joint strategy space fits under the cap; otherwise a
// reduced search that first fixes every single-edge input to No (weakly
// dominant: such an input certifies that no triangle exists).
ZeroRoundResult zero_round_optimum(std::int64_t n0, std::int64_t cap = 1LL << 24);
// The 0-round protocol that answers from a strategy table.
ProtocolSpec table_protocol(const std::map<G0InputKey, bool>& yes);

// Exact laws over projection keys.
using Law = std::map<std::string, mpq_class>;
mpq_class exact_tvd(const Law& a, const Law& b);
void check_law(const Law& a);

struct EmpiricalTvd {
  double estimate = 0;
  std::int64_t trials = 0;
  std::size_t keys = 0;
  double bias_scale = 0;  // sqrt(keys / trials)
};
using KeySampler = std::function<std::string(Tape&)>;
EmpiricalTvd empirical_tvd(const KeySampler& a, const KeySampler& b, std::int64_t trials, std::uint64_t seed);
std::map<std::string, double> empirical_law(const KeySampler& s, std::int64_t trials, std::uint64_t seed);
double tvd_between(const Law& exact, const std::map<std::string, double>& empirical);

struct CollisionRate {
  std::int64_t trials = 0;
  std::int64_t collisions = 0;
  double frequency = 0;
  double sigma = 0;      // binomial standard error at the bound
  std::int64_t theta = 0;  // max per-layer draw count seen
  std::int64_t n = 0;
  double bound = 0;      // 1 - exp(-3 (theta - 1) theta / n_r)
};
CollisionRate collision_rate(const ParamSchedule& p, int level, std::int64_t trials, std::uint64_t seed, int jobs = 1);

// Exact Pr[some non-starred outer vertex is touched twice] under the
// auxiliary distribution: a sequential product over layers and inner vertices.
mpq_class exact_collision_probability(const ParamSchedule& p, int level);

// instance: inner types plus the overflow flag; transcript: inner-inner messages
// plus per-inner-vertex multisets of outer (type, message) both ways.
enum class Projection { Instance, Transcript, InstanceTranscript };
std::string projection_name(Projection pr);
Projection parse_projection(const std::string& s);

// Any non-starred outer vertex with two or more inner channel partners.
bool overflow_flag(const HardInstance& h);

// Shared by the exact and the empirical laws. Keys are invariant under
// relabeling outer vertices.
std::string projection_key(const HardInstance& h, const Transcript& round1, Projection pr);
std::string projection_key(const JointSample& s, Projection pr);

// Exact projected law of D_real (which = nullopt) or a hybrid, for protocols
// whose round-1 message on a pair depends on the pair type alone. Inner
// supports must be enumerable (level 1).
Law exact_pair_local_law(const ProtocolSpec& pi, const ParamSchedule& p, int level, std::optional<Hybrid> which,
                         Projection pr);

}  // namespace relim
