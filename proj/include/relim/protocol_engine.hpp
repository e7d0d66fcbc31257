#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "relim/core_model.hpp"
#include "relim/hard_distributions.hpp"
#include "relim/rng.hpp"

namespace relim {

struct BandwidthViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ChannelViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RegimeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SupportTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Variable-length message; an empty Bits on a channel is not the same as no
// message at all.
using Bits = std::vector<bool>;

std::string bits_to_hex(const Bits& b);
Bits bits_from_hex(const std::string& hex, std::size_t len);
std::string bits_str(const Bits& b);

struct VertexInput {
  VertexId identity;
  std::int64_t n = 0;
  int r = 0;
  NeighborhoodPair vectors;  // toward other_layers(identity.layer)

  int type_to(VertexId w) const;
  const NeighborhoodVector& toward(Layer target) const { return vectors[side_of(identity.layer, target)]; }
  // Partners w with type(identity, w) <= limit, in (layer, index) order.
  std::vector<VertexId> partners_upto(int limit) const;
};

VertexInput make_input(const TypedTripartiteGraph& g, VertexId v);

// Round-indexed mailboxes keyed by sender. A missing sender is the null message.
struct Inbox {
  std::vector<std::map<VertexId, Bits>> rounds;

  const Bits* get(int round, VertexId from) const;
  void put(int round, VertexId from, Bits b);
};

class RandomnessView {
 public:
  RandomnessView(std::uint64_t seed, VertexId owner) : seed_(seed), owner_(owner) {}

  VertexId owner() const { return owner_; }
  Tape public_tape() const { return Tape(mix_keys({seed_, 0x5055424cULL})); }
  Tape pair_tape(VertexId other) const;
  Tape private_tape() const { return Tape(mix_keys({seed_, 0x50524956ULL, vertex_code(owner_)})); }

 private:
  std::uint64_t seed_;
  VertexId owner_;
};

// The three randomness sources of one execution, all derived from one seed.
struct Randomness {
  std::uint64_t seed = 0;
  RandomnessView view(VertexId v) const { return RandomnessView(seed, v); }
};

using MessageMap = std::map<VertexId, Bits>;
using MessageFn = std::function<MessageMap(int round, const VertexInput&, const Inbox&, const RandomnessView&)>;
using OutputFn = std::function<bool(const VertexInput&, const Inbox&, const RandomnessView&)>;
// Round-1 rule of a pair-local protocol: the message on a channel of the given
// type, or nullopt for silence.
using PairRule = std::function<std::optional<Bits>(int type)>;

struct ProtocolSpec {
  std::string name;
  int rounds = 0;
  int bandwidth = 1;
  MessageFn message_fn;
  OutputFn output_fn;
  bool deterministic = true;
  // Behaviour commutes with relabeling vertices inside a layer.
  bool identity_oblivious = false;
  // Round-1 message to w depends only on type(v, w), through pair_rule.
  bool pair_local = false;
  PairRule pair_rule;
  // exact_success averages over seeds 0..seed_space-1.
  std::int64_t seed_space = 1;
};

struct TranscriptKey {
  int round = 1;
  VertexId from, to;
  auto operator<=>(const TranscriptKey&) const = default;
};

struct Transcript {
  std::map<TranscriptKey, Bits> entries;

  std::size_t max_len() const;
  Transcript round(int i) const;
  bool operator==(const Transcript&) const = default;
};

struct SimOptions {
  // Replace the round-1 messages by these instead of calling message_fn.
  const Transcript* round1 = nullptr;
};

struct SimResult {
  Transcript transcript;
  std::int64_t n = 0;
  std::vector<bool> outputs;  // [layer * n + index - 1]

  bool output(VertexId v) const { return outputs.at(static_cast<std::size_t>(layer_index(v.layer) * n + v.index - 1)); }
  std::int64_t yes_count() const;
};

SimResult simulate(const ProtocolSpec& p, const TypedTripartiteGraph& g, const Randomness& rnd, SimOptions opt = {});

// Round-1 messages only, legality checked; used for first-round laws.
Transcript first_round(const ProtocolSpec& p, const TypedTripartiteGraph& g, const Randomness& rnd = {});

// Round-1 messages of a single vertex from an explicit input.
MessageMap round_one_messages(const ProtocolSpec& p, const VertexInput& in, const RandomnessView& view);

bool judge(const TypedTripartiteGraph& g, const std::vector<bool>& outputs);
inline bool judge(const TypedTripartiteGraph& g, const SimResult& res) { return judge(g, res.outputs); }

using InstanceSampler = std::function<TypedTripartiteGraph(Tape&)>;

struct SuccessEstimate {
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  double frequency = 0, lo = 0, hi = 0;  // Wilson 95%
};

std::pair<double, double> wilson_interval(std::int64_t k, std::int64_t n, double z = 1.959963984540054);

// Trial k draws its instance from Tape(mix_keys({seed, k})) and then its
// execution seed from the same tape; results merge in trial order.
SuccessEstimate estimate_success(const ProtocolSpec& p, const InstanceSampler& sampler, std::int64_t trials,
                                 std::uint64_t seed, int jobs = 1);

// Full weighted support, streamed.
struct EnumerableDistribution {
  std::int64_t size = 0;
  // One representative per relabeling orbit; only sound for
  // identity-oblivious protocols.
  bool symmetry_reduced = false;
  std::function<void(const std::function<void(const mpq_class&, const TypedTripartiteGraph&)>&)> for_each;
};

EnumerableDistribution point_mass(TypedTripartiteGraph g);

mpq_class exact_success(const ProtocolSpec& p, const EnumerableDistribution& dist, std::int64_t cap = 10'000'000);

}  // namespace relim
