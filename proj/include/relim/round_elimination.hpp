#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "relim/hard_distributions.hpp"
#include "relim/params.hpp"
#include "relim/protocol_engine.hpp"

namespace relim {

struct EmptyOrRareSupport : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SamplerStrategy { Enumerate, Reject };
enum class FallbackPolicy { FailTrial, DropMessageConditioning };

std::string strategy_name(SamplerStrategy s);
std::string fallback_name(FallbackPolicy f);

// Weighted phantom space for one conditional draw. `enumerate` is optional;
// without it the Enumerate strategy cannot run.
template <typename T>
struct PhantomSpace {
  std::function<T(Tape&)> draw;
  std::function<void(const std::function<void(double, const T&)>&)> enumerate;
  std::int64_t size = -1;  // support size when enumerable
};

struct SampleOutcome {
  bool accepted = false;
  std::int64_t attempts = 0;
};

// exact-enumeration draws from the exact conditional law; rejection(cap)
// either returns a correctly distributed sample or reports failure.
class ConditionalSampler {
 public:
  ConditionalSampler(SamplerStrategy s, std::int64_t cap) : strategy_(s), cap_(cap) {}

  template <typename T>
  std::optional<T> sample(const PhantomSpace<T>& space, const std::function<bool(const T&)>& accept, Tape& tape,
                          SampleOutcome* out = nullptr) const {
    SampleOutcome o;
    std::optional<T> got;
    if (strategy_ == SamplerStrategy::Enumerate) {
      if (!space.enumerate || space.size < 0 || space.size > cap_) {
        throw SupportTooLarge("phantom space is not enumerable below the cap " + std::to_string(cap_));
      }
      std::vector<std::pair<double, T>> kept;
      double mass = 0;
      space.enumerate([&](double w, const T& v) {
        ++o.attempts;
        if (w > 0 && accept(v)) {
          kept.emplace_back(w, v);
          mass += w;
        }
      });
      if (!kept.empty()) {
        double u = tape.unit() * mass;
        for (auto& [w, v] : kept) {
          if (u < w) {
            got = v;
            break;
          }
          u -= w;
        }
        if (!got) got = kept.back().second;
      }
    } else {
      for (std::int64_t a = 0; a < cap_; ++a) {
        ++o.attempts;
        T v = space.draw(tape);
        if (accept(v)) {
          got = std::move(v);
          break;
        }
      }
    }
    o.accepted = got.has_value();
    if (out) *out = o;
    return got;
  }

  SamplerStrategy strategy() const { return strategy_; }
  std::int64_t cap() const { return cap_; }

 private:
  SamplerStrategy strategy_;
  std::int64_t cap_;
};

struct EliminationCounters {
  std::atomic<std::int64_t> draws{0};
  std::atomic<std::int64_t> rejections{0};
  std::atomic<std::int64_t> fallbacks{0};
  std::atomic<std::int64_t> inconsistencies{0};
  void reset() { draws = rejections = fallbacks = inconsistencies = 0; }
};

struct EliminationConfig {
  ParamSchedule params;
  int level = 1;  // r: the source protocol runs on level-r instances
  SamplerStrategy strategy = SamplerStrategy::Reject;
  std::int64_t cap = 1'000'000;
  FallbackPolicy fallback = FallbackPolicy::FailTrial;
  std::shared_ptr<EliminationCounters> counters = std::make_shared<EliminationCounters>();
  // seeds enumerated by exact_success on the built protocol
  std::int64_t seed_space = 1;
};

// Messages x sends to the coordinates L_{t,i}^{x->Y} below y_i*; nullopt is
// silence on an available channel.
using MessageRecord = std::map<VertexId, std::optional<Bits>>;

struct PublicStage {
  std::array<std::vector<std::int64_t>, 3> ids;
  Auxiliaries aux;
  std::vector<MessageRecord> m_pub;  // per inner slot

  VertexId outer(VertexId x) const { return {x.layer, ids[layer_index(x.layer)][static_cast<std::size_t>(x.index - 1)]}; }
};

// Coordinates (outer vertices) of M_pub^x.
std::vector<VertexId> m_pub_coordinates(const PublicStage& pub, VertexId x);
// N_pub^x: every L-slot with its type.
std::vector<std::pair<VertexId, int>> n_pub(const Auxiliaries& aux, const PublicStage& pub, VertexId x);

// Stage 1 (public tape). With inner == nullptr each M_pub^x comes from a
// phantom whose inner input is drawn from D_in; otherwise the true inner
// input of x is used (the H1 and D-tilde-real public law).
PublicStage sample_public_stage(const ProtocolSpec& pi, const EliminationConfig& cfg, const TypedTripartiteGraph* inner,
                                Tape& pub);

enum class PairConditioning { TypeOnly, FullInner };

struct PairDraw {
  std::optional<Bits> message;
  bool fallback = false;
};

// Stage 2 for one ordered inner pair (x, y): M_in^x(y) conditioned on the
// public record of x plus either type(x, y) or the whole inner input of x.
PairDraw sample_pair_message(const ProtocolSpec& pi, const EliminationConfig& cfg, const PublicStage& pub, VertexId x,
                             VertexId y, int type_xy, const NeighborhoodPair* x_inner, PairConditioning mode,
                             Tape& tape);

// Everything inner vertex x knows after stages 1-3.
struct VertexStages {
  VertexId inner;
  VertexId outer;
  std::shared_ptr<const std::array<std::vector<std::int64_t>, 3>> ids;
  NeighborhoodPair input;                       // completed level-r input
  MessageMap sent;                              // x's round-1 messages
  std::map<VertexId, Bits> from_inner;          // round 1, keyed by outer identity
  std::map<VertexId, std::optional<Bits>> m_in; // sampled M_in^x, by outer identity
  MessageRecord pub_record;                     // M_pub^x
  bool fallback = false;
  bool consistent = true;
};

// Stage 3: complete x's input given M_pub^x and M_in^x; the remaining
// round-1 messages are re-evaluated from the completed input.
struct PrivateDraw {
  NeighborhoodPair input;
  bool fallback = false;
  bool consistent = true;
};
PrivateDraw sample_private_stage(const ProtocolSpec& pi, const EliminationConfig& cfg, const PublicStage& pub, VertexId x,
                                 const NeighborhoodPair& x_inner, const std::map<VertexId, std::optional<Bits>>& m_in,
                                 Tape& tape);

// Source of per-vertex stage state for the built protocol.
class StageProvider {
 public:
  virtual ~StageProvider() = default;
  virtual std::shared_ptr<const VertexStages> stages(const VertexInput& inner_input, const RandomnessView& view) const = 0;
};

// Stages 1-3 exactly as the built protocol draws them from its own tapes.
std::shared_ptr<StageProvider> sampling_provider(const ProtocolSpec& pi, const EliminationConfig& cfg);
// Stage state read off a true level-r instance whose inner graph is the input
// (for checking that rounds 2..r are simulated faithfully).
std::shared_ptr<StageProvider> true_instance_provider(const ProtocolSpec& pi, std::shared_ptr<const HardInstance> g);

ProtocolSpec build_pi_r_minus_1(const ProtocolSpec& pi, const EliminationConfig& cfg);
ProtocolSpec build_with_provider(const ProtocolSpec& pi, const EliminationConfig& cfg,
                                 std::shared_ptr<StageProvider> provider);

// Round-1 view of the source protocol at an outer vertex whose only channel is
// to `x` with the given type.
VertexInput lone_outer_input(VertexId u, VertexId x, int type, std::int64_t n, int r);

// Re-evaluates the source protocol's round-1 messages on the completed input
// and compares them with the sampled M_pub^x and M_in^x.
bool stages_consistent(const ProtocolSpec& pi, const VertexStages& st);

struct JointSample {
  HardInstance instance;  // level r, with embedding
  Transcript round1;
  bool fallback = false;
  bool consistent = true;
  bool collision = false;
};

JointSample dreal_sampler(const ProtocolSpec& pi, const ParamSchedule& p, int level, Tape& tape);

enum class Hybrid { DTildeReal, H1, H2, DFake };
std::string hybrid_name(Hybrid h);
Hybrid parse_hybrid(const std::string& s);

// For DFake the inner graph comes from the tape first, then the execution
// seed; the stage state then equals what the built protocol computes.
JointSample hybrid_sampler(Hybrid which, const ProtocolSpec& pi, const EliminationConfig& cfg, Tape& tape);

struct EliminationReport {
  int rounds_used = 0;
  int bandwidth_used = 0;
  int bandwidth_limit = 0;
  std::int64_t trials = 0;
  std::int64_t successes = 0;
  double success_frequency = 0;
  std::int64_t inconsistency_count = 0;
  std::int64_t fallback_count = 0;
  std::int64_t fallback_trials = 0;
  std::int64_t rejections = 0;
  std::int64_t draws = 0;
  // transcript re-evaluation over trials without any fallback
  std::int64_t consistency_checked = 0;
  std::int64_t consistency_failures = 0;
  double predicted_degradation = 0;
};

struct TrialRecord {
  std::int64_t trial = 0;
  bool triangle = false;
  bool success = false;
  bool fallback = false;
  std::int64_t yes_count = 0;
};

EliminationReport run_elimination(const ProtocolSpec& pi, const EliminationConfig& cfg, std::int64_t trials,
                                  std::uint64_t seed, std::vector<TrialRecord>* records = nullptr);

double degradation_bound(std::int64_t n_prev, std::int64_t s);

struct BandwidthBound {
  double log2_bound = 0;   // log2 of the bandwidth bound
  std::string bound;       // decimal, 30 significant digits
  bool precondition = false;  // n_r > r^(4 * 34^r)
};
BandwidthBound bandwidth_bound(const mpz_class& n_r, int r);

struct ChainStep {
  std::string label;
  std::string lhs, rhs;  // exact rationals or decimal strings
  bool holds = false;
};
struct ContradictionChain {
  int r = 0;
  mpz_class n0;
  bool premise_n0_gt_r4 = false;
  bool premise_32r_le_n0 = false;
  std::vector<ChainStep> steps;
  bool all_hold() const;
};
// The arithmetic of the final contradiction with s at the bound, evaluated
// step by step with n_0 = n_r^(1/34^r).
ContradictionChain contradiction_chain(int r, const mpz_class& n0);

}  // namespace relim
