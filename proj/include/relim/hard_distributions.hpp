#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "relim/core_model.hpp"
#include "relim/params.hpp"
#include "relim/rng.hpp"

namespace relim {

struct ZeroProbabilityCondition : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HardInstance;

// Inner vertex (X, i) of the level-(r-1) graph sits at outer index ids[X][i-1].
struct InnerEmbedding {
  std::array<std::vector<std::int64_t>, 3> ids;
  std::shared_ptr<const HardInstance> inner;

  std::int64_t n_prev() const { return static_cast<std::int64_t>(ids[0].size()); }
  VertexId outer(VertexId inner_vertex) const;
  std::optional<VertexId> inner_of(VertexId outer_vertex) const;
};

struct HardInstance {
  TypedTripartiteGraph graph;
  std::array<std::int64_t, 3> starred{1, 1, 1};  // level 0: (a*, b*, c*)
  std::optional<InnerEmbedding> embedding;       // level >= 1

  int level() const { return graph.r(); }
};

// Two dense type vectors toward the other layers of the owner, in A < B < C
// order, as drawn from the marginal of one inner vertex.
struct DInSample {
  std::array<std::vector<int>, 2> types;
};

struct ConditionedDIn {
  DInSample rest;  // the conditioned coordinate is removed from its side
  std::int64_t attempts = 0;
};

struct SlotSet {
  std::array<std::vector<std::int64_t>, 3> by_layer;
};

struct VertexAux {
  std::vector<SlotSet> J;                    // alpha sets
  std::vector<SlotSet> K;                    // [side][t][i][j], flattened
  std::vector<std::vector<std::int64_t>> L;  // [side][t][i], flattened
};

struct Auxiliaries {
  std::int64_t n_prev = 0;
  int level = 1;
  std::int64_t alpha = 0, beta = 0, gamma = 0;
  std::vector<VertexAux> per_vertex;  // indexed by inner_slot()

  std::size_t inner_slot(VertexId x) const {
    return static_cast<std::size_t>(layer_index(x.layer) * n_prev + (x.index - 1));
  }
  const VertexAux& of(VertexId x) const { return per_vertex.at(inner_slot(x)); }
  std::size_t k_index(int side, int t, std::int64_t i, std::int64_t j) const;
  std::size_t l_index(int side, int t, std::int64_t i) const;
  const SlotSet& K(VertexId x, int side, int t, std::int64_t i, std::int64_t j) const {
    return of(x).K.at(k_index(side, t, i, j));
  }
  const std::vector<std::int64_t>& L(VertexId x, int side, int t, std::int64_t i) const {
    return of(x).L.at(l_index(side, t, i));
  }
  // Every outer index reserved for x toward `target`.
  std::vector<std::int64_t> reserved(VertexId x, Layer target) const;
};

struct GrTildeSample {
  HardInstance instance;
  Auxiliaries aux;
  bool collision = false;   // some outer vertex holds >= 2 channels
  std::int64_t theta = 0;   // largest per-layer count of drawn channel endpoints
};

// A complete level-r input of one inner vertex: vectors toward its two other
// layers, with outer identities.
using NeighborhoodPair = std::array<NeighborhoodVector, 2>;

HardInstance sample_g0(std::int64_t n0, Tape& tape);
HardInstance sample_level(const ParamSchedule& p, int level, Tape& tape);
HardInstance sample_gr(const ParamSchedule& p, int level, Tape& tape);
// Same construction with ids 1..n_{l-1} and consecutive fresh S-sets: one
// representative of the isomorphism class over a fixed inner graph.
HardInstance canonical_gr(const ParamSchedule& p, int level, std::shared_ptr<const HardInstance> inner);
GrTildeSample sample_gr_tilde(const ParamSchedule& p, int level, Tape& tape);

DInSample sample_d_in(const ParamSchedule& p, int level, Tape& tape);
ConditionedDIn sample_d_in_conditioned(const ParamSchedule& p, int level, int t, int side, std::int64_t position,
                                       Tape& tape, std::int64_t cap = 1'000'000);

// Building blocks shared with the round-elimination stages.
std::array<std::vector<std::int64_t>, 3> sample_ids(std::int64_t n, std::int64_t n_prev, Tape& tape);
Auxiliaries sample_aux(const ParamSchedule& p, int level, const std::array<std::vector<std::int64_t>, 3>& ids,
                       Tape& tape);

// Inner input of x (its level-(level-1) vectors) lifted to outer identities.
NeighborhoodPair lift_inner_input(const ParamSchedule& p, int level, VertexId x, const NeighborhoodPair& inner_input,
                                  const std::array<std::vector<std::int64_t>, 3>& ids);

// Steps 3(a)-(d) for one inner vertex: starred slots from `inner_input`, J and
// K slots from fresh marginal draws, L slots typed t, and a uniform completion
// to exactly d of every type t <= level.
NeighborhoodPair assemble_input(const ParamSchedule& p, int level, VertexId x, const NeighborhoodPair& inner_input,
                                const std::array<std::vector<std::int64_t>, 3>& ids, const Auxiliaries& aux,
                                Tape& tape, std::int64_t d_in_cap = 1'000'000);

// The inner input of x inside a level-(level-1) graph.
NeighborhoodPair inner_input_of(const TypedTripartiteGraph& inner, VertexId x);

// Per-type count of channels of x toward `target` among non-default entries.
std::vector<std::int64_t> type_histogram(const NeighborhoodVector& v, int r);

}  // namespace relim
