#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace relim {

enum class Layer : std::uint8_t { A = 0, B = 1, C = 2 };

inline constexpr std::array<Layer, 3> kLayers{Layer::A, Layer::B, Layer::C};

inline int layer_index(Layer l) { return static_cast<int>(l); }
inline Layer layer_at(int i) { return static_cast<Layer>(i); }
char layer_char(Layer l);
Layer parse_layer(const std::string& s);

// The two layers other than `l`, in A < B < C order.
std::array<Layer, 2> other_layers(Layer l);
// Position of `target` inside other_layers(owner); throws on same layer.
int side_of(Layer owner, Layer target);

struct VertexId {
  Layer layer = Layer::A;
  std::int64_t index = 1;  // 1-based

  auto operator<=>(const VertexId&) const = default;
  std::string str() const;
};

inline std::uint64_t vertex_code(VertexId v) {
  return (static_cast<std::uint64_t>(v.layer) << 40) | static_cast<std::uint64_t>(v.index);
}
inline VertexId vertex_from_code(std::uint64_t c) {
  return VertexId{static_cast<Layer>(c >> 40), static_cast<std::int64_t>(c & ((1ULL << 40) - 1))};
}

struct SameLayerPair : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct OutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};
struct RoundOutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};

enum class ViolationKind {
  NonPositiveSize,
  NegativeRegime,
  SameLayerPair,
  IndexOutOfRange,
  TypeRangeViolation,
  SymmetryViolation,
};
std::string violation_name(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

struct PairEntry {
  VertexId u;
  VertexId v;
  int type = 0;
};

// Raw instance as it appears on disk: possibly redundant, possibly broken.
struct InstanceData {
  std::int64_t n = 0;
  int r = 0;
  std::vector<PairEntry> pairs;
};

std::vector<Violation> validate(const InstanceData& data);

struct ValidationError : std::runtime_error {
  std::vector<Violation> violations;
  explicit ValidationError(std::vector<Violation> v);
};

struct Partner {
  VertexId v;
  int type = 0;
};

// Length-n type vector from `owner` toward `target`, stored sparsely; entries
// not listed carry `default_type` (r + 1 in the host graph).
struct NeighborhoodVector {
  VertexId owner;
  Layer target = Layer::B;
  std::int64_t n = 0;
  int default_type = 1;
  std::vector<std::pair<std::int64_t, int>> entries;  // sorted by index

  int at(std::int64_t index) const;
  std::int64_t count(int t) const;
  std::vector<int> dense() const;
};

class TypedTripartiteGraph {
 public:
  TypedTripartiteGraph() = default;
  TypedTripartiteGraph(std::int64_t n, int r);

  static TypedTripartiteGraph from_data(const InstanceData& data);

  std::int64_t n() const { return n_; }
  int r() const { return r_; }
  int default_type() const { return r_ + 1; }

  int pair_type(VertexId u, VertexId v) const;
  // Non-default partners of u, sorted by (layer, index).
  const std::vector<Partner>& partners(VertexId u) const;
  std::vector<VertexId> touched_vertices() const;
  std::size_t non_default_count() const { return types_.size(); }

  InstanceData to_data() const;
  std::vector<Violation> validate() const;
  bool operator==(const TypedTripartiteGraph& o) const;

 private:
  friend class GraphBuilder;
  static std::uint64_t pair_key(VertexId u, VertexId v);
  void check_vertex(VertexId v) const;

  std::int64_t n_ = 0;
  int r_ = 0;
  std::unordered_map<std::uint64_t, std::uint8_t> types_;
  std::unordered_map<std::uint64_t, std::vector<Partner>> adj_;
};

// Graphs are frozen once built; samplers write through this.
class GraphBuilder {
 public:
  GraphBuilder(std::int64_t n, int r);
  void set(VertexId u, VertexId v, int type);
  int get(VertexId u, VertexId v) const;
  bool has(VertexId u, VertexId v) const;
  std::int64_t n() const { return g_.n_; }
  int r() const { return g_.r_; }
  TypedTripartiteGraph build() &&;

 private:
  TypedTripartiteGraph g_;
};

using VertexPair = std::pair<VertexId, VertexId>;

// Round i (1 <= i <= r) runs over C_{r+1-i}: the pairs of type <= r + 1 - i.
std::vector<VertexPair> channels_at_round(const TypedTripartiteGraph& g, int i);
std::int64_t channel_degree(const TypedTripartiteGraph& g, VertexId u, int t, Layer target);
std::int64_t total_channel_degree(const TypedTripartiteGraph& g, VertexId u);
bool has_triangle(const TypedTripartiteGraph& g);
NeighborhoodVector neighborhood(const TypedTripartiteGraph& g, VertexId u, Layer target);

}  // namespace relim
