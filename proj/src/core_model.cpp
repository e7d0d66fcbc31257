#include "relim/core_model.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace relim {

char layer_char(Layer l) { return static_cast<char>('A' + layer_index(l)); }

Layer parse_layer(const std::string& s) {
  if (s == "A" || s == "a" || s == "0") return Layer::A;
  if (s == "B" || s == "b" || s == "1") return Layer::B;
  if (s == "C" || s == "c" || s == "2") return Layer::C;
  throw std::invalid_argument("unknown layer: " + s);
}

std::array<Layer, 2> other_layers(Layer l) {
  switch (l) {
    case Layer::A: return {Layer::B, Layer::C};
    case Layer::B: return {Layer::A, Layer::C};
    default: return {Layer::A, Layer::B};
  }
}

int side_of(Layer owner, Layer target) {
  if (owner == target) throw SameLayerPair("same-layer query");
  auto o = other_layers(owner);
  return o[0] == target ? 0 : 1;
}

std::string VertexId::str() const {
  std::ostringstream os;
  os << layer_char(layer) << index;
  return os.str();
}

std::string violation_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::NonPositiveSize: return "NonPositiveSize";
    case ViolationKind::NegativeRegime: return "NegativeRegime";
    case ViolationKind::SameLayerPair: return "SameLayerPair";
    case ViolationKind::IndexOutOfRange: return "IndexOutOfRange";
    case ViolationKind::TypeRangeViolation: return "TypeRangeViolation";
    case ViolationKind::SymmetryViolation: return "SymmetryViolation";
  }
  return "Unknown";
}

namespace {

std::string join_violations(const std::vector<Violation>& v) {
  std::string s = "instance failed validation:";
  for (const auto& x : v) s += " " + violation_name(x.kind) + "(" + x.detail + ")";
  return s;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> v)
    : std::runtime_error(join_violations(v)), violations(std::move(v)) {}

std::vector<Violation> validate(const InstanceData& data) {
  std::vector<Violation> out;
  if (data.n <= 0) out.push_back({ViolationKind::NonPositiveSize, "n=" + std::to_string(data.n)});
  if (data.r < 0) out.push_back({ViolationKind::NegativeRegime, "r=" + std::to_string(data.r)});
  // Both orientations of a pair must agree; collect what each orientation says.
  std::map<std::pair<VertexId, VertexId>, int> seen;
  for (const auto& p : data.pairs) {
    const std::string where = p.u.str() + "-" + p.v.str();
    if (p.u.layer == p.v.layer) {
      out.push_back({ViolationKind::SameLayerPair, where});
      continue;
    }
    if (p.u.index < 1 || p.u.index > data.n || p.v.index < 1 || p.v.index > data.n) {
      out.push_back({ViolationKind::IndexOutOfRange, where});
      continue;
    }
    if (p.type < 0 || p.type > data.r + 1) {
      out.push_back({ViolationKind::TypeRangeViolation, where + " type=" + std::to_string(p.type)});
      continue;
    }
    auto key = p.u < p.v ? std::make_pair(p.u, p.v) : std::make_pair(p.v, p.u);
    auto [it, fresh] = seen.emplace(key, p.type);
    if (!fresh && it->second != p.type) {
      out.push_back({ViolationKind::SymmetryViolation,
                     where + " " + std::to_string(it->second) + "!=" + std::to_string(p.type)});
    }
  }
  return out;
}

int NeighborhoodVector::at(std::int64_t index) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), std::make_pair(index, -1));
  if (it != entries.end() && it->first == index) return it->second;
  return default_type;
}

std::int64_t NeighborhoodVector::count(int t) const {
  std::int64_t c = 0;
  for (const auto& e : entries) c += (e.second == t);
  if (t == default_type) c += n - static_cast<std::int64_t>(entries.size());
  return c;
}

std::vector<int> NeighborhoodVector::dense() const {
  std::vector<int> out(static_cast<std::size_t>(n), default_type);
  for (const auto& e : entries) out[static_cast<std::size_t>(e.first - 1)] = e.second;
  return out;
}

TypedTripartiteGraph::TypedTripartiteGraph(std::int64_t n, int r) : n_(n), r_(r) {
  if (n <= 0) throw std::invalid_argument("n must be positive");
  if (r < 0) throw std::invalid_argument("r must be non-negative");
}

std::uint64_t TypedTripartiteGraph::pair_key(VertexId u, VertexId v) {
  if (v < u) std::swap(u, v);
  auto small = [](VertexId x) {
    return (static_cast<std::uint64_t>(x.layer) << 30) | static_cast<std::uint64_t>(x.index);
  };
  return (small(u) << 32) | small(v);
}

void TypedTripartiteGraph::check_vertex(VertexId v) const {
  if (n_ >= (1LL << 30)) throw OutOfRange("layer size exceeds 2^30");
  if (v.index < 1 || v.index > n_) throw OutOfRange("vertex " + v.str() + " outside [1, n]");
}

TypedTripartiteGraph TypedTripartiteGraph::from_data(const InstanceData& data) {
  auto v = relim::validate(data);
  if (!v.empty()) throw ValidationError(std::move(v));
  GraphBuilder b(data.n, data.r);
  for (const auto& p : data.pairs) b.set(p.u, p.v, p.type);
  return std::move(b).build();
}

int TypedTripartiteGraph::pair_type(VertexId u, VertexId v) const {
  if (u.layer == v.layer) throw SameLayerPair("pair " + u.str() + "-" + v.str() + " is within a layer");
  check_vertex(u);
  check_vertex(v);
  auto it = adj_.find(vertex_code(u));
  if (it == adj_.end()) return default_type();
  const auto& list = it->second;
  auto pos = std::lower_bound(list.begin(), list.end(), v,
                              [](const Partner& p, const VertexId& x) { return p.v < x; });
  if (pos != list.end() && pos->v == v) return pos->type;
  return default_type();
}

const std::vector<Partner>& TypedTripartiteGraph::partners(VertexId u) const {
  static const std::vector<Partner> empty;
  auto it = adj_.find(vertex_code(u));
  return it == adj_.end() ? empty : it->second;
}

std::vector<VertexId> TypedTripartiteGraph::touched_vertices() const {
  std::vector<VertexId> out;
  out.reserve(adj_.size());
  for (const auto& [code, _] : adj_) out.push_back(vertex_from_code(code));
  std::sort(out.begin(), out.end());
  return out;
}

InstanceData TypedTripartiteGraph::to_data() const {
  InstanceData d{n_, r_, {}};
  for (const auto& u : touched_vertices()) {
    for (const auto& p : partners(u)) {
      if (u < p.v) d.pairs.push_back({u, p.v, p.type});
    }
  }
  return d;
}

std::vector<Violation> TypedTripartiteGraph::validate() const { return relim::validate(to_data()); }

bool TypedTripartiteGraph::operator==(const TypedTripartiteGraph& o) const {
  if (n_ != o.n_ || r_ != o.r_ || types_.size() != o.types_.size()) return false;
  for (const auto& u : touched_vertices()) {
    const auto& a = partners(u);
    const auto& b = o.partners(u);
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].v != b[i].v || a[i].type != b[i].type) return false;
    }
  }
  return true;
}

GraphBuilder::GraphBuilder(std::int64_t n, int r) : g_(n, r) {}

void GraphBuilder::set(VertexId u, VertexId v, int type) {
  if (u.layer == v.layer) throw SameLayerPair("pair " + u.str() + "-" + v.str() + " is within a layer");
  g_.check_vertex(u);
  g_.check_vertex(v);
  if (type < 0 || type > g_.r_ + 1) throw std::invalid_argument("type out of range");
  auto key = TypedTripartiteGraph::pair_key(u, v);
  auto drop = [&](VertexId a, VertexId b) {
    auto& list = g_.adj_[vertex_code(a)];
    std::erase_if(list, [&](const Partner& p) { return p.v == b; });
    if (list.empty()) g_.adj_.erase(vertex_code(a));
  };
  if (type == g_.default_type()) {
    if (g_.types_.erase(key)) {
      drop(u, v);
      drop(v, u);
    }
    return;
  }
  auto [it, fresh] = g_.types_.emplace(key, static_cast<std::uint8_t>(type));
  if (!fresh) {
    it->second = static_cast<std::uint8_t>(type);
    for (auto& p : g_.adj_[vertex_code(u)]) if (p.v == v) p.type = type;
    for (auto& p : g_.adj_[vertex_code(v)]) if (p.v == u) p.type = type;
    return;
  }
  g_.adj_[vertex_code(u)].push_back({v, type});
  g_.adj_[vertex_code(v)].push_back({u, type});
}

int GraphBuilder::get(VertexId u, VertexId v) const {
  auto key = TypedTripartiteGraph::pair_key(u, v);
  auto it = g_.types_.find(key);
  return it == g_.types_.end() ? g_.default_type() : it->second;
}

bool GraphBuilder::has(VertexId u, VertexId v) const {
  return g_.types_.count(TypedTripartiteGraph::pair_key(u, v)) != 0;
}

TypedTripartiteGraph GraphBuilder::build() && {
  for (auto& [_, list] : g_.adj_) {
    std::sort(list.begin(), list.end(), [](const Partner& a, const Partner& b) { return a.v < b.v; });
  }
  return std::move(g_);
}

std::vector<VertexPair> channels_at_round(const TypedTripartiteGraph& g, int i) {
  if (i < 1 || i > g.r()) throw RoundOutOfRange("round " + std::to_string(i) + " outside [1, r]");
  const int limit = g.r() + 1 - i;
  std::vector<VertexPair> out;
  for (const auto& u : g.touched_vertices()) {
    for (const auto& p : g.partners(u)) {
      if (u < p.v && p.type <= limit) out.emplace_back(u, p.v);
    }
  }
  return out;
}

std::int64_t channel_degree(const TypedTripartiteGraph& g, VertexId u, int t, Layer target) {
  if (target == u.layer) throw SameLayerPair("channel-degree toward own layer");
  std::int64_t c = 0;
  for (const auto& p : g.partners(u)) c += (p.v.layer == target && p.type == t);
  return c;
}

std::int64_t total_channel_degree(const TypedTripartiteGraph& g, VertexId u) {
  std::int64_t c = 0;
  for (const auto& p : g.partners(u)) c += (p.type <= g.r());
  return c;
}

bool has_triangle(const TypedTripartiteGraph& g) {
  for (const auto& a : g.touched_vertices()) {
    if (a.layer != Layer::A) continue;
    std::vector<VertexId> bs, cs;
    for (const auto& p : g.partners(a)) {
      if (p.type != 0) continue;
      (p.v.layer == Layer::B ? bs : cs).push_back(p.v);
    }
    if (bs.empty() || cs.empty()) continue;
    for (const auto& b : bs) {
      for (const auto& p : g.partners(b)) {
        if (p.type == 0 && p.v.layer == Layer::C && std::binary_search(cs.begin(), cs.end(), p.v)) return true;
      }
    }
  }
  return false;
}

NeighborhoodVector neighborhood(const TypedTripartiteGraph& g, VertexId u, Layer target) {
  if (target == u.layer) throw SameLayerPair("neighborhood toward own layer");
  NeighborhoodVector nv{u, target, g.n(), g.default_type(), {}};
  for (const auto& p : g.partners(u)) {
    if (p.v.layer == target) nv.entries.emplace_back(p.v.index, p.type);
  }
  return nv;
}

}  // namespace relim
