#include "relim/hard_distributions.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace relim {

VertexId InnerEmbedding::outer(VertexId x) const {
  const auto& v = ids[layer_index(x.layer)];
  if (x.index < 1 || x.index > static_cast<std::int64_t>(v.size())) throw OutOfRange("inner vertex " + x.str());
  return VertexId{x.layer, v[static_cast<std::size_t>(x.index - 1)]};
}

std::optional<VertexId> InnerEmbedding::inner_of(VertexId w) const {
  const auto& v = ids[layer_index(w.layer)];
  auto it = std::find(v.begin(), v.end(), w.index);
  if (it == v.end()) return std::nullopt;
  return VertexId{w.layer, static_cast<std::int64_t>(it - v.begin()) + 1};
}

std::size_t Auxiliaries::k_index(int side, int t, std::int64_t i, std::int64_t j) const {
  const std::int64_t types = level + 1;
  return static_cast<std::size_t>(((side * types + t) * n_prev + (i - 1)) * beta + (j - 1));
}

std::size_t Auxiliaries::l_index(int side, int t, std::int64_t i) const {
  const std::int64_t types = level + 1;
  return static_cast<std::size_t>((side * types + t) * n_prev + (i - 1));
}

std::vector<std::int64_t> Auxiliaries::reserved(VertexId x, Layer target) const {
  const auto& va = of(x);
  const int li = layer_index(target);
  const int s = side_of(x.layer, target);
  std::vector<std::int64_t> out;
  for (const auto& J : va.J) out.insert(out.end(), J.by_layer[li].begin(), J.by_layer[li].end());
  for (const auto& K : va.K) out.insert(out.end(), K.by_layer[li].begin(), K.by_layer[li].end());
  const std::size_t per_side = va.L.size() / 2;
  for (std::size_t k = 0; k < per_side; ++k) {
    const auto& L = va.L[s * per_side + k];
    out.insert(out.end(), L.begin(), L.end());
  }
  return out;
}

HardInstance sample_g0(std::int64_t n0, Tape& tape) {
  if (n0 < 1) throw std::invalid_argument("n_0 must be positive");
  HardInstance h;
  for (int l = 0; l < 3; ++l) h.starred[l] = static_cast<std::int64_t>(tape.below(static_cast<std::uint64_t>(n0))) + 1;
  GraphBuilder b(n0, 0);
  const VertexId a{Layer::A, h.starred[0]}, bb{Layer::B, h.starred[1]}, c{Layer::C, h.starred[2]};
  // Non-edges stay at the default type 1.
  if (tape.bit()) b.set(a, bb, 0);
  if (tape.bit()) b.set(a, c, 0);
  if (tape.bit()) b.set(bb, c, 0);
  h.graph = std::move(b).build();
  return h;
}

HardInstance sample_level(const ParamSchedule& p, int level, Tape& tape) {
  if (level == 0) return sample_g0(p.n(0), tape);
  return sample_gr(p, level, tape);
}

std::array<std::vector<std::int64_t>, 3> sample_ids(std::int64_t n, std::int64_t n_prev, Tape& tape) {
  std::array<std::vector<std::int64_t>, 3> ids;
  for (int l = 0; l < 3; ++l) {
    std::unordered_set<std::int64_t> blocked;
    ids[l] = draw_distinct(tape, n, n_prev, blocked);
  }
  return ids;
}

NeighborhoodPair inner_input_of(const TypedTripartiteGraph& inner, VertexId x) {
  auto o = other_layers(x.layer);
  return {neighborhood(inner, x, o[0]), neighborhood(inner, x, o[1])};
}

NeighborhoodPair lift_inner_input(const ParamSchedule& p, int level, VertexId x, const NeighborhoodPair& inner_input,
                                  const std::array<std::vector<std::int64_t>, 3>& ids) {
  const auto o = other_layers(x.layer);
  const VertexId owner{x.layer, ids[layer_index(x.layer)].at(static_cast<std::size_t>(x.index - 1))};
  NeighborhoodPair out;
  for (int s = 0; s < 2; ++s) {
    const auto& idv = ids[layer_index(o[s])];
    NeighborhoodVector nv{owner, o[s], p.n(level), level + 1, {}};
    auto dense = inner_input[s].dense();
    for (std::size_t j = 0; j < dense.size(); ++j) nv.entries.emplace_back(idv[j], dense[j]);
    std::sort(nv.entries.begin(), nv.entries.end());
    out[s] = std::move(nv);
  }
  return out;
}

std::vector<std::int64_t> type_histogram(const NeighborhoodVector& v, int r) {
  std::vector<std::int64_t> h(static_cast<std::size_t>(r + 1), 0);
  for (const auto& e : v.entries) {
    if (e.second <= r) ++h[static_cast<std::size_t>(e.second)];
  }
  return h;
}

namespace {

// Shared body of the recursive construction; draw_s(taken) returns d fresh
// outer indices and marks them taken.
HardInstance assemble_gr(const ParamSchedule& p, int level, std::shared_ptr<const HardInstance> inner,
                         std::array<std::vector<std::int64_t>, 3> ids,
                         const std::function<std::vector<std::int64_t>(std::unordered_set<std::int64_t>&)>& draw_s) {
  const std::int64_t n = p.n(level), n_prev = p.n(level - 1), d = p.d(level);
  GraphBuilder b(n, level);
  auto id_of = [&](VertexId x) { return VertexId{x.layer, ids[layer_index(x.layer)][x.index - 1]}; };

  // inner types are copied verbatim; the inner default r is a channel here
  for (int la = 0; la < 3; ++la) {
    for (int lb = la + 1; lb < 3; ++lb) {
      for (std::int64_t i = 1; i <= n_prev; ++i) {
        for (std::int64_t j = 1; j <= n_prev; ++j) {
          VertexId x{layer_at(la), i}, y{layer_at(lb), j};
          b.set(id_of(x), id_of(y), inner->graph.pair_type(x, y));
        }
      }
    }
  }

  for (int lx = 0; lx < 3; ++lx) {
    const Layer X = layer_at(lx);
    std::unordered_set<std::int64_t> taken(ids[lx].begin(), ids[lx].end());
    for (int ly = 0; ly < 3; ++ly) {
      if (ly == lx) continue;
      for (std::int64_t j = 1; j <= n_prev; ++j) {
        const VertexId y{layer_at(ly), j};
        auto hist = type_histogram(neighborhood(inner->graph, y, X), level);
        // the inner default (type level-1+1 = level) counts too
        hist.resize(static_cast<std::size_t>(level + 1), 0);
        const std::int64_t listed = static_cast<std::int64_t>(neighborhood(inner->graph, y, X).entries.size());
        hist[static_cast<std::size_t>(level)] += n_prev - listed;
        for (int t = 0; t <= level; ++t) {
          auto S = draw_s(taken);
          // consume in draw order, which is itself uniform
          const std::int64_t need = d - hist[static_cast<std::size_t>(t)];
          for (std::int64_t k = 0; k < need; ++k) b.set(id_of(y), VertexId{X, S[static_cast<std::size_t>(k)]}, t);
        }
      }
    }
  }

  HardInstance h;
  h.graph = std::move(b).build();
  h.embedding = InnerEmbedding{std::move(ids), std::move(inner)};
  return h;
}

void check_gr(const ParamSchedule& p, int level) {
  if (level < 1) throw std::invalid_argument("sample_gr needs level >= 1");
  p.require_samplable(level);
  auto rep = feasibility_check(p);
  if (!rep.levels.at(static_cast<std::size_t>(level - 1)).star_fit_ok) {
    throw InfeasibleParams("d below n_{l-1} at level " + std::to_string(level));
  }
}

}  // namespace

HardInstance sample_gr(const ParamSchedule& p, int level, Tape& tape) {
  check_gr(p, level);
  auto inner = std::make_shared<HardInstance>(sample_level(p, level - 1, tape));
  const std::int64_t n = p.n(level), d = p.d(level);
  auto ids = sample_ids(n, p.n(level - 1), tape);
  return assemble_gr(p, level, std::move(inner), std::move(ids),
                     [&](std::unordered_set<std::int64_t>& taken) { return draw_distinct(tape, n, d, taken); });
}

HardInstance canonical_gr(const ParamSchedule& p, int level, std::shared_ptr<const HardInstance> inner) {
  check_gr(p, level);
  const std::int64_t n_prev = p.n(level - 1), d = p.d(level);
  std::array<std::vector<std::int64_t>, 3> ids;
  for (auto& v : ids) {
    for (std::int64_t i = 1; i <= n_prev; ++i) v.push_back(i);
  }
  return assemble_gr(p, level, std::move(inner), std::move(ids), [&](std::unordered_set<std::int64_t>& taken) {
    // taken is always {1..k} here
    std::vector<std::int64_t> s;
    const auto c = static_cast<std::int64_t>(taken.size());
    for (std::int64_t k = 1; k <= d; ++k) {
      s.push_back(c + k);
      taken.insert(c + k);
    }
    return s;
  });
}

Auxiliaries sample_aux(const ParamSchedule& p, int level, const std::array<std::vector<std::int64_t>, 3>& ids,
                       Tape& tape) {
  const std::int64_t n = p.n(level), n_prev = p.n(level - 1);
  Auxiliaries aux;
  aux.n_prev = n_prev;
  aux.level = level;
  aux.alpha = p.alpha(level);
  aux.beta = p.beta(level);
  aux.gamma = p.gamma(level);
  const int types = level + 1;

  std::array<std::unordered_set<std::int64_t>, 3> taken;
  for (int l = 0; l < 3; ++l) taken[l].insert(ids[l].begin(), ids[l].end());

  aux.per_vertex.resize(static_cast<std::size_t>(3 * n_prev));
  for (int lx = 0; lx < 3; ++lx) {
    const auto o = other_layers(layer_at(lx));
    for (std::int64_t i = 1; i <= n_prev; ++i) {
      auto& va = aux.per_vertex[aux.inner_slot(VertexId{layer_at(lx), i})];
      va.J.resize(static_cast<std::size_t>(aux.alpha));
      for (auto& J : va.J) {
        for (int s = 0; s < 2; ++s) {
          const int ly = layer_index(o[s]);
          J.by_layer[ly] = draw_distinct(tape, n, n_prev, taken[ly]);
        }
      }
      va.K.resize(static_cast<std::size_t>(2 * types * n_prev * aux.beta));
      for (int s = 0; s < 2; ++s) {
        for (int t = 0; t < types; ++t) {
          for (std::int64_t ii = 1; ii <= n_prev; ++ii) {
            for (std::int64_t j = 1; j <= aux.beta; ++j) {
              auto& K = va.K[aux.k_index(s, t, ii, j)];
              const int ly = layer_index(o[s]), lz = layer_index(o[1 - s]);
              K.by_layer[ly] = draw_distinct(tape, n, n_prev - 1, taken[ly]);
              K.by_layer[lz] = draw_distinct(tape, n, n_prev, taken[lz]);
            }
          }
        }
      }
      va.L.resize(static_cast<std::size_t>(2 * types * n_prev));
      for (int s = 0; s < 2; ++s) {
        for (int t = 0; t < types; ++t) {
          for (std::int64_t ii = 1; ii <= n_prev; ++ii) {
            const int ly = layer_index(o[s]);
            va.L[aux.l_index(s, t, ii)] = draw_distinct(tape, n, aux.gamma, taken[ly]);
          }
        }
      }
    }
  }
  return aux;
}

DInSample sample_d_in(const ParamSchedule& p, int level, Tape& tape) {
  auto h = sample_level(p, level, tape);
  const VertexId a1{Layer::A, 1};
  return DInSample{{neighborhood(h.graph, a1, Layer::B).dense(), neighborhood(h.graph, a1, Layer::C).dense()}};
}

ConditionedDIn sample_d_in_conditioned(const ParamSchedule& p, int level, int t, int side, std::int64_t position,
                                       Tape& tape, std::int64_t cap) {
  if (side < 0 || side > 1) throw std::invalid_argument("side must be 0 or 1");
  if (position < 1 || position > p.n(level)) throw OutOfRange("conditioned position outside [1, n]");
  for (std::int64_t a = 1; a <= cap; ++a) {
    auto s = sample_d_in(p, level, tape);
    auto& v = s.types[static_cast<std::size_t>(side)];
    if (v[static_cast<std::size_t>(position - 1)] != t) continue;
    v.erase(v.begin() + (position - 1));
    return ConditionedDIn{std::move(s), a};
  }
  throw ZeroProbabilityCondition("no draw with type " + std::to_string(t) + " at the conditioned slot within " +
                                 std::to_string(cap) + " attempts");
}

NeighborhoodPair assemble_input(const ParamSchedule& p, int level, VertexId x, const NeighborhoodPair& inner_input,
                                const std::array<std::vector<std::int64_t>, 3>& ids, const Auxiliaries& aux,
                                Tape& tape, std::int64_t d_in_cap) {
  const std::int64_t n = p.n(level), n_prev = p.n(level - 1), d = p.d(level);
  const int types = level + 1;
  const auto o = other_layers(x.layer);
  std::array<std::unordered_map<std::int64_t, int>, 2> fixed;

  auto stars = lift_inner_input(p, level, x, inner_input, ids);
  for (int s = 0; s < 2; ++s) {
    for (const auto& e : stars[s].entries) fixed[s][e.first] = e.second;
  }

  const auto& va = aux.of(x);
  for (const auto& J : va.J) {
    auto din = sample_d_in(p, level - 1, tape);
    for (int s = 0; s < 2; ++s) {
      const auto& slots = J.by_layer[layer_index(o[s])];
      for (std::size_t m = 0; m < slots.size(); ++m) fixed[s][slots[m]] = din.types[s][m];
    }
  }
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < types; ++t) {
      for (std::int64_t i = 1; i <= n_prev; ++i) {
        for (std::int64_t j = 1; j <= aux.beta; ++j) {
          const auto& K = aux.K(x, s, t, i, j);
          auto c = sample_d_in_conditioned(p, level - 1, t, s, i, tape, d_in_cap);
          for (int q = 0; q < 2; ++q) {
            const auto& slots = K.by_layer[layer_index(o[q])];
            for (std::size_t m = 0; m < slots.size(); ++m) fixed[q][slots[m]] = c.rest.types[q][m];
          }
        }
      }
    }
  }
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < types; ++t) {
      for (std::int64_t i = 1; i <= n_prev; ++i) {
        for (auto w : aux.L(x, s, t, i)) fixed[s][w] = t;
      }
    }
  }

  const VertexId owner = stars[0].owner;
  NeighborhoodPair out;
  for (int s = 0; s < 2; ++s) {
    std::vector<std::int64_t> have(static_cast<std::size_t>(types), 0);
    std::unordered_set<std::int64_t> blocked;
    blocked.reserve(fixed[s].size() * 2);
    for (const auto& [w, t] : fixed[s]) {
      blocked.insert(w);
      if (t < types) ++have[static_cast<std::size_t>(t)];
    }
    NeighborhoodVector nv{owner, o[s], n, level + 1, {}};
    nv.entries.reserve(static_cast<std::size_t>(types * d));
    for (const auto& [w, t] : fixed[s]) {
      if (t < types) nv.entries.emplace_back(w, t);
    }
    for (int t = 0; t < types; ++t) {
      const std::int64_t need = d - have[static_cast<std::size_t>(t)];
      if (need < 0) {
        throw InfeasibleParams("completion impossible: " + std::to_string(have[static_cast<std::size_t>(t)]) +
                               " fixed slots of type " + std::to_string(t) + " exceed d = " + std::to_string(d));
      }
      if (static_cast<std::int64_t>(blocked.size()) + need > n) throw InfeasibleParams("no room for completion");
      for (auto w : draw_distinct(tape, n, need, blocked)) nv.entries.emplace_back(w, t);
    }
    std::sort(nv.entries.begin(), nv.entries.end());
    out[s] = std::move(nv);
  }
  return out;
}

GrTildeSample sample_gr_tilde(const ParamSchedule& p, int level, Tape& tape) {
  if (level < 1) throw std::invalid_argument("sample_gr_tilde needs level >= 1");
  p.require_samplable(level);
  auto rep = feasibility_check(p);
  const auto& lr = rep.levels.at(static_cast<std::size_t>(level - 1));
  if (!lr.layer_budget_ok || !lr.completion_ok) {
    std::string why;
    for (const auto& v : lr.violations) why += v + "; ";
    throw InfeasibleParams("G-tilde infeasible: " + why);
  }
  auto inner = std::make_shared<HardInstance>(sample_level(p, level - 1, tape));
  const std::int64_t n = p.n(level), n_prev = p.n(level - 1);
  auto ids = sample_ids(n, n_prev, tape);
  auto aux = sample_aux(p, level, ids, tape);

  GrTildeSample out;
  GraphBuilder b(n, level);
  std::array<std::unordered_map<std::int64_t, int>, 3> touches;
  std::array<std::unordered_set<std::int64_t>, 3> starred;
  for (int l = 0; l < 3; ++l) starred[l].insert(ids[l].begin(), ids[l].end());

  for (int lx = 0; lx < 3; ++lx) {
    for (std::int64_t i = 1; i <= n_prev; ++i) {
      const VertexId x{layer_at(lx), i};
      auto input = assemble_input(p, level, x, inner_input_of(inner->graph, x), ids, aux, tape);
      for (int s = 0; s < 2; ++s) {
        const int ly = layer_index(input[s].target);
        for (const auto& [w, t] : input[s].entries) {
          b.set(input[s].owner, VertexId{input[s].target, w}, t);
          if (!starred[ly].count(w)) ++touches[ly][w];
        }
      }
    }
  }
  for (int l = 0; l < 3; ++l) {
    std::int64_t drawn = n_prev;
    for (const auto& [w, c] : touches[l]) {
      drawn += c;
      if (c >= 2) out.collision = true;
    }
    out.theta = std::max(out.theta, drawn);
  }
  out.instance.graph = std::move(b).build();
  out.instance.embedding = InnerEmbedding{std::move(ids), std::move(inner)};
  out.aux = std::move(aux);
  return out;
}

}  // namespace relim
