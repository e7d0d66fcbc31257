#pragma once

// Structural oracles written against the public graph API only, so they do
// not share code paths with the samplers they check.

#include <chrono>
#include <set>
#include <string>
#include <vector>

#include "relim/core_model.hpp"
#include "relim/hard_distributions.hpp"
#include "relim/params.hpp"

namespace relim_test {

using namespace relim;

inline std::vector<std::int64_t> types_toward(const TypedTripartiteGraph& g, VertexId y, Layer x, int r) {
  std::vector<std::int64_t> h(static_cast<std::size_t>(r + 2), 0);
  for (std::int64_t w = 1; w <= g.n(); ++w) ++h[static_cast<std::size_t>(g.pair_type(y, VertexId{x, w}))];
  return h;
}

// Recursive-distribution invariants: every inner vertex has exactly d partners
// of each channel type toward each other layer, outer vertices hold at most
// one channel, and the outer graph has a triangle iff the inner one does.
inline std::vector<std::string> gr_structure_failures(const ParamSchedule& p, int level, const HardInstance& h,
                                                      bool outer_degree = true) {
  std::vector<std::string> bad;
  const auto& g = h.graph;
  if (!h.embedding) return {"no embedding"};
  const auto& emb = *h.embedding;
  const std::int64_t d = p.d(level);
  std::array<std::set<std::int64_t>, 3> inner_ids;
  for (int l = 0; l < 3; ++l) inner_ids[l].insert(emb.ids[l].begin(), emb.ids[l].end());
  for (int l = 0; l < 3; ++l) {
    if (static_cast<std::int64_t>(inner_ids[l].size()) != p.n(level - 1)) bad.push_back("starred ids repeat");
    for (auto id : inner_ids[l]) {
      const VertexId y{layer_at(l), id};
      for (Layer x : other_layers(y.layer)) {
        auto h = types_toward(g, y, x, level);
        for (int t = 0; t <= level; ++t) {
          if (h[static_cast<std::size_t>(t)] != d) {
            bad.push_back(y.str() + " has " + std::to_string(h[static_cast<std::size_t>(t)]) + " pairs of type " +
                          std::to_string(t) + " toward " + layer_char(x));
          }
        }
      }
    }
  }
  if (outer_degree) {
    for (auto v : g.touched_vertices()) {
      if (inner_ids[layer_index(v.layer)].count(v.index)) continue;
      std::int64_t c = 0;
      for (const auto& pt : g.partners(v)) c += pt.type <= g.r();
      if (c > 1) bad.push_back("outer " + v.str() + " holds " + std::to_string(c) + " channels");
    }
  }
  if (has_triangle(g) != has_triangle(emb.inner->graph)) bad.push_back("triangle status differs from the inner graph");
  // the inner graph sits verbatim on the starred ids
  for (int a = 0; a < 3 && bad.empty(); ++a) {
    for (int b = a + 1; b < 3; ++b) {
      for (std::int64_t i = 1; i <= emb.n_prev(); ++i) {
        for (std::int64_t j = 1; j <= emb.n_prev(); ++j) {
          const VertexId x{layer_at(a), i}, y{layer_at(b), j};
          if (g.pair_type(emb.outer(x), emb.outer(y)) != emb.inner->graph.pair_type(x, y)) {
            bad.push_back("inner pair " + x.str() + y.str() + " changed");
          }
        }
      }
    }
  }
  return bad;
}

// Auxiliary sets: pairwise disjoint within a layer, disjoint from the starred
// ids, inside [1, n], with the prescribed cardinalities.
inline std::vector<std::string> aux_failures(const ParamSchedule& p, int level, const GrTildeSample& s) {
  std::vector<std::string> bad;
  const auto& aux = s.aux;
  const auto& ids = s.instance.embedding->ids;
  const std::int64_t n = p.n(level), np = p.n(level - 1);
  const std::int64_t alpha = p.alpha(level), beta = p.beta(level), gamma = p.gamma(level);
  const std::size_t types = static_cast<std::size_t>(level + 1);
  std::array<std::set<std::int64_t>, 3> used;
  for (int l = 0; l < 3; ++l) used[l].insert(ids[l].begin(), ids[l].end());
  auto claim = [&](int l, const std::vector<std::int64_t>& v, const std::string& what) {
    for (auto w : v) {
      if (w < 1 || w > n) bad.push_back(what + " index out of range");
      if (!used[l].insert(w).second) bad.push_back(what + " reuses " + std::string(1, "ABC"[l]) + std::to_string(w));
    }
  };
  for (int lx = 0; lx < 3; ++lx) {
    const auto o = other_layers(layer_at(lx));
    for (std::int64_t i = 1; i <= np; ++i) {
      const VertexId x{layer_at(lx), i};
      const auto& va = aux.of(x);
      if (va.J.size() != static_cast<std::size_t>(alpha)) bad.push_back(x.str() + ": |J| != alpha");
      if (va.K.size() != 2 * types * static_cast<std::size_t>(np * beta)) bad.push_back(x.str() + ": |K| wrong");
      if (va.L.size() != 2 * types * static_cast<std::size_t>(np)) bad.push_back(x.str() + ": |L| wrong");
      for (const auto& J : va.J) {
        for (int q = 0; q < 2; ++q) {
          const int ly = layer_index(o[q]);
          if (static_cast<std::int64_t>(J.by_layer[ly].size()) != np) bad.push_back(x.str() + ": J slot size");
          claim(ly, J.by_layer[ly], "J");
        }
      }
      for (int side = 0; side < 2; ++side) {
        for (std::size_t t = 0; t < types; ++t) {
          for (std::int64_t ii = 1; ii <= np; ++ii) {
            for (std::int64_t j = 1; j <= beta; ++j) {
              const auto& K = aux.K(x, side, static_cast<int>(t), ii, j);
              const int ly = layer_index(o[side]), lz = layer_index(o[1 - side]);
              if (static_cast<std::int64_t>(K.by_layer[ly].size()) != np - 1 ||
                  static_cast<std::int64_t>(K.by_layer[lz].size()) != np) {
                bad.push_back(x.str() + ": K slot size");
              }
              claim(ly, K.by_layer[ly], "K");
              claim(lz, K.by_layer[lz], "K");
            }
            const auto& L = aux.L(x, side, static_cast<int>(t), ii);
            if (static_cast<std::int64_t>(L.size()) != gamma) bad.push_back(x.str() + ": |L slot| != gamma");
            claim(layer_index(o[side]), L, "L");
          }
        }
      }
      for (int q = 0; q < 2; ++q) {
        if (static_cast<std::int64_t>(aux.reserved(x, o[q]).size()) !=
            exact_vertex_aux_count(np, level, alpha, beta, gamma)) {
          bad.push_back(x.str() + ": reserved count");
        }
      }
    }
  }
  return bad;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace relim_test
