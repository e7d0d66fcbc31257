#include "relim/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace relim {

std::vector<WeightedInstance> g0_support(std::int64_t n0) {
  if (n0 < 1) throw std::invalid_argument("n_0 must be positive");
  if (n0 > 64) throw CapExceeded("G_0 support enumeration is capped at n_0 = 64");
  const mpq_class w(1, static_cast<unsigned long>(8 * n0 * n0 * n0));
  std::vector<WeightedInstance> out;
  for (std::int64_t a = 1; a <= n0; ++a) {
    for (std::int64_t b = 1; b <= n0; ++b) {
      for (std::int64_t c = 1; c <= n0; ++c) {
        for (int pat = 0; pat < 8; ++pat) {
          HardInstance h;
          h.starred = {a, b, c};
          GraphBuilder g(n0, 0);
          const VertexId va{Layer::A, a}, vb{Layer::B, b}, vc{Layer::C, c};
          // same bit order as the sampler: ab, ac, bc
          if (pat & 1) g.set(va, vb, 0);
          if (pat & 2) g.set(va, vc, 0);
          if (pat & 4) g.set(vb, vc, 0);
          h.graph = std::move(g).build();
          out.push_back({w, std::move(h)});
        }
      }
    }
  }
  return out;
}

EnumerableDistribution enumerate_g0(std::int64_t n0) {
  auto support = std::make_shared<std::vector<WeightedInstance>>(g0_support(n0));
  EnumerableDistribution d;
  d.size = static_cast<std::int64_t>(support->size());
  d.for_each = [support](const std::function<void(const mpq_class&, const TypedTripartiteGraph&)>& f) {
    for (const auto& wi : *support) f(wi.weight, wi.instance.graph);
  };
  return d;
}

EnumerableDistribution reduced_g1_support(const ParamSchedule& p) {
  if (p.top() < 1) throw std::invalid_argument("schedule has no level 1");
  auto reps = std::make_shared<std::vector<TypedTripartiteGraph>>();
  const auto n0 = p.n(0);
  for (const auto& wi : g0_support(1)) {
    // widen the single-vertex pattern to n_0 with stars at index 1
    auto inner = std::make_shared<HardInstance>();
    inner->starred = {1, 1, 1};
    GraphBuilder g(n0, 0);
    for (const auto& v : wi.instance.graph.touched_vertices()) {
      for (const auto& q : wi.instance.graph.partners(v)) {
        if (v < q.v) g.set(v, q.v, q.type);
      }
    }
    inner->graph = std::move(g).build();
    reps->push_back(canonical_gr(p, 1, inner).graph);
  }
  EnumerableDistribution d;
  d.size = 8;
  d.symmetry_reduced = true;
  d.for_each = [reps](const std::function<void(const mpq_class&, const TypedTripartiteGraph&)>& f) {
    const mpq_class w(1, 8);
    for (const auto& g : *reps) f(w, g);
  };
  return d;
}

mpq_class exact_g0_triangle_prob(std::int64_t n0) {
  return exact_g0_triangle_prob_given(n0, [](const HardInstance&) { return true; });
}

mpq_class exact_g0_triangle_prob_given(std::int64_t n0, const std::function<bool(const HardInstance&)>& event) {
  mpq_class ev = 0, both = 0;
  for (const auto& wi : g0_support(n0)) {
    if (!event(wi.instance)) continue;
    ev += wi.weight;
    if (has_triangle(wi.instance.graph)) both += wi.weight;
  }
  if (ev == 0) throw ZeroProbabilityCondition("conditioning event has probability 0");
  mpq_class r = both / ev;
  r.canonicalize();
  return r;
}

G0InputKey g0_input_key(const VertexInput& in) {
  G0InputKey k;
  k.v = in.identity;
  for (int s = 0; s < 2; ++s) {
    for (const auto& [j, t] : in.vectors[s].entries) {
      if (t == 0) {
        k.toward[s] = j;
        break;
      }
    }
  }
  return k;
}

namespace {

std::vector<VertexId> all_vertices(std::int64_t n) {
  std::vector<VertexId> out;
  for (int l = 0; l < 3; ++l) {
    for (std::int64_t i = 1; i <= n; ++i) out.push_back({layer_at(l), i});
  }
  return out;
}

struct G0Case {
  std::vector<G0InputKey> inputs;  // one per vertex
  bool triangle;
};

std::vector<G0Case> g0_cases(std::int64_t n0) {
  std::vector<G0Case> out;
  const auto vs = all_vertices(n0);
  for (const auto& wi : g0_support(n0)) {
    G0Case c;
    c.triangle = has_triangle(wi.instance.graph);
    for (const auto& v : vs) c.inputs.push_back(g0_input_key(make_input(wi.instance.graph, v)));
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

ZeroRoundResult zero_round_optimum(std::int64_t n0, std::int64_t cap) {
  if (n0 < 1) throw std::invalid_argument("n_0 must be positive");
  const auto cases = g0_cases(n0);
  const std::int64_t denom = static_cast<std::int64_t>(cases.size());
  ZeroRoundResult res;

  // variable table: every distinct (vertex, input)
  std::map<G0InputKey, int> var;
  for (const auto& c : cases) {
    for (const auto& k : c.inputs) var.emplace(k, static_cast<int>(var.size()));
  }
  const int nv = static_cast<int>(var.size());
  if (nv < 62 && (1LL << nv) <= cap) {
    res.exhaustive = true;
    std::vector<std::vector<int>> idx;
    for (const auto& c : cases) {
      std::vector<int> v;
      for (const auto& k : c.inputs) v.push_back(var.at(k));
      idx.push_back(std::move(v));
    }
    std::int64_t best = -1;
    std::uint64_t best_mask = 0;
    for (std::uint64_t mask = 0; mask < (1ULL << nv); ++mask) {
      std::int64_t wins = 0;
      for (std::size_t i = 0; i < cases.size(); ++i) {
        bool yes = false;
        for (int x : idx[i]) yes = yes || ((mask >> x) & 1);
        wins += yes == cases[i].triangle;
      }
      if (wins > best) {
        best = wins;
        best_mask = mask;
      }
    }
    res.strategies = 1LL << nv;
    res.best = mpq_class(best, denom);
    for (const auto& [k, x] : var) {
      if ((best_mask >> x) & 1) res.witness[k] = true;
    }
    res.best.canonicalize();
    return res;
  }

  // Reduced search. Single-edge inputs say No. What remains: f_v(empty) for
  // every vertex, and f_v(both) which only matters inside its own star triple.
  const auto vs = all_vertices(n0);
  const int ne = static_cast<int>(vs.size());
  if (ne >= 30 || (1LL << ne) * 8 * n0 * n0 * n0 > cap) {
    throw CapExceeded("zero-round search over n_0 = " + std::to_string(n0) + " exceeds the cap");
  }
  auto empty_of = [&](VertexId v) { return G0InputKey{v, {0, 0}}; };
  auto is_single = [](const G0InputKey& k) { return (k.toward[0] == 0) != (k.toward[1] == 0); };
  auto is_both = [](const G0InputKey& k) { return k.toward[0] != 0 && k.toward[1] != 0; };
  std::map<G0InputKey, int> vindex;
  for (int i = 0; i < ne; ++i) vindex[empty_of(vs[i])] = i;

  // group cases by star triple (8 consecutive patterns each)
  std::int64_t best = -1;
  std::map<G0InputKey, bool> best_table;
  for (std::uint64_t E = 0; E < (1ULL << ne); ++E) {
    std::int64_t wins = 0;
    std::map<G0InputKey, bool> table;
    for (int i = 0; i < ne; ++i) {
      if ((E >> i) & 1) table[empty_of(vs[i])] = true;
    }
    for (std::size_t base = 0; base < cases.size(); base += 8) {
      std::vector<G0InputKey> both;
      for (std::size_t c = base; c < base + 8; ++c) {
        for (const auto& k : cases[c].inputs) {
          if (is_both(k) && std::find(both.begin(), both.end(), k) == both.end()) both.push_back(k);
        }
      }
      std::int64_t best_t = -1;
      unsigned best_x = 0;
      for (unsigned X = 0; X < (1u << both.size()); ++X) {
        std::int64_t w = 0;
        for (std::size_t c = base; c < base + 8; ++c) {
          bool yes = false;
          for (const auto& k : cases[c].inputs) {
            if (is_single(k)) continue;
            if (is_both(k)) {
              auto pos = static_cast<std::size_t>(std::find(both.begin(), both.end(), k) - both.begin());
              yes = yes || ((X >> pos) & 1);
            } else {
              yes = yes || ((E >> vindex.at(k)) & 1);
            }
          }
          w += yes == cases[c].triangle;
        }
        ++res.strategies;
        if (w > best_t) {
          best_t = w;
          best_x = X;
        }
      }
      wins += best_t;
      for (std::size_t pos = 0; pos < both.size(); ++pos) {
        if ((best_x >> pos) & 1) table[both[pos]] = true;
      }
    }
    if (wins > best) {
      best = wins;
      best_table = std::move(table);
    }
  }
  res.best = mpq_class(best, denom);
  res.best.canonicalize();
  res.witness = std::move(best_table);
  return res;
}

ProtocolSpec table_protocol(const std::map<G0InputKey, bool>& yes) {
  ProtocolSpec p;
  p.name = "zero-round-table";
  p.rounds = 0;
  p.bandwidth = 1;
  p.deterministic = true;
  p.identity_oblivious = false;
  p.message_fn = [](int, const VertexInput&, const Inbox&, const RandomnessView&) { return MessageMap{}; };
  p.output_fn = [yes](const VertexInput& in, const Inbox&, const RandomnessView&) {
    auto it = yes.find(g0_input_key(in));
    return it != yes.end() && it->second;
  };
  return p;
}

void check_law(const Law& a) {
  mpq_class mass = 0;
  for (const auto& [_, w] : a) {
    if (w < 0) throw std::invalid_argument("negative weight in law");
    mass += w;
  }
  if (mass != 1) throw std::invalid_argument("law has mass " + mass.get_str());
}

mpq_class exact_tvd(const Law& a, const Law& b) {
  check_law(a);
  check_law(b);
  mpq_class s = 0;
  for (const auto& [k, w] : a) {
    auto it = b.find(k);
    s += abs(w - (it == b.end() ? mpq_class(0) : it->second));
  }
  for (const auto& [k, w] : b) {
    if (!a.count(k)) s += w;
  }
  s /= 2;
  s.canonicalize();
  return s;
}

std::map<std::string, double> empirical_law(const KeySampler& s, std::int64_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  std::map<std::string, double> out;
  for (std::int64_t k = 0; k < trials; ++k) {
    Tape tape(mix_keys({seed, static_cast<std::uint64_t>(k)}));
    out[s(tape)] += 1;
  }
  for (auto& [_, v] : out) v /= static_cast<double>(trials);
  return out;
}

namespace {

double half_l1(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
  double s = 0;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    s += std::abs(v - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : b) {
    if (!a.count(k)) s += v;
  }
  return s / 2;
}

}  // namespace

EmpiricalTvd empirical_tvd(const KeySampler& a, const KeySampler& b, std::int64_t trials, std::uint64_t seed) {
  auto la = empirical_law(a, trials, mix_keys({seed, 1}));
  auto lb = empirical_law(b, trials, mix_keys({seed, 2}));
  EmpiricalTvd e;
  e.estimate = half_l1(la, lb);
  e.trials = trials;
  std::unordered_set<std::string> keys;
  for (const auto& [k, _] : la) keys.insert(k);
  for (const auto& [k, _] : lb) keys.insert(k);
  e.keys = keys.size();
  e.bias_scale = std::sqrt(static_cast<double>(e.keys) / static_cast<double>(trials));
  return e;
}

double tvd_between(const Law& exact, const std::map<std::string, double>& empirical) {
  std::map<std::string, double> ex;
  for (const auto& [k, w] : exact) ex[k] = w.get_d();
  return half_l1(ex, empirical);
}

CollisionRate collision_rate(const ParamSchedule& p, int level, std::int64_t trials, std::uint64_t seed, int jobs) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  jobs = std::max(1, std::min<int>(jobs, 64));
  std::vector<std::int64_t> hits(static_cast<std::size_t>(jobs), 0), theta(static_cast<std::size_t>(jobs), 0);
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(jobs));
  auto work = [&](int w) {
    try {
      for (std::int64_t k = w; k < trials; k += jobs) {
        Tape tape(mix_keys({seed, static_cast<std::uint64_t>(k)}));
        auto s = sample_gr_tilde(p, level, tape);
        hits[static_cast<std::size_t>(w)] += s.collision;
        theta[static_cast<std::size_t>(w)] = std::max(theta[static_cast<std::size_t>(w)], s.theta);
      }
    } catch (...) {
      errs[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errs) {
    if (e) std::rethrow_exception(e);
  }
  CollisionRate r;
  r.trials = trials;
  for (auto h : hits) r.collisions += h;
  for (auto t : theta) r.theta = std::max(r.theta, t);
  r.n = p.n(level);
  r.frequency = static_cast<double>(r.collisions) / static_cast<double>(trials);
  const double th = static_cast<double>(r.theta);
  r.bound = 1 - std::exp(-3 * (th - 1) * th / static_cast<double>(r.n));
  r.sigma = std::sqrt(std::max(r.bound * (1 - r.bound), 1e-300) / static_cast<double>(trials));
  return r;
}

mpq_class exact_collision_probability(const ParamSchedule& p, int level) {
  if (level < 1 || level > p.top()) throw std::invalid_argument("level outside the schedule");
  const std::int64_t n = p.n(level), n_prev = p.n(level - 1), d = p.d(level);
  const std::int64_t a = exact_vertex_aux_count(n_prev, level, p.alpha(level), p.beta(level), p.gamma(level));
  const std::int64_t m = (level + 1) * d - n_prev - a;
  if (m < 0) throw InfeasibleParams("auxiliary slots exceed the per-type degree budget");
  const std::int64_t pool = n - n_prev - a;
  if (2 * n_prev * (a + m) > n - n_prev) {
    // pigeonhole: the 2 n_prev foreign vertices cannot fit disjointly
    return mpq_class(1);
  }
  // one layer: the 2 n_prev foreign inner vertices complete in turn; each
  // completion must avoid every other aux block and all earlier completions
  mpq_class layer_ok = 1;
  for (std::int64_t k = 0; k < 2 * n_prev; ++k) {
    const std::int64_t bad = (2 * n_prev - 1) * a + k * m;
    for (std::int64_t i = 0; i < m; ++i) {
      layer_ok *= mpq_class(pool - bad - i, pool - i);
    }
  }
  mpq_class ok = layer_ok * layer_ok * layer_ok;
  mpq_class out = 1 - ok;
  out.canonicalize();
  return out;
}

std::string projection_name(Projection pr) {
  switch (pr) {
    case Projection::Instance: return "instance";
    case Projection::Transcript: return "transcript";
    case Projection::InstanceTranscript: return "instance+transcript";
  }
  return "?";
}

Projection parse_projection(const std::string& s) {
  if (s == "instance") return Projection::Instance;
  if (s == "transcript") return Projection::Transcript;
  if (s == "instance+transcript") return Projection::InstanceTranscript;
  throw std::invalid_argument("unknown projection: " + s);
}

namespace {

struct InnerView {
  const InnerEmbedding& emb;
  std::array<std::unordered_set<std::int64_t>, 3> ids;
  explicit InnerView(const InnerEmbedding& e) : emb(e) {
    for (int l = 0; l < 3; ++l) ids[l].insert(e.ids[l].begin(), e.ids[l].end());
  }
  bool inner(VertexId w) const { return ids[layer_index(w.layer)].count(w.index) != 0; }
};

const InnerEmbedding& embedding_of(const HardInstance& h) {
  if (!h.embedding) throw std::invalid_argument("projection needs an embedded inner graph");
  return *h.embedding;
}

bool overflow_of(const HardInstance& h, const InnerView& iv) {
  std::map<VertexId, int> touches;
  const int r = h.graph.r();
  for (int l = 0; l < 3; ++l) {
    for (std::int64_t i = 1; i <= iv.emb.n_prev(); ++i) {
      for (const auto& q : h.graph.partners(iv.emb.outer({layer_at(l), i}))) {
        if (q.type <= r && !iv.inner(q.v) && ++touches[q.v] >= 2) return true;
      }
    }
  }
  return false;
}

std::string key_with_flag(const HardInstance& h, const Transcript& t, Projection pr, bool flag) {
  const auto& emb = embedding_of(h);
  const InnerView iv(emb);
  const std::int64_t np = emb.n_prev();
  const int r = h.graph.r();
  std::string key;
  if (pr != Projection::Transcript) {
    key += "T";
    for (int la = 0; la < 3; ++la) {
      for (int lb = la + 1; lb < 3; ++lb) {
        for (std::int64_t i = 1; i <= np; ++i) {
          for (std::int64_t j = 1; j <= np; ++j) {
            key += ',' + std::to_string(h.graph.pair_type(emb.outer({layer_at(la), i}), emb.outer({layer_at(lb), j})));
          }
        }
      }
    }
    key += flag ? "|F1" : "|F0";
  }
  if (pr == Projection::Instance) return key;
  auto bits_at = [&](VertexId from, VertexId to) {
    auto it = t.entries.find(TranscriptKey{1, from, to});
    return it == t.entries.end() ? std::string("-") : bits_str(it->second);
  };
  key += "|M";
  for (int la = 0; la < 3; ++la) {
    for (std::int64_t i = 1; i <= np; ++i) {
      const VertexId ox = emb.outer({layer_at(la), i});
      for (auto Y : other_layers(layer_at(la))) {
        for (std::int64_t j = 1; j <= np; ++j) key += ',' + bits_at(ox, emb.outer({Y, j}));
      }
      std::vector<std::string> out_ms, in_ms;
      for (const auto& q : h.graph.partners(ox)) {
        if (q.type > r || iv.inner(q.v)) continue;
        out_ms.push_back(std::to_string(q.type) + '/' + bits_at(ox, q.v));
        in_ms.push_back(std::to_string(q.type) + '/' + bits_at(q.v, ox));
      }
      std::sort(out_ms.begin(), out_ms.end());
      std::sort(in_ms.begin(), in_ms.end());
      key += ";o";
      for (const auto& s : out_ms) key += ' ' + s;
      key += ";i";
      for (const auto& s : in_ms) key += ' ' + s;
    }
  }
  return key;
}

}  // namespace

bool overflow_flag(const HardInstance& h) {
  const InnerView iv(embedding_of(h));
  return overflow_of(h, iv);
}

std::string projection_key(const HardInstance& h, const Transcript& round1, Projection pr) {
  return key_with_flag(h, round1, pr, pr == Projection::Transcript ? false : overflow_flag(h));
}

std::string projection_key(const JointSample& s, Projection pr) { return projection_key(s.instance, s.round1, pr); }

Law exact_pair_local_law(const ProtocolSpec& pi, const ParamSchedule& p, int level, std::optional<Hybrid> which,
                         Projection pr) {
  if (!pi.pair_local) throw std::invalid_argument(pi.name + " is not pair-local");
  if (level != 1) throw SupportTooLarge("exact hybrid laws need an enumerable inner support (level 1)");
  if (pi.rounds != level) throw RegimeMismatch("protocol rounds differ from the level");
  // Every vertex's outer channels carry d per type minus its inner count, so
  // with pair-type messages the projection is a function of the inner graph
  // plus the overflow flag. The inner law is G_{r-1} in all five
  // distributions, and the flag is independent of it with probability 0 in
  // D_real and exact_collision_probability in the four auxiliary-based ones.
  const mpq_class pc = which ? exact_collision_probability(p, level) : mpq_class(0);
  Law law;
  for (const auto& wi : g0_support(p.n(0))) {
    auto inner = std::make_shared<HardInstance>(wi.instance);
    auto g = canonical_gr(p, level, inner);
    const auto t = first_round(pi, g.graph);
    if (pr == Projection::Transcript) {
      law[key_with_flag(g, t, pr, false)] += wi.weight;
      continue;
    }
    if (pc != 1) law[key_with_flag(g, t, pr, false)] += wi.weight * (1 - pc);
    if (pc != 0) law[key_with_flag(g, t, pr, true)] += wi.weight * pc;
  }
  for (auto& [_, w] : law) w.canonicalize();
  return law;
}

}  // namespace relim
