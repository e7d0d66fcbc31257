#include "relim/round_elimination.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace relim {

namespace {

struct Phantom {
  NeighborhoodPair input;
  MessageMap msgs;
};

int inner_default(const EliminationConfig& cfg) { return cfg.level; }

NeighborhoodPair din_to_pair(const DInSample& s, VertexId x, std::int64_t n_prev, int dflt) {
  auto o = other_layers(x.layer);
  NeighborhoodPair out;
  for (int q = 0; q < 2; ++q) {
    NeighborhoodVector v{x, o[q], n_prev, dflt, {}};
    for (std::size_t j = 0; j < s.types[q].size(); ++j) {
      if (s.types[q][j] != dflt) v.entries.emplace_back(static_cast<std::int64_t>(j) + 1, s.types[q][j]);
    }
    out[q] = std::move(v);
  }
  return out;
}

MessageMap eval_round_one(const ProtocolSpec& pi, const EliminationConfig& cfg, const NeighborhoodPair& input) {
  VertexInput in{input[0].owner, cfg.params.n(cfg.level), cfg.level, input};
  return round_one_messages(pi, in, RandomnessView(0, in.identity));
}

bool matches(const MessageMap& m, const std::map<VertexId, std::optional<Bits>>& rec) {
  for (const auto& [w, want] : rec) {
    auto it = m.find(w);
    if (!want) {
      if (it != m.end()) return false;
    } else if (it == m.end() || it->second != *want) {
      return false;
    }
  }
  return true;
}

std::map<VertexId, std::optional<Bits>> record_of(const MessageMap& m, const std::vector<VertexId>& coords) {
  std::map<VertexId, std::optional<Bits>> rec;
  for (const auto& w : coords) {
    auto it = m.find(w);
    rec[w] = it == m.end() ? std::nullopt : std::optional<Bits>(it->second);
  }
  return rec;
}

Phantom make_phantom(const ProtocolSpec& pi, const EliminationConfig& cfg, const PublicStage& pub, VertexId x,
                     const NeighborhoodPair& inner_input, Tape& tape) {
  Phantom ph;
  ph.input = assemble_input(cfg.params, cfg.level, x, inner_input, pub.ids, pub.aux, tape, cfg.cap);
  ph.msgs = eval_round_one(pi, cfg, ph.input);
  return ph;
}

// Inner input drawn from D_in, optionally pinned at one slot.
NeighborhoodPair phantom_inner(const EliminationConfig& cfg, VertexId x, std::optional<std::pair<VertexId, int>> pin,
                               Tape& tape) {
  const auto& p = cfg.params;
  const int lvl = cfg.level - 1;
  const std::int64_t n_prev = p.n(lvl);
  if (!pin) return din_to_pair(sample_d_in(p, lvl, tape), x, n_prev, inner_default(cfg));
  const int side = side_of(x.layer, pin->first.layer);
  auto c = sample_d_in_conditioned(p, lvl, pin->second, side, pin->first.index, tape, cfg.cap);
  auto& v = c.rest.types[static_cast<std::size_t>(side)];
  v.insert(v.begin() + (pin->first.index - 1), pin->second);
  return din_to_pair(c.rest, x, n_prev, inner_default(cfg));
}

std::vector<VertexId> inner_partners(const EliminationConfig& cfg, VertexId x) {
  std::vector<VertexId> out;
  const std::int64_t n_prev = cfg.params.n(cfg.level - 1);
  for (auto Y : other_layers(x.layer)) {
    for (std::int64_t j = 1; j <= n_prev; ++j) out.push_back({Y, j});
  }
  return out;
}

template <typename T>
std::optional<T> draw_conditioned(const EliminationConfig& cfg, const PhantomSpace<T>& space,
                                  const std::function<bool(const T&)>& accept, Tape& tape) {
  ConditionalSampler cs(cfg.strategy, cfg.cap);
  SampleOutcome o;
  auto got = cs.sample(space, accept, tape, &o);
  cfg.counters->draws += o.attempts;
  cfg.counters->rejections += o.attempts - (o.accepted ? 1 : 0);
  return got;
}

}  // namespace

std::string strategy_name(SamplerStrategy s) { return s == SamplerStrategy::Enumerate ? "enum" : "reject"; }
std::string fallback_name(FallbackPolicy f) { return f == FallbackPolicy::FailTrial ? "fail" : "drop"; }

std::vector<VertexId> m_pub_coordinates(const PublicStage& pub, VertexId x) {
  std::vector<VertexId> out;
  const auto o = other_layers(x.layer);
  const auto& aux = pub.aux;
  for (int s = 0; s < 2; ++s) {
    const auto& idY = pub.ids[layer_index(o[s])];
    for (int t = 0; t <= aux.level; ++t) {
      for (std::int64_t i = 1; i <= aux.n_prev; ++i) {
        const std::int64_t star = idY[static_cast<std::size_t>(i - 1)];
        for (auto w : aux.L(x, s, t, i)) {
          if (w < star) out.push_back({o[s], w});
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<VertexId, int>> n_pub(const Auxiliaries& aux, const PublicStage&, VertexId x) {
  std::vector<std::pair<VertexId, int>> out;
  const auto o = other_layers(x.layer);
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t <= aux.level; ++t) {
      for (std::int64_t i = 1; i <= aux.n_prev; ++i) {
        for (auto w : aux.L(x, s, t, i)) out.push_back({{o[s], w}, t});
      }
    }
  }
  return out;
}

PublicStage sample_public_stage(const ProtocolSpec& pi, const EliminationConfig& cfg, const TypedTripartiteGraph* inner,
                                Tape& pub) {
  if (!pi.deterministic) throw std::invalid_argument("round elimination needs a deterministic protocol");
  const auto& p = cfg.params;
  const int r = cfg.level;
  if (r < 1 || r > p.top()) throw std::invalid_argument("elimination level outside the schedule");
  auto rep = feasibility_check(p);
  const auto& lr = rep.levels.at(static_cast<std::size_t>(r - 1));
  if (!lr.room_ok || !lr.layer_budget_ok || !lr.completion_ok) {
    throw InfeasibleParams("schedule cannot host the auxiliary sets at level " + std::to_string(r));
  }
  PublicStage st;
  st.ids = sample_ids(p.n(r), p.n(r - 1), pub);
  st.aux = sample_aux(p, r, st.ids, pub);
  st.m_pub.resize(st.aux.per_vertex.size());
  for (int l = 0; l < 3; ++l) {
    for (std::int64_t i = 1; i <= st.aux.n_prev; ++i) {
      const VertexId x{layer_at(l), i};
      auto nin = inner ? inner_input_of(*inner, x) : phantom_inner(cfg, x, std::nullopt, pub);
      auto ph = make_phantom(pi, cfg, st, x, nin, pub);
      st.m_pub[st.aux.inner_slot(x)] = record_of(ph.msgs, m_pub_coordinates(st, x));
    }
  }
  return st;
}

PairDraw sample_pair_message(const ProtocolSpec& pi, const EliminationConfig& cfg, const PublicStage& pub, VertexId x,
                             VertexId y, int type_xy, const NeighborhoodPair* x_inner, PairConditioning mode,
                             Tape& tape) {
  if (mode == PairConditioning::FullInner && !x_inner) throw std::invalid_argument("full conditioning needs N_in");
  const auto& rec = pub.m_pub.at(pub.aux.inner_slot(x));
  const VertexId y_out = pub.outer(y);
  PhantomSpace<Phantom> space;
  space.draw = [&](Tape& t) {
    auto nin = mode == PairConditioning::FullInner ? *x_inner : phantom_inner(cfg, x, std::make_pair(y, type_xy), t);
    return make_phantom(pi, cfg, pub, x, nin, t);
  };
  auto got = draw_conditioned<Phantom>(cfg, space, [&](const Phantom& ph) { return matches(ph.msgs, rec); }, tape);
  PairDraw out;
  if (!got) {
    if (cfg.fallback == FallbackPolicy::FailTrial && cfg.strategy == SamplerStrategy::Enumerate) {
      throw EmptyOrRareSupport("pair " + x.str() + "->" + y.str() + ": empty conditional support");
    }
    ++cfg.counters->fallbacks;
    out.fallback = true;
    got = space.draw(tape);
  }
  auto it = got->msgs.find(y_out);
  if (it != got->msgs.end()) out.message = it->second;
  return out;
}

PrivateDraw sample_private_stage(const ProtocolSpec& pi, const EliminationConfig& cfg, const PublicStage& pub, VertexId x,
                                 const NeighborhoodPair& x_inner, const std::map<VertexId, std::optional<Bits>>& m_in,
                                 Tape& tape) {
  const auto& rec = pub.m_pub.at(pub.aux.inner_slot(x));
  PhantomSpace<Phantom> space;
  space.draw = [&](Tape& t) { return make_phantom(pi, cfg, pub, x, x_inner, t); };
  auto accept = [&](const Phantom& ph) { return matches(ph.msgs, rec) && matches(ph.msgs, m_in); };
  auto got = draw_conditioned<Phantom>(cfg, space, accept, tape);
  PrivateDraw out;
  if (!got) {
    ++cfg.counters->fallbacks;
    out.fallback = true;
    got = space.draw(tape);
    out.consistent = accept(*got);
    if (!out.consistent) ++cfg.counters->inconsistencies;
  }
  out.input = std::move(got->input);
  return out;
}

VertexInput lone_outer_input(VertexId u, VertexId x, int type, std::int64_t n, int r) {
  auto o = other_layers(u.layer);
  VertexInput in{u, n, r, {NeighborhoodVector{u, o[0], n, r + 1, {}}, NeighborhoodVector{u, o[1], n, r + 1, {}}}};
  in.vectors[side_of(u.layer, x.layer)].entries.emplace_back(x.index, type);
  return in;
}

bool stages_consistent(const ProtocolSpec& pi, const VertexStages& st) {
  VertexInput in{st.outer, st.input[0].n, pi.rounds, st.input};
  auto m = round_one_messages(pi, in, RandomnessView(0, st.outer));
  return matches(m, st.m_in) && matches(m, st.pub_record);
}

namespace {

// Stitch x's round-1 outgoing messages: sampled records win on their
// coordinates, the completed input decides the rest.
MessageMap stitch_sent(const ProtocolSpec& pi, const EliminationConfig& cfg, const NeighborhoodPair& input,
                       const MessageRecord& pub_rec, const std::map<VertexId, std::optional<Bits>>& m_in) {
  auto sent = eval_round_one(pi, cfg, input);
  for (const auto* rec : {&pub_rec, &m_in}) {
    for (const auto& [w, b] : *rec) {
      if (b) sent[w] = *b;
      else sent.erase(w);
    }
  }
  return sent;
}

std::uint64_t input_hash(const VertexInput& in) {
  std::uint64_t h = mix_keys({vertex_code(in.identity), static_cast<std::uint64_t>(in.n)});
  for (const auto& v : in.vectors) {
    for (const auto& [j, t] : v.entries) h = mix_keys({h, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(t)});
  }
  return h;
}

Tape directed_pair_tape(const RandomnessView& view, VertexId peer, VertexId from) {
  return Tape(mix_keys({view.pair_tape(peer).key(), vertex_code(from)}));
}

class SamplingProvider : public StageProvider {
 public:
  SamplingProvider(ProtocolSpec pi, EliminationConfig cfg) : pi_(std::move(pi)), cfg_(std::move(cfg)) {}

  std::shared_ptr<const VertexStages> stages(const VertexInput& in, const RandomnessView& view) const override {
    const std::uint64_t key = mix_keys({view.private_tape().key(), input_hash(in)});
    {
      std::lock_guard<std::mutex> g(mu_);
      auto it = done_.find(key);
      if (it != done_.end()) return it->second;
    }
    auto pub = public_stage(view);
    const VertexId x = in.identity;
    auto st = std::make_shared<VertexStages>();
    st->inner = x;
    st->outer = pub->outer(x);
    st->ids = std::make_shared<std::array<std::vector<std::int64_t>, 3>>(pub->ids);
    for (const auto& y : inner_partners(cfg_, x)) {
      const int t = in.type_to(y);
      auto mine = pair_message(*pub, view, x, y, t);
      auto theirs = pair_message(*pub, view, y, x, t);
      st->m_in[pub->outer(y)] = mine.message;
      if (theirs.message) st->from_inner[pub->outer(y)] = *theirs.message;
      st->fallback = st->fallback || mine.fallback || theirs.fallback;
    }
    auto priv_tape = view.private_tape();
    auto rest = sample_private_stage(pi_, cfg_, *pub, x, in.vectors, st->m_in, priv_tape);
    st->fallback = st->fallback || rest.fallback;
    st->consistent = rest.consistent;
    st->input = std::move(rest.input);
    st->pub_record = pub->m_pub[pub->aux.inner_slot(x)];
    st->sent = stitch_sent(pi_, cfg_, st->input, st->pub_record, st->m_in);
    std::lock_guard<std::mutex> g(mu_);
    if (done_.size() > 20000) done_.clear();
    done_.emplace(key, st);
    return st;
  }

 private:
  std::shared_ptr<const PublicStage> public_stage(const RandomnessView& view) const {
    auto tape = view.public_tape();
    const std::uint64_t key = tape.key();
    {
      std::lock_guard<std::mutex> g(mu_);
      auto it = pub_.find(key);
      if (it != pub_.end()) return it->second;
    }
    auto st = std::make_shared<const PublicStage>(sample_public_stage(pi_, cfg_, nullptr, tape));
    std::lock_guard<std::mutex> g(mu_);
    if (pub_.size() > 4096) pub_.clear();
    pub_.emplace(key, st);
    return st;
  }

  // Computed identically by both endpoints from the shared pair tape.
  PairDraw pair_message(const PublicStage& pub, const RandomnessView& view, VertexId from, VertexId to, int t) const {
    const VertexId peer = from == view.owner() ? to : from;
    auto tape = directed_pair_tape(view, peer, from);
    const std::uint64_t key = mix_keys({tape.key(), static_cast<std::uint64_t>(t)});
    {
      std::lock_guard<std::mutex> g(mu_);
      auto it = pairs_.find(key);
      if (it != pairs_.end()) return it->second;
    }
    auto d = sample_pair_message(pi_, cfg_, pub, from, to, t, nullptr, PairConditioning::TypeOnly, tape);
    std::lock_guard<std::mutex> g(mu_);
    if (pairs_.size() > 200000) pairs_.clear();
    pairs_.emplace(key, d);
    return d;
  }

  ProtocolSpec pi_;
  EliminationConfig cfg_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::uint64_t, std::shared_ptr<const PublicStage>> pub_;
  mutable std::unordered_map<std::uint64_t, PairDraw> pairs_;
  mutable std::unordered_map<std::uint64_t, std::shared_ptr<const VertexStages>> done_;
};

class TrueInstanceProvider : public StageProvider {
 public:
  TrueInstanceProvider(ProtocolSpec pi, std::shared_ptr<const HardInstance> g) : pi_(std::move(pi)), g_(std::move(g)) {
    if (!g_->embedding) throw std::invalid_argument("true-instance provider needs an embedded inner graph");
    ids_ = std::make_shared<std::array<std::vector<std::int64_t>, 3>>(g_->embedding->ids);
  }

  std::shared_ptr<const VertexStages> stages(const VertexInput& in, const RandomnessView&) const override {
    const auto& emb = *g_->embedding;
    const VertexId x = in.identity;
    auto st = std::make_shared<VertexStages>();
    st->inner = x;
    st->outer = emb.outer(x);
    st->ids = ids_;
    auto xin = make_input(g_->graph, st->outer);
    st->input = xin.vectors;
    st->sent = round_one_messages(pi_, xin, RandomnessView(0, st->outer));
    for (auto Y : other_layers(x.layer)) {
      for (std::int64_t j = 1; j <= emb.n_prev(); ++j) {
        const VertexId y_out = emb.outer({Y, j});
        auto it = st->sent.find(y_out);
        st->m_in[y_out] = it == st->sent.end() ? std::nullopt : std::optional<Bits>(it->second);
        auto ym = round_one_messages(pi_, make_input(g_->graph, y_out), RandomnessView(0, y_out));
        auto jt = ym.find(st->outer);
        if (jt != ym.end()) st->from_inner[y_out] = jt->second;
      }
    }
    return st;
  }

 private:
  ProtocolSpec pi_;
  std::shared_ptr<const HardInstance> g_;
  std::shared_ptr<std::array<std::vector<std::int64_t>, 3>> ids_;
};

// Rounds 1..upto of the source protocol as seen by inner vertex x, with its
// outer neighbours simulated locally.
struct LocalWorld {
  VertexInput x_in;
  Inbox x_box;
  std::vector<VertexInput> outer_in;
  std::vector<Inbox> outer_box;
};

LocalWorld replay(const ProtocolSpec& pi, const VertexStages& st, const Inbox& inner_box, int upto) {
  const int r = pi.rounds;
  const std::int64_t n = st.input[0].n;
  LocalWorld w{VertexInput{st.outer, n, r, st.input}, {}, {}, {}};
  std::array<std::unordered_set<std::int64_t>, 3> inner_ids;
  for (int l = 0; l < 3; ++l) inner_ids[l].insert((*st.ids)[l].begin(), (*st.ids)[l].end());
  auto to_outer = [&](VertexId y) { return VertexId{y.layer, (*st.ids)[layer_index(y.layer)][y.index - 1]}; };

  for (const auto& v : st.input) {
    for (const auto& [j, t] : v.entries) {
      if (t <= r && !inner_ids[layer_index(v.target)].count(j)) {
        w.outer_in.push_back(lone_outer_input({v.target, j}, st.outer, t, n, r));
      }
    }
  }
  w.outer_box.resize(w.outer_in.size());
  w.x_box.rounds.resize(static_cast<std::size_t>(std::max(upto, 0)));
  for (auto& b : w.outer_box) b.rounds.resize(static_cast<std::size_t>(std::max(upto, 0)));
  if (upto < 1) return w;

  for (const auto& [y, b] : st.from_inner) w.x_box.put(1, y, b);
  for (std::size_t k = 0; k < w.outer_in.size(); ++k) {
    const auto& u = w.outer_in[k].identity;
    auto um = round_one_messages(pi, w.outer_in[k], RandomnessView(0, u));
    if (auto it = um.find(st.outer); it != um.end()) w.x_box.put(1, u, it->second);
    if (auto it = st.sent.find(u); it != st.sent.end()) w.outer_box[k].put(1, st.outer, it->second);
  }
  for (int j = 2; j <= upto; ++j) {
    auto xm = pi.message_fn(j, w.x_in, w.x_box, RandomnessView(0, st.outer));
    std::vector<MessageMap> um(w.outer_in.size());
    for (std::size_t k = 0; k < w.outer_in.size(); ++k) {
      um[k] = pi.message_fn(j, w.outer_in[k], w.outer_box[k], RandomnessView(0, w.outer_in[k].identity));
    }
    for (std::size_t k = 0; k < w.outer_in.size(); ++k) {
      const auto& u = w.outer_in[k].identity;
      if (auto it = xm.find(u); it != xm.end()) w.outer_box[k].put(j, st.outer, it->second);
      if (auto it = um[k].find(st.outer); it != um[k].end()) w.x_box.put(j, u, it->second);
    }
    if (j - 1 <= static_cast<int>(inner_box.rounds.size())) {
      for (const auto& [y, b] : inner_box.rounds[static_cast<std::size_t>(j - 2)]) w.x_box.put(j, to_outer(y), b);
    }
  }
  return w;
}

}  // namespace

std::shared_ptr<StageProvider> sampling_provider(const ProtocolSpec& pi, const EliminationConfig& cfg) {
  return std::make_shared<SamplingProvider>(pi, cfg);
}

std::shared_ptr<StageProvider> true_instance_provider(const ProtocolSpec& pi, std::shared_ptr<const HardInstance> g) {
  return std::make_shared<TrueInstanceProvider>(pi, std::move(g));
}

ProtocolSpec build_with_provider(const ProtocolSpec& pi, const EliminationConfig& cfg,
                                 std::shared_ptr<StageProvider> provider) {
  if (!pi.deterministic) throw std::invalid_argument("round elimination needs a deterministic protocol");
  if (pi.rounds < 1) throw std::invalid_argument("nothing to eliminate from a 0-round protocol");
  if (pi.rounds != cfg.level) throw RegimeMismatch("protocol rounds differ from the elimination level");
  ProtocolSpec out;
  out.name = pi.name + "~" + std::to_string(pi.rounds - 1);
  out.rounds = pi.rounds - 1;
  out.bandwidth = pi.bandwidth;
  out.deterministic = false;
  out.seed_space = cfg.seed_space;
  out.message_fn = [pi, provider](int k, const VertexInput& in, const Inbox& box, const RandomnessView& view) {
    auto st = provider->stages(in, view);
    auto w = replay(pi, *st, box, k);
    auto xm = pi.message_fn(k + 1, w.x_in, w.x_box, RandomnessView(0, st->outer));
    MessageMap out;
    for (auto& [v, b] : xm) {
      const auto& idv = (*st->ids)[layer_index(v.layer)];
      auto it = std::find(idv.begin(), idv.end(), v.index);
      if (it != idv.end()) out.emplace(VertexId{v.layer, static_cast<std::int64_t>(it - idv.begin()) + 1}, b);
    }
    return out;
  };
  out.output_fn = [pi, provider](const VertexInput& in, const Inbox& box, const RandomnessView& view) {
    auto st = provider->stages(in, view);
    auto w = replay(pi, *st, box, pi.rounds);
    if (pi.output_fn(w.x_in, w.x_box, RandomnessView(0, st->outer))) return true;
    for (std::size_t k = 0; k < w.outer_in.size(); ++k) {
      if (pi.output_fn(w.outer_in[k], w.outer_box[k], RandomnessView(0, w.outer_in[k].identity))) return true;
    }
    return false;
  };
  return out;
}

ProtocolSpec build_pi_r_minus_1(const ProtocolSpec& pi, const EliminationConfig& cfg) {
  return build_with_provider(pi, cfg, sampling_provider(pi, cfg));
}

namespace {

JointSample assemble_joint(const ProtocolSpec& pi, const EliminationConfig& cfg, std::shared_ptr<const HardInstance> inner,
                           const std::array<std::vector<std::int64_t>, 3>& ids,
                           const std::vector<std::pair<NeighborhoodPair, MessageMap>>& per_vertex) {
  const int r = cfg.level;
  const std::int64_t n = cfg.params.n(r);
  JointSample js;
  GraphBuilder b(n, r);
  std::array<std::unordered_set<std::int64_t>, 3> starred;
  std::array<std::unordered_map<std::int64_t, int>, 3> touches;
  for (int l = 0; l < 3; ++l) starred[l].insert(ids[l].begin(), ids[l].end());
  for (const auto& [input, sent] : per_vertex) {
    const VertexId x_out = input[0].owner;
    for (const auto& v : input) {
      for (const auto& [j, t] : v.entries) {
        b.set(x_out, {v.target, j}, t);
        if (t <= r && !starred[layer_index(v.target)].count(j)) {
          ++touches[layer_index(v.target)][j];
          auto um = round_one_messages(pi, lone_outer_input({v.target, j}, x_out, t, n, r),
                                       RandomnessView(0, VertexId{v.target, j}));
          if (auto it = um.find(x_out); it != um.end()) js.round1.entries[{1, {v.target, j}, x_out}] = it->second;
        }
      }
    }
    for (const auto& [w, bits] : sent) js.round1.entries[{1, x_out, w}] = bits;
  }
  for (const auto& layer : touches) {
    for (const auto& [_, c] : layer) js.collision = js.collision || c >= 2;
  }
  js.instance.graph = std::move(b).build();
  js.instance.embedding = InnerEmbedding{ids, std::move(inner)};
  return js;
}

}  // namespace

JointSample dreal_sampler(const ProtocolSpec& pi, const ParamSchedule& p, int level, Tape& tape) {
  JointSample js;
  js.instance = sample_gr(p, level, tape);
  js.round1 = first_round(pi, js.instance.graph);
  return js;
}

std::string hybrid_name(Hybrid h) {
  switch (h) {
    case Hybrid::DTildeReal: return "DTILDE_REAL";
    case Hybrid::H1: return "H1";
    case Hybrid::H2: return "H2";
    case Hybrid::DFake: return "DFAKE";
  }
  return "?";
}

Hybrid parse_hybrid(const std::string& s) {
  if (s == "DTILDE_REAL" || s == "dtilde-real") return Hybrid::DTildeReal;
  if (s == "H1" || s == "h1") return Hybrid::H1;
  if (s == "H2" || s == "h2") return Hybrid::H2;
  if (s == "DFAKE" || s == "dfake") return Hybrid::DFake;
  throw std::invalid_argument("unknown hybrid: " + s);
}

JointSample hybrid_sampler(Hybrid which, const ProtocolSpec& pi, const EliminationConfig& cfg, Tape& tape) {
  const auto& p = cfg.params;
  const int r = cfg.level;
  if (which == Hybrid::DTildeReal) {
    auto g = sample_gr_tilde(p, r, tape);
    const auto& emb = *g.instance.embedding;
    std::vector<std::pair<NeighborhoodPair, MessageMap>> per_vertex;
    for (int l = 0; l < 3; ++l) {
      for (std::int64_t i = 1; i <= emb.n_prev(); ++i) {
        auto in = make_input(g.instance.graph, emb.outer({layer_at(l), i}));
        per_vertex.emplace_back(in.vectors, round_one_messages(pi, in, RandomnessView(0, in.identity)));
      }
    }
    auto js = assemble_joint(pi, cfg, emb.inner, emb.ids, per_vertex);
    js.collision = g.collision;
    return js;
  }

  auto inner = std::make_shared<HardInstance>(sample_level(p, r - 1, tape));
  const std::int64_t n_prev = p.n(r - 1);
  std::vector<std::pair<NeighborhoodPair, MessageMap>> per_vertex;
  bool fallback = false, consistent = true;
  std::array<std::vector<std::int64_t>, 3> ids;

  if (which == Hybrid::DFake) {
    Randomness rnd{tape.next()};
    auto prov = sampling_provider(pi, cfg);
    for (int l = 0; l < 3; ++l) {
      for (std::int64_t i = 1; i <= n_prev; ++i) {
        const VertexId x{layer_at(l), i};
        auto st = prov->stages(make_input(inner->graph, x), rnd.view(x));
        ids = *st->ids;
        fallback = fallback || st->fallback;
        consistent = consistent && st->consistent;
        per_vertex.emplace_back(st->input, st->sent);
      }
    }
  } else {
    auto pub_tape = tape.split();
    auto pub = sample_public_stage(pi, cfg, which == Hybrid::H1 ? &inner->graph : nullptr, pub_tape);
    ids = pub.ids;
    for (int l = 0; l < 3; ++l) {
      for (std::int64_t i = 1; i <= n_prev; ++i) {
        const VertexId x{layer_at(l), i};
        const auto nin = inner_input_of(inner->graph, x);
        std::map<VertexId, std::optional<Bits>> m_in;
        for (const auto& y : inner_partners(cfg, x)) {
          auto pt = tape.split();
          auto d = sample_pair_message(pi, cfg, pub, x, y, inner->graph.pair_type(x, y), &nin,
                                       PairConditioning::FullInner, pt);
          m_in[pub.outer(y)] = d.message;
          fallback = fallback || d.fallback;
        }
        auto priv = tape.split();
        auto rest = sample_private_stage(pi, cfg, pub, x, nin, m_in, priv);
        fallback = fallback || rest.fallback;
        consistent = consistent && rest.consistent;
        auto sent = stitch_sent(pi, cfg, rest.input, pub.m_pub[pub.aux.inner_slot(x)], m_in);
        per_vertex.emplace_back(std::move(rest.input), std::move(sent));
      }
    }
  }
  auto js = assemble_joint(pi, cfg, inner, ids, per_vertex);
  js.fallback = fallback;
  js.consistent = consistent;
  return js;
}

EliminationReport run_elimination(const ProtocolSpec& pi, const EliminationConfig& cfg, std::int64_t trials,
                                  std::uint64_t seed, std::vector<TrialRecord>* records) {
  auto provider = sampling_provider(pi, cfg);
  auto built = build_with_provider(pi, cfg, provider);
  EliminationReport rep;
  rep.rounds_used = built.rounds;
  rep.bandwidth_limit = pi.bandwidth;
  rep.trials = trials;
  rep.predicted_degradation = degradation_bound(cfg.params.n(cfg.level - 1), pi.bandwidth);
  const auto before = cfg.counters->fallbacks.load();
  const auto rej_before = cfg.counters->rejections.load();
  const auto inc_before = cfg.counters->inconsistencies.load();
  const auto draws_before = cfg.counters->draws.load();
  for (std::int64_t k = 0; k < trials; ++k) {
    Tape tape(mix_keys({seed, static_cast<std::uint64_t>(k)}));
    auto g = sample_level(cfg.params, cfg.level - 1, tape);
    Randomness rnd{tape.next()};
    const auto fb0 = cfg.counters->fallbacks.load();
    auto res = simulate(built, g.graph, rnd);
    const bool fb = cfg.counters->fallbacks.load() != fb0;
    bool ok = judge(g.graph, res);
    if (fb) {
      ++rep.fallback_trials;
      if (cfg.fallback == FallbackPolicy::FailTrial) ok = false;
    }
    if (!fb) {
      ++rep.consistency_checked;
      bool all = true;
      for (int l = 0; l < 3; ++l) {
        for (std::int64_t i = 1; i <= g.graph.n(); ++i) {
          const VertexId v{layer_at(l), i};
          all = all && stages_consistent(pi, *provider->stages(make_input(g.graph, v), rnd.view(v)));
        }
      }
      if (!all) ++rep.consistency_failures;
    }
    rep.successes += ok;
    rep.bandwidth_used = std::max<int>(rep.bandwidth_used, static_cast<int>(res.transcript.max_len()));
    if (records) records->push_back({k, has_triangle(g.graph), ok, fb, res.yes_count()});
  }
  rep.fallback_count = cfg.counters->fallbacks.load() - before;
  rep.rejections = cfg.counters->rejections.load() - rej_before;
  rep.inconsistency_count = cfg.counters->inconsistencies.load() - inc_before;
  rep.draws = cfg.counters->draws.load() - draws_before;
  rep.success_frequency = static_cast<double>(rep.successes) / static_cast<double>(std::max<std::int64_t>(trials, 1));
  return rep;
}

double degradation_bound(std::int64_t n_prev, std::int64_t s) {
  if (n_prev < 1 || s < 1) throw std::invalid_argument("degradation bound needs n_prev >= 1 and s >= 1");
  const double n = static_cast<double>(n_prev);
  return 1.0 / n + 15.0 * std::sqrt(static_cast<double>(s) / n);
}

namespace {

using Big = boost::multiprecision::cpp_bin_float_100;

Big big_of(const mpz_class& z) { return Big(z.get_str()); }
Big big_of(const mpq_class& q) { return big_of(q.get_num()) / big_of(q.get_den()); }

std::string dec(const Big& x) { return x.str(30); }

mpz_class pow34(int r) { return mpz_pow(34, static_cast<unsigned long>(r)); }

}  // namespace

BandwidthBound bandwidth_bound(const mpz_class& n_r, int r) {
  if (n_r < 1) throw std::invalid_argument("n_r must be >= 1");
  if (r < 0) throw std::invalid_argument("r must be >= 0");
  BandwidthBound out;
  const mpz_class e = pow34(r);
  const Big root = exp(log(big_of(n_r)) / (Big(2) * big_of(e)));
  const Big bound = root / Big(230400);
  out.bound = dec(bound);
  out.log2_bound = static_cast<double>(log(bound) / log(Big(2)));
  const mpz_class thresh = mpz_pow(r, 4 * e.get_ui());
  out.precondition = n_r > thresh;
  return out;
}

bool ContradictionChain::all_hold() const {
  return std::all_of(steps.begin(), steps.end(), [](const ChainStep& s) { return s.holds; });
}

ContradictionChain contradiction_chain(int r, const mpz_class& n0) {
  if (r < 1) throw std::invalid_argument("the chain needs r >= 1");
  if (n0 < 1) throw std::invalid_argument("n_0 must be >= 1");
  ContradictionChain rc;
  rc.r = r;
  rc.n0 = n0;
  rc.premise_n0_gt_r4 = n0 > mpz_pow(r, 4);
  rc.premise_32r_le_n0 = 32 * mpz_class(r) <= n0;

  // s at the bound: sqrt(s) = n_0^(1/4) / 480
  const Big bn0 = big_of(n0);
  const Big sqrt_s = pow(bn0, Big(0.25)) / Big(480);
  mpq_class inv_sum = 0;
  Big root_sum = 0;
  for (int l = 1; l <= r; ++l) {
    const mpz_class nl = mpz_pow(n0, pow34(r - l).get_ui());
    inv_sum += mpq_class(1, 1) / mpq_class(nl);
    root_sum += Big(1) / sqrt(big_of(nl));
  }
  const mpq_class q15_16(15, 16), q1_32(1, 32), q29_32(29, 32), q7_8(7, 8);
  const Big L0 = big_of(q15_16) - big_of(inv_sum) - Big(15) * sqrt_s * root_sum;
  const Big L1 = big_of(q15_16) - Big(r) / bn0 - Big(15) * sqrt_s * Big(r) / sqrt(bn0);
  const Big L2 = big_of(q15_16 - q1_32) - Big(15) * sqrt_s * Big(r) / sqrt(bn0);
  const Big L3 = big_of(q29_32) - Big(15) / Big(480) * Big(r) * pow(bn0, Big(-0.25));
  const Big L4 = big_of(q29_32 - q1_32);

  auto step = [&](const std::string& label, const Big& a, const Big& b, bool strict) {
    rc.steps.push_back({label, dec(a), dec(b), strict ? a > b : a >= b});
  };
  step("success sum >= 15/16 - r/n_0 - 15 sqrt(s) r / n_0^(1/2)", L0, L1, false);
  step("r/n_0 <= 1/32", L1, L2, false);
  step("sqrt(s) = n_0^(1/4)/480 gives 29/32 - (15/480) r n_0^(-1/4)", L2, L3, false);
  step("r < n_0^(1/4) gives > 29/32 - 1/32", L3, L4, true);
  rc.steps.push_back({"29/32 - 1/32 = 7/8", mpq_class(q29_32 - q1_32).get_str(), q7_8.get_str(), q29_32 - q1_32 == q7_8});
  step("final value > 7/8", L3, big_of(q7_8), true);
  return rc;
}

}  // namespace relim
