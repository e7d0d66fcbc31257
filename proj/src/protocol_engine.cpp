#include "relim/protocol_engine.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace relim {

std::string bits_to_hex(const Bits& b) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < b.size(); i += 4) {
    int v = 0;
    for (std::size_t k = 0; k < 4; ++k) v = (v << 1) | ((i + k < b.size() && b[i + k]) ? 1 : 0);
    out.push_back(digits[v]);
  }
  return out;
}

Bits bits_from_hex(const std::string& hex, std::size_t len) {
  if (hex.size() * 4 < len) throw std::invalid_argument("hex too short for length");
  Bits b;
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw std::invalid_argument("bad hex digit");
    for (int k = 3; k >= 0; --k) b.push_back(((v >> k) & 1) != 0);
  }
  b.resize(len);
  return b;
}

std::string bits_str(const Bits& b) {
  std::string s;
  for (bool x : b) s.push_back(x ? '1' : '0');
  return s;
}

int VertexInput::type_to(VertexId w) const { return toward(w.layer).at(w.index); }

std::vector<VertexId> VertexInput::partners_upto(int limit) const {
  std::vector<VertexId> out;
  for (const auto& v : vectors) {
    if (v.default_type <= limit) {
      for (std::int64_t j = 1; j <= v.n; ++j) {
        if (v.at(j) <= limit) out.push_back({v.target, j});
      }
      continue;
    }
    for (const auto& [j, t] : v.entries) {
      if (t <= limit) out.push_back({v.target, j});
    }
  }
  return out;
}

VertexInput make_input(const TypedTripartiteGraph& g, VertexId v) {
  auto o = other_layers(v.layer);
  return VertexInput{v, g.n(), g.r(), {neighborhood(g, v, o[0]), neighborhood(g, v, o[1])}};
}

const Bits* Inbox::get(int round, VertexId from) const {
  if (round < 1 || round > static_cast<int>(rounds.size())) return nullptr;
  const auto& m = rounds[static_cast<std::size_t>(round - 1)];
  auto it = m.find(from);
  return it == m.end() ? nullptr : &it->second;
}

void Inbox::put(int round, VertexId from, Bits b) {
  if (static_cast<int>(rounds.size()) < round) rounds.resize(static_cast<std::size_t>(round));
  rounds[static_cast<std::size_t>(round - 1)][from] = std::move(b);
}

Tape RandomnessView::pair_tape(VertexId other) const {
  if (other == owner_) throw std::invalid_argument("pair tape needs two distinct vertices");
  auto a = std::min(owner_, other), b = std::max(owner_, other);
  return Tape(mix_keys({seed_, 0x50414952ULL, vertex_code(a), vertex_code(b)}));
}

std::size_t Transcript::max_len() const {
  std::size_t m = 0;
  for (const auto& [_, b] : entries) m = std::max(m, b.size());
  return m;
}

Transcript Transcript::round(int i) const {
  Transcript t;
  for (const auto& [k, b] : entries) {
    if (k.round == i) t.entries.emplace(k, b);
  }
  return t;
}

std::int64_t SimResult::yes_count() const { return std::count(outputs.begin(), outputs.end(), true); }

SimResult simulate(const ProtocolSpec& p, const TypedTripartiteGraph& g, const Randomness& rnd, SimOptions opt) {
  if (p.rounds != g.r()) {
    throw RegimeMismatch("protocol has " + std::to_string(p.rounds) + " rounds, instance regime is r = " +
                         std::to_string(g.r()));
  }
  const std::int64_t n = g.n();
  SimResult res;
  res.n = n;
  res.outputs.assign(static_cast<std::size_t>(3 * n), false);

  // only vertices with some channel can ever send or receive
  auto active = g.touched_vertices();
  std::map<VertexId, VertexInput> inputs;
  for (const auto& v : active) inputs.emplace(v, make_input(g, v));
  std::map<VertexId, Inbox> inbox;

  for (int i = 1; i <= p.rounds; ++i) {
    const int limit = g.r() + 1 - i;
    std::vector<std::pair<TranscriptKey, Bits>> sent;
    if (i == 1 && opt.round1) {
      for (const auto& [k, b] : opt.round1->entries) {
        if (k.round == 1) sent.emplace_back(k, b);
      }
    } else {
      for (const auto& v : active) {
        const auto& in = inputs.at(v);
        auto msgs = p.message_fn(i, in, inbox[v], rnd.view(v));
        for (auto& [w, b] : msgs) sent.emplace_back(TranscriptKey{i, v, w}, std::move(b));
      }
    }
    for (auto& [k, b] : sent) {
      if (k.from.layer == k.to.layer || g.pair_type(k.from, k.to) > limit) {
        throw ChannelViolation(p.name + ": round " + std::to_string(i) + " message " + k.from.str() + "->" +
                               k.to.str() + " on an unavailable pair");
      }
      if (static_cast<int>(b.size()) > p.bandwidth) {
        throw BandwidthViolation(p.name + ": " + std::to_string(b.size()) + "-bit message exceeds s = " +
                                 std::to_string(p.bandwidth));
      }
    }
    // delivery happens after every sender has committed
    for (auto& [k, b] : sent) {
      inbox[k.to].put(i, k.from, b);
      res.transcript.entries[k] = std::move(b);
    }
    for (auto& [_, box] : inbox) {
      if (static_cast<int>(box.rounds.size()) < i) box.rounds.resize(static_cast<std::size_t>(i));
    }
  }

  Inbox empty;
  empty.rounds.resize(static_cast<std::size_t>(p.rounds));
  for (int l = 0; l < 3; ++l) {
    for (std::int64_t idx = 1; idx <= n; ++idx) {
      const VertexId v{layer_at(l), idx};
      auto it = inputs.find(v);
      bool yes;
      if (it != inputs.end()) {
        yes = p.output_fn(it->second, inbox[v], rnd.view(v));
      } else {
        auto o = other_layers(v.layer);
        VertexInput in{v, n, g.r(),
                       {NeighborhoodVector{v, o[0], n, g.default_type(), {}},
                        NeighborhoodVector{v, o[1], n, g.default_type(), {}}}};
        yes = p.output_fn(in, empty, rnd.view(v));
      }
      res.outputs[static_cast<std::size_t>(l * n + idx - 1)] = yes;
    }
  }
  return res;
}

Transcript first_round(const ProtocolSpec& p, const TypedTripartiteGraph& g, const Randomness& rnd) {
  if (p.rounds != g.r()) throw RegimeMismatch("protocol rounds differ from instance regime");
  if (p.rounds < 1) return {};
  Transcript t;
  for (const auto& v : g.touched_vertices()) {
    auto msgs = round_one_messages(p, make_input(g, v), rnd.view(v));
    for (auto& [w, b] : msgs) {
      if (w.layer == v.layer || g.pair_type(v, w) > g.r()) {
        throw ChannelViolation(p.name + ": round 1 message " + v.str() + "->" + w.str() + " on an unavailable pair");
      }
      if (static_cast<int>(b.size()) > p.bandwidth) throw BandwidthViolation(p.name + ": message exceeds s");
      t.entries[TranscriptKey{1, v, w}] = std::move(b);
    }
  }
  return t;
}

MessageMap round_one_messages(const ProtocolSpec& p, const VertexInput& in, const RandomnessView& view) {
  Inbox empty;
  return p.message_fn(1, in, empty, view);
}

bool judge(const TypedTripartiteGraph& g, const std::vector<bool>& outputs) {
  if (static_cast<std::int64_t>(outputs.size()) != 3 * g.n()) throw std::invalid_argument("one output per vertex");
  const bool any_yes = std::find(outputs.begin(), outputs.end(), true) != outputs.end();
  return has_triangle(g) ? any_yes : !any_yes;
}

std::pair<double, double> wilson_interval(std::int64_t k, std::int64_t n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double ph = static_cast<double>(k) / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  const double denom = 1 + z * z / nn;
  const double centre = (ph + z * z / (2 * nn)) / denom;
  const double half = z * std::sqrt(ph * (1 - ph) / nn + z * z / (4 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

SuccessEstimate estimate_success(const ProtocolSpec& p, const InstanceSampler& sampler, std::int64_t trials,
                                 std::uint64_t seed, int jobs) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::min<std::int64_t>(trials, 64))));
  std::vector<std::int64_t> wins(static_cast<std::size_t>(jobs), 0);
  auto work = [&](int w) {
    for (std::int64_t k = w; k < trials; k += jobs) {
      Tape tape(mix_keys({seed, static_cast<std::uint64_t>(k)}));
      auto g = sampler(tape);
      Randomness rnd{tape.next()};
      if (judge(g, simulate(p, g, rnd))) ++wins[static_cast<std::size_t>(w)];
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  SuccessEstimate e;
  e.trials = trials;
  for (auto c : wins) e.successes += c;
  e.frequency = static_cast<double>(e.successes) / static_cast<double>(trials);
  std::tie(e.lo, e.hi) = wilson_interval(e.successes, trials);
  return e;
}

EnumerableDistribution point_mass(TypedTripartiteGraph g) {
  EnumerableDistribution d;
  d.size = 1;
  d.for_each = [g = std::move(g)](const std::function<void(const mpq_class&, const TypedTripartiteGraph&)>& f) {
    f(mpq_class(1), g);
  };
  return d;
}

mpq_class exact_success(const ProtocolSpec& p, const EnumerableDistribution& dist, std::int64_t cap) {
  if (p.seed_space < 1) throw std::invalid_argument("seed_space must be >= 1");
  if (dist.symmetry_reduced && !p.identity_oblivious) {
    throw std::invalid_argument(p.name + " is not identity-oblivious; a symmetry-reduced support does not apply");
  }
  if (dist.size > cap / p.seed_space) {
    throw SupportTooLarge("support " + std::to_string(dist.size) + " x " + std::to_string(p.seed_space) +
                          " seeds exceeds the cap " + std::to_string(cap));
  }
  mpq_class total = 0, mass = 0;
  const mpq_class per_seed(1, static_cast<unsigned long>(p.seed_space));
  dist.for_each([&](const mpq_class& w, const TypedTripartiteGraph& g) {
    mass += w;
    std::int64_t wins = 0;
    for (std::int64_t s = 0; s < p.seed_space; ++s) {
      if (judge(g, simulate(p, g, Randomness{static_cast<std::uint64_t>(s)}))) ++wins;
    }
    total += w * per_seed * wins;
  });
  if (mass != 1) throw std::invalid_argument("distribution weights sum to " + mass.get_str());
  total.canonicalize();
  return total;
}

}  // namespace relim
