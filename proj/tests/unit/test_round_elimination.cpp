#include <doctest.h>

#include <cmath>

#include "relim/hard_distributions.hpp"
#include "relim/oracles.hpp"
#include "relim/protocols.hpp"
#include "relim/round_elimination.hpp"

using namespace relim;

namespace {

EliminationConfig micro() {
  EliminationConfig cfg;
  cfg.params = custom_params(1, {{40, 8, 1, 1, 1}});
  cfg.level = 1;
  cfg.cap = 20000;
  cfg.fallback = FallbackPolicy::DropMessageConditioning;
  return cfg;
}

}  // namespace

TEST_CASE("conditional sampler: enumeration and rejection") {
  PhantomSpace<int> die;
  die.draw = [](Tape& t) { return static_cast<int>(t.below(6)); };
  die.enumerate = [](const std::function<void(double, const int&)>& f) {
    for (int i = 0; i < 6; ++i) f(1.0 / 6, i);
  };
  die.size = 6;
  auto even = [](const int& v) { return v % 2 == 0; };
  Tape t(1);
  for (auto s : {SamplerStrategy::Enumerate, SamplerStrategy::Reject}) {
    ConditionalSampler cs(s, 1000);
    std::map<int, int> hist;
    for (int k = 0; k < 3000; ++k) ++hist[*cs.sample<int>(die, even, t)];
    CHECK(hist.size() == 3);
    for (auto [v, c] : hist) {
      CHECK(v % 2 == 0);
      CHECK(std::abs(c - 1000) < 150);
    }
  }
  ConditionalSampler rej(SamplerStrategy::Reject, 10);
  SampleOutcome o;
  CHECK_FALSE(rej.sample<int>(die, [](const int&) { return false; }, t, &o).has_value());
  CHECK(o.attempts == 10);
  ConditionalSampler small(SamplerStrategy::Enumerate, 3);
  CHECK_THROWS_AS(small.sample<int>(die, even, t), SupportTooLarge);
}

TEST_CASE("built protocol drops a round and keeps the bandwidth") {
  auto cfg = micro();
  for (const auto& name : protocol_names()) {
    const auto pi = make_protocol(name, 1);
    const auto built = build_pi_r_minus_1(pi, cfg);
    CHECK(built.rounds == 0);
    CHECK(built.bandwidth <= pi.bandwidth);
    Tape t(3);
    auto h = sample_level(cfg.params, 0, t);
    auto res = simulate(built, h.graph, Randomness{9});
    CHECK(res.transcript.entries.empty());
  }
}

TEST_CASE("elimination report counters") {
  auto cfg = micro();
  std::vector<TrialRecord> recs;
  auto rep = run_elimination(make_protocol("type-broadcast", 1), cfg, 20, 4, &recs);
  CHECK(rep.trials == 20);
  CHECK(recs.size() == 20);
  CHECK(rep.rounds_used == 0);
  CHECK(rep.consistency_failures == 0);
  CHECK(rep.consistency_checked > 0);
  CHECK(rep.predicted_degradation == doctest::Approx(degradation_bound(1, 1)));
  // deterministic in the seed
  auto again = run_elimination(make_protocol("type-broadcast", 1), micro(), 20, 4);
  CHECK(again.successes == rep.successes);
}

TEST_CASE("constant-message elimination is lossless") {
  auto cfg = micro();
  cfg.seed_space = 16;
  const auto pi = make_protocol("constant-message", 1);
  CHECK(exact_success(build_pi_r_minus_1(pi, cfg), enumerate_g0(1)) == exact_success(pi, reduced_g1_support(cfg.params)));
}

TEST_CASE("sampled stages re-evaluate consistently") {
  auto cfg = micro();
  const auto pi = make_protocol("type-broadcast", 1);
  Tape t(12);
  for (auto h : {Hybrid::DTildeReal, Hybrid::H1, Hybrid::H2, Hybrid::DFake}) {
    auto s = hybrid_sampler(h, pi, cfg, t);
    CHECK(s.instance.level() == 1);
    CHECK(s.round1.max_len() <= 1);
    if (!s.fallback) CHECK(s.consistent);
    CHECK(parse_hybrid(hybrid_name(h)) == h);
  }
  auto d = dreal_sampler(pi, cfg.params, 1, t);
  CHECK_FALSE(d.collision);
  CHECK(d.round1 == first_round(pi, d.instance.graph));
}

TEST_CASE("r >= 2 elimination is refused on an infeasible auxiliary schedule") {
  EliminationConfig cfg;
  cfg.params = custom_params(1, {{40, 8, 1, 1, 1}, {10000, 40, 1, 1, 1}});
  cfg.level = 2;
  const auto pi = make_protocol("type-broadcast", 2);
  // building is lazy; the first trial samples the public stage
  CHECK(build_pi_r_minus_1(pi, cfg).rounds == 1);
  CHECK_THROWS_AS(run_elimination(pi, cfg, 1, 1), InfeasibleParams);
}

TEST_CASE("bound calculators") {
  CHECK(degradation_bound(10000, 1) == doctest::Approx(1e-4 + 0.15));
  CHECK_THROWS(degradation_bound(0, 1));
  auto t = bandwidth_bound(mpz_class(1) << 68, 1);
  CHECK(t.precondition);
  CHECK(t.log2_bound == doctest::Approx(1.0 - std::log2(230400.0)));
  CHECK_FALSE(bandwidth_bound(1, 1).precondition);
  auto c = contradiction_chain(1, 64);
  CHECK(c.premise_n0_gt_r4);
  CHECK(c.premise_32r_le_n0);
  CHECK(c.all_hold());
  CHECK_FALSE(contradiction_chain(1, 2).all_hold());
}
