#include <doctest.h>

#include "relim/hard_distributions.hpp"
#include "relim/oracles.hpp"
#include "relim/protocol_engine.hpp"
#include "relim/protocols.hpp"

using namespace relim;

TEST_CASE("hex bit strings") {
  Bits b{true, false, true, true, false};
  CHECK(bits_to_hex(b) == "b0");
  CHECK(bits_from_hex("b0", 5) == b);
  CHECK(bits_str(b) == "10110");
  CHECK_THROWS(bits_from_hex("g", 1));
  CHECK_THROWS(bits_from_hex("f", 5));
}

TEST_CASE("simulation respects channels and bandwidth") {
  const auto p = custom_params(1, {{40, 8, 1, 1, 1}});
  Tape t(2);
  auto h = sample_level(p, 1, t);
  auto res = simulate(make_protocol("type-broadcast", 1), h.graph, Randomness{3});
  CHECK(res.transcript.max_len() == 1);
  for (const auto& [k, bits] : res.transcript.entries) CHECK(h.graph.pair_type(k.from, k.to) <= 1);

  ProtocolSpec wide = make_protocol("constant-message", 1);
  wide.message_fn = [](int, const VertexInput& in, const Inbox&, const RandomnessView&) {
    MessageMap m;
    for (auto w : in.partners_upto(1)) m[w] = Bits{true, true};
    return m;
  };
  CHECK_THROWS_AS(simulate(wide, h.graph, Randomness{}), BandwidthViolation);

  ProtocolSpec stray = make_protocol("constant-message", 1);
  stray.message_fn = [](int, const VertexInput& in, const Inbox&, const RandomnessView&) {
    MessageMap m;
    for (auto w : in.partners_upto(2)) m[w] = Bits{true};
    return m;
  };
  CHECK_THROWS_AS(simulate(stray, h.graph, Randomness{}), ChannelViolation);
  CHECK_THROWS_AS(simulate(make_protocol("all-no", 0), h.graph, Randomness{}), RegimeMismatch);
}

TEST_CASE("same seed, same transcript") {
  const auto p = custom_params(1, {{40, 8, 1, 1, 1}});
  Tape t(8);
  auto h = sample_level(p, 1, t);
  const auto pi = make_protocol("parity-of-type-0-count", 1);
  CHECK(simulate(pi, h.graph, Randomness{5}).transcript == simulate(pi, h.graph, Randomness{5}).transcript);
  CHECK(first_round(pi, h.graph) == simulate(pi, h.graph, Randomness{}).transcript.round(1));
}

TEST_CASE("judge: YES iff some vertex says yes on a triangle") {
  GraphBuilder b(1, 0);
  b.set({Layer::A, 1}, {Layer::B, 1}, 0);
  b.set({Layer::A, 1}, {Layer::C, 1}, 0);
  b.set({Layer::B, 1}, {Layer::C, 1}, 0);
  auto g = std::move(b).build();
  CHECK(judge(g, std::vector<bool>{false, true, false}));
  CHECK_FALSE(judge(g, std::vector<bool>{false, false, false}));
  auto empty = TypedTripartiteGraph(1, 0);
  CHECK(judge(empty, std::vector<bool>{false, false, false}));
  CHECK_FALSE(judge(empty, std::vector<bool>{true, false, false}));
  CHECK_THROWS(judge(empty, std::vector<bool>{true}));
}

TEST_CASE("exact success of the trivial protocols on G_0") {
  for (std::int64_t n0 : {1, 2}) {
    CHECK(exact_success(make_protocol("all-no", 0), enumerate_g0(n0)) == mpq_class(7, 8));
    CHECK(exact_success(make_protocol("always-yes", 0), enumerate_g0(n0)) == mpq_class(1, 8));
  }
  // a wedge-detector is wrong exactly on the three two-edge patterns
  CHECK(exact_success(make_protocol("type-broadcast", 0), enumerate_g0(2)) == mpq_class(5, 8));
}

TEST_CASE("symmetry-reduced supports need identity-oblivious protocols") {
  const auto p = custom_params(1, {{40, 8, 1, 1, 1}});
  CHECK_THROWS(exact_success(make_protocol("parity-of-type-0-count", 1), reduced_g1_support(p)));
  CHECK(exact_success(make_protocol("all-no", 1), reduced_g1_support(p)) == mpq_class(7, 8));
}

TEST_CASE("estimate_success is reproducible and independent of jobs") {
  const auto p = custom_params(1, {{40, 8, 1, 1, 1}});
  auto sampler = [&](Tape& t) { return sample_level(p, 1, t).graph; };
  const auto pi = make_protocol("all-no", 1);
  auto a = estimate_success(pi, sampler, 400, 11, 1);
  auto b = estimate_success(pi, sampler, 400, 11, 4);
  CHECK(a.successes == b.successes);
  CHECK(a.lo <= a.frequency);
  CHECK(a.frequency <= a.hi);
  CHECK(std::abs(a.frequency - 0.875) < 0.06);
}

TEST_CASE("Wilson interval") {
  auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo == doctest::Approx(0.40383).epsilon(1e-4));
  CHECK(hi == doctest::Approx(0.59617).epsilon(1e-4));
  CHECK(wilson_interval(0, 0).second == 1.0);
}

TEST_CASE("unknown protocol name") { CHECK_THROWS_AS(make_protocol("nope", 1), std::invalid_argument); }
