#include <doctest.h>

#include <cmath>

#include "relim/oracles.hpp"
#include "relim/protocols.hpp"

using namespace relim;

TEST_CASE("G_0 support and triangle probability") {
  CHECK(g0_support(2).size() == 64);
  mpq_class mass = 0;
  for (const auto& w : g0_support(2)) mass += w.weight;
  CHECK(mass == 1);
  for (std::int64_t n0 : {1, 2, 4}) CHECK(exact_g0_triangle_prob(n0) == mpq_class(1, 8));
  auto two_edges = [](const HardInstance& h) {
    const VertexId a{Layer::A, h.starred[0]}, b{Layer::B, h.starred[1]}, c{Layer::C, h.starred[2]};
    return h.graph.pair_type(a, b) == 0 && h.graph.pair_type(a, c) == 0;
  };
  CHECK(exact_g0_triangle_prob_given(2, two_edges) == mpq_class(1, 2));
  auto absent = [](const HardInstance& h) {
    return h.graph.pair_type({Layer::A, h.starred[0]}, {Layer::B, h.starred[1]}) != 0;
  };
  CHECK(exact_g0_triangle_prob_given(2, absent) == 0);
  CHECK_THROWS_AS(exact_g0_triangle_prob_given(1, [](const HardInstance&) { return false; }),
                  ZeroProbabilityCondition);
}

TEST_CASE("zero-round optimum") {
  auto z = zero_round_optimum(1);
  CHECK(z.best == mpq_class(7, 8));
  CHECK(z.strategies == 4096);
  CHECK(z.exhaustive);
  auto reduced = zero_round_optimum(1, 100);
  CHECK_FALSE(reduced.exhaustive);
  CHECK(reduced.best == mpq_class(7, 8));
  CHECK(zero_round_optimum(2).best == mpq_class(7, 8));
  // no strategy table beats the optimum
  std::map<G0InputKey, bool> yes;
  yes[G0InputKey{{Layer::A, 1}, {1, 1}}] = true;
  CHECK(exact_success(table_protocol(yes), enumerate_g0(1)) <= z.best);
}

TEST_CASE("exact TVD on small laws") {
  Law point{{"a", mpq_class(1)}};
  Law two{{"a", mpq_class(1, 2)}, {"b", mpq_class(1, 2)}};
  Law other{{"c", mpq_class(1)}};
  CHECK(exact_tvd(point, point) == 0);
  CHECK(exact_tvd(point, two) == mpq_class(1, 2));
  CHECK(exact_tvd(two, point) == exact_tvd(point, two));
  CHECK(exact_tvd(point, other) <= exact_tvd(point, two) + exact_tvd(two, other));
  CHECK_THROWS(check_law(Law{{"a", mpq_class(1, 3)}}));
}

TEST_CASE("empirical TVD") {
  KeySampler eight = [](Tape& t) { return std::to_string(t.below(8)); };
  auto same = empirical_tvd(eight, eight, 100000, 1);
  CHECK(same.estimate <= 0.02);
  CHECK(same.keys == 8);
  KeySampler x = [](Tape&) { return std::string("x"); };
  KeySampler y = [](Tape&) { return std::string("y"); };
  CHECK(empirical_tvd(x, y, 1000, 2).estimate >= 0.99);
  Law uniform;
  for (int i = 0; i < 8; ++i) uniform[std::to_string(i)] = mpq_class(1, 8);
  CHECK(tvd_between(uniform, empirical_law(eight, 20000, 3)) <= 0.03);

  // doubling the trials does not raise the estimate beyond the noise scale
  KeySampler biased = [](Tape& t) { return std::to_string(t.below(8) + (t.unit() < 0.1 ? 8 : 0)); };
  auto lo = empirical_tvd(eight, biased, 20000, 4), hi = empirical_tvd(eight, biased, 40000, 4);
  CHECK(hi.estimate <= lo.estimate + 3 * lo.bias_scale);
}

TEST_CASE("collision rate against the exact product") {
  const auto p = custom_params(1, {{1000, 8, 1, 1, 1}});
  const double exact = exact_collision_probability(p, 1).get_d();
  auto cr = collision_rate(p, 1, 3000, 5, 4);
  CHECK(cr.frequency <= cr.bound + 3 * cr.sigma);
  const double se = std::sqrt(exact * (1 - exact) / 3000);
  CHECK(std::abs(cr.frequency - exact) <= 4 * se);
  CHECK(collision_rate(p, 1, 3000, 5, 1).collisions == cr.collisions);
  auto loose = collision_rate(custom_params(1, {{1000000, 8, 1, 1, 1}}), 1, 500, 6);
  CHECK(loose.frequency <= 0.01);
  // pigeonhole
  CHECK(exact_collision_probability(custom_params(1, {{60, 8, 1, 1, 1}}), 1) >= 0);
}

TEST_CASE("projection keys and pair-local laws") {
  const auto p = custom_params(1, {{40, 8, 1, 1, 1}});
  const auto pi = make_protocol("type-broadcast", 1);
  for (auto pr : {Projection::Instance, Projection::Transcript, Projection::InstanceTranscript}) {
    CHECK(parse_projection(projection_name(pr)) == pr);
    auto real = exact_pair_local_law(pi, p, 1, std::nullopt, pr);
    CHECK_NOTHROW(check_law(real));
    auto fake = exact_pair_local_law(pi, p, 1, Hybrid::DFake, pr);
    CHECK(exact_tvd(real, fake) == (pr == Projection::Transcript ? mpq_class(0) : exact_collision_probability(p, 1)));
  }
  CHECK_THROWS(exact_pair_local_law(make_protocol("parity-of-type-0-count", 1), p, 1, std::nullopt,
                                    Projection::Instance));
  // the empirical D_real law matches
  KeySampler s = [&](Tape& t) { return projection_key(dreal_sampler(pi, p, 1, t), Projection::InstanceTranscript); };
  auto law = exact_pair_local_law(pi, p, 1, std::nullopt, Projection::InstanceTranscript);
  CHECK(tvd_between(law, empirical_law(s, 2000, 7)) <= std::sqrt(2.0 * static_cast<double>(law.size()) / 2000));
}

TEST_CASE("overflow flag is never set in G_r") {
  const auto p = custom_params(1, {{200, 8, 1, 1, 1}});
  for (std::uint64_t k = 0; k < 20; ++k) {
    Tape t(k);
    CHECK_FALSE(overflow_flag(sample_gr(p, 1, t)));
  }
}
