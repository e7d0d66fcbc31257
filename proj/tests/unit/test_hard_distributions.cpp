#include <doctest.h>

#include <set>

#include "../support.hpp"
#include "relim/hard_distributions.hpp"

using namespace relim;

TEST_CASE("G_0 has the starred edges only") {
  for (std::uint64_t k = 0; k < 200; ++k) {
    Tape t(k);
    auto h = sample_g0(3, t);
    CHECK(h.level() == 0);
    CHECK(h.graph.non_default_count() <= 3);
    for (auto v : h.graph.touched_vertices()) CHECK(v.index == h.starred[layer_index(v.layer)]);
  }
}

TEST_CASE("draws replay from the same tape key") {
  const auto p = custom_params(2, {{2000, 8, 1, 1, 1}});
  Tape a(77), b(77);
  CHECK(sample_gr(p, 1, a).graph == sample_gr(p, 1, b).graph);
}

TEST_CASE("recursive distribution invariants on r=1 and r=2") {
  const auto p1 = custom_params(2, {{2000, 8, 1, 1, 1}});
  for (std::uint64_t k = 0; k < 50; ++k) {
    Tape t(mix_keys({1, k}));
    CHECK(relim_test::gr_structure_failures(p1, 1, sample_gr(p1, 1, t)).empty());
  }
  const auto p2 = custom_params(1, {{40, 8, 1, 1, 1}, {10000, 40, 1, 1, 1}});
  for (std::uint64_t k = 0; k < 10; ++k) {
    Tape t(mix_keys({2, k}));
    auto h = sample_level(p2, 2, t);
    CHECK(h.level() == 2);
    CHECK(relim_test::gr_structure_failures(p2, 2, h).empty());
  }
}

TEST_CASE("canonical_gr keeps the invariants") {
  const auto p = custom_params(1, {{200, 8, 1, 1, 1}});
  Tape t(5);
  auto inner = std::make_shared<HardInstance>(sample_g0(1, t));
  auto h = canonical_gr(p, 1, inner);
  CHECK(relim_test::gr_structure_failures(p, 1, h).empty());
  CHECK(h.embedding->ids[0] == std::vector<std::int64_t>{1});
}

TEST_CASE("auxiliary distribution: disjoint sets and completion") {
  const auto p = custom_params(2, {{300000, 24, 1, 1, 1}});
  for (std::uint64_t k = 0; k < 30; ++k) {
    Tape t(mix_keys({3, k}));
    auto s = sample_gr_tilde(p, 1, t);
    CHECK(relim_test::aux_failures(p, 1, s).empty());
    // per-type degree d holds for inner vertices even when outer vertices collide
    CHECK(relim_test::gr_structure_failures(p, 1, s.instance, false).empty());
    CHECK(s.theta >= p.n(0));
  }
}

TEST_CASE("auxiliary distribution refuses schedules without completion room") {
  Tape t(1);
  CHECK_THROWS_AS(sample_gr_tilde(custom_params(1, {{2000, 3, 2, 2, 2}}), 1, t), InfeasibleParams);
  CHECK_THROWS_AS(sample_gr(canonical_params(3, 1), 1, t), InfeasibleParams);
}

TEST_CASE("D_in marginal and its conditioned version") {
  // A1 of a level-1 draw is a uniformly placed vertex: usually outer
  const auto p = custom_params(2, {{2000, 8, 1, 1, 1}});
  Tape t(9);
  auto s = sample_d_in(p, 1, t);
  CHECK(s.types[0].size() == 2000);
  // level 0 with n_0 = 2: A1 is starred w.p. 1/2, then the edge to b* w.p. 1/2
  int edges = 0;
  for (int k = 0; k < 4000; ++k) {
    auto g0 = sample_d_in(p, 0, t);
    for (int x : g0.types[0]) edges += x == 0;
  }
  CHECK(std::abs(edges - 1000) < 150);
  auto c = sample_d_in_conditioned(p, 0, 0, 1, 2, t, 100000);
  CHECK(c.rest.types[1].size() == 1);
  CHECK(c.attempts >= 1);
  Tape z(3);
  CHECK_THROWS_AS(sample_d_in_conditioned(p, 0, 2, 0, 1, z, 50), ZeroProbabilityCondition);
  CHECK_THROWS_AS(sample_d_in_conditioned(p, 0, 0, 2, 1, z, 50), std::invalid_argument);
  CHECK_THROWS_AS(sample_d_in_conditioned(p, 0, 0, 0, 3, z, 50), OutOfRange);
}

TEST_CASE("ids are distinct") {
  Tape t(4);
  auto ids = sample_ids(100, 10, t);
  for (const auto& v : ids) CHECK(std::set<std::int64_t>(v.begin(), v.end()).size() == 10);
}
