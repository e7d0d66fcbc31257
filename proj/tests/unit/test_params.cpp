#include <doctest.h>

#include "relim/params.hpp"

using namespace relim;

TEST_CASE("canonical schedule sizes") {
  auto p = canonical_params(2, 1);
  CHECK(p.canonical);
  CHECK(p.top() == 1);
  CHECK(p.at(1).n == mpz_pow(2, 34));
  CHECK_THROWS_AS(p.require_samplable(1), InfeasibleParams);
  CHECK_NOTHROW(p.require_samplable(0));
}

TEST_CASE("custom schedule feasibility") {
  auto ok = feasibility_check(custom_params(2, {{2000, 8, 1, 1, 1}}));
  CHECK(ok.gr_ok);
  CHECK(ok.levels.at(0).room_ok);
  CHECK(ok.levels.at(0).star_fit_ok);

  // room: n_0 (2 d (l+1) + 1) < n_1
  auto cramped = feasibility_check(custom_params(2, {{60, 8, 1, 1, 1}}));
  CHECK_FALSE(cramped.gr_ok);
  CHECK_FALSE(cramped.violations().empty());

  // completion needs d >= n_0 + vertex budget
  auto tight = feasibility_check(custom_params(1, {{2000, 3, 2, 2, 2}}));
  CHECK_FALSE(tight.levels.at(0).completion_ok);
  CHECK_FALSE(tight.gr_tilde_ok);

  CHECK(feasibility_check(custom_params(1, {{40, 8, 1, 1, 1}})).ok());
}

TEST_CASE("auxiliary count per vertex and layer") {
  // alpha n + (r+1) n beta (2n - 1) + gamma (r+1) n
  CHECK(exact_vertex_aux_count(1, 1, 1, 1, 1) == 1 + 2 * 1 + 2);
  CHECK(exact_vertex_aux_count(2, 1, 1, 1, 1) == 2 + 2 * 2 * 3 + 4);
  CHECK(exact_vertex_aux_count(3, 2, 2, 1, 4) == 6 + 3 * 3 * 5 + 4 * 3 * 3);
}

TEST_CASE("bad schedules") {
  CHECK_THROWS(custom_params(0, {{10, 1, 1, 1, 1}}));
  CHECK_THROWS(custom_params(1, {{10, 0, 1, 1, 1}}));
  CHECK_THROWS(canonical_params(1, -1));
  CHECK_THROWS_AS(custom_params(1, {{40, 8, 1, 1, 1}}).require_samplable(2), InfeasibleParams);
}
