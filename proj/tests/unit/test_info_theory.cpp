#include <doctest.h>

#include <cmath>

#include "relim/info_theory.hpp"
#include "relim/rng.hpp"

using namespace relim;

namespace {

// plain nested-loop entropy in bits, independent of the library's marginals
double h_bits(const std::map<Outcome, double>& e) {
  double h = 0;
  for (const auto& [_, p] : e) {
    if (p > 0) h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

TEST_CASE("entropy of known laws") {
  FiniteDistribution fair{{{{0}, 0.5}, {{1}, 0.5}}};
  CHECK(entropy(fair) == doctest::Approx(1.0));
  FiniteDistribution point{{{{3}, 1.0}}};
  CHECK(entropy(point) == doctest::Approx(0.0));
  FiniteDistribution four{{{{0}, 0.25}, {{1}, 0.25}, {{2}, 0.25}, {{3}, 0.25}}};
  CHECK(entropy(four) == doctest::Approx(2.0));
}

TEST_CASE("XOR table: pairwise independent, jointly dependent") {
  std::map<Outcome, double> e;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) e[{a, b, a ^ b}] = 0.25;
  JointTable j({"A", "B", "C"}, e);
  CHECK(mutual_info(j, {"A"}, {"B"}) == doctest::Approx(0.0));
  CHECK(cond_mutual_info(j, {"A"}, {"B"}, {"C"}) == doctest::Approx(1.0));
  CHECK(cond_entropy(j, {"C"}, {"A", "B"}) == doctest::Approx(0.0));
  CHECK(entropy(j, {"A", "B", "C"}) == doctest::Approx(2.0));
}

TEST_CASE("library entropy matches a direct computation") {
  Tape t(1);
  for (int k = 0; k < 100; ++k) {
    auto j = random_table({"A", "B"}, {3, 4}, t);
    CHECK(entropy(j, {"A", "B"}) == doctest::Approx(h_bits(j.entries())).epsilon(1e-12));
    std::map<Outcome, double> ma;
    for (const auto& [o, p] : j.entries()) ma[{o[0]}] += p;
    CHECK(entropy(j, {"A"}) == doctest::Approx(h_bits(ma)).epsilon(1e-12));
  }
}

TEST_CASE("KL and TVD") {
  FiniteDistribution p{{{{0}, 1.0}}};
  FiniteDistribution q{{{{0}, 0.5}, {{1}, 0.5}}};
  CHECK(tvd(p, q) == doctest::Approx(0.5));
  CHECK(kl(p, q).value == doctest::Approx(1.0));
  CHECK_FALSE(kl(p, q).infinite);
  CHECK(kl(q, p).infinite);
  auto pr = pinsker_check(q, p);
  CHECK(pr.holds);
  CHECK(std::isinf(pr.bound));
  CHECK(tvd(p, p) == 0.0);
}

TEST_CASE("validation") {
  FiniteDistribution bad{{{{0}, 0.7}, {{1}, 0.7}}};
  CHECK_THROWS_AS(bad.validate(), InvalidDistribution);
  FiniteDistribution neg{{{{0}, 1.2}, {{1}, -0.2}}};
  CHECK_THROWS_AS(neg.validate(), InvalidDistribution);
  JointTable j({"A"}, {{{0}, 1.0}});
  CHECK_THROWS_AS(j.index("Z"), InvalidCoordinate);
  CHECK_THROWS_AS(JointTable({"A", "B"}, {{{0}, 1.0}}), InvalidDistribution);
}

TEST_CASE("identities and inequalities on random tables") {
  Tape t(2);
  for (int k = 0; k < 300; ++k) {
    auto j = random_table({"A", "B", "C"}, {2, 3, 2}, t);
    CHECK(chain_rule_gap(j, {"A"}, {"B"}, {"C"}) <= 1e-9);
    CHECK(mi_kl_identity_check(j, {"A"}, {"B"}, {"C"}) <= 1e-9);
    auto m = monotonicity_checks(j);
    CHECK(m.mi_le_entropy);
    CHECK(m.conditioning_lowers_entropy);
    auto pq = random_pair({"X", "Y"}, {2, 3}, {}, t);
    CHECK(tvd_chain_bound_check(pq.first, pq.second).holds);
    CHECK(pinsker_check(pq.first.marginal({"X", "Y"}), pq.second.marginal({"X", "Y"})).holds);
    auto xz = random_pair({"X", "Z"}, {3, 2}, {"Z"}, t);
    auto oc = overconditioning_check(xz.first, xz.second, {"Z"});
    CHECK(oc.holds);
  }
}

TEST_CASE("conditional-independence families") {
  Tape t(3);
  for (int k = 0; k < 200; ++k) {
    auto a = random_factored_table(Independence::AperpDgivenC, {2, 2, 2, 3}, t);
    CHECK(cond_mutual_info(a, {"A"}, {"D"}, {"C"}) <= 1e-9);
    CHECK(monotonicity_checks(a, Independence::AperpDgivenC).extra_condition_raises_mi);
    auto b = random_factored_table(Independence::AperpDgivenBC, {3, 2, 2, 2}, t);
    CHECK(cond_mutual_info(b, {"A"}, {"D"}, {"B", "C"}) <= 1e-9);
    CHECK(monotonicity_checks(b, Independence::AperpDgivenBC).extra_condition_lowers_mi);
  }
  // a generic table does not satisfy the declared premise
  auto j = random_table({"A", "B", "C", "D"}, {2, 2, 2, 2}, t, 0.0);
  CHECK_THROWS_AS(monotonicity_checks(j, Independence::AperpDgivenC), PremiseViolated);
}

TEST_CASE("over-conditioning needs equal Z marginals") {
  Tape t(4);
  auto pq = random_pair({"X", "Z"}, {2, 2}, {}, t);
  CHECK_THROWS_AS(overconditioning_check(pq.first, pq.second, {"Z"}), PremiseViolated);
}

TEST_CASE("TVD chain bound with a nu-null prefix") {
  JointTable mu({"X1", "X2"}, {{{0, 0}, 0.5}, {{1, 0}, 0.5}});
  JointTable nu({"X1", "X2"}, {{{0, 0}, 0.5}, {{0, 1}, 0.5}});
  auto b = tvd_chain_bound_check(mu, nu);
  CHECK(b.lhs == doctest::Approx(0.5));
  // 1/2 + (1/2)(1/2) + (1/2)(1): the null prefix X1=1 counts fully
  CHECK(b.rhs == doctest::Approx(1.25));
  CHECK(b.holds);
}
