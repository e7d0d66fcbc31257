from fractions import Fraction

import pytest

import relim

MICRO = relim.custom_params(1, [(40, 8)])


def test_protocol_registry():
    assert "type-broadcast" in relim.protocol_names()


def test_g0_oracles():
    assert relim.exact_g0_triangle_prob(3) == Fraction(1, 8)
    z = relim.zero_round_optimum(1)
    assert z["best"] == Fraction(7, 8)
    assert z["strategies"] == 4096 and z["exhaustive"] and z["yes_entries"] == 0
    assert relim.exact_success_g0("always-yes", 2) == Fraction(1, 8)


def test_sampling_and_simulation():
    s = relim.sample_instance(MICRO, 1, seed=4)
    assert s["instance"]["n"] == 40 and s["sidecar"]["level"] == 1
    again = relim.sample_instance(MICRO, 1, seed=4)
    assert s == again
    out = relim.simulate(s["instance"], "type-broadcast", seed=1)
    assert out["transcript"] and all(m["len"] == 1 for m in out["transcript"])
    t = relim.sample_instance(MICRO, 1, seed=4, tilde=True)
    assert "aux" in t["sidecar"]


def test_errors_map_to_python():
    with pytest.raises(relim.InfeasibleParams):
        relim.sample_instance(relim.canonical_params(3, 1), 1)
    with pytest.raises(relim.ValidationError):
        relim.simulate({"n": 2, "r": 0, "pairs": [["A", 1, "A", 2, 0]]}, "all-no")
    assert not relim.feasibility(relim.custom_params(1, [(2000, 3, 2, 2, 2)]))["gr_tilde_ok"]


def test_elimination_and_collisions():
    rep = relim.run_elimination("constant-message", MICRO, 5, seed=2)
    assert rep["rounds_used"] == 0 and rep["consistency_failures"] == 0
    c = relim.collision_rate(relim.custom_params(1, [(1000, 8)]), 500, seed=1)
    assert c["frequency"] <= c["bound"] + 3 * c["sigma"]


def test_info_and_bounds():
    table = {"coords": ["A", "B"], "entries": [[0, 0, 0.5], [1, 1, 0.5]]}
    assert relim.info(table, "mi", ["A"], ["B"]) == pytest.approx(1.0)
    assert relim.info(table, "entropy", ["A", "B"]) == pytest.approx(1.0)
    assert relim.degradation_bound(10000, 1) == pytest.approx(0.1501)
    t = relim.bandwidth_bound(10**68, 1)
    assert t["precondition"] and float(t["bound"]) == pytest.approx(10 / 230400)
    ok, steps = relim.contradiction_chain(2, 100)
    assert ok and all(s["holds"] for s in steps)
