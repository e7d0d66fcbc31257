"""Python access to the relim core: samplers, protocols, oracles and bounds."""

import json
from fractions import Fraction

from . import _core
from ._core import InfeasibleParams, ValidationError, degradation_bound, protocol_names

__all__ = [
    "InfeasibleParams",
    "ValidationError",
    "protocol_names",
    "custom_params",
    "canonical_params",
    "feasibility",
    "sample_instance",
    "simulate",
    "exact_g0_triangle_prob",
    "zero_round_optimum",
    "exact_success_g0",
    "collision_rate",
    "run_elimination",
    "info",
    "degradation_bound",
    "bandwidth_bound",
    "contradiction_chain",
]


def custom_params(n0, levels):
    """levels: iterable of (n, d[, alpha, beta, gamma])."""
    out = []
    for lv in levels:
        n, d, *rest = lv
        a, b, g = (list(rest) + [1, 1, 1])[:3]
        out.append({"n": n, "d": d, "alpha": a, "beta": b, "gamma": g})
    return {"n0": n0, "levels": out}


def canonical_params(n0, r):
    return {"canonical": {"n0": n0, "r": r}}


def _p(params):
    return params if isinstance(params, str) else json.dumps(params)


def feasibility(params):
    return json.loads(_core.feasibility(_p(params)))


def sample_instance(params, level, seed=0, tilde=False):
    return json.loads(_core.sample_instance(_p(params), level, seed, tilde))


def simulate(instance, protocol, seed=0, bandwidth=1):
    inst = instance if isinstance(instance, str) else json.dumps(instance)
    out = json.loads(_core.simulate(inst, protocol, seed, bandwidth))
    out["transcript"] = [json.loads(line) for line in out["transcript"].splitlines()]
    return out


def exact_g0_triangle_prob(n0):
    return Fraction(_core.exact_g0_triangle_prob(n0))


def zero_round_optimum(n0):
    best, strategies, exhaustive, yes_entries = _core.zero_round_optimum(n0)
    return {"best": Fraction(best), "strategies": strategies, "exhaustive": exhaustive, "yes_entries": yes_entries}


def exact_success_g0(protocol, n0):
    return Fraction(_core.exact_success_g0(protocol, n0))


def collision_rate(params, trials, seed=0, jobs=1):
    return _core.collision_rate(_p(params), trials, seed, jobs)


def run_elimination(protocol, params, trials, seed=0, strategy="reject", fallback="drop", cap=20000):
    return json.loads(_core.run_elimination(protocol, _p(params), trials, seed, strategy, fallback, cap))


def info(table, measure, a, b=(), c=()):
    t = table if isinstance(table, str) else json.dumps(table)
    return json.loads(_core.info(t, measure, list(a), list(b), list(c)))["value"]


def bandwidth_bound(n_r, r):
    bound, log2_bound, pre = _core.bandwidth_bound(str(n_r), r)
    return {"bound": bound, "log2_bound": log2_bound, "precondition": pre}


def contradiction_chain(r, n0):
    ok, steps = _core.contradiction_chain(r, str(n0))
    return ok, [dict(zip(("label", "lhs", "rhs", "holds"), s)) for s in steps]
