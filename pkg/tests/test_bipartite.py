import random
from fractions import Fraction as F
from pathlib import Path

import pytest

from divstable import Assignment, InvariantViolation, check_stability, validate_instance
from divstable.bipartite import (
    big_iteration,
    initial_state,
    iteration_limit,
    phase1,
    phase2,
    plain_iteration,
    solve_bipartite,
    step_limit,
)
from divstable.hypergraph import solve_hypergraph
from divstable.model import load_instance
from divstable.tooling import GenSpec, generate

from conftest import bipartite

FIXTURES = Path(__file__).parent / "fixtures"


def test_phase1_star_cut(star):
    x = phase1(star, Assignment.zero(star), {})
    assert [x[e] for e in star.edge_ids] == [F(5, 2), F(5, 2), 1]


def test_phase1_no_cut_and_fully_locked():
    inst = bipartite({"f": 10}, {"a": 9, "b": 9, "c": 9},
                     [("e1", "f", "a", 4), ("e2", "f", "b", 4), ("e3", "f", "c", 1)])
    x = phase1(inst, Assignment.zero(inst), {})
    assert [x[e] for e in inst.edge_ids] == [4, 4, 1]
    y = Assignment(inst, {"e1": 1, "e2": 2, "e3": 0})
    assert phase1(inst, y, {"f": {"e1", "e2", "e3"}}) == y


def test_phase1_rejects_overloaded_locked_set():
    inst = bipartite({"f": 1}, {"w": 9}, [("e", "f", "w", 4)])
    with pytest.raises(InvariantViolation):
        phase1(inst, Assignment(inst, {"e": 2}), {"f": {"e"}})


def test_phase2_worker_cut_locks_reduced_edges(two_firms):
    xt = Assignment(two_firms, {"e1": 2, "e2": 2})
    x, L = phase2(two_firms, xt, {})
    assert x == Assignment(two_firms, {"e1": F(3, 2), "e2": F(3, 2)})
    assert L == {"f1": {"e1"}, "f2": {"e2"}}


def test_phase2_exact_quota_is_not_an_excess():
    inst = bipartite({"f1": 5, "f2": 5}, {"w": 3}, [("a", "f1", "w", 2), ("b", "f2", "w", 1)])
    xt = Assignment(inst, {"a": 2, "b": 1})
    x, L = phase2(inst, xt, {})
    assert x == xt and not any(L.values())


def test_plain_iteration_two_firm_trace(two_firms):
    s1 = plain_iteration(initial_state(two_firms))
    assert s1.cls == "positive" and not s1.terminal
    assert s1.x_tilde == Assignment(two_firms, {"e1": 2, "e2": 2})
    assert s1.x == Assignment(two_firms, {"e1": F(3, 2), "e2": F(3, 2)})
    s2 = plain_iteration(s1)
    assert s2.terminal and s2.x == s1.x


def test_empty_instance_terminates_at_once():
    inst = bipartite({"f": 1}, {"w": 1}, [])
    s = plain_iteration(initial_state(inst))
    assert s.terminal
    x, tr = solve_bipartite(inst)
    assert x.values == {} and tr.iterations == 1


def test_solve_examples(two_firms, star):
    x, tr = solve_bipartite(two_firms)
    assert x == Assignment(two_firms, {"e1": F(3, 2), "e2": F(3, 2)}) and tr.iterations == 2
    x, tr = solve_bipartite(star)
    assert [x[e] for e in star.edge_ids] == [F(5, 2), F(5, 2), 1]
    assert tr.iterations == 1  # terminal on the first phase-1 output


def test_large_worker_quotas_stop_after_first_phase1():
    inst = generate(GenSpec(firms=4, workers=4, density=0.8, seed=7, quota_max=4))
    big = sum(e.capacity for e in inst.edges)
    doc = inst.to_document()
    for v in doc["vertices"]:
        if v["side"] == "W":
            v["quota"] = str(big)
    inst = validate_instance(doc)
    x, tr = solve_bipartite(inst)
    assert tr.iterations == 1
    assert x == phase1(inst, Assignment.zero(inst), {})


def test_step_limit_example():
    assert step_limit([F(1)], [F(1, 2)], [F(4)]) == 6


def test_step_limit_respects_quota_groups():
    xi = step_limit([F(1), F(1)], [F(1), F(1)], [F(9), F(9)], quota_groups=[((0, 1), F(6))])
    assert xi == 2


def test_step_limit_decreasing_direction_stops_at_zero():
    assert step_limit([F(1)], [F(-1, 4)], [F(2)]) == 4


def test_zero_direction_is_a_noop():
    assert step_limit([F(1)], [F(0)], [F(2)]) is None


def test_big_step_fixture():
    inst = load_instance(FIXTURES / "big_step.json")
    x, tr = solve_bipartite(inst, trace=True, debug=True)
    plain, _ = solve_bipartite(inst, aggregate=False)
    assert tr.big >= 1 and x == plain == solve_hypergraph(inst)
    assert tr.histogram()["big:homogeneous"] == 1
    doc = tr.to_document()
    assert doc["big_iterations"] == tr.big and doc["xi"]


def test_big_iteration_api_follows_homogeneous_step():
    inst = load_instance(FIXTURES / "big_step.json")
    state = initial_state(inst)
    while not state.terminal and state.cls != "homogeneous":
        state = plain_iteration(state)
    assert state.cls == "homogeneous"
    after = big_iteration(state)
    assert after.cls == "big" and after.x != state.x
    nxt = plain_iteration(after)
    assert nxt.terminal or nxt.params != state.params


def _batch(n=100):
    for s in range(n):
        yield generate(GenSpec(firms=5, workers=5, density=0.8, seed=s, denominator=3, quota_max=6))


def test_aggregation_agrees_with_plain_iterations():
    bigs = 0
    for inst in _batch():
        x, tr = solve_bipartite(inst, debug=True)
        y, tr_plain = solve_bipartite(inst, aggregate=False, debug=True)
        assert x == y
        assert tr_plain.big == 0
        bigs += tr.big
    assert bigs > 0


def test_budgets_and_circuit_breaker():
    for inst in _batch(60):
        _, tr = solve_bipartite(inst)
        m = len(inst.edges)
        assert tr.positive <= 2 * m + len(inst.side_ids("W"))
        assert tr.iterations <= iteration_limit(m)
    assert iteration_limit(3) == 100


def _shuffled(inst, rng):
    doc = inst.to_document()
    rng.shuffle(doc["vertices"])
    rng.shuffle(doc["edges"])
    return validate_instance(doc)


@pytest.mark.parametrize("seed", range(30))
def test_vertex_and_edge_order_do_not_matter(seed):
    rng = random.Random(seed)
    inst = generate(GenSpec(firms=4, workers=4, density=0.7, seed=seed, denominator=4))
    x, _ = solve_bipartite(inst)
    y, _ = solve_bipartite(_shuffled(inst, rng))
    assert dict(x.values) == dict(y.values)


def test_rejects_other_kinds(triangle):
    with pytest.raises(ValueError):
        solve_bipartite(triangle)


def test_output_is_stable_on_random_instances():
    for s in range(40):
        inst = generate(GenSpec(firms=6, workers=6, density=0.5, seed=s, denominator=6))
        x, _ = solve_bipartite(inst)
        assert check_stability(inst, x).stable
