from fractions import Fraction as F

import pytest

from divstable import check_stability, pivot, solve_hypergraph
from divstable.tooling import GenSpec, generate

from conftest import graph


def test_triangle_pivot_and_solution(triangle):
    p = pivot(triangle)
    assert p.value == F(3, 2) and p.edge == "ab" and p.witness_vertex == "a"
    x, steps = solve_hypergraph(triangle, return_steps=True)
    assert steps == 3 and all(x[e] == F(3, 2) for e in triangle.edge_ids)


def test_single_hyperedge():
    inst = graph({"a": 4, "b": 2, "c": 3}, [("e", "abc", 5)], kind="hypergraph")
    p = pivot(inst)
    assert p.value == 2 and p.witness_vertex == "b"
    assert solve_hypergraph(inst)["e"] == 2


def test_zero_quota_forces_zero_first():
    inst = graph({"a": 0, "b": 5}, [("x", "ab", 3), ("y", "b", 3)], kind="hypergraph")
    assert pivot(inst).value == 0


def test_empty_hypergraph():
    inst = graph({"a": 1}, [], kind="hypergraph")
    assert solve_hypergraph(inst).values == {}
    with pytest.raises(ValueError):
        pivot(inst)


@pytest.mark.parametrize("seed", range(30))
def test_steps_and_tie_break_independence(seed):
    inst = generate(GenSpec(kind="hypergraph", vertices=5, seed=seed, denominator=2,
                            cap_max=3, quota_max=4, edges=7))
    x, steps = solve_hypergraph(inst, return_steps=True)
    assert steps == len(inst.edges)
    assert check_stability(inst, x).stable
    for k in range(5):
        assert solve_hypergraph(inst, pivot_seed=k) == x


def test_bipartite_instances_are_accepted(star):
    x = solve_hypergraph(star)
    assert [x[e] for e in star.edge_ids] == [F(5, 2), F(5, 2), 1]
