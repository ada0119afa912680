from fractions import Fraction as F
import itertools

import pytest

from divstable import Assignment, check_stability, solve_general, solve_hypergraph
from divstable.general import double_instance, lift, project
from divstable.tooling import GenSpec, generate

from conftest import graph


def test_triangle_doubling(triangle):
    d = double_instance(triangle)
    inst = d.bipartite
    assert inst.kind == "bipartite"
    assert len(inst.edges) == 6 and len(inst.vertices) == 6
    pairs = {frozenset(e.ends) for e in inst.edges}
    assert pairs == {frozenset(p) for p in [
        ("a|1", "b|2"), ("b|1", "a|2"), ("b|1", "c|2"),
        ("c|1", "b|2"), ("c|1", "a|2"), ("a|1", "c|2")]}
    assert set(inst.side_ids("F")) == {"a|1", "b|1", "c|1"}


def test_sigma_is_an_involution_preserving_data(triangle):
    d = double_instance(triangle)
    for e in d.bipartite.edge_ids:
        assert d.sigma[d.sigma[e]] == e and d.sigma[e] != e
        assert d.pi[e] == d.pi[d.sigma[e]]
        assert d.bipartite.capacity(e) == triangle.capacity(d.pi[e])
    for v in d.bipartite.vertex_ids:
        assert d.sigma[d.sigma[v]] == v
        assert d.bipartite.quota(v) == triangle.quota(v.rsplit("|", 1)[0])


def test_single_edge_doubling():
    inst = graph({"u": 3, "v": 10}, [("uv", "uv", 5)])
    d = double_instance(inst)
    a, b = d.bipartite.edge_ids
    assert d.sigma[a] == b
    assert solve_general(inst)["uv"] == 3


def test_triangle_solution(triangle):
    x = solve_general(triangle)
    assert all(x[e] == F(3, 2) for e in triangle.edge_ids)


def test_zero_capacities():
    inst = graph({"a": 1, "b": 2, "c": 0}, [("ab", "ab", 0), ("bc", "bc", 0)])
    assert all(v == 0 for v in solve_general(inst).values.values())


def test_rejects_other_kinds(star):
    with pytest.raises(ValueError):
        double_instance(star)


@pytest.mark.parametrize("seed", range(40))
def test_agrees_with_hypergraph_solver(seed):
    inst = generate(GenSpec(kind="graph", vertices=6, density=0.5, seed=seed, denominator=4))
    assert solve_general(inst) == solve_hypergraph(inst)


@pytest.mark.parametrize("seed", range(15))
def test_lift_and_project_round_trip(seed):
    inst = generate(GenSpec(kind="graph", vertices=4, density=0.7, seed=seed, denominator=2))
    d = double_instance(inst)
    x = solve_general(inst)
    y = lift(d, x)
    assert check_stability(d.bipartite, y).stable
    assert project(d, inst, y) == x


def test_lift_of_unstable_is_unstable(triangle):
    d = double_instance(triangle)
    assert not check_stability(d.bipartite, lift(d, Assignment.zero(triangle))).stable


def test_stable_grid_points_lift_and_project_both_ways():
    # every symmetric grid point of a small doubled instance: stable iff its projection is
    inst = graph({"a": 2, "b": 1, "c": 2}, [("ab", "ab", 1), ("bc", "bc", 2)])
    d = double_instance(inst)
    grid = [F(k, 2) for k in range(5)]
    for va, vb in itertools.product(grid, repeat=2):
        if va > 1:
            continue
        x = Assignment(inst, {"ab": va, "bc": vb})
        assert check_stability(inst, x).stable == check_stability(d.bipartite, lift(d, x)).stable
