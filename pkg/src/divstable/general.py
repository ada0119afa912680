"""Non-bipartite graphs via the vertex-doubling reduction.

Every vertex ``v`` becomes a firm copy ``v|1`` and a worker copy ``v|2``;
every edge ``{u, v}`` becomes the two edges ``u|1 - v|2`` and ``v|1 - u|2``
with the same capacity.  The doubled instance has a unique stable assignment,
which is therefore symmetric under swapping the copies, and reading off one
edge of each pair gives the stable assignment of the graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .bipartite import solve_bipartite
from .model import Assignment, Instance, InvariantViolation, validate_instance
from .stability import check_stability


@dataclass(frozen=True)
class DoubledInstance:
    bipartite: Instance
    sigma: Mapping[str, str]  # involution on doubled vertex and edge ids
    pi: Mapping[str, str]  # doubled edge id -> original edge id
    lifts: Mapping[str, tuple]  # original edge id -> its two doubled edges


def _vertex_copy(v: str, k: int) -> str:
    return f"{v}|{k}"


def _edge_copy(e: str, first: str) -> str:
    return f"{e}|{first}"


def double_instance(inst: Instance) -> DoubledInstance:
    if inst.kind != "graph":
        raise ValueError(f"doubling needs a graph instance, got {inst.kind}")
    vertices = []
    for k, side in ((1, "F"), (2, "W")):
        for v in inst.vertices:
            vertices.append({"id": _vertex_copy(v.id, k), "side": side, "quota": v.quota})
    edges = []
    sigma: dict[str, str] = {}
    pi: dict[str, str] = {}
    lifts: dict[str, tuple] = {}
    for e in inst.edges:
        u, v = e.ends
        uv, vu = _edge_copy(e.id, u), _edge_copy(e.id, v)
        edges.append({"id": uv, "ends": [_vertex_copy(u, 1), _vertex_copy(v, 2)], "capacity": e.capacity})
        edges.append({"id": vu, "ends": [_vertex_copy(v, 1), _vertex_copy(u, 2)], "capacity": e.capacity})
        sigma[uv], sigma[vu] = vu, uv
        pi[uv] = pi[vu] = e.id
        lifts[e.id] = (uv, vu)
    for v in inst.vertices:
        a, b = _vertex_copy(v.id, 1), _vertex_copy(v.id, 2)
        sigma[a], sigma[b] = b, a
    doubled = validate_instance({"kind": "bipartite", "vertices": vertices, "edges": edges})
    return DoubledInstance(doubled, sigma, pi, lifts)


def lift(doubled: DoubledInstance, x: Assignment) -> Assignment:
    """The symmetric doubled assignment corresponding to a graph assignment."""
    return Assignment(doubled.bipartite, {e2: x[doubled.pi[e2]] for e2 in doubled.pi})


def project(doubled: DoubledInstance, inst: Instance, y: Assignment) -> Assignment:
    for e2, e3 in doubled.sigma.items():
        if e2 in doubled.pi and y[e2] != y[e3]:
            raise InvariantViolation(
                f"doubled solution is not symmetric on {e2!r} / {e3!r}"
            )
    return Assignment(inst, {e: y[pair[0]] for e, pair in doubled.lifts.items()})


def solve_general(inst: Instance) -> Assignment:
    doubled = double_instance(inst)
    y, _ = solve_bipartite(doubled.bipartite)
    x = project(doubled, inst, y)
    report = check_stability(inst, x)
    if not report.stable:
        raise InvariantViolation(f"projected assignment is not stable: {report.to_document()}")
    return x
