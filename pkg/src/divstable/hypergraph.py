"""Recursive minimum-fixing solver for hypergraphs (and graphs as 2-uniform ones).

At every step each vertex water-fills its remaining capacities against its
remaining quota; the smallest value produced anywhere is forced in every
stable assignment, so that edge is fixed at that value, removed, and the
quotas of its ends are reduced.  Exactly one edge is fixed per step.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .choice import choose
from .model import Assignment, Instance, InvariantViolation
from .stability import check_stability


@dataclass(frozen=True)
class PivotChoice:
    edge: str
    value: Fraction
    witness_vertex: str


def _candidates(inst: Instance, remaining: dict, quotas: dict):
    """All ``(value, edge, vertex)`` triples attaining the global minimum."""
    best = None
    found = []
    for v in inst.vertex_ids:
        edges = [e for e in inst.incident(v) if e in remaining]
        if not edges:
            continue
        chosen = choose([inst.capacity(e) for e in edges], quotas[v]).chosen
        m_v = min(chosen)
        if best is not None and m_v > best:
            continue
        if best is None or m_v < best:
            best = m_v
            found = []
        found.extend((m_v, e, v) for e, val in zip(edges, chosen) if val == m_v)
    return found


def _pick(found, rng: Optional[random.Random]) -> PivotChoice:
    if rng is None:
        value, edge, vertex = min(found, key=lambda t: (t[0], t[1], t[2]))
    else:
        value, edge, vertex = rng.choice(sorted(found, key=lambda t: (t[1], t[2])))
    return PivotChoice(edge, value, vertex)


def pivot(inst: Instance) -> PivotChoice:
    """The forced edge of the full instance, with the deterministic tie-break."""
    if not inst.edges:
        raise ValueError("pivot needs at least one edge")
    remaining = dict.fromkeys(inst.edge_ids)
    return _pick(_candidates(inst, remaining, {v.id: v.quota for v in inst.vertices}), None)


def pivot_sequence(inst: Instance, pivot_seed: Optional[int] = None) -> Iterator[PivotChoice]:
    """Yield one pivot per recursion step until every edge is fixed.

    With ``pivot_seed`` set, ties among minimal candidates are broken by a
    seeded RNG instead of lexicographically.
    """
    if inst.kind not in ("hypergraph", "graph", "bipartite"):
        raise ValueError(f"hypergraph solver does not take {inst.kind} instances")
    rng = random.Random(pivot_seed) if pivot_seed is not None else None
    remaining = dict.fromkeys(inst.edge_ids)
    quotas = {v.id: v.quota for v in inst.vertices}
    while remaining:
        choice = _pick(_candidates(inst, remaining, quotas), rng)
        del remaining[choice.edge]
        for v in dict.fromkeys(inst.edge(choice.edge).ends):
            quotas[v] -= choice.value
            if quotas[v] < 0:
                raise InvariantViolation(
                    f"quota of {v!r} went negative after fixing {choice.edge!r}"
                )
        yield choice


def solve_hypergraph(
    inst: Instance, *, pivot_seed: Optional[int] = None, return_steps: bool = False
):
    """Compute the unique stable assignment by repeated minimum fixing.

    Returns the assignment, or ``(assignment, steps)`` with ``return_steps``.
    """
    values = {}
    steps = 0
    for p in pivot_sequence(inst, pivot_seed):
        values[p.edge] = p.value
        steps += 1
    x = Assignment(inst, values)
    report = check_stability(inst, x)
    if not report.stable:
        raise InvariantViolation(f"hypergraph solver output is not stable: {report.to_document()}")
    if return_steps:
        return x, steps
    return x
