"""Rationality and stability checking.

This module is the repository's independent judge: it recomputes every head
and tail from the raw assignment and never looks at solver internals.  An
edge blocks when *every* endpoint finds it non-satiated, i.e. it lies in the
endpoint's tail and is strictly below capacity.  For ordinary edges that is
the usual two-sided condition; hyperedges use the same rule over all ends.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .choice import Partition, classify
from .model import Assignment, Instance, format_scalar, local_view


@dataclass(frozen=True)
class EndEvidence:
    vertex: str
    fully_filling: bool
    value: Fraction
    capacity: Fraction

    def to_document(self) -> dict:
        return {
            "vertex": self.vertex,
            "in_tail": True,
            "fully_filling": self.fully_filling,
            "value": format_scalar(self.value),
            "capacity": format_scalar(self.capacity),
        }


@dataclass(frozen=True)
class StabilityReport:
    rational: bool
    stable: bool
    blocking_edges: list = field(default_factory=list)  # (edge id, [EndEvidence])
    irrational_vertices: list = field(default_factory=list)

    def to_document(self) -> dict:
        return {
            "rational": self.rational,
            "stable": self.stable,
            "irrational_vertices": list(self.irrational_vertices),
            "blocking_edges": [
                {"edge": e, "ends": [ev.to_document() for ev in evidence]}
                for e, evidence in self.blocking_edges
            ],
        }


def is_rational(inst: Instance, x: Assignment) -> tuple[bool, list[str]]:
    bad = [
        v.id
        for v in inst.vertices
        if sum((x[e] for e in inst.incident(v.id)), Fraction(0)) > v.quota
    ]
    return not bad, bad


def _partitions(inst: Instance, x: Assignment) -> dict[str, Partition]:
    return {v: classify(local_view(inst, x, v)) for v in inst.vertex_ids}


def _blocking_with_evidence(inst: Instance, x: Assignment) -> list:
    parts = _partitions(inst, x)
    found = []
    for e in inst.edges:
        value = x[e.id]
        if value >= e.capacity:
            continue
        ends = tuple(dict.fromkeys(e.ends))
        if all(e.id in parts[v].tail for v in ends):
            found.append(
                (
                    e.id,
                    [EndEvidence(v, parts[v].fully_filling, value, e.capacity) for v in ends],
                )
            )
    return found


def blocking_edges(inst: Instance, x: Assignment) -> list[str]:
    ok, bad = is_rational(inst, x)
    if not ok:
        raise ValueError(f"assignment is not rational at {bad}")
    return [e for e, _ in _blocking_with_evidence(inst, x)]


def check_stability(inst: Instance, x: Assignment) -> StabilityReport:
    rational, bad = is_rational(inst, x)
    if not rational:
        return StabilityReport(False, False, [], bad)
    blocking = _blocking_with_evidence(inst, x)
    return StabilityReport(True, not blocking, blocking, [])


def is_stable(inst: Instance, x: Assignment) -> bool:
    return check_stability(inst, x).stable
