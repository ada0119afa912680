"""Instances, assignments, local views and their JSON formats.

All scalars are :class:`fractions.Fraction`.  Input documents may carry
quotas and capacities as strings (``"p/q"`` or decimal) or as JSON numbers;
numbers are converted exactly from their decimal text, never via binary
floating point.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Optional, Sequence

Scalar = Fraction

KINDS = ("bipartite", "graph", "hypergraph")
SIDES = ("F", "W")


class InstanceError(ValueError):
    """Raised when an instance document is invalid.

    ``violations`` lists every problem found, not just the first one.
    """

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class AssignmentError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    """An internal invariant of a solver failed.  Always a bug."""


def to_scalar(raw: Any) -> Fraction:
    """Convert a JSON value to an exact rational.

    Floats are converted through their shortest repr, so ``0.1`` becomes
    ``1/10`` rather than the nearest binary64 value.
    """
    if isinstance(raw, bool):
        raise ValueError(f"not a number: {raw!r}")
    if isinstance(raw, Fraction):
        return raw
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        return Fraction(repr(raw))
    if isinstance(raw, str):
        return Fraction(raw.strip())
    raise ValueError(f"not a number: {raw!r}")


def format_scalar(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Vertex:
    id: str
    quota: Fraction
    side: Optional[str] = None


@dataclass(frozen=True)
class Edge:
    id: str
    ends: tuple[str, ...]
    capacity: Fraction


@dataclass(frozen=True)
class Instance:
    kind: str
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    # derived lookups, filled in __post_init__
    _vertex_index: Mapping[str, Vertex] = field(init=False, repr=False, compare=False)
    _edge_index: Mapping[str, Edge] = field(init=False, repr=False, compare=False)
    _incidence: Mapping[str, tuple[str, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vindex = {v.id: v for v in self.vertices}
        eindex = {e.id: e for e in self.edges}
        inc: dict[str, list[str]] = {v.id: [] for v in self.vertices}
        for e in self.edges:
            for u in dict.fromkeys(e.ends):
                if u in inc:
                    inc[u].append(e.id)
        object.__setattr__(self, "_vertex_index", MappingProxyType(vindex))
        object.__setattr__(self, "_edge_index", MappingProxyType(eindex))
        object.__setattr__(
            self, "_incidence", MappingProxyType({k: tuple(v) for k, v in inc.items()})
        )

    def vertex(self, vid: str) -> Vertex:
        try:
            return self._vertex_index[vid]
        except KeyError:
            raise KeyError(f"unknown vertex {vid!r}") from None

    def edge(self, eid: str) -> Edge:
        try:
            return self._edge_index[eid]
        except KeyError:
            raise KeyError(f"unknown edge {eid!r}") from None

    def incident(self, vid: str) -> tuple[str, ...]:
        """Incident edge ids of ``vid`` in instance edge-list order."""
        self.vertex(vid)
        return self._incidence[vid]

    def quota(self, vid: str) -> Fraction:
        return self.vertex(vid).quota

    def capacity(self, eid: str) -> Fraction:
        return self.edge(eid).capacity

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    @property
    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.vertices)

    def side_ids(self, side: str) -> tuple[str, ...]:
        return tuple(v.id for v in self.vertices if v.side == side)

    def to_document(self) -> dict:
        vertices = []
        for v in self.vertices:
            doc: dict[str, Any] = {"id": v.id}
            if self.kind == "bipartite":
                doc["side"] = v.side
            doc["quota"] = format_scalar(v.quota)
            vertices.append(doc)
        edges = [
            {"id": e.id, "ends": list(e.ends), "capacity": format_scalar(e.capacity)}
            for e in self.edges
        ]
        return {"kind": self.kind, "vertices": vertices, "edges": edges}

    def dumps(self) -> str:
        return json.dumps(self.to_document(), indent=2) + "\n"

    def sha256(self) -> str:
        canon = json.dumps(self.to_document(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def validate_instance(raw: Mapping[str, Any]) -> Instance:
    """Build an :class:`Instance` from a parsed JSON document.

    Collects every violation before raising :class:`InstanceError`.
    """
    errors: list[str] = []
    if not isinstance(raw, Mapping):
        raise InstanceError(["document is not an object"])
    kind = raw.get("kind")
    if kind not in KINDS:
        errors.append(f"unknown kind {kind!r}")
    raw_vertices = raw.get("vertices", [])
    raw_edges = raw.get("edges", [])
    if not isinstance(raw_vertices, list):
        errors.append("vertices is not a list")
        raw_vertices = []
    if not isinstance(raw_edges, list):
        errors.append("edges is not a list")
        raw_edges = []

    vertices: list[Vertex] = []
    seen_ids: set[str] = set()
    for k, rv in enumerate(raw_vertices):
        if not isinstance(rv, Mapping) or not isinstance(rv.get("id"), str):
            errors.append(f"vertex #{k}: missing string id")
            continue
        vid = rv["id"]
        if vid in seen_ids:
            errors.append(f"duplicate id {vid!r}")
        seen_ids.add(vid)
        try:
            quota = to_scalar(rv.get("quota"))
        except (ValueError, ZeroDivisionError):
            errors.append(f"vertex {vid!r}: bad quota {rv.get('quota')!r}")
            continue
        if quota < 0:
            errors.append(f"vertex {vid!r}: negative quota {format_scalar(quota)}")
        side = rv.get("side")
        if kind == "bipartite":
            if side not in SIDES:
                errors.append(f"vertex {vid!r}: bipartite vertex needs side F or W")
        elif side is not None:
            errors.append(f"vertex {vid!r}: side is only allowed for bipartite instances")
        vertices.append(Vertex(vid, quota, side if kind == "bipartite" else None))

    sides = {v.id: v.side for v in vertices}
    edges: list[Edge] = []
    for k, re_ in enumerate(raw_edges):
        if not isinstance(re_, Mapping) or not isinstance(re_.get("id"), str):
            errors.append(f"edge #{k}: missing string id")
            continue
        eid = re_["id"]
        if eid in seen_ids:
            errors.append(f"duplicate id {eid!r}")
        seen_ids.add(eid)
        ends = re_.get("ends")
        if not isinstance(ends, list) or not all(isinstance(u, str) for u in ends):
            errors.append(f"edge {eid!r}: ends must be a list of vertex ids")
            continue
        try:
            cap = to_scalar(re_.get("capacity"))
        except (ValueError, ZeroDivisionError):
            errors.append(f"edge {eid!r}: bad capacity {re_.get('capacity')!r}")
            continue
        if cap < 0:
            errors.append(f"edge {eid!r}: negative capacity {format_scalar(cap)}")
        for u in ends:
            if u not in sides:
                errors.append(f"edge {eid!r}: unknown vertex reference {u!r}")
        if kind in ("bipartite", "graph"):
            if len(ends) != 2:
                errors.append(f"edge {eid!r}: needs exactly 2 ends")
            elif ends[0] == ends[1]:
                errors.append(f"edge {eid!r}: loops are not allowed")
            elif kind == "bipartite" and all(u in sides for u in ends):
                if sides[ends[0]] == sides[ends[1]]:
                    errors.append(f"edge {eid!r}: edge within one part")
        elif kind == "hypergraph":
            if len(ends) < 1:
                errors.append(f"edge {eid!r}: hyperedge needs at least one end")
            elif len(set(ends)) != len(ends):
                errors.append(f"edge {eid!r}: hyperedge with repeated ends")
        edges.append(Edge(eid, tuple(ends), cap))

    if errors:
        raise InstanceError(errors)
    return Instance(kind, tuple(vertices), tuple(edges))


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return validate_instance(json.load(fh))


def loads_instance(text: str) -> Instance:
    return validate_instance(json.loads(text))


class Assignment:
    """Admissible assignment: a value in ``[0, b(e)]`` for every edge.

    Construction checks the domain and the box constraints; an assignment
    cannot exist in an inadmissible state.
    """

    __slots__ = ("_values",)

    def __init__(self, inst: Instance, values: Mapping[str, Any]):
        vals: dict[str, Fraction] = {}
        problems: list[str] = []
        missing = [e for e in inst.edge_ids if e not in values]
        extra = [e for e in values if e not in inst._edge_index]
        if missing:
            problems.append(f"missing values for edges {missing}")
        if extra:
            problems.append(f"values for unknown edges {extra}")
        for e in inst.edges:
            if e.id not in values:
                continue
            v = to_scalar(values[e.id])
            if v < 0:
                problems.append(f"edge {e.id!r}: negative value {format_scalar(v)}")
            elif v > e.capacity:
                problems.append(
                    f"edge {e.id!r}: value {format_scalar(v)} exceeds capacity "
                    f"{format_scalar(e.capacity)}"
                )
            vals[e.id] = v
        if problems:
            raise AssignmentError("; ".join(problems))
        self._values = MappingProxyType(vals)

    @classmethod
    def zero(cls, inst: Instance) -> "Assignment":
        return cls(inst, {e: Fraction(0) for e in inst.edge_ids})

    @property
    def values(self) -> Mapping[str, Fraction]:
        return self._values

    def __getitem__(self, eid: str) -> Fraction:
        return self._values[eid]

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return dict(self._values) == dict(other._values)

    def __hash__(self):
        return hash(frozenset(self._values.items()))

    def __repr__(self):
        body = ", ".join(f"{k}={format_scalar(v)}" for k, v in self._values.items())
        return f"Assignment({body})"

    def to_document(self, inst: Instance, mode: str = "exact") -> dict:
        return {
            "instance_sha256": inst.sha256(),
            "mode": mode,
            "values": {e: format_scalar(self._values[e]) for e in inst.edge_ids},
        }

    def dumps(self, inst: Instance) -> str:
        return json.dumps(self.to_document(inst), indent=2) + "\n"


def parse_assignment(inst: Instance, raw: Mapping[str, Any]) -> Assignment:
    if not isinstance(raw, Mapping) or not isinstance(raw.get("values"), Mapping):
        raise AssignmentError("assignment document needs a 'values' object")
    try:
        return Assignment(inst, raw["values"])
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, AssignmentError):
            raise
        raise AssignmentError(str(exc)) from None


@dataclass(frozen=True)
class LocalView:
    """One vertex's slice ``(E_v, b|E_v, q(v), x|E_v)``."""

    vertex: str
    edges: tuple[str, ...]
    caps: tuple[Fraction, ...]
    quota: Fraction
    z: tuple[Fraction, ...]

    def with_values(self, z: Iterable) -> "LocalView":
        z = tuple(z)
        if len(z) != len(self.edges):
            raise ValueError("value vector does not match the edge list")
        return LocalView(self.vertex, self.edges, self.caps, self.quota, z)


def local_view(inst: Instance, x: Assignment | Mapping[str, Fraction], v: str) -> LocalView:
    edges = inst.incident(v)
    values = x.values if isinstance(x, Assignment) else x
    return LocalView(
        vertex=v,
        edges=edges,
        caps=tuple(inst.capacity(e) for e in edges),
        quota=inst.quota(v),
        z=tuple(values[e] for e in edges),
    )


def assignment_size(view: LocalView) -> Fraction:
    return sum(view.z, Fraction(0))
