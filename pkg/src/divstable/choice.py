"""The diversifying choice function and the head/tail combinatorics around it.

A vertex with quota ``q`` accepts a bundle ``z`` unchanged when ``|z| <= q``;
otherwise it caps every coordinate at the unique height ``r`` with
``sum(min(r, z_e)) == q``.  Everything here works on exact rationals; the
numeric helpers also accept floats, which is what the reference solver uses.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .model import LocalView


@dataclass(frozen=True)
class CutResult:
    chosen: tuple
    height: Optional[Fraction] = None


@dataclass(frozen=True)
class Partition:
    head: frozenset
    tail: frozenset
    at_bound: frozenset
    fully_filling: bool

    def satiated(self, edge: str) -> bool:
        return edge in self.head or edge in self.at_bound


def cut_height(values: Sequence, target):
    """Return the unique ``r >= 0`` with ``sum(min(r, v) for v in values) == target``.

    Requires ``sum(values) > target >= 0``.  Sort-and-scan with prefix sums;
    the final division is exact for rational input.
    """
    if target < 0:
        raise ValueError("cut target must be nonnegative")
    total = sum(values)
    if not total > target:
        raise ValueError(
            f"cut_height needs sum(values) > target (got {total} <= {target})"
        )
    ordered = sorted(values)
    n = len(ordered)
    inexact = isinstance(target, float) or any(isinstance(v, float) for v in ordered)
    prefix = 0
    for k, v in enumerate(ordered):
        remaining = n - k
        # all values from k on are >= v, so capping at v fills prefix + v*remaining
        if prefix + v * remaining >= target:
            if inexact:
                return (target - prefix) / remaining
            return Fraction(target - prefix) / remaining
        prefix += v
    raise AssertionError("unreachable: total exceeds target")


def choose(z: Sequence, quota) -> CutResult:
    """Apply the diversifying choice function to a raw value vector."""
    z = tuple(z)
    if sum(z) <= quota:
        return CutResult(z, None)
    r = cut_height(z, quota)
    return CutResult(tuple(v if v < r else r for v in z), r)


def apply_choice(view: LocalView) -> CutResult:
    return choose(view.z, view.quota)


def _eq(a, b, tol) -> bool:
    if tol is None:
        return a == b
    return abs(a - b) <= tol


def classify(view: LocalView, tol=None) -> Partition:
    """Head, tail and at-bound sets of a rational bundle.

    ``tol`` switches to tolerance comparisons (float mode); exact otherwise.
    """
    total = sum(view.z)
    if tol is None:
        if total > view.quota:
            raise ValueError(
                f"vertex {view.vertex!r}: bundle of size {total} exceeds quota "
                f"{view.quota}; classify needs a rational bundle"
            )
    elif total > view.quota + tol:
        raise ValueError(f"vertex {view.vertex!r}: bundle exceeds quota")
    full = _eq(total, view.quota, tol)
    at_bound = frozenset(e for e, v, b in zip(view.edges, view.z, view.caps) if _eq(v, b, tol))
    if full and view.edges:
        top = max(view.z)
        head = frozenset(e for e, v in zip(view.edges, view.z) if _eq(v, top, tol))
    else:
        head = frozenset()
    tail = frozenset(view.edges) - head
    return Partition(head, tail, at_bound, full)


def _same_frame(a: LocalView, b: LocalView) -> None:
    if a.edges != b.edges or a.caps != b.caps or a.quota != b.quota:
        raise ValueError("views are over different edge sets, capacities or quotas")


def _join_raw(a: LocalView, b: LocalView) -> tuple:
    return tuple(max(u, v) for u, v in zip(a.z, b.z))


def prefers(view_a: LocalView, view_b: LocalView) -> bool:
    """Revealed preference ``z >= z'``: ``C(z v z') == z``.

    Also cross-checks the closed-form characterization through the tail of
    ``z`` and raises ``AssertionError`` on disagreement.
    """
    _same_frame(view_a, view_b)
    result = choose(_join_raw(view_a, view_b), view_a.quota).chosen == view_a.z

    part = classify(view_a)
    if part.fully_filling:
        closed = all(
            u >= v
            for e, u, v in zip(view_a.edges, view_a.z, view_b.z)
            if e in part.tail
        )
    else:
        closed = all(v <= u for u, v in zip(view_a.z, view_b.z))
    if closed != result:
        raise AssertionError(
            f"preference characterization disagrees at vertex {view_a.vertex!r}"
        )
    return result


def join(view_a: LocalView, view_b: LocalView) -> tuple:
    """Lattice join ``C(z v z')`` of two rational bundles."""
    _same_frame(view_a, view_b)
    return choose(_join_raw(view_a, view_b), view_a.quota).chosen
