"""Instance generation and the independent oracles used for cross-checking.

* :func:`generate` draws deterministic random instances on a rational grid.
* :func:`reference_solve_float` runs plain two-phase iterations in binary64
  (no locking bookkeeping beyond what the iteration itself needs, no
  aggregation).
* :func:`enumerate_stable_grid` brute-forces tiny instances through the
  stability checker alone.
* :func:`compare` runs every applicable solver and reports a verdict.
"""

from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from . import kernels
from .bipartite import solve_bipartite
from .general import solve_general
from .hypergraph import solve_hypergraph
from .model import (
    Assignment,
    Instance,
    InstanceError,
    InvariantViolation,
    format_scalar,
    to_scalar,
    validate_instance,
)
from .stability import check_stability

MAX_ENUM_EDGES = 4


@dataclass(frozen=True)
class GenSpec:
    kind: str = "bipartite"
    firms: int = 3
    workers: int = 3
    vertices: int = 4  # graph and hypergraph kinds
    density: float = 0.5
    cap_min: Fraction = Fraction(0)
    cap_max: Fraction = Fraction(5)
    quota_min: Fraction = Fraction(0)
    quota_max: Fraction = Fraction(8)
    denominator: int = 4
    seed: int = 0
    max_arity: int = 3  # hypergraph only
    edges: Optional[int] = None  # hypergraph edge count; derived from density if None


def _grid_value(rng: random.Random, lo: Fraction, hi: Fraction, d: int) -> Fraction:
    k_lo = math.ceil(Fraction(lo) * d)
    k_hi = math.floor(Fraction(hi) * d)
    if k_lo > k_hi:
        raise ValueError(f"no grid point k/{d} in [{lo}, {hi}]")
    return Fraction(rng.randint(k_lo, k_hi), d)


def generate(spec: GenSpec) -> Instance:
    """Draw an instance from ``spec``; the same spec always gives the same bytes."""
    if spec.kind not in ("bipartite", "graph", "hypergraph"):
        raise ValueError(f"unknown kind {spec.kind!r}")
    if not 0 < spec.density <= 1:
        raise ValueError("density must lie in (0, 1]")
    if spec.denominator < 1:
        raise ValueError("denominator must be positive")
    if min(spec.cap_min, spec.quota_min) < 0:
        raise ValueError("ranges must be nonnegative")
    rng = random.Random(spec.seed)
    d = spec.denominator

    def quota():
        return format_scalar(_grid_value(rng, spec.quota_min, spec.quota_max, d))

    def cap():
        return format_scalar(_grid_value(rng, spec.cap_min, spec.cap_max, d))

    vertices, edges = [], []
    if spec.kind == "bipartite":
        if spec.firms + spec.workers == 0:
            raise ValueError("cannot generate edges over zero vertices")
        firms = [f"f{i + 1}" for i in range(spec.firms)]
        workers = [f"w{j + 1}" for j in range(spec.workers)]
        vertices += [{"id": f, "side": "F", "quota": quota()} for f in firms]
        vertices += [{"id": w, "side": "W", "quota": quota()} for w in workers]
        for f, w in itertools.product(firms, workers):
            if rng.random() < spec.density:
                edges.append({"id": f"e{len(edges) + 1}", "ends": [f, w], "capacity": cap()})
    else:
        n = spec.vertices
        if n == 0:
            raise ValueError("cannot generate edges over zero vertices")
        names = [f"v{i + 1}" for i in range(n)]
        vertices += [{"id": v, "quota": quota()} for v in names]
        if spec.kind == "graph":
            for a, b in itertools.combinations(names, 2):
                if rng.random() < spec.density:
                    edges.append({"id": f"e{len(edges) + 1}", "ends": [a, b], "capacity": cap()})
        else:
            count = spec.edges if spec.edges is not None else max(1, round(spec.density * 2 * n))
            top = max(1, min(spec.max_arity, n))
            for _ in range(count):
                ends = rng.sample(names, rng.randint(1, top))
                edges.append({"id": f"e{len(edges) + 1}", "ends": ends, "capacity": cap()})
    return validate_instance({"kind": spec.kind, "vertices": vertices, "edges": edges})


@dataclass(frozen=True)
class FloatResult:
    values: dict  # edge id -> float
    iterations: int
    converged: bool
    backend: str

    def to_document(self, inst: Instance) -> dict:
        return {
            "instance_sha256": inst.sha256(),
            "mode": "float",
            "values": {e: repr(v) for e, v in self.values.items()},
        }


def reference_solve_float(
    inst: Instance, tol: float = 1e-12, max_iter: int = 10**6, *, backend: Optional[str] = None
) -> FloatResult:
    """Approximate the stable assignment by plain float iterations.

    Non-convergence within ``max_iter`` is reported in the result, not raised.
    """
    if inst.kind != "bipartite":
        raise ValueError("the float reference solver takes bipartite instances only")
    if not tol > 0:
        raise ValueError("tol must be positive")
    impl = kernels.BACKENDS[backend] if backend else kernels
    index = {e: k for k, e in enumerate(inst.edge_ids)}
    firms = inst.side_ids("F")
    workers = inst.side_ids("W")
    xs, iterations, converged = impl.run_plain_float(
        [[index[e] for e in inst.incident(f)] for f in firms],
        [[index[e] for e in inst.incident(w)] for w in workers],
        [float(inst.capacity(e)) for e in inst.edge_ids],
        [float(inst.quota(f)) for f in firms],
        [float(inst.quota(w)) for w in workers],
        float(tol),
        int(max_iter),
    )
    return FloatResult(
        dict(zip(inst.edge_ids, xs)),
        iterations,
        converged,
        backend or kernels.BACKEND,
    )


def enumerate_stable_grid(inst: Instance, step) -> list[Assignment]:
    """Every stable assignment whose values are multiples of ``step``.

    Partial assignments that already overload a vertex are pruned.
    """
    step = to_scalar(step)
    if step <= 0:
        raise ValueError("step must be positive")
    if len(inst.edges) > MAX_ENUM_EDGES:
        raise ValueError(
            f"enumeration is limited to {MAX_ENUM_EDGES} edges (got {len(inst.edges)})"
        )
    order = inst.edge_ids
    grids = [
        [k * step for k in range(int(inst.capacity(e) // step) + 1)] for e in order
    ]
    load = {v: Fraction(0) for v in inst.vertex_ids}
    found = []
    values = {}

    def walk(i):
        if i == len(order):
            x = Assignment(inst, values)
            if check_stability(inst, x).stable:
                found.append(x)
            return
        e = order[i]
        ends = tuple(dict.fromkeys(inst.edge(e).ends))
        for val in grids[i]:
            if any(load[v] + val > inst.quota(v) for v in ends):
                break  # grid is ascending
            for v in ends:
                load[v] += val
            values[e] = val
            walk(i + 1)
            for v in ends:
                load[v] -= val
        values.pop(e, None)

    walk(0)
    return found


@dataclass
class CompareReport:
    kind: str
    sha256: str
    verdict: str = "AGREE"
    outputs: dict = field(default_factory=dict)  # solver -> {edge: "p/q"}
    stable: dict = field(default_factory=dict)  # solver -> bool
    errors: dict = field(default_factory=dict)  # solver -> message
    float_max_error: Optional[float] = None
    float_converged: Optional[bool] = None
    float_iterations: Optional[int] = None
    notes: list = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return self.verdict == "AGREE"

    def to_document(self) -> dict:
        return {
            "kind": self.kind,
            "instance_sha256": self.sha256,
            "verdict": self.verdict,
            "outputs": self.outputs,
            "stable": self.stable,
            "errors": self.errors,
            "float_max_error": self.float_max_error,
            "float_converged": self.float_converged,
            "float_iterations": self.float_iterations,
            "notes": self.notes,
        }


def _exact_solvers(kind: str):
    if kind == "bipartite":
        return {
            "solve_bipartite": lambda inst: solve_bipartite(inst)[0],
            "solve_hypergraph": solve_hypergraph,
        }
    if kind == "graph":
        return {"solve_general": solve_general, "solve_hypergraph": solve_hypergraph}
    return {"solve_hypergraph": solve_hypergraph}


def compare(
    inst: Instance, *, float_tol: float = 1e-12, agree_tol: float = 1e-9, max_iter: int = 10**6
) -> CompareReport:
    """Run every applicable solver on ``inst`` and cross-check the results."""
    report = CompareReport(inst.kind, inst.sha256())
    results = {}
    for name, solver in _exact_solvers(inst.kind).items():
        try:
            x = solver(inst)
        except (InvariantViolation, AssertionError) as exc:
            report.errors[name] = f"{type(exc).__name__}: {exc}"
            continue
        results[name] = x
        report.outputs[name] = {e: format_scalar(v) for e, v in x.values.items()}
        report.stable[name] = check_stability(inst, x).stable

    distinct = {tuple(sorted(x.values.items())) for x in results.values()}
    if report.errors or len(distinct) > 1 or not all(report.stable.values()):
        report.verdict = "DISAGREE"

    if inst.kind == "bipartite":
        ref = reference_solve_float(inst, float_tol, max_iter)
        report.float_converged = ref.converged
        report.float_iterations = ref.iterations
        report.outputs["reference_float"] = {e: repr(v) for e, v in ref.values.items()}
        if not ref.converged:
            report.notes.append("float reference did not converge; float comparison skipped")
        elif results:
            exact = next(iter(results.values()))
            err = max((abs(float(exact[e]) - ref.values[e]) for e in inst.edge_ids), default=0.0)
            report.float_max_error = err
            if err > agree_tol:
                report.verdict = "DISAGREE"
    return report


def _compare_doc(doc: dict) -> dict:
    return compare(validate_instance(doc)).to_document()


def compare_many(instances: Iterable[Instance], jobs: int = 1) -> list[dict]:
    """Compare a batch of instances, optionally across ``jobs`` processes."""
    docs = [inst.to_document() for inst in instances]
    if jobs <= 1:
        return [_compare_doc(d) for d in docs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_compare_doc, docs))


__all__ = [
    "GenSpec", "generate", "FloatResult", "reference_solve_float",
    "enumerate_stable_grid", "CompareReport", "compare", "compare_many",
    "InstanceError",
]
