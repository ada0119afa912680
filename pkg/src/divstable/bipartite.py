"""Two-phase iterative solver for bipartite (firm/worker) instances.

Each iteration raises every firm's unlocked edges to capacity and water-fills
them down to the firm's residual quota (phase 1), then lets every worker over
quota cut its bundle (phase 2).  An edge that a worker cuts is locked for its
firm from then on.  The process stops as soon as phase 1 produces a bundle
that every worker accepts.

Inside a stretch where the combinatorial structure (locked sets, heads,
saturated edges) does not change, the worker cut heights follow an affine
map.  Such a stretch is replaced by one aggregated step that moves straight
towards the map's fixed point, stopping early at the first structure change;
see :func:`big_iteration`.

All arithmetic is exact (:class:`fractions.Fraction`).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .choice import classify, cut_height, prefers
from .model import Assignment, Instance, InvariantViolation, local_view
from .stability import check_stability

ZERO = Fraction(0)


@dataclass(frozen=True)
class Params:
    """Monotone bookkeeping quantities of one iteration start.

    ``locked`` and ``firm_heads`` are per firm, ``worker_heads`` per worker
    (0 for workers below quota, likewise for firms), ``filled`` counts
    workers at quota and ``tail_at_cap`` counts worker-tail edges at capacity.
    Firm heads refer to the firms' phase-1 bundles.
    """

    locked: tuple
    worker_heads: tuple
    filled: int
    firm_heads: tuple
    tail_at_cap: int


@dataclass
class IterationRecord:
    index: int
    kind: str  # "plain" | "big" | "terminal"
    cls: Optional[str]  # "positive" | "homogeneous" | "boundary"
    params: Params
    decrement: Fraction = ZERO  # total amount cut by workers in phase 2
    xi: Optional[Fraction] = None

    def to_document(self) -> dict:
        doc = {"index": self.index, "kind": self.kind, "class": self.cls}
        if self.kind == "plain":
            doc["decrement"] = str(self.decrement)
        if self.xi is not None:
            doc["xi"] = str(self.xi)
        return doc


@dataclass
class SolverTrace:
    iterations: int = 0
    plain: int = 0
    big: int = 0
    positive: int = 0
    records: list = field(default_factory=list)
    xis: list = field(default_factory=list)

    def histogram(self) -> dict:
        return dict(Counter(f"{r.kind}:{r.cls}" if r.cls else r.kind for r in self.records))

    def to_document(self) -> dict:
        return {
            "iterations": self.iterations,
            "plain_iterations": self.plain,
            "big_iterations": self.big,
            "positive_iterations": self.positive,
            "xi": [str(v) for v in self.xis],
            "class_histogram": self.histogram(),
            "records": [r.to_document() for r in self.records],
        }


class _Net:
    """Index-based view of a bipartite instance."""

    def __init__(self, inst: Instance):
        if inst.kind != "bipartite":
            raise ValueError(f"bipartite solver got a {inst.kind} instance")
        self.inst = inst
        self.firms = inst.side_ids("F")
        self.workers = inst.side_ids("W")
        fpos = {f: i for i, f in enumerate(self.firms)}
        wpos = {w: j for j, w in enumerate(self.workers)}
        self.eids = inst.edge_ids
        self.epos = {e: k for k, e in enumerate(self.eids)}
        self.efirm: list[int] = []
        self.eworker: list[int] = []
        self.cap = [e.capacity for e in inst.edges]
        self.fedges: list[list[int]] = [[] for _ in self.firms]
        self.wedges: list[list[int]] = [[] for _ in self.workers]
        for k, e in enumerate(inst.edges):
            a, b = e.ends
            f, w = (a, b) if inst.vertex(a).side == "F" else (b, a)
            self.efirm.append(fpos[f])
            self.eworker.append(wpos[w])
            self.fedges[fpos[f]].append(k)
            self.wedges[wpos[w]].append(k)
        self.qf = [inst.quota(f) for f in self.firms]
        self.qw = [inst.quota(w) for w in self.workers]

    # conversions -----------------------------------------------------------

    def to_list(self, x: Assignment) -> list:
        return [x[e] for e in self.eids]

    def to_assignment(self, xs: list) -> Assignment:
        return Assignment(self.inst, dict(zip(self.eids, xs)))

    def to_flags(self, L: Mapping[str, Iterable[str]]) -> list:
        flags = [False] * len(self.eids)
        for f, edges in L.items():
            i = self.firms.index(f)
            for e in edges:
                k = self.epos[e]
                if self.efirm[k] != i:
                    raise ValueError(f"edge {e!r} is not incident to firm {f!r}")
                flags[k] = True
        return flags

    def to_sets(self, flags: list) -> dict:
        return {
            f: frozenset(self.eids[k] for k in self.fedges[i] if flags[k])
            for i, f in enumerate(self.firms)
        }

    # the two phases --------------------------------------------------------

    def phase1(self, x: list, locked: list) -> list:
        xt = list(x)
        for i, edges in enumerate(self.fedges):
            residual = self.qf[i] - sum((x[k] for k in edges if locked[k]), ZERO)
            if residual < 0:
                raise InvariantViolation(
                    f"firm {self.firms[i]!r}: locked edges exceed the quota"
                )
            free = [k for k in edges if not locked[k]]
            caps = [self.cap[k] for k in free]
            if sum(caps, ZERO) > residual:
                r = cut_height(caps, residual)
                for k in free:
                    xt[k] = min(r, self.cap[k])
            else:
                for k in free:
                    xt[k] = self.cap[k]
        for k in range(len(x)):
            if xt[k] < x[k]:
                raise InvariantViolation(f"phase 1 decreased edge {self.eids[k]!r}")
        return xt

    def within_worker_quotas(self, xt: list) -> bool:
        return all(
            sum((xt[k] for k in edges), ZERO) <= self.qw[j]
            for j, edges in enumerate(self.wedges)
        )

    def phase2(self, xt: list, locked: list) -> tuple[list, list, Fraction]:
        xn = list(xt)
        new_locked = list(locked)
        dec = ZERO
        for j, edges in enumerate(self.wedges):
            vals = [xt[k] for k in edges]
            if sum(vals, ZERO) > self.qw[j]:
                r = cut_height(vals, self.qw[j])
                for k in edges:
                    if xt[k] > r:
                        dec += xt[k] - r
                        xn[k] = r
                        new_locked[k] = True
        return xn, new_locked, dec

    # bookkeeping -----------------------------------------------------------

    def params(self, x: list, locked: list, xt: Optional[list] = None) -> Params:
        """Parameters of the state ``(x, locked)``.

        Firm heads are read from the phase-1 output of the state (``xt``,
        computed when not given): that is where firms are filled up, while
        right after a worker cut they are typically below quota.
        """
        if xt is None:
            xt = self.phase1(x, locked)
        locked_sizes = tuple(sum(1 for k in edges if locked[k]) for edges in self.fedges)
        wheads = []
        filled = 0
        tail_at_cap = 0
        for j, edges in enumerate(self.wedges):
            vals = [x[k] for k in edges]
            full = sum(vals, ZERO) == self.qw[j]
            top = max(vals) if (full and vals) else None
            if full:
                filled += 1
            h = 0
            for k in edges:
                if top is not None and x[k] == top:
                    h += 1
                elif x[k] == self.cap[k]:
                    tail_at_cap += 1
            wheads.append(h)
        fheads = []
        for i, edges in enumerate(self.fedges):
            vals = [xt[k] for k in edges]
            if vals and sum(vals, ZERO) == self.qf[i]:
                top = max(vals)
                fheads.append(sum(1 for v in vals if v == top))
            else:
                fheads.append(0)
        return Params(locked_sizes, tuple(wheads), filled, tuple(fheads), tail_at_cap)

    # debug-mode lemma checks -------------------------------------------------

    def check_locked_in_heads(self, x: list, locked: list) -> None:
        xa = dict(zip(self.eids, x))
        for j, w in enumerate(self.workers):
            edges = self.wedges[j]
            if not any(locked[k] for k in edges):
                continue
            part = classify(local_view(self.inst, xa, w))
            for k in edges:
                if locked[k] and self.eids[k] not in part.head:
                    raise InvariantViolation(
                        f"locked edge {self.eids[k]!r} is not in the head of worker {w!r}"
                    )

    def check_worker_monotone(self, x_old: list, x_new: list) -> None:
        old = dict(zip(self.eids, x_old))
        new = dict(zip(self.eids, x_new))
        for w in self.workers:
            if not prefers(local_view(self.inst, new, w), local_view(self.inst, old, w)):
                raise InvariantViolation(f"worker {w!r} got a less preferred bundle")

    # aggregation -----------------------------------------------------------

    def structure(self, x: list, locked: list):
        """Read off the affine regime of a post-phase-2 state.

        Returns ``(firm_height, free, worker_height, locked_at)`` or ``None``
        when the state does not have the regular shape the affine model
        needs.  ``free[i]`` are firm ``i``'s unlocked edges strictly below
        capacity, all sharing the phase-1 height ``firm_height[i]``;
        ``locked_at[j]`` are the locked edges at worker ``j``, all at the
        worker's cut height ``worker_height[j]``.
        """
        firm_height: dict[int, Fraction] = {}
        free: dict[int, list] = {}
        for i, edges in enumerate(self.fedges):
            below = [k for k in edges if not locked[k] and x[k] < self.cap[k]]
            if below:
                r = x[below[0]]
                if any(x[k] != r for k in below):
                    return None
                firm_height[i] = r
                free[i] = below
        worker_height: dict[int, Fraction] = {}
        locked_at: dict[int, list] = {}
        for j, edges in enumerate(self.wedges):
            lk = [k for k in edges if locked[k]]
            if lk:
                s = x[lk[0]]
                if any(x[k] != s for k in lk):
                    return None
                if sum((x[k] for k in edges), ZERO) != self.qw[j]:
                    return None
                worker_height[j] = s
                locked_at[j] = lk
        return firm_height, free, worker_height, locked_at

    def affine_model(self, x: list, locked: list, struct):
        """Linear equations ``A u = c`` of the regime's fixed point.

        Unknowns are the active firms' heights followed by the locked
        workers' heights.
        """
        firm_height, free, worker_height, locked_at = struct
        firm_vars = sorted(firm_height)
        worker_vars = sorted(worker_height)
        fcol = {i: n for n, i in enumerate(firm_vars)}
        wcol = {j: len(firm_vars) + n for n, j in enumerate(worker_vars)}
        size = len(firm_vars) + len(worker_vars)
        rows, rhs = [], []
        for i in firm_vars:
            row = [ZERO] * size
            row[fcol[i]] += len(free[i])
            const = self.qf[i]
            free_set = set(free[i])
            for k in self.fedges[i]:
                if locked[k]:
                    row[wcol[self.eworker[k]]] += 1
                elif k not in free_set:
                    const -= self.cap[k]
            rows.append(row)
            rhs.append(const)
        free_of = {k: i for i, ks in free.items() for k in ks}
        for j in worker_vars:
            row = [ZERO] * size
            row[wcol[j]] += len(locked_at[j])
            const = self.qw[j]
            for k in self.wedges[j]:
                if locked[k]:
                    continue
                if k in free_of:
                    row[fcol[free_of[k]]] += 1
                else:
                    const -= x[k]
            rows.append(row)
            rhs.append(const)

        return firm_vars, worker_vars, fcol, wcol, rows, rhs

    def edge_targets(self, locked, struct, r: dict, s: dict, base: list) -> list:
        _, free, _, _ = struct
        out = list(base)
        for i, ks in free.items():
            for k in ks:
                out[k] = r[i]
        for k in range(len(base)):
            if locked[k]:
                out[k] = s[self.eworker[k]]
        return out

    def step_constraints(self, base: list, direction: list, locked: list, struct):
        """Affine constraints ``a + t*c <= 0`` keeping the regime valid."""
        _, _, worker_height, locked_at = struct
        cons = []
        for k in range(len(base)):
            cons.append((-base[k], -direction[k]))
            cons.append((base[k] - self.cap[k], direction[k]))
        for j, edges in enumerate(self.wedges):
            if j in worker_height:
                ref = locked_at[j][0]
                for k in edges:
                    if not locked[k]:
                        cons.append((base[k] - base[ref], direction[k] - direction[ref]))
            else:
                cons.append(
                    (
                        sum((base[k] for k in edges), ZERO) - self.qw[j],
                        sum((direction[k] for k in edges), ZERO),
                    )
                )
        for i, edges in enumerate(self.fedges):
            cons.append(
                (
                    sum((base[k] for k in edges), ZERO) - self.qf[i],
                    sum((direction[k] for k in edges), ZERO),
                )
            )
        return cons


def _ratio_limit(constraints, upper=None):
    """Largest ``t >= 0`` with ``a + t*c <= 0`` for all pairs, capped at ``upper``.

    Returns ``None`` when nothing bounds ``t``.
    """
    best = upper
    for a, c in constraints:
        if c > 0:
            t = -a / c
            if t < 0:
                t = ZERO
            if best is None or t < best:
                best = t
    return best


def step_limit(values, direction, caps, quota_groups=()):
    """Maximal ``xi`` keeping ``values + xi*direction`` inside the box and quotas.

    ``quota_groups`` is an iterable of ``(indices, quota)`` pairs whose sums
    must stay within the quota.  Returns ``None`` for a zero direction.
    """
    if not any(direction):
        return None
    cons = []
    for v, d, b in zip(values, direction, caps):
        cons.append((-v, -d))
        cons.append((v - b, d))
    for idx, q in quota_groups:
        cons.append(
            (sum((values[k] for k in idx), ZERO) - q, sum((direction[k] for k in idx), ZERO))
        )
    xi = _ratio_limit(cons)
    if xi is None:
        raise InvariantViolation("unbounded homogeneous direction")
    return xi


def _solve_exact(rows, rhs):
    """Gauss-Jordan elimination over the rationals; ``None`` if singular."""
    n = len(rows)
    a = [list(r) + [c] for r, c in zip(rows, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / Fraction(a[col][col])
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [u - f * v for u, v in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def _aggregate(net: _Net, x: list, locked: list):
    """One big iteration from the post-phase-2 state ``x``.

    Returns ``(new_x, xi)`` or ``None`` when no useful step exists.

    While the regime persists, worker heights evolve by an affine map whose
    fixed point solves the regime's equations.  The step moves along the
    segment from ``x`` towards that fixed point, as far as the regime stays
    valid (``xi`` in (0, 1]).  Every point of the segment is a legitimate
    iteration state: both endpoints satisfy the worker equations and phase 1
    keeps lifting along it.

    A locked edge always sits strictly below its firm's height and a free edge
    at or below its worker's height, so the height dependencies are acyclic and
    the fixed point exists and lies below the current heights.  A singular
    system or a fixed point above the current state contradicts that and is
    reported as an invariant violation.
    """
    struct = net.structure(x, locked)
    if struct is None:
        return None
    firm_height, free, worker_height, locked_at = struct
    firm_vars, worker_vars, fcol, wcol, rows, rhs = net.affine_model(x, locked, struct)

    sol = _solve_exact(rows, rhs) if rows else []
    if sol is None:
        raise InvariantViolation("unbounded homogeneous direction: regime equations are singular")
    r_star = {i: sol[fcol[i]] for i in firm_vars}
    s_star = {j: sol[wcol[j]] for j in worker_vars}
    if any(r_star[i] < firm_height[i] for i in firm_vars) or any(
        s_star[j] > worker_height[j] for j in worker_vars
    ):
        raise InvariantViolation("regime fixed point lies above the current worker heights")
    target = net.edge_targets(locked, struct, r_star, s_star, x)
    direction = [t - v for t, v in zip(target, x)]
    if not any(direction):
        return None
    xi = _ratio_limit(net.step_constraints(x, direction, locked, struct), Fraction(1))
    if xi == 0:
        return None
    return [v + xi * d for v, d in zip(x, direction)], xi


# public step API ------------------------------------------------------------


@dataclass(frozen=True)
class IterationState:
    """Solver state at the start of an iteration.

    ``cls`` classifies the iteration that led here; ``x_tilde`` is that
    iteration's phase-1 output.
    """

    inst: Instance
    x: Assignment
    L: Mapping[str, frozenset]
    params: Params
    cls: Optional[str] = None
    terminal: bool = False
    x_tilde: Optional[Assignment] = None


def phase1(inst: Instance, x: Assignment, L: Mapping[str, Iterable[str]]) -> Assignment:
    net = _Net(inst)
    return net.to_assignment(net.phase1(net.to_list(x), net.to_flags(L)))


def phase2(
    inst: Instance, x_tilde: Assignment, L: Mapping[str, Iterable[str]]
) -> tuple[Assignment, dict]:
    net = _Net(inst)
    xn, flags, _ = net.phase2(net.to_list(x_tilde), net.to_flags(L))
    return net.to_assignment(xn), net.to_sets(flags)


def initial_state(inst: Instance) -> IterationState:
    net = _Net(inst)
    x = [ZERO] * len(net.eids)
    flags = [False] * len(net.eids)
    return IterationState(inst, net.to_assignment(x), net.to_sets(flags), net.params(x, flags))


def _classify_step(before: Params, after: Params) -> str:
    grew = (
        any(b > a for a, b in zip(before.locked, after.locked))
        or any(b > a for a, b in zip(before.worker_heads, after.worker_heads))
        or after.filled > before.filled
    )
    if grew:
        return "positive"
    if before == after:
        return "homogeneous"
    return "boundary"


def plain_iteration(state: IterationState) -> IterationState:
    net = _Net(state.inst)
    x = net.to_list(state.x)
    flags = net.to_flags(state.L)
    xt = net.phase1(x, flags)
    if net.within_worker_quotas(xt):
        xa = net.to_assignment(xt)
        return IterationState(state.inst, xa, state.L, state.params, None, True, xa)
    xn, new_flags, _ = net.phase2(xt, flags)
    params = net.params(xn, new_flags)
    return IterationState(
        state.inst,
        net.to_assignment(xn),
        net.to_sets(new_flags),
        params,
        _classify_step(state.params, params),
        False,
        net.to_assignment(xt),
    )


def big_iteration(state: IterationState) -> IterationState:
    """Aggregate a homogeneous stretch; a no-op when no step is available.

    Meant to follow a plain iteration classified ``homogeneous``.
    """
    if state.terminal:
        return state
    net = _Net(state.inst)
    flags = net.to_flags(state.L)
    res = _aggregate(net, net.to_list(state.x), flags)
    if res is None:
        return state
    new_x, _ = res
    return IterationState(
        state.inst,
        net.to_assignment(new_x),
        state.L,
        net.params(new_x, flags),
        "big",
    )


def iteration_limit(n_edges: int) -> int:
    return 10 * n_edges * n_edges + 10


def solve_bipartite(
    inst: Instance, *, trace: bool = False, debug: bool = False, aggregate: bool = True
) -> tuple[Assignment, SolverTrace]:
    """Compute the unique stable assignment of a bipartite instance.

    ``debug`` turns on per-iteration checks of worker preference
    monotonicity, of locked edges sitting in worker heads and of the
    parameter monotonicity; ``aggregate=False`` runs plain iterations only.
    """
    net = _Net(inst)
    m = len(net.eids)
    limit = iteration_limit(m)
    x = [ZERO] * m
    locked = [False] * m
    xt = net.phase1(x, locked)
    params = net.params(x, locked, xt)
    tr = SolverTrace()
    pending: Optional[Params] = None  # params before the last big step

    def check_monotone(before: Params, after: Params, positive: bool) -> None:
        if any(b < a for a, b in zip(before.locked, after.locked)):
            raise InvariantViolation("a locked set shrank")
        if any(b < a for a, b in zip(before.worker_heads, after.worker_heads)):
            raise InvariantViolation("a worker head shrank")
        if after.filled < before.filled:
            raise InvariantViolation("a worker dropped below its quota")
        if not positive:
            if any(b > a for a, b in zip(before.firm_heads, after.firm_heads)):
                raise InvariantViolation("a firm head grew in a non-positive step")
            if after.tail_at_cap < before.tail_at_cap:
                raise InvariantViolation("tail edges left capacity in a non-positive step")

    while True:
        if tr.iterations >= limit:
            raise InvariantViolation(
                f"iteration limit {limit} exceeded on {m} edges (circuit breaker)"
            )
        tr.iterations += 1
        tr.plain += 1
        if net.within_worker_quotas(xt):
            if trace:
                tr.records.append(IterationRecord(tr.iterations, "terminal", None, params))
            x = xt
            break
        xn, new_locked, dec = net.phase2(xt, locked)
        xt_next = net.phase1(xn, new_locked)
        new_params = net.params(xn, new_locked, xt_next)
        cls = _classify_step(params, new_params)
        if cls == "positive":
            tr.positive += 1
        if debug:
            net.check_worker_monotone(x, xn)
            net.check_locked_in_heads(xn, new_locked)
            check_monotone(params, new_params, cls == "positive")
        if pending is not None:
            if new_params == pending:
                raise InvariantViolation("big iteration did not change any parameter")
            pending = None
        if trace:
            tr.records.append(IterationRecord(tr.iterations, "plain", cls, new_params, dec))
        x, locked, params, xt = xn, new_locked, new_params, xt_next

        if aggregate and cls == "homogeneous":
            res = _aggregate(net, x, locked)
            if res is not None:
                x_big, xi = res
                if tr.iterations >= limit:
                    continue
                tr.iterations += 1
                tr.big += 1
                tr.xis.append(xi)
                xt = net.phase1(x_big, locked)
                big_params = net.params(x_big, locked, xt)
                big_cls = _classify_step(params, big_params)
                if big_cls == "positive":
                    tr.positive += 1
                if debug:
                    net.check_worker_monotone(x, x_big)
                    net.check_locked_in_heads(x_big, locked)
                    check_monotone(params, big_params, big_cls == "positive")
                if trace:
                    tr.records.append(
                        IterationRecord(tr.iterations, "big", big_cls, big_params, xi=xi)
                    )
                pending = params
                x, params = x_big, big_params

    result = net.to_assignment(x)
    report = check_stability(inst, result)
    if not report.stable:
        raise InvariantViolation(
            f"solver output is not stable: {report.to_document()}"
        )
    return result, tr
