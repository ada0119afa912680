"""Pure-Python float kernels; the fallback for :mod:`divstable._fastkernel`."""

from __future__ import annotations


def cut_height_float(values, target):
    ordered = sorted(values)
    n = len(ordered)
    prefix = 0.0
    for k, v in enumerate(ordered):
        if prefix + v * (n - k) >= target:
            return (target - prefix) / (n - k)
        prefix += v
    return ordered[-1] if ordered else 0.0


def run_plain_float(firm_edges, worker_edges, cap, qf, qw, tol, max_iter):
    """Plain two-phase iterations in binary64, without aggregation.

    Stops when phase 1 respects every worker quota (up to ``tol``), when no
    edge moved by ``tol`` or more during an iteration, or after ``max_iter``
    iterations.  Returns ``(x, iterations, converged)``.
    """
    m = len(cap)
    x = [0.0] * m
    locked = [False] * m
    it = 0
    while it < max_iter:
        it += 1
        xt = list(x)
        for i, edges in enumerate(firm_edges):
            residual = qf[i]
            free = []
            for k in edges:
                if locked[k]:
                    residual -= x[k]
                else:
                    free.append(k)
            if residual < 0.0:
                residual = 0.0
            total = 0.0
            for k in free:
                total += cap[k]
            if total > residual:
                r = cut_height_float([cap[k] for k in free], residual)
                for k in free:
                    xt[k] = r if r < cap[k] else cap[k]
            else:
                for k in free:
                    xt[k] = cap[k]
        over = False
        for j, edges in enumerate(worker_edges):
            s = 0.0
            for k in edges:
                s += xt[k]
            if s > qw[j] + tol:
                over = True
                break
        if not over:
            return xt, it, True
        change = 0.0
        xn = list(xt)
        for j, edges in enumerate(worker_edges):
            s = 0.0
            for k in edges:
                s += xt[k]
            if s > qw[j]:
                r = cut_height_float([xt[k] for k in edges], qw[j])
                for k in edges:
                    if xt[k] > r:
                        xn[k] = r
                        locked[k] = True
        for k in range(m):
            d = abs(xn[k] - x[k])
            if d > change:
                change = d
        x = xn
        if change < tol:
            return x, it, True
    return x, it, False
