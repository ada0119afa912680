# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled float kernels; same contract as :mod:`divstable._purekernel`."""

from libc.stdlib cimport malloc, free
from libc.math cimport fabs


cdef void _sort(double* a, int n) noexcept nogil:
    # insertion sort: vertex degrees are small
    cdef int i, j
    cdef double v
    for i in range(1, n):
        v = a[i]
        j = i - 1
        while j >= 0 and a[j] > v:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v


cdef double _cut(double* buf, int n, double target) noexcept nogil:
    cdef int k
    cdef double prefix = 0.0
    _sort(buf, n)
    for k in range(n):
        if prefix + buf[k] * (n - k) >= target:
            return (target - prefix) / (n - k)
        prefix += buf[k]
    return buf[n - 1] if n > 0 else 0.0


def cut_height_float(values, double target):
    cdef int n = len(values)
    cdef double* buf = <double*> malloc(max(n, 1) * sizeof(double))
    cdef int k
    try:
        for k in range(n):
            buf[k] = values[k]
        return _cut(buf, n, target)
    finally:
        free(buf)


cdef int* _csr(groups, int* ptr):
    cdef int total = 0, g, k, pos = 0
    for g in range(len(groups)):
        ptr[g] = total
        total += len(groups[g])
    ptr[len(groups)] = total
    cdef int* idx = <int*> malloc(max(total, 1) * sizeof(int))
    for g in range(len(groups)):
        for k in groups[g]:
            idx[pos] = k
            pos += 1
    return idx


def run_plain_float(firm_edges, worker_edges, cap_in, qf_in, qw_in, double tol, long max_iter):
    cdef int m = len(cap_in), nf = len(firm_edges), nw = len(worker_edges)
    cdef int* fptr = <int*> malloc((nf + 1) * sizeof(int))
    cdef int* wptr = <int*> malloc((nw + 1) * sizeof(int))
    cdef int* fidx = _csr(firm_edges, fptr)
    cdef int* widx = _csr(worker_edges, wptr)
    cdef int mm = max(m, 1)
    cdef double* cap = <double*> malloc(mm * sizeof(double))
    cdef double* x = <double*> malloc(mm * sizeof(double))
    cdef double* xt = <double*> malloc(mm * sizeof(double))
    cdef double* buf = <double*> malloc(mm * sizeof(double))
    cdef char* locked = <char*> malloc(mm * sizeof(char))
    cdef double* qf = <double*> malloc(max(nf, 1) * sizeof(double))
    cdef double* qw = <double*> malloc(max(nw, 1) * sizeof(double))
    cdef int i, j, k, p, nfree
    cdef long it = 0
    cdef double residual, total, r, s, change, d
    cdef bint over, converged = False
    try:
        for k in range(m):
            cap[k] = cap_in[k]
            x[k] = 0.0
            locked[k] = 0
        for i in range(nf):
            qf[i] = qf_in[i]
        for j in range(nw):
            qw[j] = qw_in[j]
        with nogil:
            while it < max_iter:
                it += 1
                for k in range(m):
                    xt[k] = x[k]
                for i in range(nf):
                    residual = qf[i]
                    total = 0.0
                    nfree = 0
                    for p in range(fptr[i], fptr[i + 1]):
                        k = fidx[p]
                        if locked[k]:
                            residual -= x[k]
                        else:
                            buf[nfree] = cap[k]
                            nfree += 1
                            total += cap[k]
                    if residual < 0.0:
                        residual = 0.0
                    if total > residual:
                        r = _cut(buf, nfree, residual)
                        for p in range(fptr[i], fptr[i + 1]):
                            k = fidx[p]
                            if not locked[k]:
                                xt[k] = r if r < cap[k] else cap[k]
                    else:
                        for p in range(fptr[i], fptr[i + 1]):
                            k = fidx[p]
                            if not locked[k]:
                                xt[k] = cap[k]
                over = False
                for j in range(nw):
                    s = 0.0
                    for p in range(wptr[j], wptr[j + 1]):
                        s += xt[widx[p]]
                    if s > qw[j] + tol:
                        over = True
                        break
                if not over:
                    for k in range(m):
                        x[k] = xt[k]
                    converged = True
                    break
                change = 0.0
                for j in range(nw):
                    s = 0.0
                    nfree = 0
                    for p in range(wptr[j], wptr[j + 1]):
                        s += xt[widx[p]]
                        buf[nfree] = xt[widx[p]]
                        nfree += 1
                    if s > qw[j]:
                        r = _cut(buf, nfree, qw[j])
                        for p in range(wptr[j], wptr[j + 1]):
                            k = widx[p]
                            if xt[k] > r:
                                xt[k] = r
                                locked[k] = 1
                for k in range(m):
                    d = fabs(xt[k] - x[k])
                    if d > change:
                        change = d
                    x[k] = xt[k]
                if change < tol:
                    converged = True
                    break
        return [x[k] for k in range(m)], it, bool(converged)
    finally:
        free(fptr); free(wptr); free(fidx); free(widx)
        free(cap); free(x); free(xt); free(buf); free(locked); free(qf); free(qw)
