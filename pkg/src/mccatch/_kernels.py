"""Numba kernels for tree range counting and pair enumeration.

Every kernel takes the dataset as two arrays: ``X`` (float vectors) and ``S``
(encoded strings, column 0 holding the length). Exactly one of them is
non-empty, which selects the distance. Tree arrays follow the layout of
:class:`mccatch.index.MetricTree`.
"""
import numpy as np

from ._backend import HAVE_NUMBA, jit

if HAVE_NUMBA:
    from numba import prange
else:  # pragma: no cover
    prange = range


@jit(cache=True, nogil=True)
def _levenshtein(S, i, j):
    la = S[i, 0]
    lb = S[j, 0]
    if la == 0:
        return float(lb)
    if lb == 0:
        return float(la)
    prev = np.empty(lb + 1, dtype=np.int64)
    cur = np.empty(lb + 1, dtype=np.int64)
    for k in range(lb + 1):
        prev[k] = k
    for a in range(1, la + 1):
        cur[0] = a
        ca = S[i, a]
        for b in range(1, lb + 1):
            best = prev[b] + 1
            if cur[b - 1] + 1 < best:
                best = cur[b - 1] + 1
            sub = prev[b - 1] + (1 if ca != S[j, b] else 0)
            if sub < best:
                best = sub
            cur[b] = best
        for b in range(lb + 1):
            prev[b] = cur[b]
    return float(prev[lb])


@jit(cache=True, nogil=True)
def _dist(X, S, p, i, j):
    if S.shape[0] > 0:
        return _levenshtein(S, i, j)
    s = 0.0
    if p == 2.0:
        for k in range(X.shape[1]):
            t = X[i, k] - X[j, k]
            s += t * t
        return np.sqrt(s)
    if p == 1.0:
        for k in range(X.shape[1]):
            s += abs(X[i, k] - X[j, k])
        return s
    if p == np.inf:
        for k in range(X.shape[1]):
            t = abs(X[i, k] - X[j, k])
            if t > s:
                s = t
        return s
    for k in range(X.shape[1]):
        s += abs(X[i, k] - X[j, k]) ** p
    return s ** (1.0 / p)


@jit(cache=True, nogil=True)
def _count_one(X, S, p, pivot, radius, left, right, start, end, perm, depth, q, r, tol):
    stack = np.empty(depth + 2, dtype=np.int64)
    stack[0] = 0
    top = 1
    cnt = 0
    while top > 0:
        top -= 1
        node = stack[top]
        dq = _dist(X, S, p, q, pivot[node])
        cr = radius[node]
        slack = tol * (dq + cr + r)
        if dq - cr > r + slack:
            continue
        if dq + cr + slack <= r:
            cnt += end[node] - start[node]
            continue
        if left[node] < 0:
            for k in range(start[node], end[node]):
                if _dist(X, S, p, q, perm[k]) <= r:
                    cnt += 1
        else:
            stack[top] = right[node]
            stack[top + 1] = left[node]
            top += 2
    return cnt


@jit(cache=True, nogil=True, parallel=True)
def count_within(X, S, p, pivot, radius, left, right, start, end, perm, depth, queries, r, tol, out):
    """out[k] = number of tree members within distance ``r`` of element ``queries[k]``."""
    for k in prange(queries.shape[0]):
        out[k] = _count_one(X, S, p, pivot, radius, left, right, start, end, perm, depth,
                            queries[k], r, tol)


@jit(cache=True, nogil=True)
def pairs_within(X, S, p, pivot, radius, left, right, start, end, perm, depth, r, tol):
    """All member pairs (i, j), i < j, with d(i, j) <= r."""
    cap = 64
    oi = np.empty(cap, dtype=np.int64)
    oj = np.empty(cap, dtype=np.int64)
    m = 0
    stack = np.empty(depth + 2, dtype=np.int64)
    for qk in range(perm.shape[0]):
        q = perm[qk]
        stack[0] = 0
        top = 1
        while top > 0:
            top -= 1
            node = stack[top]
            dq = _dist(X, S, p, q, pivot[node])
            cr = radius[node]
            slack = tol * (dq + cr + r)
            if dq - cr > r + slack:
                continue
            full = dq + cr + slack <= r
            if full or left[node] < 0:
                for k in range(start[node], end[node]):
                    x = perm[k]
                    if x <= q:
                        continue
                    if full or _dist(X, S, p, q, x) <= r:
                        if m == cap:
                            cap *= 2
                            ni = np.empty(cap, dtype=np.int64)
                            nj = np.empty(cap, dtype=np.int64)
                            ni[:m] = oi[:m]
                            nj[:m] = oj[:m]
                            oi = ni
                            oj = nj
                        oi[m] = q
                        oj[m] = x
                        m += 1
            else:
                stack[top] = right[node]
                stack[top + 1] = left[node]
                top += 2
    return oi[:m], oj[:m]
