"""Pure-numpy counterparts of the compiled kernels.

Queries are processed in chunks; each chunk walks the tree breadth-first as
a frontier of (query, node) pairs so every distance batch is one vectorized
call into the dataset handle.
"""
import numpy as np

CHUNK = 1024


def _expand(owner, starts, ends, perm):
    lengths = ends - starts
    total = int(lengths.sum())
    rep = np.repeat(owner, lengths)
    offsets = np.arange(total) - np.repeat(np.cumsum(lengths) - lengths, lengths)
    return rep, perm[np.repeat(starts, lengths) + offsets]


def _walk(data, tree, q, r, tol):
    """Yield (query slots, node ids, fully-inside flags) for every node that must be resolved."""
    fq = np.arange(q.shape[0])
    fn = np.zeros(q.shape[0], dtype=np.int64)
    while fq.size:
        dq = data.dist_pairs(q[fq], tree.pivot[fn])
        cr = tree.radius[fn]
        slack = tol * (dq + cr + r)
        alive = dq - cr <= r + slack
        full = alive & (dq + cr + slack <= r)
        leaf = alive & ~full & (tree.left[fn] < 0)
        yield fq[full], fn[full], True
        yield fq[leaf], fn[leaf], False
        inner = alive & ~full & (tree.left[fn] >= 0)
        fq = np.concatenate([fq[inner], fq[inner]])
        fn = np.concatenate([tree.left[fn[inner]], tree.right[fn[inner]]])


def count_within(data, tree, queries, r, tol):
    out = np.zeros(queries.shape[0], dtype=np.int64)
    sizes = tree.end - tree.start
    for s in range(0, queries.shape[0], CHUNK):
        q = queries[s:s + CHUNK]
        cnt = np.zeros(q.shape[0], dtype=np.int64)
        for slots, nodes, full in _walk(data, tree, q, r, tol):
            if not slots.size:
                continue
            if full:
                cnt += np.bincount(slots, weights=sizes[nodes], minlength=q.shape[0]).astype(np.int64)
            else:
                rep, members = _expand(slots, tree.start[nodes], tree.end[nodes], tree.perm)
                hit = data.dist_pairs(q[rep], members) <= r
                cnt += np.bincount(rep[hit], minlength=q.shape[0])
        out[s:s + CHUNK] = cnt
    return out


def pairs_within(data, tree, r, tol):
    found_i, found_j = [], []
    for s in range(0, tree.perm.shape[0], CHUNK):
        q = tree.perm[s:s + CHUNK]
        for slots, nodes, full in _walk(data, tree, q, r, tol):
            if not slots.size:
                continue
            rep, members = _expand(slots, tree.start[nodes], tree.end[nodes], tree.perm)
            keep = members > q[rep]
            rep, members = rep[keep], members[keep]
            if not full:
                hit = data.dist_pairs(q[rep], members) <= r
                rep, members = rep[hit], members[hit]
            found_i.append(q[rep])
            found_j.append(members)
    if not found_i:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(found_i), np.concatenate(found_j)
