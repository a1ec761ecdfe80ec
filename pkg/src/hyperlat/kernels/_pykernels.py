"""Vectorized numpy implementations of the hot kernels.

Every function here has a twin in ``_ckernels.pyx`` with the same signature
and the same results (bit-for-bit for the integer outputs, to rounding for
the float ones).  Triple scans report the first violation in lexicographic
index order so both backends agree on witnesses.
"""

import numpy as np

NAME = "python"


def min_dists(P, Q):
    """Row-wise minimum Euclidean distance from each point of P to the set Q."""
    P = np.asarray(P, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    n = P.shape[0]
    if Q.shape[0] == 0:
        return np.full(n, np.inf)
    if n == 0:
        return np.empty(0)
    out = np.empty(n)
    # chunk rows to bound the temporary (n, m, d) array
    step = max(1, 2_000_000 // max(1, Q.shape[0] * P.shape[1]))
    for start in range(0, n, step):
        block = P[start:start + step]
        diff = block[:, None, :] - Q[None, :, :]
        out[start:start + step] = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)).min(axis=1)
    return out


def profile_distance(profiles, weights):
    """D[i, j] = sum_k w_k * min(1, |profiles[i, k] - profiles[j, k]|); equal entries (even inf) add 0."""
    F = np.asarray(profiles, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    n = F.shape[0]
    D = np.empty((n, n))
    for i in range(n):
        with np.errstate(invalid="ignore"):
            gap = np.minimum(1.0, np.abs(F[i][None, :] - F))
        D[i] = np.where(F[i][None, :] == F, 0.0, gap) @ w
    return D


def radial_scan(D, leq, eps):
    """Scan all chains x <= y <= z for D[x,z] < max(D[x,y], D[y,z]) - eps.

    Returns ``(n_triples, n_violations, (x, y, z))`` where the triple is the
    lexicographically first violation, or ``(-1, -1, -1)``.
    """
    D = np.asarray(D, dtype=np.float64)
    L = np.asarray(leq, dtype=bool)
    n = D.shape[0]
    n_triples = 0
    n_bad = 0
    first = None
    for y in range(n):
        xs = np.flatnonzero(L[:, y])
        zs = np.flatnonzero(L[y, :])
        n_triples += xs.size * zs.size
        if xs.size == 0 or zs.size == 0:
            continue
        need = np.maximum(D[xs, y][:, None], D[y, zs][None, :])
        bad = D[np.ix_(xs, zs)] < need - eps
        if bad.any():
            n_bad += int(bad.sum())
            bi, bk = np.nonzero(bad)
            cand = min(zip(xs[bi].tolist(), zs[bk].tolist()))
            cand = (cand[0], y, cand[1])
            if first is None or cand < first:
                first = cand
    return n_triples, n_bad, first if first is not None else (-1, -1, -1)


def transitivity_scan(leq):
    """Count (a, b, c) with a<=b, b<=c but not a<=c; report the first one."""
    L = np.asarray(leq, dtype=bool)
    n = L.shape[0]
    n_bad = 0
    first = (-1, -1, -1)
    for a in range(n):
        # row of a composed with the relation, minus what a already reaches
        reach = L[a][:, None] & L
        bad = reach & ~L[a][None, :]
        if bad.any():
            n_bad += int(bad.sum())
            if first[0] < 0:
                bs, cs = np.nonzero(bad)
                first = (a, int(bs[0]), int(cs[0]))
    return n_bad, first


def triangle_scan(D, eps):
    """Count (i, j, k) with D[i,j] > D[i,k] + D[k,j] + eps; report the first one."""
    D = np.asarray(D, dtype=np.float64)
    n = D.shape[0]
    n_bad = 0
    first = (-1, -1, -1)
    for i in range(n):
        # via[k, j] = D[i,k] + D[k,j]
        via = D[i][:, None] + D
        bad = D[i][None, :] > via + eps
        if bad.any():
            n_bad += int(bad.sum())
            if first[0] < 0:
                ks, js = np.nonzero(bad)
                order = np.lexsort((ks, js))
                first = (i, int(js[order[0]]), int(ks[order[0]]))
    return n_bad, first
