# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_pykernels`` for the contract."""

import numpy as np
from libc.math cimport sqrt, fabs, INFINITY

NAME = "cython"


def min_dists(P, Q):
    cdef const double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef const double[:, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], m = q.shape[0], d = p.shape[1]
    out = np.empty(n)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j, k
    cdef double best, s, t
    for i in range(n):
        best = INFINITY
        for j in range(m):
            s = 0.0
            for k in range(d):
                t = p[i, k] - q[j, k]
                s += t * t
                if s >= best:
                    break
            if s < best:
                best = s
        o[i] = sqrt(best) if best != INFINITY else INFINITY
    return out


def profile_distance(profiles, weights):
    cdef const double[:, ::1] f = np.ascontiguousarray(profiles, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = f.shape[0], m = f.shape[1]
    out = np.zeros((n, n))
    cdef double[:, ::1] D = out
    cdef Py_ssize_t i, j, k
    cdef double s, t
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            for k in range(m):
                if f[i, k] == f[j, k]:
                    continue
                t = fabs(f[i, k] - f[j, k])
                if t > 1.0:
                    t = 1.0
                s += w[k] * t
            D[i, j] = s
            D[j, i] = s
    return out


def radial_scan(D, leq, double eps):
    cdef const double[:, ::1] d = np.ascontiguousarray(D, dtype=np.float64)
    cdef const unsigned char[:, ::1] L = np.ascontiguousarray(leq, dtype=np.uint8)
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t x, y, z
    cdef long long n_triples = 0, n_bad = 0
    cdef Py_ssize_t fx = -1, fy = -1, fz = -1
    cdef double need
    for x in range(n):
        for y in range(n):
            if not L[x, y]:
                continue
            for z in range(n):
                if not L[y, z]:
                    continue
                n_triples += 1
                need = d[x, y] if d[x, y] > d[y, z] else d[y, z]
                if d[x, z] < need - eps:
                    n_bad += 1
                    if fx < 0:
                        fx = x; fy = y; fz = z
    return n_triples, n_bad, (fx, fy, fz)


def transitivity_scan(leq):
    cdef const unsigned char[:, ::1] L = np.ascontiguousarray(leq, dtype=np.uint8)
    cdef Py_ssize_t n = L.shape[0]
    cdef Py_ssize_t a, b, c
    cdef long long n_bad = 0
    cdef Py_ssize_t fa = -1, fb = -1, fc = -1
    for a in range(n):
        for b in range(n):
            if not L[a, b]:
                continue
            for c in range(n):
                if L[b, c] and not L[a, c]:
                    n_bad += 1
                    if fa < 0:
                        fa = a; fb = b; fc = c
    return n_bad, (fa, fb, fc)


def triangle_scan(D, double eps):
    cdef const double[:, ::1] d = np.ascontiguousarray(D, dtype=np.float64)
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i, j, k
    cdef long long n_bad = 0
    cdef Py_ssize_t fi = -1, fj = -1, fk = -1
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if d[i, j] > d[i, k] + d[k, j] + eps:
                    n_bad += 1
                    if fi < 0:
                        fi = i; fj = j; fk = k
    return n_bad, (fi, fj, fk)
