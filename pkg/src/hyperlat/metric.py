"""Sampled closed sets in a bounded window, and the distances between them.

A closed set is represented by a finite point cloud.  Distances to the empty
set are ``math.inf``; the Hausdorff distance treats the empty set as an
isolated point (0 to itself, infinite to anything else) and the Wijsman sum
refuses it outright, since it is only a metric on nonempty sets.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import DomainError, InputError

DEFAULT_TOL = 1e-9
ITERATIVE_TOL = 1e-6


@dataclass(frozen=True)
class MetricContext:
    dimension: int
    window: tuple
    distance_rule: str = "euclidean"
    tol: float = DEFAULT_TOL
    table: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        window = tuple((float(lo), float(hi)) for lo, hi in self.window)
        object.__setattr__(self, "window", window)
        if self.dimension < 1 or len(window) != self.dimension:
            raise InputError("window needs one (lo, hi) pair per dimension")
        if any(lo > hi for lo, hi in window):
            raise InputError("window is empty: some lower bound exceeds its upper bound")
        if self.tol < 0:
            raise InputError("tol must be nonnegative")
        if self.distance_rule == "euclidean":
            return
        if self.distance_rule != "custom-table":
            raise InputError(f"unknown distance rule {self.distance_rule!r}")
        if self.dimension != 1 or self.table is None:
            raise InputError("custom-table metrics are one-dimensional with a distance table")
        t = np.array(self.table, dtype=np.float64)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)
        _check_table(t, self.tol)

    @classmethod
    def box(cls, lo, hi, dimension=1, tol=DEFAULT_TOL):
        return cls(dimension, [(lo, hi)] * dimension, tol=tol)

    @classmethod
    def from_table(cls, table, tol=DEFAULT_TOL):
        """Finite metric space on sites 0..n-1, each a 1-D point."""
        n = len(table)
        return cls(1, [(0.0, float(n - 1))], "custom-table", tol, np.asarray(table, dtype=np.float64))

    @property
    def lower(self):
        return np.array([lo for lo, _ in self.window])

    @property
    def upper(self):
        return np.array([hi for _, hi in self.window])

    @property
    def diameter(self):
        if self.table is not None:
            return float(self.table.max())
        return float(np.linalg.norm(self.upper - self.lower))

    def contains(self, points) -> np.ndarray:
        P = np.atleast_2d(np.asarray(points, dtype=np.float64))
        inside = ((P >= self.lower - self.tol) & (P <= self.upper + self.tol)).all(axis=1)
        if self.table is not None:
            inside &= np.abs(P[:, 0] - np.round(P[:, 0])) <= self.tol
        return inside

    def _sites(self, P):
        return np.round(np.asarray(P)[:, 0]).astype(int)

    def pairwise(self, P, Q) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=np.float64))
        Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
        if self.table is not None:
            return self.table[np.ix_(self._sites(P), self._sites(Q))]
        diff = P[:, None, :] - Q[None, :, :]
        return np.sqrt((diff * diff).sum(axis=2))

    def min_dists(self, P, Q) -> np.ndarray:
        """d(p, Q) for every row p of P; +inf when Q is empty."""
        P = np.asarray(P, dtype=np.float64).reshape(-1, self.dimension)
        Q = np.asarray(Q, dtype=np.float64).reshape(-1, self.dimension)
        if Q.shape[0] == 0:
            return np.full(P.shape[0], np.inf)
        if self.table is not None:
            return self.pairwise(P, Q).min(axis=1)
        return kernels.min_dists(P, Q)

    def distance(self, p, q) -> float:
        return float(self.pairwise([p], [q])[0, 0])


def _check_table(t, tol):
    n = t.shape[0]
    if t.shape != (n, n):
        raise InputError("distance table must be square")
    if np.any(np.abs(np.diag(t)) > tol):
        raise InputError("distance table has a nonzero diagonal")
    if np.any(np.abs(t - t.T) > tol):
        raise InputError("distance table is not symmetric")
    off = t[~np.eye(n, dtype=bool)]
    if np.any(off <= tol):
        raise InputError("distance table has a zero or negative off-diagonal entry")
    n_bad, first = kernels.triangle_scan(t, tol)
    if n_bad:
        raise InputError(f"distance table violates the triangle inequality at {first}")


@dataclass(frozen=True, eq=False)
class SampledSet:
    """A finite sample standing in for a closed set; no points means the empty set."""

    points: np.ndarray
    label: str = ""

    def __eq__(self, other):
        # exact comparison, point order included; use is_subset for set equality up to tol
        if not isinstance(other, SampledSet):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.points, other.points)

    __hash__ = None

    def __len__(self):
        return self.points.shape[0]

    @property
    def is_empty(self):
        return self.points.shape[0] == 0

    def as_tuples(self):
        return [tuple(float(c) for c in p) for p in self.points]


def _dedup(P, tol):
    """Drop points within ``tol`` of an earlier kept point (stable order)."""
    if P.shape[0] < 2:
        return P
    if tol > 0 and P.shape[0] <= 256:
        diff = P[:, None, :] - P[None, :, :]
        close = np.triu(np.sqrt((diff * diff).sum(axis=2)) <= tol, 1)
        return P[~close.any(axis=0)]
    _, first = np.unique(P, axis=0, return_index=True)
    P = P[np.sort(first)]
    if tol <= 0 or P.shape[0] < 2:
        return P
    order = np.lexsort(P.T[::-1])
    S = P[order]
    drop = np.zeros(P.shape[0], dtype=bool)
    for k in range(1, S.shape[0]):
        near0 = S[k:, 0] - S[:-k, 0] <= tol
        if not near0.any():
            break
        close = near0 & (np.linalg.norm(S[k:] - S[:-k], axis=1) <= tol)
        for i in np.flatnonzero(close):
            a, b = order[i], order[i + k]
            drop[max(a, b)] = True
    return P[~drop]


def make_set(ctx: MetricContext, points, label: str = "") -> SampledSet:
    """Build a SampledSet, checking the window and merging near-duplicates."""
    P = np.asarray(points, dtype=np.float64)
    if P.size == 0:
        P = np.empty((0, ctx.dimension))
    P = P.reshape(-1, ctx.dimension)
    outside = ~ctx.contains(P) if P.shape[0] else np.zeros(0, dtype=bool)
    if outside.any():
        raise InputError(f"point {P[np.argmax(outside)].tolist()} lies outside the window")
    P = _dedup(P, ctx.tol)
    P = np.ascontiguousarray(P)
    P.setflags(write=False)
    return SampledSet(P, label)


def dist_point_set(ctx: MetricContext, x, S: SampledSet) -> float:
    return float(ctx.min_dists(np.asarray(x, dtype=np.float64).reshape(1, -1), S.points)[0])


def excess(ctx: MetricContext, A: SampledSet, B: SampledSet) -> float:
    """sup over a in A of d(a, B); 0 for empty A."""
    if A.is_empty:
        return 0.0
    return float(ctx.min_dists(A.points, B.points).max())


def hausdorff(ctx: MetricContext, A: SampledSet, B: SampledSet) -> float:
    if A.is_empty and B.is_empty:
        return 0.0
    if A.is_empty or B.is_empty:
        return math.inf
    return max(excess(ctx, A, B), excess(ctx, B, A))


def _axis_indices(level, degenerate):
    return [0] if degenerate else range(2 ** level + 1)


def iter_dense(ctx: MetricContext):
    """Endless deterministic enumeration of a dense subset of the window.

    Euclidean windows: dyadic grids of spacing width/2**L for L = 0, 1, ...,
    each level emitting only its new points, in lexicographic order.  Finite
    table metrics: the sites themselves, cycled.
    """
    if ctx.table is not None:
        n = ctx.table.shape[0]
        for i in itertools.count():
            yield np.array([float(i % n)])
    lo, hi = ctx.lower, ctx.upper
    degenerate = hi - lo == 0
    if degenerate.all():
        while True:
            yield lo.copy()
    for level in itertools.count():
        scale = 2.0 ** level
        axes = [_axis_indices(level, deg) for deg in degenerate]
        for ks in itertools.product(*axes):
            if level > 0 and all(k % 2 == 0 for k in ks):
                continue
            k = np.array(ks, dtype=np.float64)
            yield lo + (hi - lo) * k / scale


def dense_sequence(ctx: MetricContext, count: int) -> np.ndarray:
    if count < 1:
        raise InputError("count must be at least 1")
    return np.array(list(itertools.islice(iter_dense(ctx), count)))


def wijsman_weights(horizon: int) -> np.ndarray:
    return 0.5 ** np.arange(1, horizon + 1)


class WijsmanValue(NamedTuple):
    value: float
    truncation_bound: float  # the omitted tail sums to at most 2**-horizon


def distance_profile(ctx: MetricContext, S: SampledSet, dense: np.ndarray) -> np.ndarray:
    """The vector (d(x_i, S))_i over the dense points."""
    if S.is_empty:
        raise DomainError("the Wijsman metric is only defined for nonempty sets")
    return ctx.min_dists(dense, S.points)


def wijsman_rho(ctx: MetricContext, A: SampledSet, B: SampledSet, horizon: int) -> WijsmanValue:
    if horizon < 1:
        raise InputError("horizon must be at least 1")
    if A.is_empty or B.is_empty:
        raise DomainError("the Wijsman metric is only defined for nonempty sets")
    dense = dense_sequence(ctx, horizon)
    gap = np.abs(distance_profile(ctx, A, dense) - distance_profile(ctx, B, dense))
    value = float(np.minimum(1.0, gap) @ wijsman_weights(horizon))
    return WijsmanValue(value, 2.0 ** -horizon)


def is_subset(ctx: MetricContext, A: SampledSet, B: SampledSet) -> bool:
    """A is contained in B up to tol."""
    return first_escape(ctx, A, B) is None


def first_escape(ctx: MetricContext, A: SampledSet, B: SampledSet):
    """Index of the first point of A farther than tol from B, or None."""
    if A.is_empty:
        return None
    far = ctx.min_dists(A.points, B.points) > ctx.tol
    return int(np.argmax(far)) if far.any() else None


def intersection(ctx: MetricContext, sets, label: str = "") -> SampledSet:
    """Points of the first set lying within tol of every other set."""
    sets = list(sets)
    keep = np.ones(len(sets[0]), dtype=bool)
    for S in sets[1:]:
        if keep.any():
            keep &= ctx.min_dists(sets[0].points, S.points) <= ctx.tol
    return make_set(ctx, sets[0].points[keep], label)


def union(ctx: MetricContext, sets, label: str = "") -> SampledSet:
    sets = list(sets)
    return make_set(ctx, np.concatenate([S.points for S in sets]) if sets else [], label)
