"""Fell neighborhoods and Kuratowski-Painleve convergence of sampled set sequences.

Convergence is only ever observed up to a finite horizon N, so "eventually"
is read as "on every index of the tail window", the last ``tail`` terms of
the sequence (default: the last quarter, at least two terms).

Lower clause at radius r: every candidate point a has A_n meeting the open
ball B(a, r) for every tail index n.

Upper clause at radius r: a witness is a selection from at least two tail
terms whose points all lie within r of the selection's last point b, with
d(b, candidate) > r.  The last point stands in for the selection's limit,
so it must be trusted to lie in the carrier: either the selection is
constant (b itself recurs), or the caller's ``gap_distance(b)`` exceeds r,
meaning every point within r of b is in the carrier.  When the carrier is
the whole window, leave ``gap_distance`` as None.

Any witness can be shrunk to a pair (some earlier point together with b),
so the greedy scan over pairs decides exactly the same question as the
exhaustive subsequence search; the latter exists as a cross-check and is
used automatically on tiny instances.
"""

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InputError, PreconditionError
from .metric import MetricContext, SampledSet, first_escape, intersection, is_subset, union

HORIZON_NOTE = "verified up to the horizon only"

_KINDS = ("open-ball", "closed-ball", "open-box", "closed-box", "union")


@dataclass(frozen=True)
class Region:
    kind: str
    center: tuple = ()
    radius: float = 0.0
    lo: tuple = ()
    hi: tuple = ()
    parts: tuple = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InputError(f"unknown region kind {self.kind!r}")
        if self.kind.endswith("ball"):
            if self.radius < 0:
                raise InputError("ball radius must be nonnegative")
            object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        elif self.kind.endswith("box"):
            if len(self.lo) != len(self.hi) or any(a > b for a, b in zip(self.lo, self.hi)):
                raise InputError("box bounds must pair up with lo <= hi")
            object.__setattr__(self, "lo", tuple(float(c) for c in self.lo))
            object.__setattr__(self, "hi", tuple(float(c) for c in self.hi))
        else:
            if not self.parts:
                raise InputError("a union region needs at least one part")
            if any(p.kind == "union" for p in self.parts):
                raise InputError("union parts must be balls or boxes")
            object.__setattr__(self, "parts", tuple(self.parts))

    @classmethod
    def open_ball(cls, center, radius):
        return cls("open-ball", center=tuple(np.atleast_1d(center)), radius=float(radius))

    @classmethod
    def closed_ball(cls, center, radius):
        return cls("closed-ball", center=tuple(np.atleast_1d(center)), radius=float(radius))

    @classmethod
    def open_box(cls, lo, hi):
        return cls("open-box", lo=tuple(np.atleast_1d(lo)), hi=tuple(np.atleast_1d(hi)))

    @classmethod
    def closed_box(cls, lo, hi):
        return cls("closed-box", lo=tuple(np.atleast_1d(lo)), hi=tuple(np.atleast_1d(hi)))

    @classmethod
    def union_of(cls, *parts):
        return cls("union", parts=tuple(parts))

    @property
    def is_compact(self):
        if self.kind == "union":
            return all(p.is_compact for p in self.parts)
        return self.kind.startswith("closed")

    @property
    def is_open(self):
        if self.kind == "union":
            return all(p.is_open for p in self.parts)
        return self.kind.startswith("open")

    def contains(self, ctx: MetricContext, points) -> np.ndarray:
        """Exact membership of each point, from the closed-form description."""
        P = np.asarray(points, dtype=np.float64).reshape(-1, ctx.dimension)
        if self.kind == "union":
            out = np.zeros(P.shape[0], dtype=bool)
            for part in self.parts:
                out |= part.contains(ctx, P)
            return out
        if P.shape[0] == 0:
            return np.zeros(0, dtype=bool)
        if self.kind.endswith("ball"):
            d = ctx.pairwise(P, [self.center])[:, 0]
            return d < self.radius if self.kind == "open-ball" else d <= self.radius
        lo, hi = np.array(self.lo), np.array(self.hi)
        if self.kind == "open-box":
            return ((P > lo) & (P < hi)).all(axis=1)
        return ((P >= lo) & (P <= hi)).all(axis=1)


@dataclass(frozen=True)
class FellNbhd:
    """Sets meeting every hit region and avoiding the compact miss region."""

    hits: tuple = ()
    miss: Region | None = None

    def __post_init__(self):
        object.__setattr__(self, "hits", tuple(self.hits))
        for h in self.hits:
            if not h.is_open:
                raise InputError(f"hit region {h.kind!r} is not open")
        if self.miss is not None and not self.miss.is_compact:
            raise InputError(f"miss region {self.miss.kind!r} is not compact")


@dataclass(frozen=True)
class FellMembership:
    ok: bool
    hit_results: tuple
    miss_ok: bool
    miss_point: tuple | None = None  # first sample point found inside the miss region


def fell_membership(ctx: MetricContext, A: SampledSet, nbhd: FellNbhd) -> FellMembership:
    if not isinstance(nbhd, FellNbhd):
        raise InputError("expected a FellNbhd")
    hits = tuple(bool(h.contains(ctx, A.points).any()) for h in nbhd.hits)
    miss_point = None
    if nbhd.miss is not None:
        inside = nbhd.miss.contains(ctx, A.points)
        if inside.any():
            miss_point = tuple(float(c) for c in A.points[np.argmax(inside)])
    miss_ok = miss_point is None
    return FellMembership(all(hits) and miss_ok, hits, miss_ok, miss_point)


@dataclass(frozen=True)
class SetSequence:
    ctx: MetricContext
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if t.points.shape[1] != self.ctx.dimension:
                raise InputError("sequence terms must share the context's dimension")

    @property
    def horizon(self):
        return len(self.terms)

    def __getitem__(self, n):
        """1-based access, matching the usual A_1, A_2, ... indexing."""
        return self.terms[n - 1]


@dataclass(frozen=True)
class LowerWitness:
    point: tuple
    radius: float
    miss_indices: tuple  # 1-based indices n where A_n misses B(point, radius)


@dataclass(frozen=True)
class UpperWitness:
    indices: tuple  # 1-based
    points: tuple
    limit: tuple
    distance: float  # from the limit estimate to the candidate
    radius: float


@dataclass(frozen=True)
class KPVerdict:
    lower_ok: bool
    upper_ok: bool
    lower_witness: LowerWitness | None
    upper_witness: UpperWitness | None
    horizon_note: str
    radii: tuple
    tail_start: int
    settle_index: dict  # radius -> first index of the final run where the lower clause holds
    mode: str
    budget_exhausted: bool = False

    @property
    def converges(self):
        return self.lower_ok and self.upper_ok


def default_radii(ctx: MetricContext) -> list:
    r0 = ctx.diameter / 4
    return [r0 * 0.5 ** j for j in range(7)]


def _tail_indices(N, tail):
    t = max(2, N // 4) if tail is None else int(tail)
    t = min(max(t, 1), N)
    return list(range(N - t, N))  # 0-based


def _lower(ctx, seq, candidate, radii, tail_idx):
    N = seq.horizon
    if candidate.is_empty:
        return None, {r: 1 for r in radii}
    # dist[n, a] = d(a, A_n)
    dist = np.stack([ctx.min_dists(candidate.points, A.points) for A in seq.terms])
    settle, witness = {}, None
    for r in radii:
        hit = dist < r
        misses = np.flatnonzero(~hit.all(axis=1))
        settle[r] = int(misses[-1]) + 2 if misses.size else 1
        bad = ~hit[tail_idx].all(axis=0)
        if bad.any() and witness is None:
            # the candidate point missed by the widest margin is the clearest witness
            score = np.where(bad, dist[tail_idx].max(axis=0), -np.inf)
            a = int(np.argmax(score))
            miss = tuple(int(n) + 1 for n in np.flatnonzero(~hit[:, a]))
            witness = LowerWitness(tuple(float(c) for c in candidate.points[a]), float(r), miss)
    return witness, settle


def _certified(ctx, b, r, constant, gap_distance):
    return constant or gap_distance is None or gap_distance(b) > r


def _upper_greedy(ctx, seq, candidate, r, tail_idx, gap_distance):
    for m in reversed(tail_idx[1:]):
        B = seq.terms[m].points
        if B.shape[0] == 0:
            continue
        far = ctx.min_dists(B, candidate.points)
        B, far = B[far > r], far[far > r]  # only points outside the r-fattening can witness
        if B.shape[0] == 0:
            continue
        earlier = [n for n in tail_idx if n < m]
        near = np.stack([ctx.min_dists(B, seq.terms[n].points) for n in earlier])
        chain = (near <= r).any(axis=0)
        const = (near <= ctx.tol).any(axis=0)
        order = np.argsort(-far, kind="stable")
        for j in order:
            if far[j] <= r:
                break
            if not chain[j]:
                continue
            b = B[j]
            if const[j]:
                picks = [n for k, n in enumerate(earlier) if near[k, j] <= ctx.tol]
            elif _certified(ctx, b, r, False, gap_distance):
                picks = [n for k, n in enumerate(earlier) if near[k, j] <= r]
            else:
                continue
            pts = []
            for n in picks:
                P = seq.terms[n].points
                pts.append(tuple(float(c) for c in P[np.argmin(ctx.pairwise([b], P)[0])]))
            bt = tuple(float(c) for c in b)
            return UpperWitness(
                tuple(n + 1 for n in picks) + (m + 1,), tuple(pts) + (bt,), bt, float(far[j]), float(r)
            )
    return None


def _upper_exhaustive(ctx, seq, candidate, r, tail_idx, gap_distance, budget):
    """Enumerate subsequences of the tail and every selection along them."""
    used = 0
    for size in range(2, len(tail_idx) + 1):
        for sub in itertools.combinations(tail_idx, size):
            pools = [seq.terms[n].points for n in sub]
            if any(p.shape[0] == 0 for p in pools):
                continue
            for choice in itertools.product(*(range(p.shape[0]) for p in pools)):
                if used >= budget:
                    return None, True
                used += 1
                pts = np.array([pools[k][c] for k, c in enumerate(choice)])
                b = pts[-1]
                spread = ctx.pairwise(pts, [b])[:, 0]
                if spread.max() > r:
                    continue
                dist = float(ctx.min_dists([b], candidate.points)[0])
                if dist <= r:
                    continue
                if not _certified(ctx, b, r, bool(spread.max() <= ctx.tol), gap_distance):
                    continue
                bt = tuple(float(c) for c in b)
                return (
                    UpperWitness(
                        tuple(n + 1 for n in sub),
                        tuple(tuple(float(c) for c in p) for p in pts),
                        bt,
                        dist,
                        float(r),
                    ),
                    False,
                )
    return None, False


def kp_check(
    seq: SetSequence,
    candidate: SampledSet,
    ball_radii: Sequence[float] | None = None,
    selection_budget: int = 10_000,
    *,
    tail: int | None = None,
    gap_distance: Callable | None = None,
    mode: str = "auto",
) -> KPVerdict:
    """Check A_n -> candidate in the Kuratowski-Painleve sense, up to the horizon.

    ``mode`` is "greedy", "exhaustive", or "auto" (exhaustive when every term
    has at most 4 points and the horizon is at most 8).
    """
    if seq.horizon == 0:
        raise InputError("kp_check needs a nonempty sequence")
    ctx = seq.ctx
    radii = default_radii(ctx) if ball_radii is None else [float(r) for r in ball_radii]
    if not radii:
        raise InputError("ball_radii must be nonempty")
    if any(r <= 0 for r in radii) or any(a <= b for a, b in zip(radii, radii[1:])):
        raise InputError("ball_radii must be positive and strictly decreasing")
    if mode == "auto":
        small = seq.horizon <= 8 and all(len(A) <= 4 for A in seq.terms)
        mode = "exhaustive" if small else "greedy"
    if mode not in ("greedy", "exhaustive"):
        raise InputError(f"unknown mode {mode!r}")
    tail_idx = _tail_indices(seq.horizon, tail)

    lower_witness, settle = _lower(ctx, seq, candidate, radii, tail_idx)
    upper_witness, exhausted = None, False
    for r in radii:
        if mode == "greedy":
            upper_witness = _upper_greedy(ctx, seq, candidate, r, tail_idx, gap_distance)
        else:
            upper_witness, ex = _upper_exhaustive(ctx, seq, candidate, r, tail_idx, gap_distance, selection_budget)
            exhausted |= ex
        if upper_witness is not None:
            break
    return KPVerdict(
        lower_witness is None,
        upper_witness is None,
        lower_witness,
        upper_witness,
        HORIZON_NOTE,
        tuple(radii),
        tail_idx[0] + 1,
        settle,
        mode,
        exhausted,
    )


@dataclass(frozen=True)
class MonotoneLimit:
    limit: SampledSet
    direction: str  # "decreasing", "essentially-decreasing" or "increasing"
    verdict: KPVerdict

    @property
    def verified(self):
        return self.verdict.converges


def monotone_limit(seq: SetSequence, **kp_kwargs) -> MonotoneLimit:
    """Limit of a monotone sequence: the intersection, or the union if increasing.

    "Essentially decreasing" is read at the horizon as: the last term is
    contained in every term.
    """
    ctx, terms = seq.ctx, seq.terms
    if not terms:
        raise InputError("monotone_limit needs a nonempty sequence")
    pairs = list(zip(terms, terms[1:]))
    down = [is_subset(ctx, b, a) for a, b in pairs]
    if all(down):
        direction = "decreasing"
    elif all(is_subset(ctx, a, b) for a, b in pairs):
        direction = "increasing"
    elif all(is_subset(ctx, terms[-1], A) for A in terms):
        direction = "essentially-decreasing"
    else:
        first = down.index(False) + 2
        raise PreconditionError(
            f"sequence is neither decreasing nor increasing; term {first} is not inside term {first - 1}",
            witness=first,
        )
    if direction == "increasing":
        limit = union(ctx, terms, "union")
    else:
        limit = intersection(ctx, terms, "intersection")
    return MonotoneLimit(limit, direction, kp_check(seq, limit, **kp_kwargs))


@dataclass(frozen=True)
class InclusionVerdict:
    ok: bool
    escaping_point: tuple | None = None


def inclusion_preservation_check(
    seqA: SetSequence, seqB: SetSequence, limitA: SampledSet, limitB: SampledSet, **kp_kwargs
) -> InclusionVerdict:
    """If A_n is inside B_n for all n, the K-P limits must nest the same way."""
    ctx = seqA.ctx
    if seqA.horizon != seqB.horizon:
        raise InputError("sequences must share a horizon")
    for n, (A, B) in enumerate(zip(seqA.terms, seqB.terms), start=1):
        if not is_subset(ctx, A, B):
            raise PreconditionError(f"A_{n} is not contained in B_{n}", witness=n)
    for name, seq, lim in (("A", seqA, limitA), ("B", seqB, limitB)):
        v = kp_check(seq, lim, **kp_kwargs)
        if not v.converges:
            raise PreconditionError(f"sequence {name} does not converge to its stated limit", witness=v)
    k = first_escape(ctx, limitA, limitB)
    if k is None:
        return InclusionVerdict(True)
    return InclusionVerdict(False, tuple(float(c) for c in limitA.points[k]))


@dataclass(frozen=True)
class ConvexityVerdict:
    ok: bool
    vacuous: bool  # A or B outside the neighborhood, so nothing to check
    violated_clause: str | None = None


def fell_basic_convexity(ctx: MetricContext, nbhd: FellNbhd, A: SampledSet, B: SampledSet, C: SampledSet):
    """A inside C inside B with A, B in a basic Fell set forces C into it too."""
    if not is_subset(ctx, A, C):
        raise PreconditionError("A is not contained in C")
    if not is_subset(ctx, C, B):
        raise PreconditionError("C is not contained in B")
    ma, mb = fell_membership(ctx, A, nbhd), fell_membership(ctx, B, nbhd)
    if not (ma.ok and mb.ok):
        return ConvexityVerdict(True, True)
    mc = fell_membership(ctx, C, nbhd)
    if mc.ok:
        return ConvexityVerdict(True, False)
    if not mc.miss_ok:
        return ConvexityVerdict(False, False, f"miss: C meets the miss region at {mc.miss_point}")
    i = mc.hit_results.index(False)
    return ConvexityVerdict(False, False, f"hit {i}: C misses hit region {i}")
