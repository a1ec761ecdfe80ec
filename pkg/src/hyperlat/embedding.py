"""The map x -> x(down) on sampled metric posets, and probes of its continuity.

A principal ideal is sampled as the carrier points below x together with x
itself, so x may be any carrier point, not only a sample point; sequences
x_n typically sit off the grid.  Coordinatewise spaces can instead sample
ideals from per-axis grids, which keeps off-grid points' ideals as fine as
the grid in every direction.

``gap_distance(p)``, when set, is the distance from p to the part of the
window outside the carrier.  The K-P check uses it to tell a genuine limit
point from one that has fallen into a hole of the carrier.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import kernels
from .errors import InputError, PreconditionError
from .hyperspace import HORIZON_NOTE, FellNbhd, Region, SetSequence, fell_membership, kp_check
from .metric import MetricContext, SampledSet, dense_sequence, make_set, wijsman_weights
from .order import FinitePoset, big_meet, validate_partial_order

FLAGS = frozenset({"semilattice", "lattice", "locally_compact", "order_connected"})
LEQ_RULES = ("coordinatewise", "custom-pairs", "custom-predicate")

# Named order predicates usable from space files, vectorized over (P[:, None], Q[None, :]).
PREDICATES: dict = {
    "doubling": lambda p, q: ((p <= q) & (q <= 2 * p)).all(axis=-1),
}


def _key(p, tol):
    return tuple(np.round(np.asarray(p, dtype=np.float64) / max(tol, 1e-15)).astype(np.int64))


@dataclass(frozen=True)
class SampledMetricPoset:
    ctx: MetricContext
    sample: SampledSet
    leq_rule: str = "coordinatewise"
    pairs: frozenset = frozenset()  # of (point tuple, point tuple), for custom-pairs
    predicate_id: str = ""
    meet_rule: str | None = None  # "coordinatewise-min" or None
    join_rule: str | None = None  # "coordinatewise-max" or None
    axis_grids: tuple | None = None
    carrier: Callable | None = field(default=None, compare=False)
    gap_distance: Callable | None = field(default=None, compare=False)
    flags: frozenset = frozenset()
    justification: str = ""

    def __post_init__(self):
        if self.leq_rule not in LEQ_RULES:
            raise InputError(f"unknown order rule {self.leq_rule!r}")
        if self.leq_rule == "custom-predicate" and self.predicate_id not in PREDICATES:
            raise InputError(f"unknown order predicate {self.predicate_id!r}")
        if self.meet_rule not in (None, "coordinatewise-min"):
            raise InputError(f"unknown meet rule {self.meet_rule!r}")
        if self.join_rule not in (None, "coordinatewise-max"):
            raise InputError(f"unknown join rule {self.join_rule!r}")
        object.__setattr__(self, "flags", frozenset(self.flags))
        if not self.flags <= FLAGS:
            raise InputError(f"unknown flags {sorted(self.flags - FLAGS)}")
        if self.axis_grids is not None:
            if self.leq_rule != "coordinatewise" or len(self.axis_grids) != self.ctx.dimension:
                raise InputError("axis grids need a coordinatewise order and one grid per axis")
            object.__setattr__(self, "axis_grids", tuple(np.sort(np.asarray(g, float)) for g in self.axis_grids))
        if self.leq_rule == "custom-pairs":
            tol = self.ctx.tol
            object.__setattr__(
                self, "_pair_keys", frozenset((_key(a, tol), _key(b, tol)) for a, b in self.pairs)
            )

    # -- order ---------------------------------------------------------------
    def leq_matrix(self, P, Q) -> np.ndarray:
        """M[i, j] is True iff P[i] precedes-or-equals Q[j]."""
        d = self.ctx.dimension
        P = np.asarray(P, dtype=np.float64).reshape(-1, d)
        Q = np.asarray(Q, dtype=np.float64).reshape(-1, d)
        tol = self.ctx.tol
        if self.leq_rule == "coordinatewise":
            return (P[:, None, :] <= Q[None, :, :] + tol).all(axis=2)
        if self.leq_rule == "custom-predicate":
            return np.asarray(PREDICATES[self.predicate_id](P[:, None, :], Q[None, :, :]), dtype=bool)
        ka = [_key(p, tol) for p in P]
        kb = [_key(q, tol) for q in Q]
        eq = self.ctx.pairwise(P, Q) <= tol
        return np.array([[(a, b) in self._pair_keys for b in kb] for a in ka], dtype=bool).reshape(eq.shape) | eq

    def leq_pairs(self, X, Y) -> np.ndarray:
        """Elementwise: out[k] is True iff X[k] precedes-or-equals Y[k]."""
        d = self.ctx.dimension
        X = np.asarray(X, dtype=np.float64).reshape(-1, d)
        Y = np.asarray(Y, dtype=np.float64).reshape(-1, d)
        if self.leq_rule == "coordinatewise":
            return (X <= Y + self.ctx.tol).all(axis=1)
        if self.leq_rule == "custom-predicate":
            return np.asarray(PREDICATES[self.predicate_id](X, Y), dtype=bool)
        return np.array([self.leq_matrix(x, y)[0, 0] for x, y in zip(X, Y)], dtype=bool)

    def leq(self, p, q) -> bool:
        return bool(self.leq_matrix(p, q)[0, 0])

    def poset(self) -> FinitePoset:
        """The order restricted to the sample, on element ids 0..n-1."""
        m = self.leq_matrix(self.sample.points, self.sample.points)
        return FinitePoset(range(m.shape[0]), frozenset(zip(*map(lambda a: a.tolist(), np.nonzero(m)))))

    def validate(self):
        m = self.leq_matrix(self.sample.points, self.sample.points)
        pairs = list(zip(*(a.tolist() for a in np.nonzero(m))))
        return validate_partial_order(range(m.shape[0]), pairs)

    def meet(self, p, q):
        if self.meet_rule is None:
            raise InputError("space has no closed-form meet")
        return np.minimum(np.asarray(p, float), np.asarray(q, float))

    def join(self, p, q):
        if self.join_rule is None:
            raise InputError("space has no closed-form join")
        return np.maximum(np.asarray(p, float), np.asarray(q, float))

    def check_meet_rule(self):
        """Compare the closed-form meet with the brute-force one on all sample pairs.

        Returns the first disagreeing index pair, or None.
        """
        poset = self.poset()
        P = self.sample.points
        for i in range(len(P)):
            for j in range(i, len(P)):
                brute = big_meet(poset, (i, j))
                closed = self.meet(P[i], P[j])
                inside = self.ctx.pairwise([closed], P)[0] <= self.ctx.tol
                if brute is None:
                    if inside.any():
                        return (i, j)
                elif not inside[brute]:
                    return (i, j)
        return None

    # -- carrier ---------------------------------------------------------------
    def in_sample(self, x) -> bool:
        return bool(self.ctx.min_dists(np.reshape(x, (1, -1)), self.sample.points)[0] <= self.ctx.tol)

    def in_carrier(self, x) -> bool:
        if self.in_sample(x):
            return True
        return bool(self.carrier is not None and self.carrier(np.asarray(x, dtype=np.float64)))


@dataclass(frozen=True)
class DiagnosticsReport:
    passed: bool
    stage: str
    witness: object = None
    horizon_note: str = HORIZON_NOTE
    details: dict = field(default_factory=dict)


def canonical_ideal(space: SampledMetricPoset, x) -> SampledSet:
    """Sampled x(down): carrier sample points below x, plus x itself."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != space.ctx.dimension or not space.in_carrier(x):
        raise InputError(f"{x.tolist()} is not a carrier point")
    if space.axis_grids is not None:
        axes = [np.union1d(g[g <= xi + space.ctx.tol], [xi]) for g, xi in zip(space.axis_grids, x)]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, x.shape[0])
        if isinstance(space.carrier, _WholeWindow):
            mesh = mesh[space.ctx.contains(mesh)]
        elif space.carrier is not None:
            mesh = mesh[[bool(space.carrier(p)) for p in mesh]]
        return make_set(space.ctx, np.vstack([mesh, x]), "ideal")
    below = space.leq_matrix(space.sample.points, x)[:, 0]
    return make_set(space.ctx, np.vstack([space.sample.points[below], x]), "ideal")


def order_closedness_probe(space: SampledMetricPoset, pair_sequences) -> DiagnosticsReport:
    """For each ((x_k), (y_k), (x, y)) with x_k <= y_k, the limits must satisfy x <= y.

    On a discrete sample no nonconstant sequence converges, so the probe is
    vacuous there and only constant sequences make sense.
    """
    for s, (xs, ys, (x, y)) in enumerate(pair_sequences):
        for lim in (x, y):
            if not space.in_sample(lim):
                raise InputError(f"limit {list(lim)} of sequence {s} is not in the sample")
        bad = ~space.leq_matrix(xs, ys).diagonal()
        if bad.any():
            raise PreconditionError(f"sequence {s} has x_k not below y_k at k={int(np.argmax(bad)) + 1}")
        if not space.leq(x, y):
            return DiagnosticsReport(False, "order-closedness", {"sequence": s, "limit": (tuple(x), tuple(y))})
    return DiagnosticsReport(True, "order-closedness")


def _tail_start(N, tail):
    t = max(2, N // 4) if tail is None else min(max(int(tail), 1), N)
    return N - t


def _metric_distances(space, xs, x):
    return space.ctx.pairwise(np.asarray(xs, float).reshape(-1, space.ctx.dimension), [x])[:, 0]


def default_battery(space: SampledMetricPoset, ideal: SampledSet, x, hit_radius: float) -> list:
    """Hit balls around the points of the ideal, miss balls around carrier points outside it.

    Hit balls come first, farthest-from-x first, so the most telling failure
    is reported.  Each miss ball has half the radius that would touch the ideal.
    """
    ctx = space.ctx
    P = ideal.points
    far = ctx.pairwise(P, [x])[:, 0]
    order = np.lexsort(tuple(P.T[::-1]) + (-far,))
    battery = [FellNbhd((Region.open_ball(P[i], hit_radius),)) for i in order]
    gaps = ctx.min_dists(space.sample.points, P)
    for q, g in zip(space.sample.points, gaps):
        if g > ctx.tol:
            battery.append(FellNbhd((), Region.closed_ball(q, g / 2)))
    return battery


def _single_ball_results(ctx, battery, images):
    """Membership of every image in every one-ball neighborhood, batched.

    Returns {battery index: (ok per image, failure stage)} for neighborhoods
    made of a single open hit ball or a single closed miss ball.
    """
    picks = {}
    for b, nb in enumerate(battery):
        if len(nb.hits) == 1 and nb.miss is None and nb.hits[0].kind == "open-ball":
            picks[b] = (nb.hits[0], True)
        elif not nb.hits and nb.miss is not None and nb.miss.kind == "closed-ball":
            picks[b] = (nb.miss, False)
    if not picks:
        return {}
    keys = list(picks)
    C = np.array([picks[b][0].center for b in keys])
    R = np.array([picks[b][0].radius for b in keys])
    is_hit = np.array([picks[b][1] for b in keys])
    near = np.array([ctx.min_dists(C, A.points) for A in images])
    ok = np.where(is_hit, near < R, near > R)
    return {b: (ok[:, k], "forward:hit" if is_hit[k] else "forward:miss") for k, b in enumerate(keys)}


def forward_continuity_probe(
    space: SampledMetricPoset,
    xs,
    x,
    battery=None,
    *,
    hit_radius: float | None = None,
    conv_tol: float | None = None,
    tail: int | None = None,
    embedding: Callable | None = None,
) -> DiagnosticsReport:
    """x_n -> x should force embed(x_n) into every battery neighborhood of embed(x), eventually."""
    ctx = space.ctx
    embed = embedding or (lambda p: canonical_ideal(space, p))
    xs = np.asarray(xs, float).reshape(-1, ctx.dimension)
    x = np.asarray(x, float).reshape(-1)
    N = xs.shape[0]
    start = _tail_start(N, tail)
    conv_tol = ctx.diameter / 64 if conv_tol is None else conv_tol
    dists = _metric_distances(space, xs, x)
    if dists[start:].max() > conv_tol:
        raise PreconditionError(
            f"x_n does not settle within {conv_tol} of x by the horizon", witness=float(dists[start:].max())
        )
    target = embed(x)
    hit_radius = ctx.diameter / 4 if hit_radius is None else hit_radius
    if battery is None:
        battery = default_battery(space, target, x, hit_radius)
    images = [embed(p) for p in xs]
    active = [nb for nb in battery if fell_membership(ctx, target, nb).ok]
    fast = _single_ball_results(ctx, active, images)
    for b, nbhd in enumerate(active):
        if b in fast:
            ok, stage = fast[b]
            region = nbhd.hits[0] if nbhd.hits else nbhd.miss
        else:
            results = [fell_membership(ctx, A, nbhd) for A in images]
            ok = np.array([r.ok for r in results])
            stage, region = None, None
        failing = np.flatnonzero(~ok[start:])
        if failing.size:
            if region is None:
                first = results[start + int(failing[0])]
                if not first.miss_ok:
                    stage, region = "forward:miss", nbhd.miss
                else:
                    stage, region = "forward:hit", nbhd.hits[first.hit_results.index(False)]
            witness = {
                "kind": region.kind,
                "center": region.center,
                "radius": region.radius,
                "failing_indices": tuple(int(n) + 1 for n in np.flatnonzero(~ok)),
            }
            return DiagnosticsReport(False, stage, witness, details={"neighborhoods_checked": b + 1})
    checked = len(active)
    return DiagnosticsReport(True, "forward", details={"neighborhoods_checked": checked})


def inverse_continuity_probe(
    space: SampledMetricPoset,
    xs,
    x,
    *,
    conv_tol: float | None = None,
    embedding: Callable | None = None,
    **kp_kwargs,
) -> DiagnosticsReport:
    """If embed(x_n) -> embed(x) in the K-P sense, x_n should converge to x."""
    ctx = space.ctx
    embed = embedding or (lambda p: canonical_ideal(space, p))
    xs = np.asarray(xs, float).reshape(-1, ctx.dimension)
    x = np.asarray(x, float).reshape(-1)
    kp_kwargs.setdefault("gap_distance", space.gap_distance)
    seq = SetSequence(ctx, [embed(p) for p in xs])
    verdict = kp_check(seq, embed(x), **kp_kwargs)
    if not verdict.converges:
        raise PreconditionError("the embedded sequence does not K-P converge to the embedded limit", witness=verdict)
    start = verdict.tail_start - 1
    conv_tol = ctx.diameter / 64 if conv_tol is None else conv_tol
    dists = _metric_distances(space, xs, x)
    tail_max = float(dists[start:].max())
    details = {"tail_max_distance": tail_max, "inf_tail_distance": float(dists[start:].min())}
    if tail_max <= conv_tol:
        return DiagnosticsReport(True, "inverse", details=details)
    return DiagnosticsReport(False, "inverse:metric", {"inf_tail_distance": float(dists[start:].min())}, details=details)


def order_connectedness_probe(space: SampledMetricPoset, x, y, eps: float) -> DiagnosticsReport:
    """Graph-connectedness of the sampled interval [x, y] at linking distance eps.

    A heuristic for topological connectedness: it depends on eps and on how
    densely the interval is sampled, both of which are reported.
    """
    if not space.leq(x, y):
        raise PreconditionError("order interval needs x below y", witness=(tuple(x), tuple(y)))
    P = space.sample.points
    inside = space.leq_matrix([x], P)[0] & space.leq_matrix(P, [y])[:, 0]
    pts = make_set(space.ctx, np.vstack([P[inside], np.reshape(x, (1, -1)), np.reshape(y, (1, -1))])).points
    adj = csr_matrix(space.ctx.pairwise(pts, pts) <= eps)
    n_comp, labels = connected_components(adj, directed=False)
    details = {"eps": float(eps), "points": int(pts.shape[0]), "components": int(n_comp)}
    if n_comp == 1:
        return DiagnosticsReport(True, "order-connectedness", details=details)
    reps = tuple(tuple(float(c) for c in pts[np.argmax(labels == k)]) for k in (labels[0], labels[-1]))
    if reps[0] == reps[1]:
        reps = (reps[0], tuple(float(c) for c in pts[np.argmax(labels != labels[0])]))
    return DiagnosticsReport(False, "order-connectedness", reps, details=details)


@dataclass(frozen=True)
class RadialVerdict:
    ok: bool
    n_triples: int
    n_violations: int
    witness: tuple | None = None


def radial_convexity_check(metric_table, poset, eps: float = 1e-12) -> RadialVerdict:
    """Scan all chains x <= y <= z for d(x, z) >= max(d(x, y), d(y, z)).

    ``poset`` is a FinitePoset (table rows follow its element order) or a
    boolean order matrix.
    """
    D = np.asarray(metric_table, dtype=np.float64)
    if isinstance(poset, FinitePoset):
        leq, names = poset.matrix, poset.elements
    else:
        leq, names = np.asarray(poset, dtype=bool), None
    n = leq.shape[0]
    if D.shape != (n, n) or not np.isfinite(D).all():
        raise InputError("metric table must give a finite entry for every pair of elements")
    n_triples, n_bad, first = kernels.radial_scan(D, leq, eps)
    if not n_bad:
        return RadialVerdict(True, int(n_triples), 0)
    witness = tuple(names[i] for i in first) if names is not None else tuple(int(i) for i in first)
    return RadialVerdict(False, int(n_triples), int(n_bad), witness)


@dataclass(frozen=True)
class MetricCertificate:
    is_metric: bool
    triangle_violations: int
    positivity_ok: bool
    symmetric: bool
    radial: RadialVerdict
    truncation_bound: float
    eps: float


@dataclass(frozen=True)
class RadialMetric:
    table: np.ndarray
    points: np.ndarray
    certificate: MetricCertificate


def ideal_profiles(space: SampledMetricPoset, points, dense) -> np.ndarray:
    """Rows (d(x_i, p(down)))_i for each point p."""
    return np.stack([space.ctx.min_dists(dense, canonical_ideal(space, p).points) for p in points])


def remetrized_distance(space: SampledMetricPoset, p, q, horizon: int = 64) -> float:
    """D(p, q): the Wijsman distance between the two sampled ideals."""
    dense = dense_sequence(space.ctx, horizon)
    F = ideal_profiles(space, [p, q], dense)
    return float(np.minimum(1.0, np.abs(F[0] - F[1])) @ wijsman_weights(horizon))


def radially_convex_metric(space: SampledMetricPoset, horizon: int = 64) -> RadialMetric:
    """Tabulate D(x, y) over the sample and certify it as a radially convex metric."""
    P = space.sample.points
    if P.shape[0] == 0:
        raise InputError("the carrier sample is empty")
    dense = dense_sequence(space.ctx, horizon)
    D = kernels.profile_distance(ideal_profiles(space, P, dense), wijsman_weights(horizon))
    bound = 2.0 ** -horizon
    eps = bound + 1e-12
    n_bad, _ = kernels.triangle_scan(D, eps)
    off = ~np.eye(P.shape[0], dtype=bool)
    positive = bool((D[off] > 0).all()) if off.any() else True
    symmetric = bool(np.array_equal(D, D.T)) and bool((np.diag(D) == 0).all())
    leq = space.leq_matrix(P, P)
    radial = radial_convexity_check(D, leq, eps)
    cert = MetricCertificate(n_bad == 0 and positive and symmetric, int(n_bad), positive, symmetric, radial, bound, eps)
    D.setflags(write=False)
    return RadialMetric(D, P, cert)


def converges_by_ratio(values, tol: float = 1e-9, ratio: float = 0.1) -> bool:
    """Finite-horizon reading of values -> 0: the last quarter is small next to the first."""
    v = np.asarray(values, dtype=np.float64)
    q = max(1, v.shape[0] // 4)
    head, tail = v[:q].max(), v[-q:].max()
    return bool(tail <= tol or tail <= ratio * head)


class _WholeWindow:
    """Carrier predicate for spaces that fill their window (recognized for batch filtering)."""

    def __init__(self, ctx: MetricContext):
        self.ctx = ctx

    def __call__(self, p) -> bool:
        return bool(self.ctx.contains(np.reshape(p, (1, -1)))[0])


def whole_window(ctx: MetricContext) -> Callable:
    return _WholeWindow(ctx)
