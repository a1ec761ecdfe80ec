"""Partially ordered groups on a window, and the Loewner order on symmetric matrices.

A window is not closed under the group operation, so every product-based
check is confined to products that stay inside it, and ideal products are
compared only within a caller-chosen safe window where clipping cannot
remove anything relevant.
"""

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .embedding import SampledMetricPoset, canonical_ideal
from .errors import InputError, PreconditionError
from .metric import SampledSet, make_set

MAX_ASSOC_ELEMENTS = 40  # associativity is checked on at most this many elements (cubic cost)


@dataclass(frozen=True)
class PoGroup:
    carrier: SampledMetricPoset
    op_rule: str = "vector-addition"  # or "custom-table"
    table: Mapping | None = None  # (a, b) -> ab on point tuples, for custom-table
    inverse_table: Mapping | None = None
    identity: tuple | None = None

    def __post_init__(self):
        if self.op_rule not in ("vector-addition", "custom-table"):
            raise InputError(f"unknown group operation {self.op_rule!r}")
        d = self.carrier.ctx.dimension
        if self.identity is None:
            if self.op_rule != "vector-addition":
                raise InputError("a custom group needs an explicit identity")
            object.__setattr__(self, "identity", (0.0,) * d)
        if self.op_rule == "custom-table" and (self.table is None or self.inverse_table is None):
            raise InputError("a custom group needs operation and inverse tables")

    @property
    def ctx(self):
        return self.carrier.ctx

    def op(self, a, b):
        if self.op_rule == "vector-addition":
            return np.asarray(a, float) + np.asarray(b, float)
        key = (_tup(a), _tup(b))
        return np.asarray(self.table[key], float) if key in self.table else None

    def inv(self, a):
        if self.op_rule == "vector-addition":
            return -np.asarray(a, float)
        return np.asarray(self.inverse_table[_tup(a)], float)

    def in_window(self, p) -> bool:
        if p is None:
            return False
        ctx = self.ctx
        if ctx.table is not None:
            return bool(ctx.contains(np.reshape(p, (1, -1)))[0])
        t = ctx.tol
        return all(lo - t <= c <= hi + t for c, (lo, hi) in zip(np.ravel(p).tolist(), ctx.window))


def _tup(p):
    return tuple(float(c) for c in np.ravel(p))


@dataclass(frozen=True)
class PoGroupReport:
    valid: bool
    violations: list  # (axiom, witness)
    checked: dict


def validate_pogroup(group: PoGroup) -> PoGroupReport:
    """Group axioms and translation invariance, restricted to in-window products.

    Translations use the sample together with the inverses of its elements,
    so both directions of shifting are exercised.
    """
    ctx, tol = group.ctx, group.ctx.tol
    P = group.carrier.sample.points
    e = np.asarray(group.identity, float)
    violations = []
    close = lambda a, b: ctx.distance(a, b) <= tol

    for a in P:
        for side, prod in (("left", group.op(e, a)), ("right", group.op(a, e))):
            if prod is None or not close(prod, a):
                violations.append((f"identity-{side}", (_tup(a),)))
        ai = group.inv(a)
        if group.in_window(ai):
            prod = group.op(a, ai)
            if prod is None or not close(prod, e):
                violations.append(("inverse", (_tup(a),)))

    step = max(1, -(-len(P) // MAX_ASSOC_ELEMENTS))
    sub = P[::step]
    n_assoc = 0
    if group.op_rule == "vector-addition":
        n_assoc, bad = _assoc_addition(ctx, sub)
        violations += [("associative", t) for t in bad]
        sub = sub[:0]
    for a in sub:
        for b in sub:
            ab = group.op(a, b)
            if not group.in_window(ab):
                continue
            for c in sub:
                bc = group.op(b, c)
                if not group.in_window(bc):
                    continue
                left, right = group.op(ab, c), group.op(a, bc)
                if not (group.in_window(left) and group.in_window(right)):
                    continue
                n_assoc += 1
                if not close(left, right):
                    violations.append(("associative", (_tup(a), _tup(b), _tup(c))))

    shifts = make_set(ctx, np.vstack([P] + [group.inv(p)[None] for p in P if group.in_window(group.inv(p))])).points
    leq = group.carrier.leq_matrix(P, P)
    xs, ys = np.nonzero(leq)
    n_trans = 0
    for z in shifts:
        for side in ("right", "left"):
            if group.op_rule == "vector-addition":
                X, Y = P[xs] + z, P[ys] + z
            else:
                pick = (lambda p: group.op(p, z)) if side == "right" else (lambda p: group.op(z, p))
                imgs = [pick(p) for p in P]
                ok = [im is not None for im in imgs]
                keep = [k for k in range(len(xs)) if ok[xs[k]] and ok[ys[k]]]
                X = np.array([imgs[xs[k]] for k in keep]).reshape(-1, ctx.dimension)
                Y = np.array([imgs[ys[k]] for k in keep]).reshape(-1, ctx.dimension)
            inside = ctx.contains(X) & ctx.contains(Y) if len(X) else np.zeros(0, bool)
            if not inside.any():
                continue
            X, Y = X[inside], Y[inside]
            n_trans += len(X)
            held = group.carrier.leq_pairs(X, Y)
            if not held.all():
                k = int(np.argmin(held))
                src = np.flatnonzero(inside)[k]
                if group.op_rule == "vector-addition":
                    x0, y0 = P[xs[src]], P[ys[src]]
                else:
                    x0, y0 = P[xs[keep[src]]], P[ys[keep[src]]]
                violations.append((f"translation-{side}", (_tup(x0), _tup(y0), _tup(z))))
                break
            if group.op_rule == "vector-addition":
                break  # addition is commutative: left and right shifts coincide
        if any(v[0].startswith("translation") for v in violations):
            break
    checked = {"elements": int(len(P)), "associativity_triples": n_assoc, "translated_pairs": n_trans}
    return PoGroupReport(not violations, violations, checked)


def _assoc_addition(ctx, sub):
    """Associativity of vector addition over all in-window triples, in one pass."""
    ab = sub[:, None, None, :] + sub[None, :, None, :]
    bc = sub[None, :, None, :] + sub[None, None, :, :]
    left = ab + sub[None, None, :, :]
    right = sub[:, None, None, :] + bc
    d = sub.shape[1]
    inside = lambda X: ctx.contains(np.broadcast_to(X, left.shape).reshape(-1, d)).reshape(left.shape[:3])
    keep = inside(ab) & inside(bc) & inside(left) & inside(right)
    off = np.sqrt(((left - right) ** 2).sum(axis=-1)) > ctx.tol
    bad = [(_tup(sub[i]), _tup(sub[j]), _tup(sub[k])) for i, j, k in np.argwhere(keep & off)]
    return int(keep.sum()), bad


@dataclass(frozen=True)
class MinkowskiResult:
    product: SampledSet
    dropped: int
    clipped: bool


def minkowski_product(group: PoGroup, A: SampledSet, B: SampledSet) -> MinkowskiResult:
    """All products ab, keeping those inside the window and counting the rest."""
    ctx = group.ctx
    if A.is_empty or B.is_empty:
        return MinkowskiResult(make_set(ctx, []), 0, False)
    if group.op_rule == "vector-addition":
        prods = (A.points[:, None, :] + B.points[None, :, :]).reshape(-1, ctx.dimension)
        inside = ctx.contains(prods)
    else:
        raw = [group.op(a, b) for a in A.points for b in B.points]
        inside = np.array([group.in_window(p) for p in raw])
        prods = np.array([p if p is not None else np.zeros(ctx.dimension) for p in raw])
    dropped = int((~inside).sum())
    return MinkowskiResult(make_set(ctx, prods[inside], "product"), dropped, dropped > 0)


@dataclass(frozen=True)
class IdealProductVerdict:
    ok: bool
    missing: tuple = ()  # in (xy)(down) but not in the product
    extra: tuple = ()  # in the product but not in (xy)(down)
    compared: int = 0


def _in_box(P, box):
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    return ((P >= lo) & (P <= hi)).all(axis=1)


def ideal_product_check(group: PoGroup, x, y, safe_window) -> IdealProductVerdict:
    """x(down) times y(down) equals (xy)(down), compared inside the safe window."""
    ctx = group.ctx
    box = [tuple(map(float, b)) for b in safe_window]
    xy = group.op(x, y)
    for name, p in (("x", x), ("y", y), ("xy", xy)):
        if p is None or not _in_box(np.reshape(np.asarray(p, float), (1, -1)), box)[0]:
            raise PreconditionError(f"{name} lies outside the safe window", witness=name)
    prod = minkowski_product(group, canonical_ideal(group.carrier, x), canonical_ideal(group.carrier, y)).product
    target = canonical_ideal(group.carrier, xy)
    L = prod.points[_in_box(prod.points, box)]
    R = target.points[_in_box(target.points, box)]
    missing = R[ctx.min_dists(R, L) > ctx.tol] if len(R) else R
    extra = L[ctx.min_dists(L, R) > ctx.tol] if len(L) else L
    ok = len(missing) == 0 and len(extra) == 0
    return IdealProductVerdict(ok, tuple(map(_tup, missing)), tuple(map(_tup, extra)), int(len(R)))


# -- Loewner order -----------------------------------------------------------------


@dataclass(frozen=True)
class SymMatrix:
    entries: np.ndarray
    tol: float = 1e-9

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.float64)
        if a.ndim == 1:
            n = int(round(np.sqrt(a.size)))
            if n * n != a.size:
                raise InputError("row-major entries must form a square matrix")
            a = a.reshape(n, n)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InputError("matrix must be square")
        if np.any(np.abs(a - a.T) > self.tol):
            raise InputError("matrix is not symmetric")
        a = (a + a.T) / 2
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self):
        return self.entries.shape[0]

    def __add__(self, other):
        return SymMatrix(self.entries + other.entries, self.tol)

    def __sub__(self, other):
        return SymMatrix(self.entries - other.entries, self.tol)


def is_psd(M: np.ndarray, tol: float = 1e-9) -> bool:
    """Positive semidefiniteness by LDL^T with largest-diagonal pivoting.

    A pivot counts as nonnegative unless it falls below -tol * (1 + max|M|);
    pivots at or above that threshold (ties included) are accepted.  Once the
    largest remaining diagonal is within the threshold of zero, the rest of
    the matrix must vanish up to the same threshold.
    """
    S = np.array(M, dtype=np.float64)
    thr = tol * (1.0 + (np.abs(S).max() if S.size else 0.0))
    n = S.shape[0]
    active = list(range(n))
    while active:
        diag = S[active, active]
        k = int(np.argmax(diag))
        d = diag[k]
        if d < -thr:
            return False
        if d <= thr:
            block = S[np.ix_(active, active)]
            return bool(np.all(np.abs(block) <= thr))
        p = active.pop(k)
        v = S[active, p].copy()
        S[np.ix_(active, active)] -= np.outer(v, v) / d
    return True


def loewner_leq(A: SymMatrix, B: SymMatrix, tol: float = 1e-9) -> bool:
    """A below B in the Loewner order: B - A is positive semidefinite."""
    if A.n != B.n:
        raise InputError("matrices must have the same size")
    return is_psd(B.entries - A.entries, tol)


@dataclass(frozen=True)
class AntilatticeReport:
    lower_bounds: tuple  # grid indices
    maximal: tuple
    greatest: int | None
    message: str


def antilattice_probe(A: SymMatrix, B: SymMatrix, grid, tol: float = 1e-9) -> AntilatticeReport:
    """Search a finite grid of symmetric matrices for a greatest common lower bound."""
    grid = list(grid)
    if not grid:
        raise InputError("candidate grid is empty")
    if A.n != B.n or any(C.n != A.n for C in grid):
        raise InputError("matrices must have the same size")
    lows = [i for i, C in enumerate(grid) if loewner_leq(C, A, tol) and loewner_leq(C, B, tol)]
    k = len(lows)
    above = np.zeros((k, k), dtype=bool)  # above[i, j]: lows[i] below lows[j]
    for i in range(k):
        for j in range(k):
            above[i, j] = i == j or loewner_leq(grid[lows[i]], grid[lows[j]], tol)
    strictly_above = above & ~above.T
    maximal = tuple(lows[i] for i in range(k) if not strictly_above[i].any())
    greatest = next((lows[j] for j in range(k) if above[:, j].all()), None)
    if greatest is not None:
        msg = "greatest lower bound found in grid"
    else:
        msg = "no greatest lower bound found in grid"
    return AntilatticeReport(tuple(lows), maximal, greatest, msg)


def sym_grid(n: int = 2, lo: float = -1.0, hi: float = 1.0, step: float = 0.25) -> list:
    """All symmetric n x n matrices with upper-triangle entries on a regular grid."""
    vals = np.arange(lo, hi + step / 2, step)
    iu = np.triu_indices(n)
    out = []
    for combo in np.array(np.meshgrid(*([vals] * len(iu[0])), indexing="ij")).reshape(len(iu[0]), -1).T:
        M = np.zeros((n, n))
        M[iu] = combo
        out.append(SymMatrix(M + np.triu(M, 1).T))
    return out
