"""Fixed points of order-preserving maps by downward iteration, plus brute-force oracles.

Starting from a point x0 with f(x0) below x0, the iterates x, f(x), f(f(x)), ...
form a decreasing chain, and on a finite sample that chain must stall at a
fixed point.  Maps are Python callables or explicit tables {x: f(x)}.
"""

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .embedding import SampledMetricPoset
from .errors import InputError, PreconditionError
from .order import FilteredVerdict, FinitePoset, big_meet, is_filtered, meet_table

MAX_STEPS = 10_000

# Closed-form maps on integer chains, addressable by name from scenario files.
NAMED_MAPS: dict = {
    "shift-clamp": lambda shift, floor: (lambda x: max(x - shift, floor)),
    "halve": lambda: (lambda x: x // 2),
    "min-const": lambda c: (lambda x: min(x, c)),
}


def _as_callable(f):
    if callable(f):
        return f
    if isinstance(f, Mapping):
        return lambda x: f[x]
    raise InputError("a map must be a callable or a table")


class _Discrete:
    """Adapter giving FinitePosets and sampled spaces one interface."""

    def __init__(self, space):
        if isinstance(space, FinitePoset):
            self.elements = list(space.elements)
            self.matrix = space.matrix
            self.same = lambda a, b: a == b
            self.key = lambda a: a
            self.exact = True
        elif isinstance(space, SampledMetricPoset):
            pts = space.sample.points
            self.elements = [tuple(float(c) for c in p) for p in pts]
            self.matrix = space.leq_matrix(pts, pts)
            tol = space.ctx.tol
            self.same = lambda a, b: space.ctx.distance(a, b) <= tol
            self.key = lambda a: tuple(float(c) for c in np.ravel(a))
            self.exact = False
            self._space = space
        else:
            raise InputError("expected a FinitePoset or a SampledMetricPoset")
        self.index = {e: i for i, e in enumerate(self.elements)}

    def locate(self, y):
        y = self.key(y)
        if y in self.index:
            return self.index[y]
        if not self.exact:
            d = self._space.ctx.pairwise([y], self._space.sample.points)[0]
            k = int(np.argmin(d))
            if d[k] <= self._space.ctx.tol:
                return k
        return None


def _image_indices(D, f):
    img = []
    for x in D.elements:
        k = D.locate(f(x))
        if k is None:
            raise PreconditionError(f"f({x!r}) = {f(x)!r} is not in the sample", witness=x)
        img.append(k)
    return np.array(img, dtype=np.int64)


def _check_monotone(D, img):
    m = D.matrix
    bad = m & ~m[np.ix_(img, img)]
    if bad.any():
        i, j = (int(v[0]) for v in np.nonzero(bad))
        raise PreconditionError(
            f"f is not order-preserving: {D.elements[i]!r} <= {D.elements[j]!r} but not their images",
            witness=(D.elements[i], D.elements[j]),
        )


@dataclass(frozen=True)
class IterationTrace:
    states: list
    converged: bool
    fixed_point: object = None
    steps: int = 0  # number of applications of f


def tk_iterate(space, f, x0, max_steps: int = MAX_STEPS) -> IterationTrace:
    """Iterate f downward from x0 until two consecutive states coincide.

    Preconditions (f maps the sample into itself, preserves order on every
    pair, and f(x0) <= x0) are checked up front so a failure names its witness.
    """
    D = _Discrete(space)
    f = _as_callable(f)
    img = _image_indices(D, f)
    _check_monotone(D, img)
    i0 = D.locate(x0)
    if i0 is None:
        raise InputError(f"start point {x0!r} is not in the sample")
    if not D.matrix[img[i0], i0]:
        raise PreconditionError("the start point is not deflationary: f(x0) is not below x0", witness=x0)
    states = [D.elements[i0]]
    i = i0
    for step in range(1, max_steps + 1):
        j = int(img[i])
        states.append(D.elements[j])
        if D.same(D.elements[i], D.elements[j]):
            return IterationTrace(states, True, D.elements[j], step)
        i = j
    return IterationTrace(states, False, None, max_steps)


def brute_force_fixed_points(poset: FinitePoset, f) -> frozenset:
    f = _as_callable(f)
    return frozenset(x for x in poset.elements if f(x) == x)


@dataclass(frozen=True)
class FilteredInfVerdict:
    filtered: FilteredVerdict
    inf_S: object  # "undefined" when the sample has no meet
    inf_fS: object
    f_of_inf_S: object
    preserved: bool | None  # None when either side is undefined
    declared: bool  # infima came from scenario data rather than the sample
    homomorphism_ok: bool
    homomorphism_witness: tuple | None = None


UNDEFINED = "undefined"


def filtered_inf_check(
    spaceA: FinitePoset,
    spaceB: FinitePoset,
    f,
    S,
    *,
    declared_inf_S=None,
    declared_inf_fS=None,
) -> FilteredInfVerdict:
    """Does f carry the infimum of S to the infimum of f(S)?

    Also checks the pairwise law f(x meet y) = f(x) meet f(y) over all pairs
    where both meets exist.  Declared infima override the sampled ones, for
    sets whose true infimum lies outside any finite sample.
    """
    f = _as_callable(f)
    S = list(dict.fromkeys(S))
    if not S:
        raise InputError("S must be nonempty")
    img = np.array([spaceB.index(f(x)) for x in spaceA.elements])
    m = spaceA.matrix
    bad = m & ~spaceB.matrix[np.ix_(img, img)]
    if bad.any():
        i, j = (int(v[0]) for v in np.nonzero(bad))
        raise PreconditionError("f is not order-preserving", witness=(spaceA.elements[i], spaceA.elements[j]))
    filtered = is_filtered(spaceA, S)
    declared = declared_inf_S is not None or declared_inf_fS is not None
    inf_S = declared_inf_S if declared_inf_S is not None else big_meet(spaceA, S)
    fS = list(dict.fromkeys(f(x) for x in S))
    inf_fS = declared_inf_fS if declared_inf_fS is not None else big_meet(spaceB, fS)
    f_inf = f(inf_S) if inf_S is not None else None
    preserved = None if (inf_S is None or inf_fS is None) else f_inf == inf_fS

    ta, tb = meet_table(spaceA), meet_table(spaceB)
    hom_witness = None
    n = len(spaceA)
    for i in range(n):
        for j in range(i + 1, n):
            k, l = ta[i, j], tb[img[i], img[j]]
            if k >= 0 and l >= 0 and img[k] != l:
                hom_witness = (spaceA.elements[i], spaceA.elements[j])
                break
        if hom_witness:
            break
    return FilteredInfVerdict(
        filtered,
        UNDEFINED if inf_S is None else inf_S,
        UNDEFINED if inf_fS is None else inf_fS,
        UNDEFINED if f_inf is None else f_inf,
        preserved,
        declared,
        hom_witness is None,
        hom_witness,
    )
