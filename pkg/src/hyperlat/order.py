"""Finite partial orders stored as explicit relation pairs.

Everything here is brute force on purpose: the relation is materialized as a
boolean matrix, meets are found by listing all lower bounds, and validation
checks every triple.  These routines double as oracles for the closed-form
order rules used by the sampled spaces.

``is_filtered`` only checks pairs.  For a finite set that is enough: if every
pair has a lower bound inside S, then by induction so does every finite
subset (bound the first two, then bound that with the next element, ...).
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping

import numpy as np

from . import kernels
from .errors import InputError, PreconditionError


@dataclass(frozen=True)
class FinitePoset:
    elements: tuple
    leq: frozenset
    _index: dict = field(init=False, repr=False, compare=False)
    _matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "leq", frozenset(self.leq))
        index = {e: i for i, e in enumerate(elements)}
        if len(index) != len(elements):
            raise InputError("duplicate element identifiers")
        m = np.zeros((len(elements), len(elements)), dtype=bool)
        for a, b in self.leq:
            try:
                m[index[a], index[b]] = True
            except KeyError as exc:
                raise InputError(f"pair ({a!r}, {b!r}) references an unknown element") from exc
        m.setflags(write=False)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_matrix", m)

    @classmethod
    def from_predicate(cls, elements: Iterable, le: Callable[[Any, Any], bool]):
        """Materialize the relation ``le`` over ``elements`` (no validation)."""
        elements = tuple(elements)
        return cls(elements, frozenset((a, b) for a in elements for b in elements if le(a, b)))

    @property
    def matrix(self):
        return self._matrix

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self._index

    def index(self, x):
        try:
            return self._index[x]
        except KeyError:
            raise InputError(f"{x!r} is not an element of the poset") from None

    def le(self, a, b) -> bool:
        return bool(self._matrix[self.index(a), self.index(b)])


@dataclass(frozen=True)
class OrderValidationReport:
    is_valid: bool
    violations: list
    poset: FinitePoset | None = None


def validate_partial_order(elements, pairs) -> OrderValidationReport:
    """Check reflexivity, antisymmetry and transitivity, listing every violation.

    Violations are ``(axiom, witness)`` tuples with witnesses ``(a,)``,
    ``(a, b)`` and ``(a, b, c)`` respectively, in element order.
    """
    elements = tuple(elements)
    if not elements:
        raise InputError("a poset needs at least one element")
    poset = FinitePoset(elements, frozenset(tuple(p) for p in pairs))
    m = poset.matrix
    n = len(elements)
    violations = []
    for i in np.flatnonzero(~np.diag(m)):
        violations.append(("reflexive", (elements[i],)))
    both = m & m.T
    for i, j in zip(*np.nonzero(np.triu(both, k=1))):
        violations.append(("antisymmetric", (elements[i], elements[j])))
    n_bad, _ = kernels.transitivity_scan(m)
    if n_bad:
        for a in range(n):
            bad = m[a][:, None] & m & ~m[a][None, :]
            for b, c in zip(*np.nonzero(bad)):
                violations.append(("transitive", (elements[a], elements[b], elements[c])))
    ok = not violations
    return OrderValidationReport(ok, violations, poset if ok else None)


def down_set(poset: FinitePoset, x) -> frozenset:
    col = poset.matrix[:, poset.index(x)]
    return frozenset(poset.elements[i] for i in np.flatnonzero(col))


def up_set(poset: FinitePoset, x) -> frozenset:
    row = poset.matrix[poset.index(x)]
    return frozenset(poset.elements[i] for i in np.flatnonzero(row))


def interval(poset: FinitePoset, x, y) -> frozenset:
    if not poset.le(x, y):
        raise PreconditionError(f"interval needs {x!r} <= {y!r}", witness=(x, y))
    return up_set(poset, x) & down_set(poset, y)


def _lower_bounds(poset, S):
    idx = [poset.index(s) for s in S]
    return np.flatnonzero(poset.matrix[:, idx].all(axis=1))


def _upper_bounds(poset, S):
    idx = [poset.index(s) for s in S]
    return np.flatnonzero(poset.matrix[idx, :].all(axis=0))


def big_meet(poset: FinitePoset, S: Iterable):
    """Greatest lower bound of a nonempty S, or None if there is none."""
    S = list(S)
    if not S:
        raise InputError("big_meet needs a nonempty set")
    lows = _lower_bounds(poset, S)
    if lows.size == 0:
        return None
    sub = poset.matrix[np.ix_(lows, lows)]
    tops = lows[sub.all(axis=0)]
    return poset.elements[tops[0]] if tops.size else None


def big_join(poset: FinitePoset, S: Iterable):
    """Least upper bound of a nonempty S, or None if there is none."""
    S = list(S)
    if not S:
        raise InputError("big_join needs a nonempty set")
    ups = _upper_bounds(poset, S)
    if ups.size == 0:
        return None
    sub = poset.matrix[np.ix_(ups, ups)]
    bottoms = ups[sub.all(axis=1)]
    return poset.elements[bottoms[0]] if bottoms.size else None


def meet_table(poset: FinitePoset) -> np.ndarray:
    """Index of meet(i, j) for every pair of element indices, -1 where absent.

    Same brute-force rule as ``meet``, batched.  A greatest common lower
    bound, if any, has strictly the largest down-set among the common lower
    bounds, so the candidate is the argmax of down-set size; it is accepted
    only if every common lower bound lies below it.
    """
    m = poset.matrix
    n = len(poset)
    out = np.full((n, n), -1, dtype=np.int64)
    size = m.sum(axis=0)  # size[k] = |down_set(k)|
    cols = np.arange(n)
    for i in range(n):
        lows = m[:, i][:, None] & m  # lows[z, j]: z is below both i and j
        k = np.argmax(np.where(lows, size[:, None], -1), axis=0)
        ok = lows[k, cols] & ~(lows & ~m[:, k]).any(axis=0)
        out[i, ok] = k[ok]
    return out


def meet(poset: FinitePoset, a, b):
    return big_meet(poset, (a, b))


def join(poset: FinitePoset, a, b):
    return big_join(poset, (a, b))


@dataclass(frozen=True)
class FilteredVerdict:
    ok: bool
    witness: tuple | None = None


def is_filtered(poset: FinitePoset, S: Iterable) -> FilteredVerdict:
    """True iff every pair of S has a lower bound inside S."""
    S = list(dict.fromkeys(S))
    if not S:
        raise PreconditionError("is_filtered needs a nonempty set")
    idx = np.array([poset.index(s) for s in S])
    sub = poset.matrix[np.ix_(idx, idx)]  # sub[k, i]: S[k] <= S[i]
    for i in range(len(S)):
        for j in range(i + 1, len(S)):
            if not (sub[:, i] & sub[:, j]).any():
                return FilteredVerdict(False, (S[i], S[j]))
    return FilteredVerdict(True)


@dataclass(frozen=True)
class EmbeddingVerdict:
    ok: bool
    witness: tuple | None = None
    direction: str | None = None  # "preserve": x<=y but f(x)</=f(y); "reflect": converse


def is_order_embedding(A: FinitePoset, B: FinitePoset, mapping: Mapping | Callable) -> EmbeddingVerdict:
    f = mapping if callable(mapping) else mapping.__getitem__
    try:
        image = [f(x) for x in A.elements]
    except KeyError as exc:
        raise InputError(f"map is not total on the domain: missing {exc.args[0]!r}") from None
    for y in image:
        if y not in B:
            raise InputError(f"map image {y!r} is outside the codomain poset")
    jdx = np.array([B.index(y) for y in image])
    pulled = B.matrix[np.ix_(jdx, jdx)]
    diff = A.matrix != pulled
    if not diff.any():
        return EmbeddingVerdict(True)
    i, j = (int(v[0]) for v in np.nonzero(diff))
    direction = "preserve" if A.matrix[i, j] else "reflect"
    return EmbeddingVerdict(False, (A.elements[i], A.elements[j]), direction)


def inclusion_poset(sets: Iterable[Iterable[Hashable]]) -> FinitePoset:
    """The inclusion order on a finite family of sets (as frozensets)."""
    family = list(dict.fromkeys(frozenset(s) for s in sets))
    return FinitePoset.from_predicate(family, lambda a, b: a <= b)


def with_reflexive_pairs(elements, pairs) -> list:
    """Add the omitted (a, a) pairs; the JSON loader's normalization."""
    pairs = [tuple(p) for p in pairs]
    present = set(pairs)
    return pairs + [(e, e) for e in elements if (e, e) not in present]
