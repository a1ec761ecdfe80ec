"""Seeded random instances for the property scenarios and tests."""

import itertools

import numpy as np

from ..metric import MetricContext, make_set
from ..order import FinitePoset


def random_lattice(rng: np.random.Generator, size: int = 6, ground: int = 4, max_tries: int = 10_000) -> FinitePoset:
    """A random lattice: an intersection-closed family of subsets containing the full set.

    Meets are intersections; joins exist because the full set is an upper
    bound of everything, so every finite lattice shape can arise this way.
    """
    full = frozenset(range(ground))
    for _ in range(max_tries):
        family = {full}
        while len(family) < size:
            s = frozenset(np.flatnonzero(rng.random(ground) < 0.5).tolist())
            grown = set(family)
            grown.add(s)
            changed = True
            while changed:
                changed = False
                for a, b in itertools.combinations(list(grown), 2):
                    if a & b not in grown:
                        grown.add(a & b)
                        changed = True
            if len(grown) > size:
                break
            family = grown
        if len(family) == size:
            elements = sorted(family, key=lambda s: (len(s), sorted(s)))
            return FinitePoset.from_predicate(elements, lambda a, b: a <= b)
    raise RuntimeError("could not draw a lattice of the requested size")


def random_monotone_map(rng: np.random.Generator, poset: FinitePoset) -> dict:
    """A random order-preserving self-map, built along a linear extension.

    Each element is sent to a random upper bound of the images of the
    elements below it; in a lattice the top is always such a bound.
    """
    m = poset.matrix
    order = np.argsort(m.sum(axis=0), kind="stable")  # by down-set size: a linear extension
    img = {}
    for i in order:
        below = [j for j in np.flatnonzero(m[:, i]) if j != i]
        ok = np.ones(len(poset), dtype=bool)
        for j in below:
            ok &= m[img[j]]
        choices = np.flatnonzero(ok)
        img[i] = int(rng.choice(choices))
    return {poset.elements[i]: poset.elements[img[i]] for i in range(len(poset))}


def deflation_start(rng: np.random.Generator, poset: FinitePoset, f: dict):
    """A random point x0 with f(x0) below x0 (the top always qualifies)."""
    starts = [x for x in poset.elements if poset.le(f[x], x)]
    return starts[int(rng.integers(len(starts)))]


def random_cloud(rng: np.random.Generator, count: int, dim: int = 2, step: float = 1 / 16) -> np.ndarray:
    """Distinct grid-aligned points in the unit box."""
    cells = int(round(1 / step)) + 1
    picks = rng.choice(cells**dim, size=count, replace=False)
    return np.stack(np.unravel_index(picks, (cells,) * dim), axis=1) * step


def convexity_case(rng: np.random.Generator, ctx: MetricContext):
    """A nested triple A inside C inside B and a basic Fell set containing A and B.

    Hit balls are centred on points of A; the miss ball is centred at a
    random point with radius below its distance to B.  Returns
    (hit specs, miss spec or None, A, B, C) with specs as (center, radius).
    """
    B_pts = random_cloud(rng, int(rng.integers(3, 10)), ctx.dimension)
    perm = rng.permutation(len(B_pts))
    n_c = int(rng.integers(1, len(B_pts) + 1))
    n_a = int(rng.integers(1, n_c + 1))
    C_pts = B_pts[perm[:n_c]]
    A_pts = C_pts[:n_a]
    hits = []
    for k in rng.choice(n_a, size=int(rng.integers(1, min(n_a, 3) + 1)), replace=False):
        hits.append((A_pts[k], float(rng.uniform(0.01, 0.5))))
    miss = None
    if rng.random() < 0.8:
        c = rng.uniform(0, 1, ctx.dimension)
        gap = float(ctx.min_dists(c[None], B_pts)[0])
        if gap > 1e-6:
            miss = (c, float(rng.uniform(0, 0.999)) * gap)
    return hits, miss, make_set(ctx, A_pts, "A"), make_set(ctx, B_pts, "B"), make_set(ctx, C_pts, "C")
