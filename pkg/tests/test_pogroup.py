import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlat.embedding import SampledMetricPoset, canonical_ideal
from hyperlat.errors import InputError, PreconditionError
from hyperlat.metric import MetricContext, make_set
from hyperlat.order import validate_partial_order
from hyperlat.pogroup import (
    PoGroup,
    SymMatrix,
    antilattice_probe,
    ideal_product_check,
    is_psd,
    loewner_leq,
    minkowski_product,
    sym_grid,
    validate_pogroup,
)

from oracles import is_psd_oracle


def int_group(lo, hi, dim=1):
    ctx = MetricContext.box(lo, hi, dim)
    g = np.arange(lo, hi + 1, dtype=float)
    pts = np.stack(np.meshgrid(*([g] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    return PoGroup(SampledMetricPoset(ctx, make_set(ctx, pts)))


def as_set(S):
    return {tuple(p) for p in S.points.tolist()}


# -- group axioms --------------------------------------------------------------------------


def test_integer_lattices_are_valid():
    assert validate_pogroup(int_group(-5, 5)).valid
    r = validate_pogroup(int_group(-3, 3, 2))
    assert r.valid and r.checked["translated_pairs"] > 0


def test_real_window_sample_is_valid():
    ctx = MetricContext.box(-2, 2)
    sp = SampledMetricPoset(ctx, make_set(ctx, np.arange(-2, 2.01, 0.25)[:, None]))
    assert validate_pogroup(PoGroup(sp)).valid


def test_doubling_relation_breaks_translation():
    ctx = MetricContext.box(-4, 4)
    sp = SampledMetricPoset(
        ctx, make_set(ctx, np.arange(0.5, 4.01, 0.5)[:, None]), leq_rule="custom-predicate", predicate_id="doubling"
    )
    r = validate_pogroup(PoGroup(sp))
    assert not r.valid
    kind, (x, y, z) = next(v for v in r.violations if v[0].startswith("translation"))
    # the witness really is a counterexample: x <= y <= 2x, yet not after shifting by z
    assert x[0] <= y[0] <= 2 * x[0]
    xs, ys = x[0] + z[0], y[0] + z[0]
    assert not (xs <= ys <= 2 * xs)


def cyclic_group(n):
    ctx = MetricContext.box(0, n - 1)
    sp = SampledMetricPoset(ctx, make_set(ctx, np.arange(n, dtype=float)[:, None]), leq_rule="custom-pairs")
    table = {((float(a),), (float(b),)): ((a + b) % n,) for a in range(n) for b in range(n)}
    inv = {(float(a),): ((-a) % n,) for a in range(n)}
    return sp, table, inv


def test_custom_table_group():
    sp, table, inv = cyclic_group(4)
    assert validate_pogroup(PoGroup(sp, "custom-table", table, inv, (0.0,))).valid
    broken = dict(table)
    broken[((1.0,), (1.0,))] = (3,)
    r = validate_pogroup(PoGroup(sp, "custom-table", broken, inv, (0.0,)))
    assert not r.valid


def test_group_construction_errors():
    sp, table, inv = cyclic_group(3)
    with pytest.raises(InputError):
        PoGroup(sp, "multiplication")
    with pytest.raises(InputError):
        PoGroup(sp, "custom-table", table, inv)
    with pytest.raises(InputError):
        PoGroup(sp, "custom-table", identity=(0.0,))


# -- Minkowski products and ideals ---------------------------------------------------------


def test_minkowski_identity_and_shift():
    G = int_group(-10, 10)
    A = make_set(G.ctx, [[-3.0], [1.0], [4.0]])
    r = minkowski_product(G, make_set(G.ctx, [[0.0]]), A)
    assert as_set(r.product) == as_set(A) and not r.clipped
    one_down = canonical_ideal(G.carrier, (0.0,))
    r = minkowski_product(G, make_set(G.ctx, [[3.0]]), one_down)
    # the shifted ideal starts at -7, so the two agree above the window's shifted floor
    above = lambda S: {p for p in as_set(S) if p[0] >= -7}
    assert above(r.product) == above(canonical_ideal(G.carrier, (3.0,)))
    assert not r.clipped and r.dropped == 0
    r = minkowski_product(G, make_set(G.ctx, [[8.0]]), make_set(G.ctx, [[1.0], [2.0], [3.0]]))
    assert as_set(r.product) == {(9.0,), (10.0,)} and r.clipped and r.dropped == 1


def test_minkowski_ideal_product_on_integers():
    G = int_group(-10, 10)
    P = minkowski_product(G, canonical_ideal(G.carrier, (2.0,)), canonical_ideal(G.carrier, (3.0,))).product
    inside = {p for p in as_set(P) if -10 <= p[0] <= 5}
    assert inside == {(float(k),) for k in range(-10, 6)}


def test_ideal_product_exhaustive_on_integers():
    G = int_group(-20, 20)
    safe = [(-8, 5)]
    n = 0
    for x in range(-8, 6):
        for y in range(-8, 6):
            if -8 <= x + y <= 5:
                v = ideal_product_check(G, (float(x),), (float(y),), safe)
                assert v.ok, (x, y, v)
                n += 1
    assert n > 0
    with pytest.raises(PreconditionError):
        ideal_product_check(G, (4.0,), (3.0,), safe)


def test_ideal_product_on_integer_plane():
    G = int_group(-6, 6, 2)
    safe = [(-2, 2), (-2, 2)]
    v = ideal_product_check(G, (1.0, 0.0), (0.0, 1.0), safe)
    assert v.ok and v.compared == 16  # (1,1)(down) clipped to [-2,2]^2 is a 4x4 block
    pts = [(float(a), float(b)) for a in range(-2, 3) for b in range(-2, 3)]
    for x in pts:
        for y in pts:
            if all(-2 <= c <= 2 for c in np.add(x, y)):
                assert ideal_product_check(G, x, y, safe).ok


def test_ideal_product_detects_a_non_group_order():
    ctx = MetricContext.box(-4, 4)
    sp = SampledMetricPoset(
        ctx, make_set(ctx, np.arange(-4, 4.01, 1.0)[:, None]), leq_rule="custom-predicate", predicate_id="doubling"
    )
    # 3(down) = {2, 3} and 1(down) = {1}, so the product {3, 4} misses 2 from 4(down) = {2, 3, 4}
    v = ideal_product_check(PoGroup(sp), (3.0,), (1.0,), [(-4, 4)])
    assert not v.ok and v.missing == ((2.0,),) and v.extra == ()


# -- Loewner order ---------------------------------------------------------------------


def test_symmatrix_validation():
    with pytest.raises(InputError):
        SymMatrix([[0, 1], [2, 0]])
    with pytest.raises(InputError):
        SymMatrix([1, 2, 3])
    assert SymMatrix([1, 2, 2, 1]).n == 2


def test_loewner_examples():
    I, I2 = SymMatrix(np.eye(2)), SymMatrix(2 * np.eye(2))
    assert loewner_leq(I, I2) and not loewner_leq(I2, I)
    a, b = SymMatrix(np.diag([1.0, 0.0])), SymMatrix(np.diag([0.0, 1.0]))
    assert not loewner_leq(a, b) and not loewner_leq(b, a)
    assert loewner_leq(a, a)
    with pytest.raises(InputError):
        loewner_leq(I, SymMatrix(np.eye(3)))


def test_psd_tie_policy():
    # a pivot exactly at the threshold counts as nonnegative
    thr = 1e-9 * (1 + 1.0)
    assert is_psd(np.diag([1.0, -thr]))
    assert not is_psd(np.diag([1.0, -3 * thr]))
    v = np.array([1.0, 2.0, -1.0])
    assert is_psd(np.outer(v, v))
    assert is_psd(np.zeros((3, 3)))


sym3 = st.lists(st.integers(-4, 4), min_size=6, max_size=6)


def _sym(vals, n=3):
    M = np.zeros((n, n))
    M[np.triu_indices(n)] = vals
    return M + np.triu(M, 1).T


@settings(max_examples=300, deadline=None)
@given(sym3)
def test_psd_matches_eigenvalues(vals):
    M = _sym(np.array(vals) / 2)
    lam = np.linalg.eigvalsh(M).min()
    if abs(lam) > 1e-6:  # away from the boundary both decide the same way
        assert is_psd(M) == is_psd_oracle(M)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3), st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_psd_accepts_gram_matrices(u, v):
    G = np.outer(u, u) + np.outer(v, v)
    assert is_psd(G)


def test_loewner_translation_invariance_random():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(1000):
        A, B, C = (SymMatrix(_sym(rng.integers(-3, 4, 6) / 2)) for _ in range(3))
        if rng.random() < 0.5:
            B = A + SymMatrix(np.outer(*(2 * [rng.integers(-2, 3, 3)])))  # force comparability half the time
        before = loewner_leq(A, B)
        assert before == loewner_leq(A + C, B + C)
        checked += before
    assert checked > 300


def test_loewner_is_partial_order_on_grid():
    grid = sym_grid(2, -0.5, 0.5, 0.5)
    keys = list(range(len(grid)))
    pairs = [(i, j) for i in keys for j in keys if loewner_leq(grid[i], grid[j])]
    assert validate_partial_order(keys, pairs).is_valid


def test_antilattice_probe():
    grid = sym_grid(2)
    a, b = SymMatrix(np.diag([1.0, 0.0])), SymMatrix(np.diag([0.0, 1.0]))
    r = antilattice_probe(a, b, grid)
    assert len(r.maximal) >= 2 and r.greatest is None and r.message == "no greatest lower bound found in grid"
    coarse = sym_grid(2, -1, 1, 0.5)
    ia = next(i for i, C in enumerate(coarse) if np.array_equal(C.entries, a.entries))
    assert antilattice_probe(a, a, coarse).greatest == ia
    assert antilattice_probe(a, SymMatrix(np.eye(2)), coarse).greatest == ia
    with pytest.raises(InputError):
        antilattice_probe(a, b, [])


def test_sym_grid_size_and_symmetry():
    grid = sym_grid(2)
    assert len(grid) == 9**3
    assert all(np.array_equal(C.entries, C.entries.T) for C in grid)
