import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperlat.errors import InputError, PreconditionError
from hyperlat.order import (
    FinitePoset,
    big_join,
    big_meet,
    down_set,
    inclusion_poset,
    interval,
    is_filtered,
    is_order_embedding,
    join,
    meet,
    meet_table,
    up_set,
    validate_partial_order,
    with_reflexive_pairs,
)


def divisibility(n):
    els = list(range(1, n + 1))
    return FinitePoset.from_predicate(els, lambda a, b: b % a == 0)


def square01():
    els = [(0, 0), (0, 1), (1, 0), (1, 1)]
    return FinitePoset.from_predicate(els, lambda a, b: a[0] <= b[0] and a[1] <= b[1])


def triple_loop_violations(elements, pairs):
    """Independent axiom oracle: plain loops over the pair set."""
    rel = set(pairs)
    out = set()
    for a in elements:
        if (a, a) not in rel:
            out.add(("reflexive", (a,)))
    for a, b in itertools.combinations(elements, 2):
        if (a, b) in rel and (b, a) in rel:
            out.add(("antisymmetric", (a, b)))
    for a in elements:
        for b in elements:
            for c in elements:
                if (a, b) in rel and (b, c) in rel and (a, c) not in rel:
                    out.add(("transitive", (a, b, c)))
    return out


# -- validation -------------------------------------------------------------------------


def test_singleton_valid():
    assert validate_partial_order(["a"], [("a", "a")]).is_valid


def test_two_cycle_antisymmetry_witness():
    r = validate_partial_order(["a", "b"], [("a", "a"), ("b", "b"), ("a", "b"), ("b", "a")])
    assert not r.is_valid
    assert ("antisymmetric", ("a", "b")) in r.violations
    assert r.poset is None


def test_divisibility_valid():
    P = divisibility(6)
    assert validate_partial_order(P.elements, P.leq).is_valid


def test_unknown_identifier_rejected():
    with pytest.raises(InputError):
        validate_partial_order(["a"], [("a", "z")])


def test_empty_elements_rejected():
    with pytest.raises(InputError):
        validate_partial_order([], [])


def test_missing_reflexive_and_transitive_listed():
    r = validate_partial_order([1, 2, 3], [(1, 1), (2, 2), (1, 2), (2, 3)])
    kinds = {v[0] for v in r.violations}
    assert kinds == {"reflexive", "transitive"}
    assert ("reflexive", (3,)) in r.violations
    assert ("transitive", (1, 2, 3)) in r.violations


def test_exhaustive_relations_on_three_elements_match_oracle():
    els = [0, 1, 2]
    all_pairs = [(a, b) for a in els for b in els]
    for mask in range(1 << len(all_pairs)):
        pairs = [p for k, p in enumerate(all_pairs) if mask >> k & 1]
        r = validate_partial_order(els, pairs)
        assert set(r.violations) == triple_loop_violations(els, pairs)
        assert r.is_valid == (not r.violations)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 6), st.data())
def test_random_relations_match_oracle(n, data):
    els = list(range(n))
    pairs = data.draw(st.lists(st.tuples(st.sampled_from(els), st.sampled_from(els)), max_size=n * n))
    r = validate_partial_order(els, pairs)
    assert set(r.violations) == triple_loop_violations(els, pairs)


def test_with_reflexive_pairs_completes():
    pairs = with_reflexive_pairs(["a", "b"], [("a", "b")])
    assert validate_partial_order(["a", "b"], pairs).is_valid


# -- meets, joins, sets -------------------------------------------------------------------


def test_meet_examples():
    assert meet(divisibility(12), 4, 6) == 2
    assert meet(square01(), (0, 1), (1, 0)) == (0, 0)
    anti = FinitePoset(["a", "b"], {("a", "a"), ("b", "b")})
    assert meet(anti, "a", "b") is None
    assert join(anti, "a", "b") is None


def test_join_is_lcm_on_divisors_of_12():
    D = FinitePoset.from_predicate([1, 2, 3, 4, 6, 12], lambda a, b: b % a == 0)
    for a in D.elements:
        for b in D.elements:
            assert join(D, a, b) == a * b // math.gcd(a, b)
            assert meet(D, a, b) == math.gcd(a, b)


def test_big_meet_and_join():
    P = divisibility(12)
    assert big_meet(P, [4, 8, 12]) == 4
    assert big_join(P, [2, 3]) == 6
    assert big_join(P, [5, 7]) is None
    with pytest.raises(InputError):
        big_meet(P, [])


def test_down_up_interval():
    chain = FinitePoset.from_predicate([1, 2, 3], lambda a, b: a <= b)
    assert down_set(chain, 2) == {1, 2}
    assert up_set(chain, 2) == {2, 3}
    assert down_set(divisibility(12), 12) == {1, 2, 3, 4, 6, 12}
    P = divisibility(12)
    for x in P.elements:
        assert interval(P, x, x) == {x}
    assert interval(P, 2, 12) == {2, 4, 6, 12}
    with pytest.raises(PreconditionError):
        interval(P, 3, 4)


def random_poset(rng, n, density=0.4):
    """Transitive closure of a random DAG on 0..n-1 (ordered by index)."""
    m = np.eye(n, dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            m[i, j] = rng.random() < density
    for k in range(n):
        m |= m[:, [k]] & m[[k], :]
    return FinitePoset(range(n), frozenset(zip(*(a.tolist() for a in np.nonzero(m)))))


@pytest.mark.parametrize("seed", range(30))
def test_meet_table_matches_brute_force(seed):
    P = random_poset(np.random.default_rng(seed), 9)
    t = meet_table(P)
    for a in P.elements:
        for b in P.elements:
            m = meet(P, a, b)
            assert t[a, b] == (-1 if m is None else m)


@pytest.mark.parametrize("seed", range(30))
def test_meet_laws(seed):
    P = random_poset(np.random.default_rng(100 + seed), 8)
    for a in P.elements:
        for b in P.elements:
            m = meet(P, a, b)
            if m is None:
                continue
            assert P.le(m, a) and P.le(m, b)
            for z in P.elements:
                if P.le(z, a) and P.le(z, b):
                    assert P.le(z, m)
            assert down_set(P, m) == down_set(P, a) & down_set(P, b)


# -- filtered sets and embeddings ----------------------------------------------------------


def test_is_filtered():
    chain = FinitePoset.from_predicate(range(5), lambda a, b: a <= b)
    assert is_filtered(chain, [1, 3, 4]).ok
    v = is_filtered(square01(), [(0, 1), (1, 0)])
    assert not v.ok and v.witness == ((0, 1), (1, 0))
    P = divisibility(12)
    for x in P.elements:
        assert is_filtered(P, down_set(P, x)).ok
    with pytest.raises(PreconditionError):
        is_filtered(P, [])


def test_order_embedding():
    P = divisibility(12)
    assert is_order_embedding(P, P, lambda x: x).ok
    ideals = {x: down_set(P, x) for x in P.elements}
    inc = inclusion_poset(ideals.values())
    assert is_order_embedding(P, inc, ideals).ok
    chain = FinitePoset.from_predicate([0, 1], lambda a, b: a <= b)
    v = is_order_embedding(chain, chain, lambda x: 0)
    assert not v.ok and v.witness == (1, 0) and v.direction == "reflect"


def test_order_embedding_errors():
    chain = FinitePoset.from_predicate([0, 1], lambda a, b: a <= b)
    with pytest.raises(InputError):
        is_order_embedding(chain, chain, lambda x: 5)
    with pytest.raises(InputError):
        is_order_embedding(chain, chain, {0: 0})


@pytest.mark.parametrize("seed", range(10))
def test_ideal_map_is_embedding_on_random_posets(seed):
    P = random_poset(np.random.default_rng(200 + seed), 7)
    ideals = {x: down_set(P, x) for x in P.elements}
    assert is_order_embedding(P, inclusion_poset(ideals.values()), ideals).ok


def test_duplicate_elements_rejected():
    with pytest.raises(InputError):
        FinitePoset([1, 1], set())
