import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apfree.core import (
    MAX_ELEMENT,
    ApWitness,
    IntegerSet,
    extension_creates_ap,
    find_ap_witness,
    is_ap_free,
)
from apfree.errors import ElementOverflow, InvalidP, NotAnExtension, PreconditionViolated

from oracles import brute_first_witness, brute_has_ap


def test_integer_set_invariants():
    s = IntegerSet([5, 1, 4, 1, 2])
    assert s.elements == (1, 2, 4, 5)
    assert s.max == 5 and s.min == 1
    assert list(np.flatnonzero(s.bitmap)) == [1, 2, 4, 5]
    assert 4 in s and 3 not in s and 0 not in s and 99 not in s
    assert IntegerSet().max == 0 and len(IntegerSet()) == 0


def test_integer_set_is_immutable():
    s = IntegerSet([1, 2])
    with pytest.raises(ValueError):
        s.array[0] = 7
    with pytest.raises(ValueError):
        s.bitmap[3] = True


def test_integer_set_rejects_bad_elements():
    with pytest.raises(ValueError):
        IntegerSet([0, 1])
    with pytest.raises(ElementOverflow):
        IntegerSet([MAX_ELEMENT + 1])


def test_sparse_membership_without_bitmap():
    s = IntegerSet([3, 2**40, 2**41])
    assert 2**40 in s and 2**40 + 1 not in s
    assert list(s.contains_many(np.array([3, 4, 2**41]))) == [True, False, True]
    assert find_ap_witness(IntegerSet([2**40, 2**41, 3 * 2**40]), 3) == ApWitness(2**40, 2**40, 3)


@pytest.mark.parametrize(
    "elements, p, expected",
    [
        ([1, 2, 3], 3, ApWitness(1, 1, 3)),
        ([1, 2, 4, 5], 3, None),
        ([1, 2, 4, 5, 10, 11, 13, 14], 3, None),
        ([1, 5, 9, 13], 4, ApWitness(1, 4, 4)),
    ],
)
def test_find_ap_witness_examples(elements, p, expected):
    assert find_ap_witness(IntegerSet(elements), p) == expected
    # independent triple/quadruple enumeration agrees
    assert brute_has_ap(elements, p) == (expected is not None)


@pytest.mark.parametrize(
    "elements, p, expected",
    [([1], 3, True), ([1, 2, 3], 3, False), ([2, 4, 8, 10, 20], 3, True), ([], 3, True)],
)
def test_is_ap_free_examples(elements, p, expected):
    assert is_ap_free(IntegerSet(elements), p) is expected


@pytest.mark.parametrize("p", [2, 0, -1])
def test_invalid_p(p):
    with pytest.raises(InvalidP):
        find_ap_witness(IntegerSet([1, 2, 3]), p)
    with pytest.raises(InvalidP):
        is_ap_free(IntegerSet([1]), p)


@pytest.mark.parametrize(
    "elements, x, p, expected",
    [([1, 2], 3, 3, True), ([1, 2], 4, 3, False), ([1, 2, 4, 5, 10, 11, 13], 14, 3, False)],
)
def test_extension_examples(elements, x, p, expected):
    assert extension_creates_ap(IntegerSet(elements), x, p) is expected


def test_extension_errors():
    with pytest.raises(NotAnExtension):
        extension_creates_ap(IntegerSet([1, 5]), 5, 3)
    with pytest.raises(PreconditionViolated):
        extension_creates_ap(IntegerSet([1, 2, 3]), 7, 3)


def test_witness_tie_break_matches_scan_order():
    rng = random.Random(3)
    for _ in range(300):
        p = rng.choice([3, 4, 5])
        elems = rng.sample(range(1, 40), rng.randint(0, 18))
        w = find_ap_witness(IntegerSet(elems), p)
        ref = brute_first_witness(elems, p)
        assert (None if w is None else (w.start, w.diff)) == ref


def test_extension_oracle_exhaustive_small():
    # every AP-free subset of [1, 12] and every admissible extension up to 16
    for p in (3, 4):
        for mask in range(1 << 12):
            elems = [k + 1 for k in range(12) if mask >> k & 1]
            s = IntegerSet(elems)
            if not is_ap_free(s, p):
                continue
            for x in range(s.max + 1, 17):
                got = extension_creates_ap(s, x, p, check=False)
                assert got == (find_ap_witness(s.with_element(x), p) is not None)


ap_free_sets = st.lists(st.integers(1, 60), max_size=20).map(IntegerSet)


@settings(max_examples=300, deadline=None)
@given(ap_free_sets, st.sampled_from([3, 4, 5]), st.integers(1, 30))
def test_extension_matches_full_scan(s, p, step):
    if not is_ap_free(s, p):
        return
    x = s.max + step
    assert extension_creates_ap(s, x, p) == (find_ap_witness(s.with_element(x), p) is not None)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 80), max_size=25), st.sampled_from([3, 4, 5]), st.randoms())
def test_subsets_of_ap_free_sets_are_ap_free(elems, p, rnd):
    s = IntegerSet(elems)
    if not is_ap_free(s, p):
        return
    sub = [e for e in s if rnd.random() < 0.5]
    assert is_ap_free(IntegerSet(sub), p)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 50), max_size=15), st.sampled_from([3, 4, 5]),
       st.integers(1, 7), st.integers(0, 20))
def test_affine_invariance(elems, p, c, b):
    s = IntegerSet(elems)
    t = IntegerSet([c * e + b for e in elems])
    assert is_ap_free(s, p) == is_ap_free(t, p)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 40), max_size=18), st.sampled_from([3, 4, 5]))
def test_witness_membership_and_oracle(elems, p):
    s = IntegerSet(elems)
    w = find_ap_witness(s, p)
    assert (w is not None) == brute_has_ap(elems, p)
    if w is not None:
        assert w.length == p and w.diff >= 1
        assert all(s.bitmap[t] for t in w.terms)
