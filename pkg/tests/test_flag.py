import random
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lynperm import bounds
from lynperm.flag import (
    PermSum,
    constituents_violating_flag_lemma,
    density_of_sum,
    flag_product,
    flag_product_by_patterns,
    flag_product_direct,
    format_fraction,
)
from lynperm.perm import Permutation, enumerate_permutations, pattern_at, perm
from lynperm.permuton import exact_density, make_blowup, random_blowup

from conftest import permutations

F = Fraction
TWELVE_TIMES_ONE = {"123": F(1), "132": F(2, 3), "213": F(2, 3), "231": F(1, 3), "312": F(1, 3)}


def binary_by_hand(a, b):
    # count position subsets S of sigma with sigma|S = a and complement = b
    n = len(a) + len(b)
    out = {}
    for sigma in enumerate_permutations(n):
        hits = 0
        for S in combinations(range(1, n + 1), len(a)):
            rest = [i for i in range(1, n + 1) if i not in S]
            if pattern_at(sigma, S) == a and pattern_at(sigma, rest) == b:
                hits += 1
        if hits:
            out[sigma] = F(hits, comb(n, len(a)))
    return PermSum(out)


def test_12_times_1():
    got = flag_product([perm("12"), perm("1")])
    assert {str(p): c for p, c in got.items()} == TWELVE_TIMES_ONE
    assert str(got) == "123 + 2/3*132 + 2/3*213 + 1/3*231 + 1/3*312"
    assert got.total() == 3
    assert got.to_pairs()[1] == ["132", "2/3"]


def test_small_examples():
    assert flag_product([perm("1"), perm("1")]) == PermSum({perm("12"): 1, perm("21"): 1})
    assert flag_product([perm("231")]) == PermSum({perm("231"): 1})
    with pytest.raises(ValueError):
        flag_product([])
    with pytest.raises(bounds.BoundExceeded):
        flag_product([perm("12345"), perm("1234")])


def test_permsum_basics():
    s = PermSum({perm("12"): F(0), perm("21"): F(1, 2)})
    assert len(s) == 1 and perm("12") not in s
    assert s[perm("12")] == 0
    assert format_fraction(F(-3, 4)) == "-3/4"
    assert str(PermSum({})) == "0"


@settings(max_examples=40, deadline=None)
@given(permutations(min_size=1, max_size=3), permutations(min_size=1, max_size=3))
def test_binary_matches_hand_count(a, b):
    assert flag_product([a, b]) == binary_by_hand(a, b)


def test_commutative_associative_exhaustive():
    small = [p for n in range(1, 4) for p in enumerate_permutations(n)]
    for a, b in combinations_with_replacement(small, 2):
        if len(a) + len(b) <= 6:
            assert flag_product([a, b]) == flag_product([b, a])
    tiny = [p for n in range(1, 3) for p in enumerate_permutations(n)]
    for a, b, c in combinations_with_replacement(tiny, 3):
        ref = flag_product_direct([a, b, c])
        assert flag_product([a, b, c]) == ref
        assert flag_product([c, a, b]) == ref
        assert flag_product_by_patterns([a, b, c]) == ref


def test_flag_lemma_examples():
    assert constituents_violating_flag_lemma(perm("213")) == []
    assert constituents_violating_flag_lemma(perm("12")) == []
    assert constituents_violating_flag_lemma(perm("2413")) == []


def test_flag_lemma_exhaustive():
    for n in range(1, 6):
        for p in enumerate_permutations(n):
            assert constituents_violating_flag_lemma(p) == []


def test_density_of_sum_examples():
    P = make_blowup(perm("21"), [F(1, 3), F(2, 3)])
    s = PermSum({perm("12"): F(1, 2), perm("123"): F(1, 3)})
    assert density_of_sum(s, P) == F(1, 2) * exact_density(perm("12"), P) + F(1, 3) * exact_density(perm("123"), P)
    s2 = PermSum({perm("12"): F(1, 2), perm("21"): F(1, 3)})
    assert density_of_sum(s2, P) == F(1, 2) * exact_density(perm("12"), P) + F(1, 3) * exact_density(perm("21"), P)
    everything = PermSum({p: 1 for p in enumerate_permutations(3)})
    assert density_of_sum(everything, P) == 1
    diag = make_blowup(perm("1"), [1])
    assert density_of_sum(flag_product([perm("12"), perm("1")]), diag) == 1


def test_product_identity_spot():
    rng = random.Random(7)
    pairs = [("12", "1"), ("21", "21"), ("132", "1", "1"), ("231", "21")]
    for _ in range(5):
        P = random_blowup(rng, max_base=5)
        for texts in pairs:
            parts = [perm(t) for t in texts]
            want = F(1)
            for q in parts:
                want *= exact_density(q, P)
            assert density_of_sum(flag_product(parts), P) == want
