from collections import Counter
from fractions import Fraction
from itertools import product
from math import factorial, prod

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lynperm import bounds
from lynperm.lyndon import (
    alphabet_compare,
    block_word_of,
    cfl_factorize,
    cfl_factorize_naive,
    compare_L,
    enumerate_lyndon_permutations,
    format_block_word,
    is_lyndon_permutation,
    is_lyndon_word,
    lyndon_counts_from_series,
    lyndon_factor_permutation,
    max_shuffle_constituent,
    parse_block_word,
    shuffle_product,
    sigma_prefix,
)
from lynperm.perm import direct_sum, enumerate_permutations, perm

SIGMA5 = sigma_prefix(5)
A, B, C = SIGMA5[0], SIGMA5[1], SIGMA5[2]

words_over_sigma5 = st.lists(st.sampled_from(SIGMA5), min_size=1, max_size=6).map(tuple)


def w(*texts):
    return tuple(perm(t) for t in texts)


def counts_by_log(kmax):
    # log(1 + sum n! x^n) = sum_n l_n sum_j x^(nj)/j, then Moebius inversion
    f = [Fraction(1)] + [Fraction(factorial(n)) for n in range(1, kmax + 1)]
    log = [Fraction(0)] * (kmax + 1)
    # f' = f * (log f)'
    for m in range(1, kmax + 1):
        acc = m * f[m] - sum(j * log[j] * f[m - j] for j in range(1, m))
        log[m] = acc / m
    b = [m * log[m] for m in range(kmax + 1)]  # b_m = sum_{n | m} n l_n
    ell = [0] * (kmax + 1)
    for m in range(1, kmax + 1):
        rest = b[m] - sum(n * ell[n] for n in range(1, m) if m % n == 0)
        ell[m] = int(rest / m)
    return ell[1:]


def test_sigma_prefix():
    assert [str(p) for p in SIGMA5] == ["1", "21", "231", "312", "321"]


def test_alphabet_compare():
    assert alphabet_compare(perm("1"), perm("21")) == -1
    assert alphabet_compare(perm("231"), perm("312")) == -1
    assert alphabet_compare(perm("21"), perm("21")) == 0
    assert alphabet_compare(perm("2413"), perm("321")) == 1
    with pytest.raises(ValueError):
        alphabet_compare(perm("12"), perm("1"))


def test_block_word_text():
    assert parse_block_word("21|231") == w("21", "231")
    assert format_block_word(w("21", "231")) == "21|231"
    with pytest.raises(ValueError):
        parse_block_word("12|1")


def test_lyndon_word_examples():
    assert is_lyndon_word((A, A, B))
    assert not is_lyndon_word((A, B, A))
    assert is_lyndon_word((C,))
    assert not is_lyndon_word((A, A))
    with pytest.raises(ValueError):
        is_lyndon_word(())


def test_cfl_examples():
    assert cfl_factorize((A, B, A)) == [(A, B), (A,)]
    assert cfl_factorize((A, B, A, B, A)) == [(A, B), (A, B), (A,)]
    assert cfl_factorize((A, A, B)) == [(A, A, B)]
    with pytest.raises(ValueError):
        cfl_factorize(())


def test_cfl_exhaustive_length_4():
    for n in range(1, 5):
        for word in product(SIGMA5, repeat=n):
            f = cfl_factorize(word)
            assert sum(f, ()) == word
            assert all(is_lyndon_word(x) for x in f)
            assert all(a >= b for a, b in zip(f, f[1:]))
            assert f == cfl_factorize_naive(word)


@given(words_over_sigma5)
def test_cfl_matches_naive(word):
    assert cfl_factorize(word) == cfl_factorize_naive(word)


def test_block_word_examples():
    assert block_word_of(perm("21453")) == w("21", "231")
    assert block_word_of(perm("12")) == w("1", "1")
    assert block_word_of(perm("2413")) == w("2413")


def test_compare_L():
    chain = [perm(t) for t in ["1", "12", "132", "21", "231"]]
    for i, p in enumerate(chain):
        for q in chain[i + 1:]:
            assert compare_L(p, q) == -1
            assert compare_L(q, p) == 1
    assert compare_L(perm("321"), perm("321")) == 0
    assert compare_L(perm("321"), perm("312")) == 1


def test_compare_L_consistent_with_alphabet():
    letters = [p for n in range(1, 5) for p in enumerate_permutations(n) if len(block_word_of(p)) == 1]
    for a in letters[:20]:
        for b in letters[:20]:
            assert compare_L(a, b) == alphabet_compare(a, b)


def test_lyndon_permutations():
    assert is_lyndon_permutation(perm("21453"))
    assert not is_lyndon_permutation(perm("2143"))
    assert not is_lyndon_permutation(perm("12"))
    for p in enumerate_permutations(4):
        if len(block_word_of(p)) == 1:
            assert is_lyndon_permutation(p)


def test_enumeration_order():
    assert [str(p) for p in enumerate_lyndon_permutations(2)] == ["21"]
    assert [str(p) for p in enumerate_lyndon_permutations(3)] == ["321", "312", "231", "21", "132"]
    full = enumerate_lyndon_permutations(3, include_trivial=True)
    assert len(full) == 6 and str(full[-1]) == "1"
    for a, b in zip(full, full[1:]):
        assert compare_L(a, b) == 1


def test_enumeration_bound():
    with pytest.raises(bounds.BoundExceeded):
        enumerate_lyndon_permutations(bounds.DEFAULTS["lyndon"] + 1)


def test_series_counts():
    assert lyndon_counts_from_series(4) == [1, 1, 4, 17]
    assert lyndon_counts_from_series(12) == counts_by_log(12)
    with pytest.raises(ValueError):
        lyndon_counts_from_series(13)


def test_series_matches_enumeration():
    found = Counter(len(p) for p in enumerate_lyndon_permutations(6, include_trivial=True))
    assert [found[n] for n in range(1, 7)] == lyndon_counts_from_series(6)


def test_factor_permutation():
    p = perm("21354")
    assert lyndon_factor_permutation(p) == [perm("21"), perm("132")]
    for q in enumerate_permutations(5):
        f = lyndon_factor_permutation(q)
        assert direct_sum(f) == q
        assert all(is_lyndon_permutation(x) for x in f)
        assert all(compare_L(a, b) >= 0 for a, b in zip(f, f[1:]))


def test_shuffle_example():
    ab, ac = (A, B), (A, C)
    got = shuffle_product([ab, ac])
    assert got == Counter({(A, A, B, C): 2, (A, A, C, B): 2, (A, B, A, C): 1, (A, C, A, B): 1})
    assert shuffle_product([(B,)]) == Counter({(B,): 1})
    assert shuffle_product([(A,), (A,)]) == Counter({(A, A): 2})


@given(st.lists(words_over_sigma5.map(lambda x: x[:3]), min_size=1, max_size=3))
def test_shuffle_mass_and_associativity(words):
    prod_ = shuffle_product(words)
    sizes = [len(x) for x in words]
    assert sum(prod_.values()) == factorial(sum(sizes)) // prod(factorial(s) for s in sizes)
    assert all(c > 0 for c in prod_.values())
    if len(words) == 3:
        left = Counter()
        for u, c in shuffle_product(words[:2]).items():
            for x, d in shuffle_product([u, words[2]]).items():
                left[x] += c * d
        right = Counter()
        for u, c in shuffle_product(words[1:]).items():
            for x, d in shuffle_product([words[0], u]).items():
                right[x] += c * d
        assert left == right == prod_


def test_max_constituent():
    assert max_shuffle_constituent([(B,), (A,)]) == ((B, A), 1)
    assert max_shuffle_constituent([(A, B)]) == ((A, B), 1)
    assert max_shuffle_constituent([(A,), (A,)]) == ((A, A), 2)
    with pytest.raises(ValueError):
        max_shuffle_constituent([(A,), (B,)])
    with pytest.raises(ValueError):
        max_shuffle_constituent([(B, A)])
