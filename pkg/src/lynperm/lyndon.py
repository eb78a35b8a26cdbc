"""Words over the alphabet of indecomposable permutations.

A block word is a plain tuple of indecomposable :class:`Permutation`
letters.  Letters order by size and then lexicographically, which is the
natural order of ``Permutation``; tuples then compare lexicographically with
a proper prefix counting as smaller.
"""
from collections import Counter
from itertools import combinations
from math import comb, factorial

from . import bounds
from .perm import (
    Permutation,
    decompose_blocks,
    direct_sum,
    enumerate_permutations,
    is_indecomposable,
    parse_permutation,
)


def _sign(a, b):
    return (a > b) - (a < b)


def _require_letter(p):
    if len(p) == 0 or not is_indecomposable(p):
        raise ValueError(f"{p} is not an indecomposable permutation")


def alphabet_compare(a, b):
    """-1, 0 or 1 as ``a`` precedes, equals or follows ``b`` in the alphabet."""
    _require_letter(a)
    _require_letter(b)
    return _sign(a, b)


def block_word_of(p):
    return decompose_blocks(p)


def parse_block_word(text):
    """Read a block word written as letters joined by ``|`` ("21|231")."""
    letters = tuple(parse_permutation(t) for t in text.split("|"))
    for a in letters:
        _require_letter(a)
    return letters


def format_block_word(word):
    return "|".join(str(a) for a in word)


def is_lyndon_word(w):
    """True iff every proper suffix of ``w`` is strictly greater than ``w``."""
    w = tuple(w)
    if not w:
        raise ValueError("the empty word is not Lyndon")
    return all(w[i:] > w for i in range(1, len(w)))


def cfl_factorize(w):
    """Chen-Fox-Lyndon factorization by Duval's algorithm.

    Returns the non-increasing list of Lyndon factors whose concatenation is
    ``w``.
    """
    w = tuple(w)
    if not w:
        raise ValueError("cannot factorize the empty word")
    n = len(w)
    factors = []
    i = 0
    while i < n:
        j, k = i + 1, i
        while j < n and w[k] <= w[j]:
            k = i if w[k] < w[j] else k + 1
            j += 1
        while i <= k:
            factors.append(w[i:i + j - k])
            i += j - k
    return factors


def cfl_factorize_naive(w):
    """Quadratic reference: repeatedly split off the longest Lyndon prefix."""
    w = tuple(w)
    if not w:
        raise ValueError("cannot factorize the empty word")
    factors = []
    while w:
        cut = max(j for j in range(1, len(w) + 1) if is_lyndon_word(w[:j]))
        factors.append(w[:cut])
        w = w[cut:]
    return factors


def compare_L(p, q):
    """Compare permutations by their block words."""
    if len(p) == 0 or len(q) == 0:
        raise ValueError("compare_L needs non-empty permutations")
    return _sign(block_word_of(p), block_word_of(q))


def lyndon_key(p):
    """Sort key realising the ``<_L`` order."""
    return block_word_of(p)


def is_lyndon_permutation(p):
    return is_lyndon_word(block_word_of(p))


def lyndon_factor_permutation(p):
    """Split ``p`` into Lyndon permutations p_1 >=_L ... >=_L p_n summing to ``p``."""
    return [direct_sum(f) for f in cfl_factorize(block_word_of(p))]


def enumerate_lyndon_permutations(k, include_trivial=False):
    """Lyndon permutations of size at most ``k``, in ``>_L``-descending order."""
    if k < 1:
        raise ValueError("k must be at least 1")
    bounds.check("lyndon", k, "k")
    found = []
    for n in range(1 if include_trivial else 2, k + 1):
        found.extend(p for p in enumerate_permutations(n) if is_lyndon_permutation(p))
    found.sort(key=lyndon_key, reverse=True)
    return found


def lyndon_counts_from_series(kmax):
    """Solve prod_n (1 - x^n)^(-l_n) = 1 + sum_n n! x^n for l_1..l_kmax."""
    if kmax > 12:
        raise bounds.BoundExceeded("series counts are supported up to degree 12")
    # series[d] = coefficient of x^d in the product over the l_n found so far
    series = [1] + [0] * kmax
    counts = []
    for n in range(1, kmax + 1):
        ell = factorial(n) - series[n]
        if ell < 0:
            raise ArithmeticError(f"negative Lyndon count at degree {n}")
        counts.append(ell)
        # multiply by (1 - x^n)^(-ell) = sum_j C(ell + j - 1, j) x^(n j)
        factor = [comb(ell + j - 1, j) for j in range(kmax // n + 1)]
        series = [
            sum(factor[j] * series[d - n * j] for j in range(d // n + 1))
            for d in range(kmax + 1)
        ]
    return counts


def _shuffle2(u, v):
    """Counter of all C(|u|+|v|, |u|) interleavings of ``u`` and ``v``."""
    n = len(u) + len(v)
    out = Counter()
    for pos in combinations(range(n), len(u)):
        pos_set = set(pos)
        iu = iter(u)
        iv = iter(v)
        out[tuple(next(iu) if i in pos_set else next(iv) for i in range(n))] += 1
    return out


def shuffle_product(words):
    """Shuffle product of block words as a Counter word -> multiplicity."""
    words = [tuple(w) for w in words]
    if not words:
        raise ValueError("shuffle product of no words")
    if any(not w for w in words):
        raise ValueError("shuffle factors must be non-empty")
    acc = Counter({words[0]: 1})
    for w in words[1:]:
        nxt = Counter()
        for u, c in acc.items():
            for x, d in _shuffle2(u, w).items():
                nxt[x] += c * d
        acc = nxt
    return acc


def max_shuffle_constituent(words):
    """Largest term of the shuffle product of non-increasing Lyndon words.

    Returns ``(term, coefficient)``.
    """
    words = [tuple(w) for w in words]
    if not words:
        raise ValueError("need at least one word")
    for w in words:
        if not is_lyndon_word(w):
            raise ValueError(f"{format_block_word(w)} is not a Lyndon word")
    for a, b in zip(words, words[1:]):
        if a < b:
            raise ValueError("words must be lexicographically non-increasing")
    prod = shuffle_product(words)
    top = max(prod)
    return top, prod[top]


def sigma_prefix(count):
    """The first ``count`` letters of the alphabet of indecomposable permutations."""
    letters = []
    n = 1
    while len(letters) < count:
        letters.extend(p for p in enumerate_permutations(n) if is_indecomposable(p))
        n += 1
    return letters[:count]


def as_letter(p):
    """Validate ``p`` as a letter and return it (accepts text too)."""
    p = parse_permutation(p) if not isinstance(p, Permutation) else p
    _require_letter(p)
    return p
