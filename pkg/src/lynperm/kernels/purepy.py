"""Pure-Python reference versions of the hot loops.

Every function here has a twin in ``_speedups.pyx`` with the same signature
and the same output; the test-suite runs both and compares them.
"""
from itertools import combinations, combinations_with_replacement
from math import factorial

import numpy as np

NAME = "python"


def pattern_rank(values):
    """Lexicographic rank of the pattern of ``values`` among all m! words.

    Equal values are ordered by position (left one is smaller), which is the
    convention needed for points drawn from one diagonal part of a blow-up.
    """
    m = len(values)
    std = [0] * m
    for r in range(m):
        vr = values[r]
        c = 0
        for j in range(m):
            vj = values[j]
            if vj < vr or (vj == vr and j < r):
                c += 1
        std[r] = c
    rank = 0
    for r in range(m):
        smaller = 0
        for j in range(r + 1, m):
            if std[j] < std[r]:
                smaller += 1
        rank = rank * (m - r) + smaller
    return rank


def count_patterns(word, m):
    """Occurrences of each size-``m`` pattern in ``word``, indexed by rank."""
    counts = [0] * factorial(m)
    for idx in combinations(range(len(word)), m):
        counts[pattern_rank([word[i] for i in idx])] += 1
    return counts


def flag_counts(a, b):
    """Count the (position set, value set) choices that merge ``a`` and ``b``.

    For every k1-subset S of positions and k1-subset T of values of
    [k1+k2], placing ``a`` on S x T and ``b`` on the complements yields one
    permutation; the result maps each such permutation to its multiplicity.
    """
    k1, k2 = len(a), len(b)
    n = k1 + k2
    out = {}
    full = range(n)
    for pos in combinations(full, k1):
        pos_set = set(pos)
        rest_pos = [i for i in full if i not in pos_set]
        for vals in combinations(full, k1):
            val_set = set(vals)
            rest_val = [v for v in full if v not in val_set]
            sigma = [0] * n
            for i in range(k1):
                sigma[pos[i]] = vals[a[i] - 1] + 1
            for i in range(k2):
                sigma[rest_pos[i]] = rest_val[b[i] - 1] + 1
            key = tuple(sigma)
            out[key] = out.get(key, 0) + 1
    return out


def multiset_pattern_ranks(base, m):
    """Classify every multiset of ``m`` parts of a blow-up of ``base``.

    Returns ``(combos, ranks)``: ``combos[r]`` is the r-th non-decreasing
    m-tuple of part indices (itertools order) and ``ranks[r]`` the rank of the
    pattern formed by one point in each listed part.
    """
    combos = list(combinations_with_replacement(range(len(base)), m))
    ranks = np.fromiter(
        (pattern_rank([base[p] for p in c]) for c in combos),
        dtype=np.int64,
        count=len(combos),
    )
    arr = np.array(combos, dtype=np.int32).reshape(len(combos), m)
    return arr, ranks
