"""Blow-up permutons: exact and symbolic pattern densities, and sampling.

A sample of m points from a blow-up of ``base`` lands in parts according to
a multinomial law with the scale factors as probabilities.  Parts occupy
disjoint x- and y-intervals and points inside one part are increasing, so
the pattern of the sample only depends on how many points hit each part.
Densities are sums over those count vectors, enumerated as multisets of
parts by the compiled kernel.
"""
import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, lcm, prod, sqrt

import numpy as np

from . import bounds, kernels
from .perm import Permutation, parse_permutation, rank_permutation, unrank_permutation
from .poly import RationalPolynomial

# Monte Carlo trials are drawn in blocks; block b uses SeedSequence([seed, b]).
MC_BLOCK = 4096


@dataclass(frozen=True)
class BlowupPermuton:
    base: Permutation
    scales: tuple

    @property
    def size(self):
        return len(self.base)

    def offsets(self):
        """Lower-left corners (s_i, t_{base(i)}) of the parts, as two lists.

        ``s[i]`` is the x-offset of part i and ``t[v]`` the y-offset of the
        part whose base value is v + 1.
        """
        k = len(self.base)
        s = [Fraction(0)] * k
        for i in range(1, k):
            s[i] = s[i - 1] + self.scales[i - 1]
        inv = self.base.inverse().word
        t = [Fraction(0)] * k
        for v in range(1, k):
            t[v] = t[v - 1] + self.scales[inv[v - 1] - 1]
        return s, t

    def to_json(self):
        return {"base": str(self.base), "scales": [_fmt(z) for z in self.scales]}


def _fmt(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class DensityEstimate:
    mean: float
    standard_error: float
    trials: int
    redraws: int = 0


def make_blowup(base, scales):
    base = parse_permutation(base) if isinstance(base, str) else base
    scales = tuple(Fraction(z) for z in scales)
    if len(base) == 0:
        raise ValueError("blow-up of the empty permutation")
    if len(scales) != len(base):
        raise ValueError(f"{len(scales)} scales for a base of size {len(base)}")
    if any(z < 0 for z in scales):
        raise ValueError("scale factors must be non-negative")
    if sum(scales) != 1:
        raise ValueError(f"scale factors sum to {sum(scales)}, not 1")
    return BlowupPermuton(base, scales)


def load_permuton(path):
    with open(path) as fh:
        data = json.load(fh)
    return permuton_from_json(data)


def permuton_from_json(data):
    scales = data["scales"]
    if any(isinstance(z, float) for z in scales):
        raise ValueError('scales must be rationals written as "p/q" strings')
    return make_blowup(parse_permutation(str(data["base"])), [Fraction(str(z)) for z in scales])


def blowup_pattern(base, counts):
    """Pattern of a sample with ``counts[i]`` points in part i."""
    if len(counts) != len(base):
        raise ValueError("one count per part of the base")
    if any(c < 0 for c in counts):
        raise ValueError("counts must be non-negative")
    if sum(counts) < 1:
        raise ValueError("at least one point is needed")
    # each point is (base value of its part, index inside the part)
    points = [(base[i], j) for i, c in enumerate(counts) for j in range(c)]
    order = sorted(range(len(points)), key=points.__getitem__)
    word = [0] * len(points)
    for r, i in enumerate(order, start=1):
        word[i] = r
    return Permutation(word, check=False)


@lru_cache(maxsize=64)
def _pattern_classes(base_word, m):
    """Multisets of parts grouped by the pattern rank they produce."""
    combos, ranks = kernels.multiset_pattern_ranks(base_word, m)
    return combos, ranks


def _multinomial(m, mult):
    return factorial(m) // prod(factorial(c) for c in mult.values())


@lru_cache(maxsize=256)
def _density_numerators(P, m):
    """Integer numerators over the common denominator D**m, keyed by rank."""
    den = lcm(*(z.denominator for z in P.scales))
    nums = [z.numerator * (den // z.denominator) for z in P.scales]
    combos, ranks = _pattern_classes(P.base.word, m)
    zero = {i for i, a in enumerate(nums) if a == 0}
    acc = {}
    for row, r in zip(combos.tolist(), ranks.tolist()):
        if zero and any(p in zero for p in row):
            continue
        mult = Counter(row)
        term = _multinomial(m, mult)
        for p, c in mult.items():
            term *= nums[p] ** c
        acc[r] = acc.get(r, 0) + term
    return acc, den ** m


def density_table(P, m):
    """All non-zero densities d(sigma, P), |sigma| = m, as a dict."""
    if m < 1:
        raise ValueError("pattern size must be positive")
    bounds.check("density", m, "pattern size")
    acc, scale = _density_numerators(P, m)
    return {unrank_permutation(m, r): Fraction(a, scale) for r, a in acc.items()}


def exact_density(sigma, P):
    m = len(sigma)
    if m < 1:
        raise ValueError("the empty permutation is not a pattern")
    bounds.check("density", m, "pattern size")
    acc, scale = _density_numerators(P, m)
    return Fraction(acc.get(rank_permutation(sigma), 0), scale)


def count_vectors_for(sigma, base):
    """Count vectors c (as {part: count}) with blowup_pattern(base, c) == sigma."""
    m = len(sigma)
    combos, ranks = _pattern_classes(tuple(base.word), m)
    target = rank_permutation(sigma)
    return [dict(Counter(row)) for row in combos[ranks == target].tolist()]


def symbolic_density(sigma, base, variable_names):
    """d(sigma, blow-up of base) as a polynomial in the part scales.

    ``variable_names[i]`` is the variable name for part i, or a
    :class:`RationalPolynomial` to substitute for that part's scale.
    """
    if len(variable_names) != len(base):
        raise ValueError("one variable per part of the base")
    m = len(sigma)
    if m < 1:
        raise ValueError("the empty permutation is not a pattern")
    bounds.check("density", m, "pattern size")
    parts = [
        v if isinstance(v, RationalPolynomial) else RationalPolynomial.var(v)
        for v in variable_names
    ]
    simple = all(isinstance(v, str) for v in variable_names)
    out = {}
    result = RationalPolynomial()
    for mult in count_vectors_for(sigma, base):
        coeff = _multinomial(m, mult)
        if simple:
            mono = RationalPolynomial.monomial({variable_names[p]: c for p, c in mult.items()})
            ((key, _),) = mono.terms.items()
            out[key] = out.get(key, 0) + coeff
        else:
            term = RationalPolynomial.const(coeff)
            for p, c in mult.items():
                term = term * parts[p] ** c
            result = result + term
    if simple:
        return RationalPolynomial(out)
    return result


def _float_parts(P):
    z = np.array([float(v) for v in P.scales])
    s, t = P.offsets()
    xs = np.array([float(v) for v in s])
    ys = np.array([float(t[v - 1]) for v in P.base.word])
    return z / z.sum(), xs, ys


def _draw(rng, P, n, count, probs, xs, ys):
    """``count`` samples of n points; returns (x, y) arrays of shape (count, n)."""
    parts = rng.choice(len(probs), size=(count, n), p=probs)
    u = rng.random((count, n))
    width = probs[parts]
    return xs[parts] + u * width, ys[parts] + u * width


def _patterns_of(x, y):
    """Lexicographic rank of each row's pattern."""
    count, n = x.shape
    order = np.argsort(x, axis=1, kind="stable")
    ys = np.take_along_axis(y, order, axis=1)
    std = np.argsort(np.argsort(ys, axis=1, kind="stable"), axis=1, kind="stable")
    rank = np.zeros(count, dtype=np.int64)
    for r in range(n):
        smaller = (std[:, r + 1:] < std[:, r:r + 1]).sum(axis=1)
        rank = rank * (n - r) + smaller
    return rank


def _has_ties(x):
    xs = np.sort(x, axis=1)
    return (np.diff(xs, axis=1) == 0).any(axis=1)


def _sample_block(rng, P, n, count, probs, xs, ys):
    """Draw ``count`` tie-free samples; also returns how many were redrawn."""
    x, y = _draw(rng, P, n, count, probs, xs, ys)
    redraws = 0
    bad = _has_ties(x) | _has_ties(y)
    while bad.any():
        k = int(bad.sum())
        redraws += k
        x2, y2 = _draw(rng, P, n, k, probs, xs, ys)
        x[bad], y[bad] = x2, y2
        bad = _has_ties(x) | _has_ties(y)
    return _patterns_of(x, y), redraws


def sample_permutation(P, n, seed=0):
    """One P-random permutation of size n, determined by ``seed``."""
    if n < 1:
        raise ValueError("sample size must be positive")
    probs, xs, ys = _float_parts(P)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
    x, y = _draw(rng, P, n, 1, probs, xs, ys)
    while _has_ties(x)[0] or _has_ties(y)[0]:
        x, y = _draw(rng, P, n, 1, probs, xs, ys)
    order = np.argsort(x[0], kind="stable")
    ranks = np.argsort(np.argsort(y[0][order], kind="stable"), kind="stable")
    return Permutation((ranks + 1).tolist(), check=False)


def estimate_density(sigma, P, trials, seed=0):
    """Frequency of ``sigma`` among ``trials`` P-random permutations of its size.

    Trials are split into blocks of ``MC_BLOCK``; block b draws from
    ``SeedSequence([seed, b])``, so any block can be reproduced on its own.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    m = len(sigma)
    if m < 1:
        raise ValueError("the empty permutation is not a pattern")
    probs, xs, ys = _float_parts(P)
    target = rank_permutation(sigma)
    hits = 0
    redraws = 0
    done = 0
    block = 0
    while done < trials:
        count = min(MC_BLOCK, trials - done)
        rng = np.random.default_rng(np.random.SeedSequence([seed, block]))
        ranks, r = _sample_block(rng, P, m, count, probs, xs, ys)
        hits += int((ranks == target).sum())
        redraws += r
        done += count
        block += 1
    mean = hits / trials
    return DensityEstimate(mean, sqrt(mean * (1 - mean) / trials), trials, redraws)


def random_blowup(rng, max_base=5, max_denominator=64, min_base=1):
    """A random blow-up with base size <= max_base and scale denominators
    dividing some D <= max_denominator.  ``rng`` is a ``random.Random``."""
    k = rng.randint(min_base, max_base)
    word = list(range(1, k + 1))
    rng.shuffle(word)
    den = rng.randint(k, max_denominator)
    cuts = sorted(rng.sample(range(1, den), k - 1))
    weights = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return make_blowup(Permutation(word, check=False), [Fraction(w, den) for w in weights])
