"""Flag products of permutations and their densities."""
from fractions import Fraction
from itertools import combinations
from math import comb, factorial, prod

from . import bounds, kernels
from .perm import Permutation, block_count, decompose_blocks, pattern_at
from .lyndon import lyndon_factor_permutation
from .permuton import density_table


def format_fraction(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class PermSum:
    """A formal rational combination of permutations (zero terms dropped)."""

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        acc = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for p, c in items:
            acc[p] = acc.get(p, 0) + Fraction(c)
        self._terms = {p: c for p, c in acc.items() if c != 0}

    def __getitem__(self, p):
        return self._terms.get(p, Fraction(0))

    def __contains__(self, p):
        return p in self._terms

    def __iter__(self):
        return iter(sorted(self._terms))

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, PermSum):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def items(self):
        return [(p, self._terms[p]) for p in self]

    def total(self):
        return sum(self._terms.values(), Fraction(0))

    def sizes(self):
        return {len(p) for p in self._terms}

    def to_pairs(self):
        """Machine-readable form: ``[[perm text, "p/q"], ...]``."""
        return [[str(p), format_fraction(c)] for p, c in self.items()]

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for p, c in self.items():
            mag = abs(c)
            term = str(p) if mag == 1 else f"{format_fraction(mag)}*{p}"
            if not out:
                out.append(term if c > 0 else f"-{term}")
            else:
                out.append(("+ " if c > 0 else "- ") + term)
        return " ".join(out)

    def __repr__(self):
        return f"PermSum({str(self)!r})"


def _binary(acc, b):
    """(sum_s c_s s) x b with the product normalised by C(|s|+|b|, |s|)."""
    out = {}
    for a, c in acc.items():
        scale = c / comb(len(a) + len(b), len(a))
        for word, count in kernels.flag_counts(a.word, b.word).items():
            sigma = Permutation(word, check=False)
            out[sigma] = out.get(sigma, 0) + scale * count
    return out


def _check_parts(parts):
    parts = list(parts)
    if not parts:
        raise ValueError("flag product of no permutations")
    if any(len(p) == 0 for p in parts):
        raise ValueError("flag product factors must be non-empty")
    bounds.check("flag", sum(len(p) for p in parts), "total size")
    return parts


def flag_product(parts):
    """Flag product pi_1 x ... x pi_n, computed as iterated binary products.

    The coefficient at sigma is the number of ordered partitions of the
    positions of sigma into sets inducing pi_1, ..., pi_n, divided by the
    multinomial coefficient of the sizes.
    """
    parts = _check_parts(parts)
    acc = {parts[0]: Fraction(1)}
    for b in parts[1:]:
        acc = _binary(acc, b)
    return PermSum(acc)


def flag_product_direct(parts):
    """Flag product straight from ordered set partitions of positions and values.

    Each choice of position sets and value sets of the right sizes determines
    one sigma; sigma restricted to the i-th position set then induces
    pi_i.  Slow (multinomial squared), used to check :func:`flag_product`.
    """
    parts = _check_parts(parts)
    sizes = [len(p) for p in parts]
    n = sum(sizes)
    multinom = factorial(n) // prod(factorial(s) for s in sizes)

    def ordered_partitions(pool, sizes):
        if not sizes:
            yield ()
            return
        for first in combinations(pool, sizes[0]):
            rest = [x for x in pool if x not in first]
            for tail in ordered_partitions(rest, sizes[1:]):
                yield (first,) + tail

    counts = {}
    for pos in ordered_partitions(list(range(n)), sizes):
        for vals in ordered_partitions(list(range(1, n + 1)), sizes):
            word = [0] * n
            for p, ps, vs in zip(parts, pos, vals):
                for i, v in zip(ps, p.word):
                    word[i] = vs[v - 1]
            sigma = Permutation(word, check=False)
            counts[sigma] = counts.get(sigma, 0) + 1
    # sigma and a position partition force the value partition, so counts[sigma]
    # is the number of position partitions inducing the factors
    return PermSum({s: Fraction(c, multinom) for s, c in counts.items()})


def flag_product_by_patterns(parts):
    """Flag product by testing every sigma of the right size (tiny sizes only)."""
    from .perm import enumerate_permutations

    parts = _check_parts(parts)
    sizes = [len(p) for p in parts]
    n = sum(sizes)
    multinom = factorial(n) // prod(factorial(s) for s in sizes)

    def count(sigma, pool, rest):
        if not rest:
            return 1
        total = 0
        for sub in combinations(pool, len(rest[0])):
            if pattern_at(sigma, [i + 1 for i in sub]) == rest[0]:
                left = [x for x in pool if x not in sub]
                total += count(sigma, left, rest[1:])
        return total

    out = {}
    for sigma in enumerate_permutations(n):
        c = count(sigma, list(range(n)), parts)
        if c:
            out[sigma] = Fraction(c, multinom)
    return PermSum(out)


def reduction_key(p):
    """Sort key of the induction order: block count, then block word."""
    return (block_count(p), decompose_blocks(p))


def constituents_violating_flag_lemma(pi):
    """Constituents of the product of ``pi``'s Lyndon factors not below ``pi``.

    A constituent sigma != pi should have fewer blocks than ``pi``, or as
    many blocks and a smaller block word; anything else is returned.
    """
    factors = lyndon_factor_permutation(pi)
    key = reduction_key(pi)
    return [s for s in flag_product(factors) if s != pi and not reduction_key(s) < key]


def density_of_sum(s, P):
    """d(s, P) for a PermSum ``s`` and a blow-up permuton ``P``.

    Terms of different sizes are allowed; each uses its own density table.
    """
    tables = {}
    total = Fraction(0)
    for p, c in s.items():
        m = len(p)
        if m not in tables:
            tables[m] = density_table(P, m)
        total += c * tables[m].get(p, 0)
    return total
