"""Densities of arbitrary permutations as polynomials in Lyndon densities.

Permutations are processed in the order "fewer blocks first, then smaller
block word".  A Lyndon permutation maps to its own variable ``x[pi]``.  Any
other pi is the direct sum of its Lyndon factors pi_1 >=_L ... >=_L pi_n;
the flag product of the factors has density prod x[pi_i], and every
constituent other than pi itself comes earlier in the order, so the linear
identity can be solved for d(pi).  The density of ``1`` is the constant 1.
"""
import json
from dataclasses import dataclass, field

from . import bounds
from .flag import flag_product, reduction_key
from .lyndon import is_lyndon_permutation, lyndon_factor_permutation
from .perm import Permutation, enumerate_permutations, parse_permutation
from .poly import RationalPolynomial, evaluate_polynomial

__all__ = [
    "ReductionTable",
    "build_reduction_table",
    "evaluate_polynomial",
    "lyndon_factor_permutation",
    "lyndon_variable",
    "reduce_to_lyndon",
    "reduction_order_compare",
]

ONE = Permutation((1,))


def lyndon_variable(p):
    return f"x[{p}]"


def reduction_order_compare(p, q):
    if len(p) == 0 or len(q) == 0:
        raise ValueError("reduction order needs non-empty permutations")
    a, b = reduction_key(p), reduction_key(q)
    if a == b and p != q:
        raise AssertionError(f"distinct permutations {p}, {q} share a block word")
    return (a > b) - (a < b)


@dataclass
class ReductionTable:
    k: int
    entries: dict = field(default_factory=dict)
    # leading coefficient of d(pi) in the flag product, per reduced pi
    leading: dict = field(default_factory=dict)

    def __getitem__(self, p):
        return self.entries[p]

    def __contains__(self, p):
        return p in self.entries

    def variables(self):
        names = set()
        for poly in self.entries.values():
            names.update(poly.variables())
        return names

    def to_json(self):
        order = sorted(self.entries, key=lambda p: (len(p), p.word))
        return {str(p): self.entries[p].to_json() for p in order}

    def dumps(self):
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, data, k=None):
        entries = {parse_permutation(t): RationalPolynomial.from_json(v) for t, v in data.items()}
        if k is None:
            k = max((len(p) for p in entries), default=0)
        return cls(k, entries)


def reduce_to_lyndon(p, table):
    """Polynomial p_pi in the variables x[sigma], sigma non-trivial Lyndon.

    ``table`` must already hold every permutation that precedes ``p`` in the
    reduction order and has the size of ``p``.
    """
    if len(p) == 0:
        raise ValueError("cannot reduce the empty permutation")
    if p == ONE:
        return RationalPolynomial.const(1)
    if is_lyndon_permutation(p):
        return RationalPolynomial.var(lyndon_variable(p))
    factors = lyndon_factor_permutation(p)
    product = RationalPolynomial.const(1)
    for f in factors:
        product = product * (RationalPolynomial.const(1) if f == ONE else RationalPolynomial.var(lyndon_variable(f)))
    combo = flag_product(factors)
    lead = combo[p]
    if lead <= 0:
        raise AssertionError(f"coefficient of {p} in its factor product is {lead}")
    rest = product
    key = reduction_key(p)
    for sigma, c in combo.items():
        if sigma == p:
            continue
        if not reduction_key(sigma) < key:
            raise AssertionError(f"constituent {sigma} does not precede {p}")
        if sigma not in table:
            raise KeyError(f"reduction of {p} needs {sigma} first")
        rest = rest - table[sigma] * c
    if isinstance(table, ReductionTable):
        table.leading[p] = lead
    return rest / lead


def build_reduction_table(k):
    """p_pi for every permutation of size at most ``k``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    bounds.check("reduction", k, "k")
    perms = [p for n in range(1, k + 1) for p in enumerate_permutations(n)]
    perms.sort(key=reduction_key)
    table = ReductionTable(k)
    for p in perms:
        table.entries[p] = reduce_to_lyndon(p, table)
    return table
