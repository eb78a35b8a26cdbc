"""Permutations in one-line notation, direct sums, blocks and pattern densities."""
from fractions import Fraction
from functools import total_ordering
from itertools import combinations, permutations
from math import comb, factorial

from . import bounds, kernels


@total_ordering
class Permutation:
    """An immutable permutation of [n] stored as its one-line word.

    Permutations order first by size, then lexicographically by word.  This
    is the order of the alphabet of indecomposable permutations, so block
    words (tuples of permutations) compare lexicographically with plain
    tuple comparison.
    """

    __slots__ = ("word", "_hash")

    def __init__(self, word, check=True):
        word = tuple(int(v) for v in word)
        if check and sorted(word) != list(range(1, len(word) + 1)):
            raise ValueError(f"{word!r} is not a permutation of 1..{len(word)}")
        object.__setattr__(self, "word", word)
        object.__setattr__(self, "_hash", hash(word))

    def __setattr__(self, name, value):
        raise AttributeError("Permutation is immutable")

    def __len__(self):
        return len(self.word)

    def __iter__(self):
        return iter(self.word)

    def __getitem__(self, i):
        return self.word[i]

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.word == other.word

    def __lt__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return (len(self.word), self.word) < (len(other.word), other.word)

    def __str__(self):
        if len(self.word) <= 9:
            return "".join(map(str, self.word))
        return ",".join(map(str, self.word))

    def __repr__(self):
        return f"Permutation({str(self)!r})"

    def __reduce__(self):
        return (Permutation, (self.word, False))

    @property
    def size(self):
        return len(self.word)

    def inverse(self):
        inv = [0] * len(self.word)
        for i, v in enumerate(self.word):
            inv[v - 1] = i + 1
        return Permutation(inv, check=False)


EMPTY = Permutation(())


def parse_permutation(text):
    """Read a permutation from digit form ("21453") or comma form ("10,2,...")."""
    if isinstance(text, Permutation):
        return text
    text = text.strip()
    if not text:
        raise ValueError("empty permutation text")
    if "," in text:
        parts = [p.strip() for p in text.split(",")]
        if any(not p.isdigit() for p in parts):
            raise ValueError(f"malformed permutation {text!r}")
        word = [int(p) for p in parts]
    else:
        if not text.isdigit():
            raise ValueError(f"malformed permutation {text!r}")
        word = [int(c) for c in text]
    return Permutation(word)


def perm(text):
    """Shorthand for :func:`parse_permutation`, handy in tests and the REPL."""
    return parse_permutation(text)


def direct_sum(parts):
    word = []
    for p in parts:
        shift = len(word)
        word.extend(v + shift for v in p.word)
    return Permutation(word, check=False)


def _split_points(word):
    """Prefix lengths j (1 <= j <= n) where word[:j] is a permutation of 1..j."""
    cuts = []
    running_max = 0
    for j, v in enumerate(word, start=1):
        if v > running_max:
            running_max = v
        if running_max == j:
            cuts.append(j)
    return cuts


def decompose_blocks(p):
    """Indecomposable blocks of ``p``, left to right."""
    if len(p) == 0:
        raise ValueError("the empty permutation has no blocks")
    blocks = []
    start = 0
    for cut in _split_points(p.word):
        blocks.append(Permutation([v - start for v in p.word[start:cut]], check=False))
        start = cut
    return tuple(blocks)


def block_count(p):
    return len(_split_points(p.word))


def is_indecomposable(p):
    if len(p) == 0:
        raise ValueError("the empty permutation is not a pattern")
    return _split_points(p.word) == [len(p)]


def increasing_segments(p):
    """Lengths of the maximal runs with p(a+1) = p(a) + 1, left to right."""
    if len(p) == 0:
        raise ValueError("the empty permutation has no segments")
    lengths = [1]
    w = p.word
    for a in range(1, len(w)):
        if w[a] == w[a - 1] + 1:
            lengths[-1] += 1
        else:
            lengths.append(1)
    return lengths


def standardize(values):
    """The permutation order-isomorphic to a sequence of distinct values."""
    order = sorted(range(len(values)), key=values.__getitem__)
    word = [0] * len(values)
    for rank, i in enumerate(order, start=1):
        word[i] = rank
    return Permutation(word, check=False)


def pattern_at(p, indices):
    """Pattern induced in ``p`` by 1-based positions ``indices``."""
    indices = list(indices)
    if not indices:
        raise ValueError("pattern needs at least one position")
    n = len(p)
    for a, b in zip(indices, indices[1:]):
        if b <= a:
            raise ValueError("positions must be strictly increasing")
    if indices[0] < 1 or indices[-1] > n:
        raise ValueError(f"position out of range 1..{n}")
    return standardize([p.word[i - 1] for i in indices])


def rank_permutation(p):
    """Lexicographic rank of ``p`` among permutations of its size."""
    return kernels.pattern_rank(p.word)


def unrank_permutation(m, rank):
    pool = list(range(1, m + 1))
    word = []
    for r in range(m, 0, -1):
        f = factorial(r - 1)
        i, rank = divmod(rank, f)
        word.append(pool.pop(i))
    return Permutation(word, check=False)


def pattern_counts(p, m):
    """Map each size-``m`` pattern occurring in ``p`` to its occurrence count."""
    counts = kernels.count_patterns(p.word, m)
    return {unrank_permutation(m, r): c for r, c in enumerate(counts) if c}


def pattern_density(sigma, p):
    """Exact density d(sigma, p) as a Fraction."""
    m, n = len(sigma), len(p)
    if m == 0:
        raise ValueError("the empty permutation is not a pattern")
    if m > n:
        raise ValueError(f"pattern of size {m} does not fit in a permutation of size {n}")
    counts = kernels.count_patterns(p.word, m)
    return Fraction(counts[rank_permutation(sigma)], comb(n, m))


def naive_pattern_density(sigma, p):
    """Reference density by explicit subset enumeration and standardization."""
    m, n = len(sigma), len(p)
    hits = sum(
        1 for idx in combinations(range(1, n + 1), m) if pattern_at(p, idx) == sigma
    )
    return Fraction(hits, comb(n, m))


def enumerate_permutations(n):
    """All permutations of size ``n`` in lexicographic order of words."""
    if n < 1:
        raise ValueError("size must be positive")
    bounds.check("permutations", n)
    return [Permutation(w, check=False) for w in permutations(range(1, n + 1))]
