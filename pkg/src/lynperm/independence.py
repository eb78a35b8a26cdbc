"""Jacobian certificates for the independence of Lyndon pattern densities.

The permuton family used here is the blow-up of pi_1 (+) ... (+) pi_{N+1},
where pi_1 >_L ... >_L pi_{N+1} = 1 lists every Lyndon permutation of size
at most k.  Part j of the block of pi_i (i <= N) is scaled by s_i t_{i,j};
the final one-point block gets the remaining mass z.  The Jacobian of
(d(pi_1), ..., d(pi_N)) with respect to s_1, ..., s_N is evaluated exactly,
and a point with non-zero determinant is a certificate.
"""
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from math import factorial, prod

import numpy as np

from .lyndon import compare_L, enumerate_lyndon_permutations, is_lyndon_permutation
from .perm import Permutation, direct_sum, increasing_segments, pattern_at, rank_permutation
from .permuton import _pattern_classes, make_blowup
from .poly import RationalPolynomial

SUPPORTED_K = (2, 3, 4)
SYMBOLIC_K = (2, 3)
WITNESS_DENOMINATOR = 64
ORDERED_TUPLE_LIMIT = 2_000_000


class WitnessNotFound(RuntimeError):
    """No sampled point gave a non-zero determinant."""


def s_var(i):
    return f"s[{i}]"


def t_var(i, j):
    return f"t[{i},{j}]"


@lru_cache(maxsize=None)
def lyndon_list(k):
    """All Lyndon permutations of size <= k, >_L-descending (ends with 1)."""
    return tuple(enumerate_lyndon_permutations(k, include_trivial=True))


@dataclass(frozen=True)
class PiLSpec:
    k: int
    lyndon_list: tuple
    s_values: tuple
    t_values: tuple

    @property
    def N(self):
        return len(self.lyndon_list) - 1

    def residual(self):
        return 1 - sum(s * t for s, ts in zip(self.s_values, self.t_values) for t in ts)

    def point(self):
        """The s/t values as a ``{variable name: Fraction}`` assignment."""
        out = {}
        for i, (s, ts) in enumerate(zip(self.s_values, self.t_values), start=1):
            out[s_var(i)] = s
            for j, t in enumerate(ts, start=1):
                out[t_var(i, j)] = t
        return out

    def validate(self):
        lst = self.lyndon_list
        k = self.k
        if lst[0] != Permutation(range(k, 0, -1)) or lst[-1] != Permutation((1,)):
            raise ValueError("Lyndon list must run from k...1 down to 1")
        if len(self.s_values) != self.N or len(self.t_values) != self.N:
            raise ValueError("one s value and one t tuple per non-trivial Lyndon permutation")
        for p, ts in zip(lst, self.t_values):
            if len(ts) != len(p):
                raise ValueError(f"block {p} needs {len(p)} t values")
            if any(t <= 0 for t in ts) or sum(ts) >= 1:
                raise ValueError("t values must be positive with sum below 1")
        if any(s <= 0 for s in self.s_values) or sum(self.s_values) >= 1:
            raise ValueError("s values must be positive with sum below 1")
        if self.residual() <= 0:
            raise ValueError("residual scale must be positive")


def make_spec(k, s_values, t_values):
    spec = PiLSpec(
        k,
        lyndon_list(k),
        tuple(Fraction(s) for s in s_values),
        tuple(tuple(Fraction(t) for t in ts) for ts in t_values),
    )
    spec.validate()
    return spec


def spec_from_point(k, point):
    lst = lyndon_list(k)
    s = [Fraction(point[s_var(i)]) for i in range(1, len(lst))]
    t = [[Fraction(point[t_var(i, j)]) for j in range(1, len(p) + 1)] for i, p in enumerate(lst[:-1], start=1)]
    return make_spec(k, s, t)


def build_PiL(spec):
    spec.validate()
    base = direct_sum(spec.lyndon_list)
    scales = [s * t for s, ts in zip(spec.s_values, spec.t_values) for t in ts]
    scales.append(spec.residual())
    return make_blowup(base, scales)


@lru_cache(maxsize=None)
def _layout(k):
    """Base permutation and, per part, (block index i, position j) 1-based."""
    lst = lyndon_list(k)
    base = direct_sum(lst)
    owner = [(i, j) for i, p in enumerate(lst, start=1) for j in range(1, len(p) + 1)]
    return base, tuple(owner)


def _rows_for(pi, k):
    """Multisets of parts (rows of part indices) whose sample pattern is ``pi``."""
    base, owner = _layout(k)
    combos, ranks = _pattern_classes(base.word, len(pi))
    rows = combos[ranks == rank_permutation(pi)]
    last = len(owner) - 1
    if (rows == last).any():
        raise AssertionError(f"d({pi}) uses the trailing one-point block")
    return rows


def _check_member(pi, k):
    lst = lyndon_list(k)
    if pi not in lst[:-1]:
        raise ValueError(f"{pi} is not a non-trivial Lyndon permutation of size <= {k}")


@lru_cache(maxsize=None)
def density_in_s_t(pi, k):
    """d(pi, Pi^L) as a polynomial in the s- and t-variables."""
    _check_member(pi, k)
    _, owner = _layout(k)
    m = len(pi)
    out = {}
    for row in _rows_for(pi, k).tolist():
        mult = Counter(row)
        coeff = factorial(m) // prod(factorial(c) for c in mult.values())
        exps = {}
        for part, c in mult.items():
            i, j = owner[part]
            exps[s_var(i)] = exps.get(s_var(i), 0) + c
            exps[t_var(i, j)] = exps.get(t_var(i, j), 0) + c
        mono = RationalPolynomial.monomial(exps)
        ((key, _),) = mono.terms.items()
        out[key] = out.get(key, 0) + coeff
    return RationalPolynomial(out)


@lru_cache(maxsize=None)
def jacobian_polynomials(k):
    """Matrix of polynomials d/ds_j d(pi_i, Pi^L)."""
    lst = lyndon_list(k)
    N = len(lst) - 1
    dens = [density_in_s_t(p, k) for p in lst[:-1]]
    return tuple(tuple(d.derivative(s_var(j)) for j in range(1, N + 1)) for d in dens)


def _numeric_jacobian(spec):
    """Exact Jacobian from the count-vector rows, without building polynomials."""
    k = spec.k
    _, owner = _layout(k)
    N = spec.N
    den_s = np.lcm.reduce([s.denominator for s in spec.s_values])
    den_t = np.lcm.reduce([t.denominator for ts in spec.t_values for t in ts])
    den_s, den_t = int(den_s), int(den_t)
    S = [s.numerator * (den_s // s.denominator) for s in spec.s_values]
    # integer numerator of each part scale over den_s * den_t (trailing part unused)
    w = [S[i - 1] * (t.numerator * (den_t // t.denominator)) for i, j in owner[:-1]
         for t in [spec.t_values[i - 1][j - 1]]] + [0]
    block = np.array([i - 1 for i, _ in owner], dtype=np.int64)
    weights = np.array(w, dtype=object)
    matrix = []
    for pi in spec.lyndon_list[:-1]:
        m = len(pi)
        rows = _rows_for(pi, k)
        safe = max(w) ** m * factorial(m) * m < 2 ** 62
        wt = np.array(w, dtype=np.int64) if safe else weights
        # multinomial coefficient of each row: m! / prod(multiplicity!)
        srt = np.sort(rows, axis=1)
        mult = np.full(len(rows), factorial(m), dtype=np.int64)
        run = np.ones(len(rows), dtype=np.int64)
        for c in range(1, m):
            same = srt[:, c] == srt[:, c - 1]
            run = np.where(same, run + 1, 1)
            mult //= np.where(same, run, 1)
        term = mult.astype(wt.dtype)
        for c in range(m):
            term = term * wt[rows[:, c]]
        blocks = block[rows]
        entries = []
        for j in range(N):
            deg = (blocks == j).sum(axis=1)
            hit = deg > 0
            total = sum((term[hit] * deg[hit].astype(wt.dtype)).tolist())
            # d/ds_j of prod z = deg_j / s_j * prod z
            entries.append(Fraction(total, (den_s * den_t) ** m) / spec.s_values[j])
        matrix.append(entries)
    return matrix


def jacobian_matrix(k, point, mode="auto"):
    """Exact N x N Jacobian at ``point`` (a PiLSpec or an s/t assignment).

    ``mode`` is ``"symbolic"`` (differentiate the polynomials), ``"numeric"``
    (exact rationals straight from the count vectors) or ``"auto"``, which
    picks symbolic for k <= 3.
    """
    if k not in SUPPORTED_K:
        raise ValueError(f"k must be one of {SUPPORTED_K}")
    spec = point if isinstance(point, PiLSpec) else spec_from_point(k, point)
    spec.validate()
    if mode == "auto":
        mode = "symbolic" if k in SYMBOLIC_K else "numeric"
    if mode == "numeric":
        return _numeric_jacobian(spec)
    if mode != "symbolic":
        raise ValueError(f"unknown mode {mode!r}")
    assign = spec.point()
    return [[entry.evaluate(assign) for entry in row] for row in jacobian_polynomials(k)]


def jacobian_determinant(matrix):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    if n == 0:
        return Fraction(1)
    # clear denominators row by row, then run Bareiss over the integers
    rows = []
    scale = Fraction(1)
    for row in matrix:
        row = [Fraction(x) for x in row]
        d = 1
        for x in row:
            d = d * x.denominator // _gcd(d, x.denominator)
        rows.append([int(x * d) for x in row])
        scale /= d
    a = rows
    sign = 1
    prev = 1
    for c in range(n - 1):
        if a[c][c] == 0:
            swap = next((r for r in range(c + 1, n) if a[r][c] != 0), None)
            if swap is None:
                return Fraction(0)
            a[c], a[swap] = a[swap], a[c]
            sign = -sign
        piv = a[c][c]
        for r in range(c + 1, n):
            for q in range(c + 1, n):
                a[r][q] = (a[r][q] * piv - a[r][c] * a[c][q]) // prev
            a[r][c] = 0
        prev = piv
    return sign * a[n - 1][n - 1] * scale


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def cofactor_determinant(matrix):
    """Laplace expansion along the first row; reference for small matrices."""
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(matrix[0][0])
    total = Fraction(0)
    for c in range(n):
        if matrix[0][c] == 0:
            continue
        minor = [row[:c] + row[c + 1:] for row in matrix[1:]]
        total += (-1) ** c * Fraction(matrix[0][c]) * cofactor_determinant(minor)
    return total


def _perm_sign(p):
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = p[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return sign


def symbolic_determinant(k):
    """det of the Jacobian as a full polynomial (Leibniz expansion; k = 2 or 3)."""
    if k not in SYMBOLIC_K:
        raise ValueError(f"symbolic determinant only for k in {SYMBOLIC_K}")
    J = jacobian_polynomials(k)
    n = len(J)
    total = RationalPolynomial()
    for p in permutations(range(n)):
        term = RationalPolynomial.const(_perm_sign(p))
        for i in range(n):
            term = term * J[i][p[i]]
            if not term:
                break
        total = total + term
    return total


def target_monomial(k):
    """{variable: exponent} of prod_i s_i^(n_i - 1) prod_j t_{i,j}."""
    exps = {}
    for i, p in enumerate(lyndon_list(k)[:-1], start=1):
        if len(p) > 1:
            exps[s_var(i)] = len(p) - 1
        for j in range(1, len(p) + 1):
            exps[t_var(i, j)] = 1
    return exps


def _divides(mono, target):
    return all(target.get(v, 0) >= e for v, e in mono)


def det_monomial_coefficient(k):
    """Coefficient of prod s_i^(n_i-1) prod t_{i,j} in det of the Jacobian.

    Each Leibniz product is multiplied out keeping only monomials that
    divide the target, which is exact and avoids the full expansion.
    """
    if k not in SYMBOLIC_K:
        raise ValueError(f"monomial coefficient only for k in {SYMBOLIC_K}")
    J = jacobian_polynomials(k)
    n = len(J)
    target = target_monomial(k)
    pruned = [[{m: c for m, c in e.terms.items() if _divides(m, target)} for e in row] for row in J]
    goal = RationalPolynomial.monomial(target)
    ((goal_key, _),) = goal.terms.items()
    total = Fraction(0)
    for p in permutations(range(n)):
        acc = {(): Fraction(_perm_sign(p))}
        for i in range(n):
            nxt = {}
            for m1, c1 in acc.items():
                for m2, c2 in pruned[i][p[i]].items():
                    m = RationalPolynomial.monomial(dict(Counter(dict(m1)) + Counter(dict(m2))))
                    ((key, _),) = m.terms.items()
                    if _divides(key, target):
                        nxt[key] = nxt.get(key, 0) + c1 * c2
            acc = nxt
            if not acc:
                break
        total += acc.get(goal_key, 0)
    return total


def diagonal_coefficients(k):
    """Per pi_i: (measured coefficient of s_i^n_i t_{i,1}...t_{i,n_i}, closed form).

    The closed form is prod(segment length!) / n_i!; only non-vanishing of
    the measured value is relied upon.
    """
    out = []
    for i, p in enumerate(lyndon_list(k)[:-1], start=1):
        exps = {s_var(i): len(p)}
        for j in range(1, len(p) + 1):
            exps[t_var(i, j)] = 1
        measured = density_in_s_t(p, k).coefficient(exps)
        closed = Fraction(prod(factorial(l) for l in increasing_segments(p)), factorial(len(p)))
        out.append((p, measured, closed))
    return out


@dataclass(frozen=True)
class JacobianCertificate:
    k: int
    point: dict
    matrix: tuple
    determinant: Fraction
    witness_seed: int
    lyndon_list: tuple
    attempt: int = 1

    def to_json(self):
        fmt = _fmt
        return {
            "k": self.k,
            "lyndon_list": [str(p) for p in self.lyndon_list],
            "point": {v: fmt(x) for v, x in self.point.items()},
            "matrix": [[fmt(x) for x in row] for row in self.matrix],
            "determinant": fmt(self.determinant),
            "seed": self.witness_seed,
            "attempt": self.attempt,
        }


def _fmt(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _positive_parts(rng, total, count):
    """``count`` positive integers with sum strictly below ``total``."""
    cuts = sorted(rng.sample(range(1, total), count))
    return [b - a for a, b in zip([0] + cuts, cuts)]


def random_spec(k, rng, denominator=WITNESS_DENOMINATOR):
    lst = lyndon_list(k)
    N = len(lst) - 1
    s = [Fraction(a, denominator) for a in _positive_parts(rng, denominator, N)]
    t = [[Fraction(a, denominator) for a in _positive_parts(rng, denominator, len(p))] for p in lst[:-1]]
    return make_spec(k, s, t)


def find_witness(k, attempts=10, seed=0, mode="auto"):
    """Search seeded random rational points for a non-zero Jacobian determinant."""
    if k not in SUPPORTED_K:
        raise ValueError(f"k must be one of {SUPPORTED_K}")
    rng = random.Random(seed)
    for attempt in range(1, attempts + 1):
        spec = random_spec(k, rng)
        matrix = jacobian_matrix(k, spec, mode)
        det = jacobian_determinant(matrix)
        if det != 0:
            return JacobianCertificate(
                k, spec.point(), tuple(tuple(r) for r in matrix), det, seed, spec.lyndon_list, attempt
            )
    raise WitnessNotFound(f"no non-zero determinant in {attempts} attempts (k={k}, seed={seed})")


def certificate_from_json(data):
    point = {v: Fraction(x) for v, x in data["point"].items()}
    k = int(data["k"])
    spec = spec_from_point(k, point)
    return JacobianCertificate(
        k,
        spec.point(),
        tuple(tuple(Fraction(x) for x in row) for row in data.get("matrix", ())),
        Fraction(data["determinant"]),
        int(data.get("seed", 0)),
        spec.lyndon_list,
        int(data.get("attempt", 1)),
    )


# --- floating-point re-verification -------------------------------------


def _float_densities(spec, s_values):
    """d(pi_i) for every listed pi_i, in floats, by summing over ordered tuples.

    Every ordered tuple of parts (one per labelled point) is enumerated and
    weighted by the product of its scales; its pattern is read off directly.
    """
    lst = spec.lyndon_list
    base = direct_sum(lst)
    z = [s * t for s, ts in zip(s_values, spec.t_values) for t in ts]
    z.append(1.0 - sum(z))
    z = np.array([float(v) for v in z])
    out = []
    for pi in lst[:-1]:
        if len(base) ** len(pi) <= ORDERED_TUPLE_LIMIT:
            tuples, mask = _ordered_tuples(base.word, pi)
            weights = np.prod(z[tuples[mask]], axis=1)
        else:
            # too many ordered tuples: weight each multiset by its multinomial
            rows = _rows_for(pi, spec.k)
            weights = _row_multinomials(rows, len(pi)) * np.prod(z[rows], axis=1)
        out.append(float(weights.sum()))
    return out


def _row_multinomials(rows, m):
    srt = np.sort(rows, axis=1)
    mult = np.full(len(rows), float(factorial(m)))
    run = np.ones(len(rows))
    for c in range(1, m):
        same = srt[:, c] == srt[:, c - 1]
        run = np.where(same, run + 1, 1)
        mult /= np.where(same, run, 1)
    return mult


@lru_cache(maxsize=None)
def _ordered_tuples(base_word, pi):
    m = len(pi)
    B = len(base_word)
    tuples = np.array(list(product(range(B), repeat=m)), dtype=np.int64)
    # sort points by part (x order); equal parts are increasing in both axes
    order = np.argsort(tuples, axis=1, kind="stable")
    parts = np.take_along_axis(tuples, order, axis=1)
    vals = np.array(base_word)[parts] * (m + 1) + np.arange(m)
    std = np.argsort(np.argsort(vals, axis=1, kind="stable"), axis=1, kind="stable") + 1
    mask = (std == np.array(pi.word)).all(axis=1)
    return tuples, mask


def float_determinant(spec, rel_step=1e-4):
    """det of the Jacobian from float densities and 5-point central differences."""
    s0 = [float(s) for s in spec.s_values]
    N = len(s0)
    J = np.zeros((N, N))
    for j in range(N):
        h = rel_step * s0[j]
        vals = []
        for mult in (2, 1, -1, -2):
            s = list(s0)
            s[j] += mult * h
            vals.append(np.array(_float_densities(spec, s)))
        J[:, j] = (-vals[0] + 8 * vals[1] - 8 * vals[2] + vals[3]) / (12 * h)
    return float(np.linalg.det(J)), J


def reverify_certificate(cert):
    """Relative difference between the exact determinant and the float route."""
    spec = spec_from_point(cert.k, cert.point)
    approx, _ = float_determinant(spec)
    exact = float(cert.determinant)
    return abs(approx - exact) / abs(exact), approx


# --- Lemma on disjoint pattern occurrences -------------------------------


def _occurrence_tuples(whole, perms, pool):
    if not perms:
        yield ()
        return
    first = perms[0]
    for sub in combinations(pool, len(first)):
        if pattern_at(whole, sub) == first:
            left = [x for x in pool if x not in sub]
            for tail in _occurrence_tuples(whole, perms[1:], left):
                yield (sub,) + tail


def verify_lemma_lyndon(perms):
    """Brute-force check that the only disjoint occurrences are the blocks.

    For strictly >_L-decreasing distinct Lyndon permutations, every tuple of
    disjoint position sets J_1, ..., J_n inducing pi_1, ..., pi_n in their
    direct sum must be the tuple of consecutive intervals.
    """
    perms = list(perms)
    if not perms:
        raise ValueError("need at least one permutation")
    for p in perms:
        if len(p) == 0 or not is_lyndon_permutation(p):
            raise ValueError(f"{p} is not a Lyndon permutation")
    for a, b in zip(perms, perms[1:]):
        if compare_L(a, b) <= 0:
            raise ValueError("permutations must be strictly decreasing in <_L")
    whole = direct_sum(perms)
    if len(whole) > 8:
        raise ValueError("total size above 8")
    expected = []
    start = 1
    for p in perms:
        expected.append(tuple(range(start, start + len(p))))
        start += len(p)
    found = list(_occurrence_tuples(whole, perms, list(range(1, len(whole) + 1))))
    return found == [tuple(expected)]
