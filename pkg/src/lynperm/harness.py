"""Exhaustive and seeded property checks, shared by ``lynperm verify`` and the tests.

Every check returns a :class:`CheckResult`; none of them raise on a failed
property, so a run always reports every line.
"""
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product

from .flag import constituents_violating_flag_lemma, density_of_sum, flag_product
from .independence import (
    det_monomial_coefficient,
    density_in_s_t,
    find_witness,
    jacobian_determinant,
    lyndon_list,
    make_spec,
    jacobian_matrix,
    reverify_certificate,
    s_var,
    symbolic_determinant,
    verify_lemma_lyndon,
)
from .lyndon import (
    enumerate_lyndon_permutations,
    is_lyndon_word,
    lyndon_counts_from_series,
    max_shuffle_constituent,
    sigma_prefix,
)
from .perm import enumerate_permutations, parse_permutation
from .permuton import estimate_density, exact_density, make_blowup, random_blowup
from .reduction import build_reduction_table, lyndon_variable


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name} ({self.seconds:.2f}s) {self.detail}".rstrip()


def _timed(name, fn, *args, **kwargs):
    start = time.perf_counter()
    try:
        passed, detail, data = fn(*args, **kwargs)
    except Exception as exc:  # a crashing check is a failing check
        passed, detail, data = False, f"error: {exc!r}", {}
    return CheckResult(name, passed, detail, time.perf_counter() - start, data)


def _perms(*texts):
    return [parse_permutation(t) for t in texts]


def _lyndon_enumeration():
    l2 = {str(p) for p in enumerate_lyndon_permutations(2)}
    l3 = {str(p) for p in enumerate_lyndon_permutations(3)}
    order = [str(p) for p in enumerate_lyndon_permutations(3, include_trivial=True)]
    ok = (
        l2 == {"21"}
        and l3 == {"21", "132", "231", "312", "321"}
        and order == ["321", "312", "231", "21", "132", "1"]
    )
    return ok, f"order k=3: {','.join(order)}", {"order": order}


def _series_counts(kmax=6):
    series = lyndon_counts_from_series(kmax)
    direct = [0] * kmax
    for p in enumerate_lyndon_permutations(kmax, include_trivial=True):
        direct[len(p) - 1] += 1
    ok = series == direct and series[:3] == [1, 1, 4]
    return ok, f"series={series} enumeration={direct}", {"series": series, "direct": direct}


def _flag_example():
    got = flag_product(_perms("12", "1"))
    want = {
        "123": Fraction(1),
        "132": Fraction(2, 3),
        "231": Fraction(1, 3),
        "213": Fraction(2, 3),
        "312": Fraction(1, 3),
    }
    ok = {str(p): c for p, c in got.items()} == want
    return ok, str(got), {}


def multisets_of_permutations(max_total):
    """Non-increasing tuples of permutations with total size <= max_total."""
    pool = [p for n in range(1, max_total + 1) for p in enumerate_permutations(n)]
    out = []

    def grow(prefix, start, room):
        if prefix:
            out.append(tuple(prefix))
        for i in range(start, len(pool)):
            if len(pool[i]) <= room:
                grow(prefix + [pool[i]], i, room - len(pool[i]))

    grow([], 0, max_total)
    return out


def random_permutons(count, seed, max_base=5, max_denominator=64):
    rng = random.Random(seed)
    return [random_blowup(rng, max_base, max_denominator) for _ in range(count)]


def _product_identity(max_total=5, permutons=20, seed=0):
    perms = random_permutons(permutons, seed)
    tuples = multisets_of_permutations(max_total)
    bad = []
    for parts in tuples:
        s = flag_product(parts)
        for P in perms:
            lhs = density_of_sum(s, P)
            rhs = Fraction(1)
            for p in parts:
                rhs *= exact_density(p, P)
            if lhs != rhs:
                bad.append(("x".join(map(str, parts)), P.to_json()))
    detail = f"{len(tuples)} products x {len(perms)} permutons, {len(bad)} mismatches"
    return not bad, detail, {"mismatches": bad[:5]}


def lyndon_word_lists(letter_count=5, max_total=5):
    """Non-increasing lists of Lyndon words over the first letters of the alphabet."""
    letters = sigma_prefix(letter_count)
    words = [
        w
        for n in range(1, max_total + 1)
        for w in product(letters, repeat=n)
        if is_lyndon_word(w)
    ]
    words.sort(reverse=True)
    out = []

    def grow(prefix, start, room):
        if prefix:
            out.append(list(prefix))
        for i in range(start, len(words)):
            if len(words[i]) <= room:
                grow(prefix + [words[i]], i, room - len(words[i]))

    grow([], 0, max_total)
    return out


def _shuffle_lemma(letter_count=5, max_total=5):
    lists = lyndon_word_lists(letter_count, max_total)
    bad = 0
    for ws in lists:
        top, coeff = max_shuffle_constituent(ws)
        concat = tuple(a for w in ws for a in w)
        distinct = len(set(ws)) == len(ws)
        if top != concat or (distinct and coeff != 1):
            bad += 1
    return bad == 0, f"{len(lists)} word lists, {bad} violations", {}


def _flag_lemma(max_size=5):
    bad = {}
    total = 0
    for n in range(1, max_size + 1):
        for p in enumerate_permutations(n):
            total += 1
            v = constituents_violating_flag_lemma(p)
            if v:
                bad[str(p)] = [str(s) for s in v]
    return not bad, f"{total} permutations, {len(bad)} with violations", {"violations": bad}


def _shuffle_and_flag_lemmas():
    a = _shuffle_lemma()
    b = _flag_lemma()
    return a[0] and b[0], f"shuffle: {a[1]}; flag: {b[1]}", {}


def _reduction_roundtrip(k=4, permutons=20, seed=0):
    table = build_reduction_table(k)
    anchors = {
        "12": "1 - x[21]",
        "213": "3*x[21] - x[132] - 2*x[231] - 2*x[312] - 3*x[321]",
    }
    anchor_ok = all(str(table[parse_permutation(p)]) == want for p, want in anchors.items())
    lyndon = enumerate_lyndon_permutations(k)
    bad = []
    for P in random_permutons(permutons, seed):
        assign = {lyndon_variable(s): exact_density(s, P) for s in lyndon}
        for p, poly in table.entries.items():
            if poly.evaluate(assign) != exact_density(p, P):
                bad.append((str(p), P.to_json()))
    detail = f"{len(table.entries)} entries x {permutons} permutons, {len(bad)} mismatches, anchors {'ok' if anchor_ok else 'WRONG'}"
    return anchor_ok and not bad, detail, {"mismatches": bad[:5]}


def lyndon_decreasing_tuples(max_total=7):
    """Strictly >_L-decreasing tuples of Lyndon permutations, total size <= max_total."""
    pool = enumerate_lyndon_permutations(max_total, include_trivial=True)
    out = []

    def grow(prefix, start, room):
        if prefix:
            out.append(list(prefix))
        for i in range(start, len(pool)):
            if len(pool[i]) <= room:
                grow(prefix + [pool[i]], i + 1, room - len(pool[i]))

    grow([], 0, max_total)
    return out


def _lemma_lyndon(max_total=7):
    tuples = lyndon_decreasing_tuples(max_total)
    bad = [t for t in tuples if not verify_lemma_lyndon(t)]
    return not bad, f"{len(tuples)} tuples, {len(bad)} failures", {}


def _certificates(seed=0, include_k4=False):
    notes = []
    sym = symbolic_determinant(2)
    spec = make_spec(2, [Fraction(1, 2)], [[Fraction(1, 4), Fraction(1, 4)]])
    det2 = jacobian_determinant(jacobian_matrix(2, spec))
    ok2 = str(sym) == "4*s[1]*t[1,1]*t[1,2]" and det2 == Fraction(1, 8) and det_monomial_coefficient(2) == 4
    notes.append(f"k=2 det={sym} at point={det2}")
    cert = find_witness(3, attempts=10, seed=seed)
    rel, _ = reverify_certificate(cert)
    coeff3 = det_monomial_coefficient(3)
    ok3 = len(cert.matrix) == 5 and cert.determinant != 0 and rel <= 1e-6 and coeff3 != 0
    notes.append(f"k=3 det={float(cert.determinant):.6e} rel.err={rel:.2e} monomial coeff={coeff3}")
    ok = ok2 and ok3
    data = {"k3": cert.to_json(), "coeff3": str(coeff3)}
    if include_k4:
        cert4 = find_witness(4, attempts=10, seed=seed)
        rel4, _ = reverify_certificate(cert4)
        ok = ok and cert4.determinant != 0 and rel4 <= 1e-6
        notes.append(f"k=4 det={float(cert4.determinant):.6e} rel.err={rel4:.2e}")
    return ok, "; ".join(notes), data


MC_BATTERY = [
    ("21", "21", ["1/2", "1/2"]),
    ("12", "21", ["1/2", "1/2"]),
    ("1", "21", ["1/3", "2/3"]),
    ("321", "21", ["1/2", "1/2"]),
    ("21", "42315", ["2/5", "1/5", "1/10", "1/10", "1/5"]),
    ("231", "42315", ["2/5", "1/5", "1/10", "1/10", "1/5"]),
    ("312", "2413", ["1/4", "1/4", "1/4", "1/4"]),
    ("2413", "2413", ["1/4", "1/4", "1/4", "1/4"]),
    ("132", "132", ["1/2", "1/4", "1/4"]),
    ("123", "213", ["1/8", "1/8", "3/4"]),
]


def _monte_carlo(trials=100_000, seed=0, max_failures=1):
    misses = []
    for idx, (sigma, base, scales) in enumerate(MC_BATTERY):
        P = make_blowup(parse_permutation(base), [Fraction(z) for z in scales])
        sig = parse_permutation(sigma)
        exact = float(exact_density(sig, P))
        est = estimate_density(sig, P, trials, seed=seed + idx)
        if est.standard_error == 0:
            ok = est.mean == exact
        else:
            ok = abs(est.mean - exact) <= 4 * est.standard_error
        if not ok:
            misses.append(f"{sigma} in {base}: {est.mean:.5f} vs {exact:.5f}")
    detail = f"{len(MC_BATTERY)} pairs, {len(misses)} outside 4 s.e. (budget {max_failures})"
    if misses:
        detail += ": " + "; ".join(misses)
    return len(misses) <= max_failures, detail, {}


def _homogeneity(k=3):
    bad = []
    for kk in range(2, k + 1):
        for i, p in enumerate(lyndon_list(kk)[:-1], start=1):
            poly = density_in_s_t(p, kk)
            for mono in poly.terms:
                s_deg = sum(e for v, e in mono if v.startswith("s["))
                t_deg = sum(e for v, e in mono if v.startswith("t["))
                if s_deg != len(p) or t_deg != len(p):
                    bad.append(str(p))
                    break
    lst = lyndon_list(2)[:-1]
    det = symbolic_determinant(2)
    want = 2 * sum(len(p) for p in lst) - len(lst)
    ok = not bad and det.is_homogeneous() and det.total_degree() == want
    return ok, f"non-homogeneous: {bad or 'none'}; k=2 det degree {det.total_degree()} (expected {want})", {}


ACCEPTANCE = [
    ("1 Lyndon enumeration", _lyndon_enumeration),
    ("2 series identity counts", _series_counts),
    ("3 flag product example 12x1", _flag_example),
    ("4 product identity d(x)=prod d", _product_identity),
    ("5 shuffle/flag lemmas", _shuffle_and_flag_lemmas),
    ("6 reduction round-trip k=4", _reduction_roundtrip),
    ("7 disjoint-occurrence lemma", _lemma_lyndon),
    ("8 Jacobian certificates", _certificates),
    ("9 Monte Carlo oracle", _monte_carlo),
    ("10 homogeneity and degree", _homogeneity),
]


def run_all(level="desk", seed=0):
    results = []
    for name, fn in ACCEPTANCE:
        kwargs = {}
        if fn in (_product_identity, _reduction_roundtrip, _certificates, _monte_carlo):
            kwargs["seed"] = seed
        if level == "deep" and fn is _certificates:
            kwargs["include_k4"] = True
        results.append(_timed(name, fn, **kwargs))
    return results
