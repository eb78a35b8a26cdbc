"""Sparse multivariate polynomials with exact rational coefficients.

Variables are strings.  The tags used by this package are ``x[<perm>]``
(density of a Lyndon permutation), ``s[i]``, ``t[i,j]`` and ``z[i]`` (blow-up
scale parameters); any other string is accepted and sorts after them.
"""
import re
from fractions import Fraction

_TAG = re.compile(r"^([a-z]+)\[([^\]]*)\]$")
_KIND = {"x": 0, "s": 1, "t": 2, "z": 3}


def var_key(name):
    """Canonical sort key of a variable name."""
    m = _TAG.match(name)
    if m is None:
        return (9, (), name)
    kind, body = m.groups()
    if kind == "x":
        word = tuple(int(c) for c in (body.split(",") if "," in body else body))
        return (0, (len(word),) + word, name)
    try:
        idx = tuple(int(v) for v in body.split(","))
    except ValueError:
        return (9, (), name)
    return (_KIND.get(kind, 8), idx, name)


def _mono_key(mono):
    return (sum(e for _, e in mono), [(var_key(v), e) for v, e in mono])


def _mul_mono(a, b):
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items(), key=lambda ve: var_key(ve[0])))


def _format_coeff(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_mono(mono):
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)


class RationalPolynomial:
    """Immutable sparse polynomial; ``terms`` maps monomial -> Fraction.

    A monomial is a tuple of ``(variable, exponent)`` pairs sorted by
    :func:`var_key`, with positive exponents; ``()`` is the constant monomial.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[mono] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("RationalPolynomial is immutable")

    @classmethod
    def const(cls, c):
        return cls({(): c})

    @classmethod
    def var(cls, name):
        return cls({((name, 1),): 1})

    @classmethod
    def monomial(cls, exps, coeff=1):
        mono = tuple(sorted(((v, e) for v, e in exps.items() if e), key=lambda ve: var_key(ve[0])))
        return cls({mono: coeff})

    @staticmethod
    def _lift(other):
        if isinstance(other, RationalPolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalPolynomial.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return RationalPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalPolynomial({m: c * other for m, c in self.terms.items()})
        if not isinstance(other, RationalPolynomial):
            return NotImplemented
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mul_mono(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        if other == 0:
            raise ZeroDivisionError("polynomial division by zero")
        inv = 1 / Fraction(other)
        return RationalPolynomial({m: c * inv for m, c in self.terms.items()})

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        out = RationalPolynomial.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: _mono_key(mc[0]))

    def variables(self):
        return sorted({v for m in self.terms for v, _ in m}, key=var_key)

    def coefficient(self, exps):
        """Coefficient of the monomial given as a ``{variable: exponent}`` dict."""
        mono = tuple(sorted(((v, e) for v, e in exps.items() if e), key=lambda ve: var_key(ve[0])))
        return self.terms.get(mono, Fraction(0))

    def total_degree(self):
        if not self.terms:
            return -1
        return max(sum(e for _, e in m) for m in self.terms)

    def is_homogeneous(self):
        return len({sum(e for _, e in m) for m in self.terms}) <= 1

    def derivative(self, var):
        out = {}
        for mono, c in self.terms.items():
            for i, (v, e) in enumerate(mono):
                if v == var:
                    new = mono[:i] + (((v, e - 1),) if e > 1 else ()) + mono[i + 1:]
                    out[new] = out.get(new, 0) + c * e
                    break
        return RationalPolynomial(out)

    def evaluate(self, assignment):
        """Exact value with every variable replaced from ``assignment``."""
        missing = [v for v in self.variables() if v not in assignment]
        if missing:
            raise KeyError(f"unassigned variables: {', '.join(missing)}")
        total = Fraction(0)
        for mono, c in self.terms.items():
            term = c
            for v, e in mono:
                term *= Fraction(assignment[v]) ** e
            total += term
        return total

    def evaluate_float(self, assignment):
        total = 0.0
        for mono, c in self.terms.items():
            term = float(c)
            for v, e in mono:
                term *= float(assignment[v]) ** e
            total += term
        return total

    def substitute(self, mapping):
        """Replace variables by polynomials (or numbers); others are kept."""
        lifted = {v: self._lift(p) for v, p in mapping.items()}
        out = RationalPolynomial()
        for mono, c in self.terms.items():
            term = RationalPolynomial.const(c)
            keep = {}
            for v, e in mono:
                if v in lifted:
                    term = term * lifted[v] ** e
                else:
                    keep[v] = e
            if keep:
                term = term * RationalPolynomial.monomial(keep)
            out = out + term
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for mono, c in self.sorted_terms():
            mag = abs(c)
            if not mono:
                body = _format_coeff(mag)
            elif mag == 1:
                body = _format_mono(mono)
            else:
                body = f"{_format_coeff(mag)}*{_format_mono(mono)}"
            if not pieces:
                pieces.append(body if c > 0 else f"-{body}")
            else:
                pieces.append(("+ " if c > 0 else "- ") + body)
        return " ".join(pieces)

    def __repr__(self):
        return f"RationalPolynomial({str(self)!r})"

    def to_json(self):
        """List of ``{"monomial": ["x[21]^1", ...], "coeff": "p/q"}`` records."""
        return [
            {"monomial": [f"{v}^{e}" for v, e in mono], "coeff": _format_coeff(c)}
            for mono, c in self.sorted_terms()
        ]

    @classmethod
    def from_json(cls, records):
        terms = {}
        for rec in records:
            exps = {}
            for item in rec["monomial"]:
                v, _, e = item.rpartition("^")
                exps[v] = exps.get(v, 0) + int(e)
            mono = tuple(sorted(exps.items(), key=lambda ve: var_key(ve[0])))
            terms[mono] = terms.get(mono, 0) + Fraction(rec["coeff"])
        return cls(terms)


def evaluate_polynomial(poly, assignment):
    return poly.evaluate(assignment)
