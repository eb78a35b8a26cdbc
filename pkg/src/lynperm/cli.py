"""Command-line interface.

Exit status is 0 on success, 1 on a domain error (reported as a JSON
``{"error": ...}`` object in json mode) and 2 on a usage error.
"""
import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import bounds
from .flag import constituents_violating_flag_lemma, density_of_sum, flag_product, format_fraction
from .harness import run_all
from .independence import (
    SYMBOLIC_K,
    WitnessNotFound,
    build_PiL,
    certificate_from_json,
    det_monomial_coefficient,
    density_in_s_t,
    diagonal_coefficients,
    find_witness,
    jacobian_determinant,
    jacobian_matrix,
    lyndon_list,
    random_spec,
    reverify_certificate,
    spec_from_point,
    verify_lemma_lyndon,
)
from .lyndon import (
    alphabet_compare,
    block_word_of,
    cfl_factorize,
    compare_L,
    enumerate_lyndon_permutations,
    format_block_word,
    is_lyndon_permutation,
    is_lyndon_word,
    lyndon_counts_from_series,
    max_shuffle_constituent,
    parse_block_word,
    shuffle_product,
)
from .perm import (
    decompose_blocks,
    direct_sum,
    enumerate_permutations,
    increasing_segments,
    is_indecomposable,
    parse_permutation,
    pattern_at,
    pattern_density,
)
from .permuton import (
    blowup_pattern,
    estimate_density,
    exact_density,
    load_permuton,
    sample_permutation,
    symbolic_density,
)
from .reduction import build_reduction_table, lyndon_factor_permutation, reduction_order_compare

DEFAULT_SEED = 0

# library operation -> the one subcommand that exposes it
OPERATIONS = {
    "parse_permutation": "blocks",
    "direct_sum": "blocks",
    "decompose_blocks": "blocks",
    "is_indecomposable": "blocks",
    "increasing_segments": "blocks",
    "pattern_at": "density",
    "pattern_density": "density",
    "enumerate_permutations": "lyndon-enum",
    "alphabet_compare": "lyndon-check",
    "is_lyndon_word": "lyndon-check",
    "block_word_of": "lyndon-check",
    "compare_L": "lyndon-check",
    "is_lyndon_permutation": "lyndon-check",
    "reduction_order_compare": "lyndon-check",
    "cfl_factorize": "factorize",
    "lyndon_factor_permutation": "factorize",
    "constituents_violating_flag_lemma": "factorize",
    "enumerate_lyndon_permutations": "lyndon-enum",
    "lyndon_counts_from_series": "lyndon-counts",
    "shuffle_product": "shuffle",
    "max_shuffle_constituent": "shuffle",
    "flag_product": "flag-product",
    "density_of_sum": "permuton-density",
    "make_blowup": "permuton-density",
    "blowup_pattern": "permuton-density",
    "exact_density": "permuton-density",
    "symbolic_density": "permuton-density",
    "sample_permutation": "permuton-sample",
    "estimate_density": "permuton-sample",
    "reduce_to_lyndon": "reduce",
    "evaluate_polynomial": "reduce",
    "build_reduction_table": "reduction-table",
    "build_PiL": "jacobian",
    "density_in_s_t": "jacobian",
    "jacobian_matrix": "jacobian",
    "jacobian_determinant": "jacobian",
    "det_monomial_coefficient": "jacobian",
    "find_witness": "witness",
    "verify_lemma_lyndon": "verify",
}


class UsageError(Exception):
    pass


def _q(x):
    return format_fraction(x)


def _ints(text):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}")


def cmd_blocks(args):
    parts = [parse_permutation(t) for t in args.perms]
    p = parts[0] if len(parts) == 1 else direct_sum(parts)
    out = {
        "permutation": str(p),
        "blocks": [str(b) for b in decompose_blocks(p)],
        "indecomposable": is_indecomposable(p),
        "segments": increasing_segments(p),
    }
    if len(parts) > 1:
        out["summands"] = [str(q) for q in parts]
    return out, f"{p} = {' + '.join(out['blocks'])}  segments {out['segments']}"


def cmd_lyndon_check(args):
    items = args.items
    if len(items) > 2:
        raise UsageError("lyndon-check takes one or two arguments")
    first = items[0]
    if "|" in first:
        word = parse_block_word(first)
        lyn = is_lyndon_word(word)
        return {"word": first, "lyndon_word": lyn}, f"{first}: {'Lyndon' if lyn else 'not Lyndon'}"
    p = parse_permutation(first)
    out = {
        "permutation": str(p),
        "block_word": format_block_word(block_word_of(p)),
        "lyndon": is_lyndon_permutation(p),
    }
    text = f"{p}: blocks {out['block_word']}, {'Lyndon' if out['lyndon'] else 'not Lyndon'}"
    if len(items) == 2:
        q = parse_permutation(items[1])
        out["other"] = str(q)
        out["compare_L"] = compare_L(p, q)
        out["reduction_order"] = reduction_order_compare(p, q)
        both = is_indecomposable(p) and is_indecomposable(q)
        out["alphabet_compare"] = alphabet_compare(p, q) if both else None
        text += f"; compare_L={out['compare_L']} reduction_order={out['reduction_order']}"
    return out, text


def cmd_lyndon_enum(args):
    if args.all:
        perms = enumerate_permutations(args.k)
    else:
        perms = enumerate_lyndon_permutations(args.k, include_trivial=args.include_trivial)
    out = [str(p) for p in perms]
    return out, " ".join(out)


def cmd_lyndon_counts(args):
    counts = lyndon_counts_from_series(args.k)
    return counts, " ".join(map(str, counts))


def cmd_factorize(args):
    arg = args.item
    if "|" in arg:
        word = parse_block_word(arg)
        factors = [format_block_word(f) for f in cfl_factorize(word)]
        return {"word": arg, "factors": factors}, " . ".join(factors)
    p = parse_permutation(arg)
    factors = lyndon_factor_permutation(p)
    out = {
        "permutation": str(p),
        "block_word": format_block_word(block_word_of(p)),
        "cfl": [format_block_word(f) for f in cfl_factorize(block_word_of(p))],
        "lyndon_factors": [str(f) for f in factors],
        "flag_lemma_violations": [str(s) for s in constituents_violating_flag_lemma(p)],
    }
    return out, f"{p} = {' (+) '.join(out['lyndon_factors'])}"


def cmd_shuffle(args):
    words = [parse_block_word(w) for w in args.words]
    prod = shuffle_product(words)
    terms = sorted(prod.items(), key=lambda kv: kv[0], reverse=True)
    out = {"terms": [[format_block_word(w), c] for w, c in terms]}
    try:
        top, coeff = max_shuffle_constituent(words)
    except ValueError:
        out["max"] = None
    else:
        out["max"] = [format_block_word(top), coeff]
    text = " + ".join(f"{c}*{format_block_word(w)}" if c != 1 else format_block_word(w) for w, c in terms)
    return out, text


def cmd_flag_product(args):
    parts = [parse_permutation(t) for t in args.perms]
    s = flag_product(parts)
    return {"product": str(s), "terms": s.to_pairs()}, str(s)


def cmd_density(args):
    if args.positions:
        if len(args.perms) != 1:
            raise UsageError("--positions takes exactly one permutation")
        p = parse_permutation(args.perms[0])
        sigma = pattern_at(p, _ints(args.positions))
        return {"permutation": str(p), "positions": _ints(args.positions), "pattern": str(sigma)}, str(sigma)
    if len(args.perms) != 2:
        raise UsageError("density needs SIGMA and PERM")
    sigma, p = (parse_permutation(t) for t in args.perms)
    d = pattern_density(sigma, p)
    return {"pattern": str(sigma), "permutation": str(p), "density": _q(d)}, f"{_q(d)} ~ {float(d):.6f} (float)"


def _need_spec(args):
    if not args.spec:
        raise UsageError("--spec FILE is required")
    return load_permuton(args.spec)


def cmd_permuton_density(args):
    P = _need_spec(args)
    out = {"permuton": P.to_json()}
    lines = []
    if args.counts:
        pat = blowup_pattern(P.base, _ints(args.counts))
        out["blowup_pattern"] = str(pat)
        lines.append(f"pattern of counts {args.counts}: {pat}")
    perms = [parse_permutation(t) for t in args.perms]
    if args.symbolic:
        names = [f"z[{i}]" for i in range(1, len(P.base) + 1)]
        out["symbolic"] = {str(p): str(symbolic_density(p, P.base, names)) for p in perms}
        lines.extend(f"d({p}) = {v}" for p, v in out["symbolic"].items())
    if perms:
        dens = {str(p): exact_density(p, P) for p in perms}
        out["densities"] = {k: _q(v) for k, v in dens.items()}
        lines.extend(f"d({k}) = {_q(v)} ~ {float(v):.6f} (float)" for k, v in dens.items())
        if len(perms) > 1:
            prod = Fraction(1)
            for v in dens.values():
                prod *= v
            flag = density_of_sum(flag_product(perms), P)
            out["flag_product_density"] = _q(flag)
            out["product_of_densities"] = _q(prod)
            lines.append(f"d(product) = {_q(flag)}, product of densities = {_q(prod)}")
    if not perms and not args.counts:
        raise UsageError("give permutations and/or --counts")
    return out, "\n".join(lines)


def cmd_permuton_sample(args):
    P = _need_spec(args)
    if args.sigma:
        sigma = parse_permutation(args.sigma)
        est = estimate_density(sigma, P, args.trials, seed=args.seed)
        exact = exact_density(sigma, P)
        out = {
            "pattern": str(sigma),
            "trials": est.trials,
            "mean": est.mean,
            "standard_error": est.standard_error,
            "redraws": est.redraws,
            "exact": _q(exact),
        }
        return out, f"{est.mean:.6f} +- {est.standard_error:.6f} (exact {_q(exact)})"
    if args.n is None:
        raise UsageError("give --n N to sample, or SIGMA with --trials to estimate")
    p = sample_permutation(P, args.n, seed=args.seed)
    return {"n": args.n, "seed": args.seed, "sample": str(p)}, str(p)


def cmd_reduce(args):
    p = parse_permutation(args.perm)
    k = args.k or len(p)
    if k < len(p):
        raise UsageError("--k must be at least the size of the permutation")
    table = build_reduction_table(k)
    poly = table[p]
    out = {"permutation": str(p), "polynomial": str(poly), "terms": poly.to_json()}
    text = str(poly)
    if args.spec:
        P = load_permuton(args.spec)
        assign = {f"x[{s}]": exact_density(s, P) for s in enumerate_lyndon_permutations(k)}
        val = poly.evaluate(assign)
        out["value"] = _q(val)
        out["exact_density"] = _q(exact_density(p, P))
        text += f"\nvalue {_q(val)}, exact density {out['exact_density']}"
    return out, text


def cmd_reduction_table(args):
    table = build_reduction_table(args.k)
    data = table.to_json()
    text = "\n".join(f"{p}: {table[parse_permutation(p)]}" for p in data)
    return data, text


def _load_point(args, k):
    if args.point:
        with open(args.point) as fh:
            data = json.load(fh)
        point = data.get("point", data)
        return spec_from_point(k, {v: Fraction(x) for v, x in point.items()})
    return random_spec(k, random.Random(args.seed))


def cmd_jacobian(args):
    k = args.k
    spec = _load_point(args, k)
    P = build_PiL(spec)
    matrix = jacobian_matrix(k, spec)
    det = jacobian_determinant(matrix)
    out = {
        "k": k,
        "lyndon_list": [str(p) for p in spec.lyndon_list],
        "base": str(P.base),
        "point": {v: _q(x) for v, x in spec.point().items()},
        "matrix": [[_q(x) for x in row] for row in matrix],
        "determinant": _q(det),
    }
    if k in SYMBOLIC_K:
        out["densities"] = {str(p): str(density_in_s_t(p, k)) for p in spec.lyndon_list[:-1]}
        out["monomial_coefficient"] = _q(det_monomial_coefficient(k))
        out["diagonal_coefficients"] = [
            {"pattern": str(p), "measured": _q(m), "closed_form": _q(c)} for p, m, c in diagonal_coefficients(k)
        ]
    text = f"k={k} N={len(matrix)} det={_q(det)} ~ {float(det):.6e} (float)"
    return out, text


def cmd_witness(args):
    cert = find_witness(args.k, attempts=args.attempts, seed=args.seed)
    out = cert.to_json()
    text = f"k={cert.k} attempt {cert.attempt}: det={out['determinant']} ~ {float(cert.determinant):.6e} (float)"
    if args.reverify:
        rel, approx = reverify_certificate(cert)
        out["float_check"] = {"determinant": approx, "relative_error": rel}
        text += f"\nfloat route {approx:.6e}, relative error {rel:.2e}"
    return out, text


def cmd_verify(args):
    if args.certificate:
        with open(args.certificate) as fh:
            cert = certificate_from_json(json.load(fh))
        spec = spec_from_point(cert.k, cert.point)
        det = jacobian_determinant(jacobian_matrix(cert.k, spec))
        ok = det == cert.determinant and det != 0
        out = {"certificate": args.certificate, "determinant": _q(det), "valid": ok}
        return out, f"certificate {'valid' if ok else 'INVALID'}: det={_q(det)}", (0 if ok else 1)
    if args.lemma:
        perms = [parse_permutation(t) for t in args.lemma]
        ok = verify_lemma_lyndon(perms)
        return {"permutations": args.lemma, "holds": ok}, f"{'holds' if ok else 'FAILS'}", (0 if ok else 1)
    results = run_all(level=args.level, seed=args.seed)
    out = {
        "level": args.level,
        "checks": [
            {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results
        ],
        "passed": all(r.passed for r in results),
    }
    text = "\n".join(r.line() for r in results)
    return out, text, (0 if out["passed"] else 1)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=["json", "text"], default="json")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--max-size", type=int, help="override every size bound")

    parser = argparse.ArgumentParser(prog="lynperm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        return p

    p = add("blocks", cmd_blocks, "indecomposable blocks and increasing segments (of a direct sum)")
    p.add_argument("perms", nargs="+")
    p = add("lyndon-check", cmd_lyndon_check, "Lyndon test; with two arguments also compare them")
    p.add_argument("items", nargs="+", metavar="PERM_OR_WORD")
    p = add("lyndon-enum", cmd_lyndon_enum, "Lyndon permutations of size <= k, >_L-descending")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--include-trivial", action="store_true")
    p.add_argument("--all", action="store_true", help="list every permutation of size k instead")
    p = add("lyndon-counts", cmd_lyndon_counts, "Lyndon counts l_1..l_k from the series identity")
    p.add_argument("--k", type=int, required=True)
    p = add("factorize", cmd_factorize, "Lyndon factorization of a permutation or block word")
    p.add_argument("item", metavar="PERM_OR_WORD")
    p = add("shuffle", cmd_shuffle, "shuffle product of block words such as 21|231")
    p.add_argument("words", nargs="+")
    p = add("flag-product", cmd_flag_product, "flag product of permutations")
    p.add_argument("perms", nargs="+")
    p = add("density", cmd_density, "density of SIGMA in PERM, or the pattern at --positions")
    p.add_argument("perms", nargs="+")
    p.add_argument("--positions", help="comma-separated 1-based positions")
    p = add("permuton-density", cmd_permuton_density, "exact densities in a blow-up permuton")
    p.add_argument("perms", nargs="*")
    p.add_argument("--spec", help="permuton JSON file")
    p.add_argument("--symbolic", action="store_true", help="also print the density polynomial in z[i]")
    p.add_argument("--counts", help="comma-separated part counts; print the resulting pattern")
    p = add("permuton-sample", cmd_permuton_sample, "sample from a permuton or estimate a density")
    p.add_argument("sigma", nargs="?")
    p.add_argument("--spec", help="permuton JSON file")
    p.add_argument("--n", type=int)
    p.add_argument("--trials", type=int, default=100_000)
    p = add("reduce", cmd_reduce, "polynomial p_pi in Lyndon densities")
    p.add_argument("perm")
    p.add_argument("--k", type=int)
    p.add_argument("--spec", help="evaluate at the Lyndon densities of this permuton")
    p = add("reduction-table", cmd_reduction_table, "p_pi for every permutation of size <= k")
    p.add_argument("--k", type=int, required=True)
    p = add("jacobian", cmd_jacobian, "Jacobian matrix and determinant at a point")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--point", help="JSON file with s/t values (or a certificate)")
    p = add("witness", cmd_witness, "search for a non-zero Jacobian determinant")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--attempts", type=int, default=10)
    p.add_argument("--reverify", action="store_true", help="re-check with floats and finite differences")
    p = add("verify", cmd_verify, "run the property harnesses (or check a certificate)")
    p.add_argument("--level", choices=["desk", "deep"], default="desk")
    p.add_argument("--certificate", help="re-verify a certificate JSON file")
    p.add_argument("--lemma", nargs="+", metavar="PERM", help="check one tuple of Lyndon permutations")
    return parser


def _emit(payload, text, mode, stream):
    if mode == "json":
        stream.write(json.dumps(payload, indent=2) + "\n")
    else:
        stream.write(text + "\n")


def run(argv, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    old = os.environ.get("LYNPERM_MAX_SIZE")
    if args.max_size:
        os.environ["LYNPERM_MAX_SIZE"] = str(args.max_size)
    try:
        result = args.func(args)
    except UsageError as exc:
        stderr.write(f"lynperm {args.command}: {exc}\n")
        return 2
    except (ValueError, KeyError, ArithmeticError, WitnessNotFound, OSError) as exc:
        kind = "bound_exceeded" if isinstance(exc, bounds.BoundExceeded) else type(exc).__name__
        if args.output == "json":
            _emit({"error": {"type": kind, "message": str(exc)}}, "", "json", stdout)
        else:
            stderr.write(f"lynperm {args.command}: {exc}\n")
        return 1
    finally:
        if args.max_size:
            if old is None:
                os.environ.pop("LYNPERM_MAX_SIZE", None)
            else:
                os.environ["LYNPERM_MAX_SIZE"] = old
    payload, text = result[0], result[1]
    code = result[2] if len(result) > 2 else 0
    _emit(payload, text, args.output, stdout)
    return code


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
