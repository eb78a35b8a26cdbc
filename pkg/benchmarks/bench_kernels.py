"""Compare the compiled and pure-Python kernels on the workloads that matter.

Run with ``python benchmarks/bench_kernels.py``; add ``--quick`` for a
smaller run.  Each workload is timed on every available backend after an
agreement check, and the speed-up over the Python backend is printed.
"""
import argparse
import random
import time

import numpy as np

from lynperm.independence import _layout
from lynperm.kernels import available_backends


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def workloads(quick):
    rng = random.Random(0)
    word = list(range(1, 13 if quick else 17))
    rng.shuffle(word)
    base3, _ = _layout(3)
    base4, _ = _layout(4)
    out = [
        ("count_patterns n=%d m=5" % len(word), lambda k: k.count_patterns(word, 5)),
        ("flag_counts 4x3", lambda k: k.flag_counts([2, 4, 1, 3], [3, 1, 2])),
        ("multiset ranks base=15 m=3", lambda k: k.multiset_pattern_ranks(list(base3.word), 3)),
    ]
    if not quick:
        # the k=4 independence case: C(86, 4) multisets over a base of size 83
        out.append(("multiset ranks base=83 m=4", lambda k: k.multiset_pattern_ranks(list(base4.word), 4)))
    return out


def _same(a, b):
    if isinstance(a, tuple):
        return all(np.array_equal(np.asarray(x), np.asarray(y)) for x, y in zip(a, b))
    if isinstance(a, dict):
        return dict(a) == dict(b)
    return list(a) == list(b)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quick", action="store_true")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only timing the Python backend")
    print(f"{'workload':32s} " + " ".join(f"{name:>10s}" for name in backends) + "   speed-up")
    for label, fn in workloads(args.quick):
        results = {name: fn(mod) for name, mod in backends.items()}
        ref = results["python"]
        if not all(_same(ref, r) for r in results.values()):
            raise SystemExit(f"backends disagree on {label}")
        times = {name: _best_of(lambda m=mod: fn(m), args.repeat) for name, mod in backends.items()}
        speedup = times["python"] / times["cython"] if "cython" in times else float("nan")
        cells = " ".join(f"{times[name]:9.4f}s" for name in backends)
        print(f"{label:32s} {cells}   {speedup:8.1f}x")


if __name__ == "__main__":
    main()
