"""Compare the numba kernels with their pure-numpy twins.

    python benchmarks/bench_backends.py [--sizes 23,27,29,31] [--rounds 1000000]

Each timing is the best of ``--repeat`` runs after one warm-up call (the warm-up
also absorbs numba compilation).  Both backends must report identical hits
and identical session tallies; the script exits non-zero otherwise.
"""

import argparse
import os
import sys
import time

import numpy as np

from equiframe.eigensearch import sign_eigenvector_search
from equiframe.frames import companion_from_character
from equiframe.qkd import ProtocolParams, joint_counts


def timed(fn, repeat):
    fn()
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def with_backend(name, fn):
    if name == "numpy":
        os.environ["EQUIFRAME_DISABLE_JIT"] = "1"
    else:
        os.environ.pop("EQUIFRAME_DISABLE_JIT", None)
    try:
        return fn()
    finally:
        os.environ.pop("EQUIFRAME_DISABLE_JIT", None)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="23,27,29,31")
    ap.add_argument("--rounds", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]
    agree = True

    print(f"{'kernel':<24}{'numba [s]':>12}{'numpy [s]':>12}{'ratio':>9}")
    for n in sizes:
        res = {}
        for name in ("numba", "numpy"):
            res[name] = with_backend(
                name, lambda: timed(lambda: sign_eigenvector_search(n), args.repeat))
        tj, rj = res["numba"]
        tn, rn = res["numpy"]
        same = [tuple(v) for v, _ in rj.hits] == [tuple(v) for v, _ in rn.hits]
        agree &= same
        print(f"{'search n=' + str(n):<24}{tj:>12.4f}{tn:>12.4f}{tn / tj:>9.2f}"
              f"{'' if same else '  MISMATCH'}")

    for p in (5, 17):
        pair = companion_from_character(p, 2)
        params = ProtocolParams(pair, q=0.5, rounds=args.rounds, seed=1)
        res = {}
        for name in ("numba", "numpy"):
            res[name] = with_backend(name, lambda: timed(lambda: joint_counts(params), args.repeat))
        (tj, cj), (tn, cn) = res["numba"], res["numpy"]
        same = np.array_equal(cj, cn)
        agree &= same
        label = f"session p={p} {args.rounds:.0e}"
        print(f"{label:<24}{tj:>12.4f}{tn:>12.4f}{tn / tj:>9.2f}{'' if same else '  MISMATCH'}")
    return 0 if agree else 1


if __name__ == "__main__":
    sys.exit(main())
