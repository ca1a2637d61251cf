"""Command-line entry point: ``equiframe {build,verify,search,theory,simulate,sweep}``.

Exit codes: 0 pass, 1 a check failed, 2 usage error, 3 certification failure.
"""

import argparse
import csv
import io
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .characters import is_prime
from .eigensearch import (
    EXHAUSTIVE_CEILING,
    expected_legendre_eigenvalue,
    legendre_eigenvalue,
    sign_eigenvector_search,
    uniqueness_report,
)
from .errors import ConstructionInvalid, InvalidArgument, SearchBudgetExceeded
from .frames import (
    DEFAULT_TOL,
    companion_defects,
    companion_from_character,
    is_etf,
    is_funtf,
)
from .qkd import ProtocolParams, closed_form_stats, simulate_session
from .serialize import dump_json, load_json, pair_from_dict, pair_to_dict

DEFAULT_ROUNDS = 1_000_000
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CERT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _fmt_frac(x):
    return f"{float(x):.6f} ({x})" if isinstance(x, Fraction) else f"{x:.6f}"


def _check_pm(p, m):
    if not is_prime(p) or p < 3:
        raise UsageError(f"p = {p} is not an odd prime")
    if m < 2 or (p - 1) % m:
        raise UsageError(f"m = {m} must be >= 2 and divide p - 1 = {p - 1}")


def _check_out(path):
    if path is None:
        return
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise UsageError(f"cannot write to {path}")


def _parse_range(text):
    try:
        lo, hi = (int(t) for t in text.split(".."))
    except ValueError as exc:
        raise UsageError(f"range must look like 3..23, got {text!r}") from exc
    if lo < 3 or hi < lo:
        raise UsageError(f"invalid range {text!r}")
    return lo, hi


def _parse_list(text, kind):
    try:
        return [kind(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse list {text!r}") from exc


# --- subcommands ---------------------------------------------------------------


def cmd_build(args):
    _check_pm(args.p, args.m)
    _check_out(args.out)
    pair = companion_from_character(args.p, args.m, args.tol)
    data = pair_to_dict(pair, args.tol)
    text = dump_json(data, args.out)
    if args.out is None:
        sys.stdout.write(text)
    else:
        N, d = pair.base.N, pair.base.d
        print(f"wrote {args.out}: d={d} N={N} m={args.m} "
              f"alpha={Fraction(N - d, d * (N - 1))} companion={Fraction(N, d * (N - 1))}")
    return EXIT_OK


def cmd_verify(args):
    try:
        pair = pair_from_dict(load_json(args.file))
    except (OSError, InvalidArgument) as exc:
        raise UsageError(str(exc)) from exc
    tol = args.tol
    F, G, U = pair.base, pair.companion, pair.diag_unitary
    N, d = F.N, F.d
    checks = {}
    checks["base_funtf"] = is_funtf(F, tol)
    alpha = None
    if checks["base_funtf"]:
        checks["base_etf"], alpha = is_etf(F, tol)
    else:
        checks["base_etf"] = False
    checks["companion_funtf"] = is_funtf(G, tol)
    diag_dev, off_dev = companion_defects(F, G)
    checks["companion_eq1"] = diag_dev <= tol and off_dev <= tol
    diag = np.diag(U)
    checks["unitary_diagonal"] = bool(np.all(np.abs(np.abs(diag) - 1) <= tol))
    checks["unitary_traceless"] = abs(diag.sum()) <= tol * max(1, d)
    checks["companion_is_UF"] = bool(np.max(np.abs(U @ F.synthesis - G.synthesis)) <= tol)

    print(f"file: {args.file}  d={d} N={N} m={pair.m}")
    for name, ok in checks.items():
        print(f"  {name:<18} {'PASS' if ok else 'FAIL'}")
    if alpha is not None:
        print(f"  alpha           = {alpha:.12f}  (expected {Fraction(N - d, d * (N - 1))})")
    print(f"  companion angle = {pair.angle_sq:.12f}  (expected {Fraction(N, d * (N - 1))})")
    print(f"  max|<g_j,f_j>|  = {diag_dev:.3e}")
    return EXIT_OK if all(checks.values()) else EXIT_FAIL


def _prop2_rows(lo, hi):
    rows = []
    for p in range(lo, hi + 1):
        if p % 2 == 0 or not is_prime(p):
            continue
        lam = legendre_eigenvalue(p)
        exp = expected_legendre_eigenvalue(p)
        rows.append({"p": p, "lambda": None if lam is None else [lam.real, lam.imag],
                     "expected": [exp.real, exp.imag], "ok": lam == exp})
    return rows


def cmd_search(args):
    if (args.n is None) == (args.range is None):
        raise UsageError("give exactly one of -n or --range")
    lo, hi = (args.n, args.n) if args.n is not None else _parse_range(args.range)
    if lo < 3:
        raise UsageError("n must be >= 3")
    if hi > EXHAUSTIVE_CEILING and not args.prop2_only:
        raise UsageError(
            f"n = {hi} exceeds the exhaustive ceiling {EXHAUSTIVE_CEILING}; "
            "use --prop2-only for the constructive check"
        )
    _check_out(args.out)

    if args.prop2_only:
        rows = _prop2_rows(lo, hi)
        for r in rows:
            print(f"p={r['p']:>3}  lambda={r['lambda']}  {'ok' if r['ok'] else 'FAIL'}")
        if args.out:
            dump_json({"mode": "prop2-only", "range": [lo, hi], "rows": rows}, args.out)
        return EXIT_OK if all(r["ok"] for r in rows) else EXIT_FAIL

    try:
        if args.n is not None:
            rep = sign_eigenvector_search(args.n, budget=args.budget)
            data = rep.to_dict()
            print(f"n={rep.n} hits={len(rep.hits)} candidates={rep.candidates_examined} "
                  f"backend={rep.backend} seconds={rep.wall_time:.3f}")
            for vec, lam in rep.hits:
                print(f"  lambda={lam}  {list(int(v) for v in vec)}")
            ok = len(rep.hits) == (1 if is_prime(args.n) and args.n % 2 else 0)
        else:
            rows = uniqueness_report(hi, n_min=lo, budget=args.budget)
            print(f"{'n':>3} {'hits':>4} {'expect':>6} {'lambda':>8} ok")
            for r in rows:
                lam = ",".join(str(x) for x in r.eigenvalues) or "-"
                print(f"{r.n:>3} {r.hits:>4} {r.expected:>6} {lam:>8} {r.ok}")
            data = {"range": [lo, hi], "table": [
                {"n": r.n, "hits": r.hits, "expected": r.expected,
                 "lambdas": [[l.real, l.imag] for l in r.eigenvalues],
                 "matches_legendre": r.matches_legendre, "ok": r.ok,
                 "candidates": r.candidates, "seconds": round(r.seconds, 6)}
                for r in rows]}
            ok = all(r.ok for r in rows)
    except SearchBudgetExceeded as exc:
        print(f"search incomplete: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.out:
        dump_json(data, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_theory(args):
    try:
        cf = closed_form_stats(args.N, args.d)
    except InvalidArgument as exc:
        raise UsageError(str(exc)) from exc
    _check_out(args.out)
    for k, v in cf.items():
        print(f"{k:<6} = {_fmt_frac(v)}")
    if args.out:
        dump_json({"N": args.N, "d": args.d, **{k: float(v) for k, v in cf.items()},
                   "exact": {k: str(v) for k, v in cf.items()}}, args.out)
    return EXIT_OK


def _session(p, m, q, rounds, seed, tol):
    pair = companion_from_character(p, m, tol)
    return simulate_session(ProtocolParams(pair, q=q, rounds=rounds, seed=seed))


def _check_sim_args(p, m, q, rounds, seed):
    _check_pm(p, m)
    if not 0.0 <= q <= 1.0:
        raise UsageError(f"q = {q} outside [0, 1]")
    if rounds < 1:
        raise UsageError("rounds must be positive")
    if not 0 <= seed < 2 ** 64:
        raise UsageError("seed must fit in 64 bits")


def cmd_simulate(args):
    _check_sim_args(args.p, args.m, args.q, args.rounds, args.seed)
    _check_out(args.out)
    stats = _session(args.p, args.m, args.q, args.rounds, args.seed, args.tol)
    data = stats.to_dict()
    print(f"N={stats.N} d={stats.d} q={stats.q} rounds={stats.rounds} seed={stats.seed}")
    print(f"  R_hat    = {stats.R_hat:.6f} +- {stats.stderr['R_hat']:.6f}  "
          f"(theory q-mixture {stats.theory_q['R']:.6f})")
    print(f"  QBER_hat = {stats.QBER_hat:.6f} +- {stats.stderr['QBER_hat']:.6f}  "
          f"(theory q-mixture {stats.theory_q['QBER']:.6f})")
    if stats.mi:
        print(f"  key rate = {stats.mi['key_rate']:.6f}")
    if args.out:
        dump_json(data, args.out)
    else:
        sys.stdout.write(dump_json(data))
    return EXIT_OK


SWEEP_HEADER = ["N", "d", "q", "rounds", "R0", "R", "eps_R", "QBER",
                "R_hat", "QBER_hat", "key_rate_hat"]


def cmd_sweep(args):
    primes = _parse_list(args.primes, int)
    qs = _parse_list(args.q, float)
    if not primes or not qs:
        raise UsageError("empty sweep grid")
    for p in primes:
        _check_sim_args(p, args.m, 0.0, args.rounds, args.seed)
    for q in qs:
        if not 0.0 <= q <= 1.0:
            raise UsageError(f"q = {q} outside [0, 1]")
    _check_out(args.out)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for p in primes:
        for q in qs:
            s = _session(p, args.m, q, args.rounds, args.seed, args.tol)
            writer.writerow([s.N, s.d, repr(s.q), s.rounds, repr(s.theory["R0"]),
                             repr(s.theory["R"]), repr(s.theory["eps_R"]),
                             repr(s.theory["QBER"]), repr(s.R_hat), repr(s.QBER_hat),
                             repr(s.mi.get("key_rate", float("nan")))])
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="equiframe",
        description="Companion equiangular tight frames, DFT sign eigenvectors and "
                    "equiangular QKD simulation.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    b = sub.add_parser("build", help="construct a Fourier ETF and its companion", formatter_class=fmt)
    b.add_argument("-p", type=int, required=True, help="odd prime, N = p")
    b.add_argument("-m", type=int, default=2, help="character order, divides p - 1")
    b.add_argument("-o", "--out", help="frame file (JSON); stdout if omitted")
    b.add_argument("--tol", type=float, default=DEFAULT_TOL)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="re-certify a frame file", formatter_class=fmt)
    v.add_argument("file")
    v.add_argument("--tol", type=float, default=DEFAULT_TOL)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", help="exhaustive sign-eigenvector search", formatter_class=fmt)
    s.add_argument("-n", type=int, help="transform size")
    s.add_argument("--range", help="inclusive size range, e.g. 3..23")
    s.add_argument("--budget", type=int, default=None, help="cap on candidates examined")
    s.add_argument("--prop2-only", action="store_true",
                   help="only check the Legendre eigenvector at each prime (no ceiling)")
    s.add_argument("-o", "--out", help="report file (JSON)")
    s.set_defaults(func=cmd_search)

    t = sub.add_parser("theory", help="closed-form sift rate and QBER", formatter_class=fmt)
    t.add_argument("-N", type=int, required=True)
    t.add_argument("-d", type=int, required=True)
    t.add_argument("-o", "--out", help="JSON output")
    t.set_defaults(func=cmd_theory)

    sim = sub.add_parser("simulate", help="Monte Carlo protocol session", formatter_class=fmt)
    sim.add_argument("-p", type=int, required=True)
    sim.add_argument("-m", type=int, default=2)
    sim.add_argument("-q", type=float, default=1.0, help="intercept fraction")
    sim.add_argument("--rounds", type=int, default=DEFAULT_ROUNDS)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sim.add_argument("-o", "--out", help="stats file (JSON); stdout if omitted")
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="grid of sessions to CSV", formatter_class=fmt)
    sw.add_argument("--primes", default="3,5,7", help="comma-separated odd primes")
    sw.add_argument("-m", type=int, default=2)
    sw.add_argument("-q", default="0,0.25,0.5,0.75,1", help="comma-separated intercept fractions")
    sw.add_argument("--rounds", type=int, default=DEFAULT_ROUNDS)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sw.add_argument("-o", "--out", help="CSV output; stdout if omitted")
    sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"equiframe {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConstructionInvalid as exc:
        print(f"equiframe {args.command}: certification failed: {exc}", file=sys.stderr)
        return EXIT_CERT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
