"""Exhaustive search for sign eigenvectors of the unitary DFT.

Candidates are standardized vectors u = [0, 1, +-1, ..., +-1] of length n.
A DFT eigenvector of this form must have zero sum (row 0 of the DFT), so the
tail carries equally many +1 and -1 entries and n must be odd.  Row 1 then
pins S = sum_k u[k] omega^k to sqrt(n) * lambda with lambda in {1, -1, i, -i};
the depth-first kernel discards prefixes whose remaining positions cannot
close the gap to any of those four targets, and every leaf that passes the
row-1 test is checked against the full transform.

Tails are encoded as int64 bitmasks: bit k set means u[k] = +1 (k = 1..n-1).
"""

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import _accel
from .characters import character_vector, is_prime
from .errors import InvalidArgument, SearchBudgetExceeded
from .linalg import apply_dft, as_vector, dft_matrix

EXHAUSTIVE_CEILING = 31
EIGEN_TOL = 1e-9
ROW1_TOL = 1e-6
FOURTH_ROOTS = np.array([complex(1, 0), complex(-1, 0), complex(0, 1), complex(0, -1)])
_OUT_CAP = 4096


@dataclass
class SearchReport:
    n: int
    candidates_examined: int  # expanded search nodes (numba) or evaluated tails (numpy)
    hits: list = field(default_factory=list)  # [(np.ndarray[int8], complex)]
    wall_time: float = 0.0
    backend: str = ""
    pruned: bool = True

    def to_dict(self):
        return {
            "n": self.n,
            "hits": [
                {"vector": [int(x) for x in vec], "lambda": [lam.real, lam.imag]}
                for vec, lam in self.hits
            ],
            "candidates": int(self.candidates_examined),
            "seconds": round(self.wall_time, 6),
        }


def snap_fourth_root(lam, tol=EIGEN_TOL):
    """Return the element of {1, -1, i, -i} within tol of lam, else None."""
    k = int(np.argmin(np.abs(FOURTH_ROOTS - lam)))
    if abs(FOURTH_ROOTS[k] - lam) <= tol:
        return complex(FOURTH_ROOTS[k])
    return None


def eigenvalue_of(u, W=None, tol=EIGEN_TOL):
    """Return lambda with W u = lambda u, or None if u is not an eigenvector.

    lambda is read off the first nonzero entry, then checked in max-norm.
    """
    u = as_vector(u)
    W = dft_matrix(u.size) if W is None else W
    Wu = W @ u
    nz = np.flatnonzero(np.abs(u) > tol)
    if nz.size == 0:
        return None
    k = nz[0]
    lam = Wu[k] / u[k]
    if np.max(np.abs(Wu - lam * u)) > tol:
        return None
    return complex(lam)


def mask_to_vector(mask, n):
    u = -np.ones(n, dtype=np.int8)
    u[0] = 0
    for k in range(1, n):
        if (mask >> k) & 1:
            u[k] = 1
    return u


def balanced_tail_count(n):
    """Standardized zero-sum tails of length n - 1 with u[1] = +1."""
    if n % 2 == 0:
        return 0
    half = (n - 1) // 2
    return comb(n - 2, half - 1)


def _row1_tables(n):
    k = np.arange(n)
    omega_k = np.exp(-2j * np.pi * k / n)
    return omega_k


# --- numba kernel ---------------------------------------------------------------


@_accel.njit(nogil=True, cache=True)
def _dfs_kernel(n, start_idx, start_mask, start_re, start_im, plus_left, minus_left,
                cos_t, sin_t, suf_cos, suf_sin, tgt_re, tgt_im, tol, prune, out):
    """Enumerate completions of a fixed prefix; returns (nodes, n_survivors).

    ``nodes`` counts every partial or complete assignment that passed the
    bounds and was expanded, so it measures work even when pruning removes
    nearly all leaves.

    Free positions are idx = 0..L-1 mapping to tail position k = idx + 2.
    Survivor masks are written to ``out``; n_survivors may exceed out.size,
    in which case the caller must retry with a larger buffer.
    """
    L = n - 2
    leaves = 0
    nout = 0
    if start_idx == L:
        leaves = 1
        for t in range(4):
            dr = start_re - tgt_re[t]
            di = start_im - tgt_im[t]
            if dr * dr + di * di <= tol * tol:
                if nout < out.size:
                    out[nout] = start_mask
                nout += 1
                break
        return leaves, nout

    choice = np.zeros(L + 1, dtype=np.int8)
    pr = np.empty(L + 1)
    pi = np.empty(L + 1)
    pl = np.empty(L + 1, dtype=np.int64)
    ml = np.empty(L + 1, dtype=np.int64)
    masks = np.empty(L + 1, dtype=np.int64)
    pr[start_idx] = start_re
    pi[start_idx] = start_im
    pl[start_idx] = plus_left
    ml[start_idx] = minus_left
    masks[start_idx] = start_mask

    idx = start_idx
    while idx >= start_idx:
        if idx == L:
            for t in range(4):
                dr = pr[L] - tgt_re[t]
                di = pi[L] - tgt_im[t]
                if dr * dr + di * di <= tol * tol:
                    if nout < out.size:
                        out[nout] = masks[L]
                    nout += 1
                    break
            idx -= 1
            continue
        c = choice[idx]
        if c == 2:
            choice[idx] = 0
            idx -= 1
            continue
        choice[idx] = c + 1
        if c == 0:
            if pl[idx] == 0:
                continue
            s = 1.0
        else:
            if ml[idx] == 0:
                continue
            s = -1.0
        nr = pr[idx] + s * cos_t[idx]
        ni = pi[idx] + s * sin_t[idx]
        if prune:
            rc = suf_cos[idx + 1] + tol
            rs = suf_sin[idx + 1] + tol
            ok = False
            for t in range(4):
                if abs(tgt_re[t] - nr) <= rc and abs(tgt_im[t] - ni) <= rs:
                    ok = True
                    break
            if not ok:
                continue
        nxt = idx + 1
        leaves += 1
        pr[nxt] = nr
        pi[nxt] = ni
        if c == 0:
            pl[nxt] = pl[idx] - 1
            ml[nxt] = ml[idx]
            masks[nxt] = masks[idx] | (np.int64(1) << (idx + 2))
        else:
            pl[nxt] = pl[idx]
            ml[nxt] = ml[idx] - 1
            masks[nxt] = masks[idx]
        idx = nxt
    return leaves, nout


def _partitions(n, depth, omega):
    """Feasible prefixes of the first ``depth`` free positions, in lexicographic order."""
    half = (n - 1) // 2
    plus_total = half - 1  # +1 entries still needed after u[1]
    minus_total = half
    out = []
    # +1 before -1 at every position, mirroring the kernel's visiting order
    for signs in itertools.product((1, -1), repeat=depth):
        plus = sum(1 for s in signs if s == 1)
        minus = depth - plus
        if plus > plus_total or minus > minus_total:
            continue
        mask = np.int64(1 << 1)
        acc = omega[1]
        for i, s in enumerate(signs):
            acc += s * omega[i + 2]
            if s == 1:
                mask |= np.int64(1 << (i + 2))
        out.append((int(mask), acc, plus_total - plus, minus_total - minus))
    return out


def _survivors_jit(n, prune, budget):
    L = n - 2
    omega = _row1_tables(n)
    cos_t = np.ascontiguousarray(omega.real[2:])
    sin_t = np.ascontiguousarray(omega.imag[2:])
    suf_cos = np.zeros(L + 1)
    suf_sin = np.zeros(L + 1)
    suf_cos[:L] = np.cumsum(np.abs(cos_t)[::-1])[::-1]
    suf_sin[:L] = np.cumsum(np.abs(sin_t)[::-1])[::-1]
    targets = np.sqrt(n) * FOURTH_ROOTS
    tgt_re = np.ascontiguousarray(targets.real)
    tgt_im = np.ascontiguousarray(targets.imag)

    depth = min(L, 10)
    parts = _partitions(n, depth, omega)

    def run(part):
        mask, acc, pl, ml = part
        out = np.empty(_OUT_CAP, dtype=np.int64)
        while True:
            leaves, nout = _dfs_kernel(n, depth, np.int64(mask), acc.real, acc.imag, pl, ml,
                                       cos_t, sin_t, suf_cos, suf_sin, tgt_re, tgt_im,
                                       ROW1_TOL, prune, out)
            if nout <= out.size:
                return leaves, out[:nout].copy()
            out = np.empty(2 * nout, dtype=np.int64)

    survivors = []
    examined = 0
    done = 0
    with ThreadPoolExecutor(max_workers=_accel.thread_cap()) as pool:
        for leaves, masks in pool.map(run, parts):
            examined += int(leaves)
            done += 1
            survivors.extend(int(m) for m in masks)
            if budget is not None and examined > budget and done < len(parts):
                return survivors, examined, done / len(parts)
    return survivors, examined, 1.0


# --- numpy fallback ---------------------------------------------------------


def _pattern_sums(positions, omega):
    """All sign patterns over ``positions``: (masks, popcounts, row-1 sums)."""
    m = len(positions)
    codes = np.arange(1 << m, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(m)) & 1).astype(np.int8)
    signs = 2 * bits.astype(np.float64) - 1
    sums = signs @ omega[positions] if m else np.zeros(1, dtype=np.complex128)
    pos = np.asarray(positions, dtype=np.int64)
    masks = (bits.astype(np.int64) << pos).sum(axis=1) if m else np.zeros(1, dtype=np.int64)
    return masks, bits.sum(axis=1), sums


def _survivors_numpy(n, budget):
    """Meet-in-the-middle over the balanced tails, vectorized per popcount block."""
    L = n - 2
    omega = _row1_tables(n)
    need = (n - 1) // 2 - 1
    free = list(range(2, n))
    h = L // 2
    left, right = free[:h], free[h:]
    lm, lc, ls = _pattern_sums(left, omega)
    rm, rc, rs = _pattern_sums(right, omega)
    ls = ls + omega[1]
    lm = lm | (1 << 1)
    targets = np.sqrt(n) * FOURTH_ROOTS

    survivors = []
    examined = 0
    total = balanced_tail_count(n)
    block = 512
    for c in range(0, min(h, need) + 1):
        r_need = need - c
        if r_need < 0 or r_need > len(right):
            continue
        lsel = np.flatnonzero(lc == c)
        rsel = np.flatnonzero(rc == r_need)
        rsum = rs[rsel]
        for start in range(0, lsel.size, block):
            chunk = lsel[start:start + block]
            tot = ls[chunk][:, None] + rsum[None, :]
            close = np.zeros(tot.shape, dtype=bool)
            for t in targets:
                close |= np.abs(tot - t) <= ROW1_TOL
            ii, jj = np.nonzero(close)
            survivors.extend(int(a | b) for a, b in zip(lm[chunk[ii]], rm[rsel[jj]]))
            examined += tot.size
            if budget is not None and examined > budget and examined < total:
                return survivors, examined, examined / total
    return survivors, examined, 1.0


# --- public API ---------------------------------------------------------------


def _verify(survivors, n):
    W = dft_matrix(n)
    hits = []
    for mask in sorted(set(survivors)):
        u = mask_to_vector(mask, n)
        lam = eigenvalue_of(u.astype(np.complex128), W)
        if lam is None:
            continue
        lam = snap_fourth_root(lam)
        if lam is None:
            continue
        hits.append((u, lam))
    hits.sort(key=lambda h: tuple(int(x) for x in h[0]))
    return hits


def sign_eigenvector_search(n, budget=None, prune=True):
    """Find every standardized sign vector [0, 1, +-1, ...] that is a DFT eigenvector.

    Raises SearchBudgetExceeded (carrying the partial report) if more than
    ``budget`` complete candidates would be examined.
    """
    if int(n) != n or n < 3:
        raise InvalidArgument(f"search size must be an integer >= 3, got {n!r}")
    n = int(n)
    if n > 62:
        raise InvalidArgument("bitmask encoding supports n <= 62")
    backend = _accel.backend_name()
    t0 = time.perf_counter()
    if not prune:
        hits, examined = _brute_force(n)
        return SearchReport(n, examined, hits, time.perf_counter() - t0, backend, False)

    if n % 2 == 0:
        # the tail has an odd number of +-1 entries and can never sum to zero
        return SearchReport(n, 0, [], time.perf_counter() - t0, backend, True)

    if _accel.jit_enabled():
        survivors, examined, progress = _survivors_jit(n, True, budget)
    else:
        survivors, examined, progress = _survivors_numpy(n, budget)
    hits = _verify(survivors, n)
    report = SearchReport(n, examined, hits, time.perf_counter() - t0, backend, True)
    if progress < 1.0:
        raise SearchBudgetExceeded(
            f"budget of {budget} candidates exhausted at n={n} "
            f"({progress:.1%} of the space covered)",
            partial=report, progress=progress,
        )
    return report


def _brute_force(n, batch=1 << 14):
    """Test every standardized sign vector, balanced or not, against the full DFT."""
    W = dft_matrix(n)
    L = n - 2
    hits = []
    examined = 0
    for start in range(0, 1 << L, batch):
        codes = np.arange(start, min(start + batch, 1 << L), dtype=np.int64)
        bits = (codes[:, None] >> np.arange(L)) & 1
        U = np.zeros((codes.size, n))
        U[:, 1] = 1.0
        U[:, 2:] = 2.0 * bits - 1.0
        WU = U @ W.T
        lam = WU[:, 1]  # u[1] = 1
        resid = np.max(np.abs(WU - lam[:, None] * U), axis=1)
        examined += codes.size
        for r in np.flatnonzero(resid <= EIGEN_TOL):
            snapped = snap_fourth_root(lam[r])
            if snapped is not None:
                hits.append((U[r].astype(np.int8), snapped))
    hits.sort(key=lambda h: tuple(int(x) for x in h[0]))
    return hits, examined


def conjugate_eigenvector_check(f, tol=EIGEN_TOL):
    """Return unimodular z with W f = z conj(f), or None."""
    f = as_vector(f)
    Wf = apply_dft(f)
    nz = np.flatnonzero(np.abs(f) > tol)
    if nz.size == 0:
        return None
    k = nz[0]
    z = Wf[k] / np.conj(f[k])
    if abs(abs(z) - 1.0) > tol:
        return None
    if np.max(np.abs(Wf - z * np.conj(f))) > tol:
        return None
    return complex(z)


def legendre_eigenvalue(p):
    """Eigenvalue of the Legendre vector of p under the unitary DFT (None if it fails)."""
    f = character_vector(p, 2).entries
    lam = eigenvalue_of(f)
    return None if lam is None else snap_fourth_root(lam)


def expected_legendre_eigenvalue(p):
    return 1.0 + 0j if p % 4 == 1 else -1j


@dataclass
class UniquenessRow:
    n: int
    hits: int
    expected: int
    eigenvalues: list
    matches_legendre: bool
    ok: bool
    candidates: int
    seconds: float


def uniqueness_report(p_max, n_min=3, budget=None):
    """Hit count per n in [n_min, p_max]: one for odd primes, none otherwise."""
    if p_max < 3:
        raise InvalidArgument("p_max must be >= 3")
    rows = []
    for n in range(max(3, n_min), p_max + 1):
        rep = sign_eigenvector_search(n, budget=budget)
        prime = is_prime(n) and n % 2 == 1
        expected = 1 if prime else 0
        lams = [lam for _, lam in rep.hits]
        legendre_ok = True
        if prime:
            ref = character_vector(n, 2).entries.real.astype(np.int8)
            legendre_ok = len(rep.hits) == 1 and np.array_equal(rep.hits[0][0], ref)
            if lams and lams[0] != expected_legendre_eigenvalue(n):
                legendre_ok = False
        ok = len(rep.hits) == expected and legendre_ok
        rows.append(UniquenessRow(n, len(rep.hits), expected, lams, legendre_ok, ok,
                                  rep.candidates_examined, rep.wall_time))
    return rows
