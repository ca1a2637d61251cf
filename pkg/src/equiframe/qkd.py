"""Equiangular QKD with an intercept/resend eavesdropper.

Round model: Alice sends f_j (j uniform).  With probability q Eve measures in
the base-frame POVM, gets m and forwards f_m.  Bob measures the received state
in the companion POVM, gets l (never the index of the state he received) and
keeps one more index x drawn uniformly from the others; he announces the
complement of {l, x}.  Alice declares success iff j is in {l, x}.  Both sides
then derive a key bit from their (Alice-state, Bob-outcome) pair: Alice from
(j, other element of {l, x}), Bob from (x, l).

Randomness is counter-based: shard s of a session draws from a Philox stream
keyed by SeedSequence(seed, spawn_key=(s,)), so results do not depend on how
shards are scheduled.
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _accel
from .errors import InvalidArgument, InvalidState, UndefinedEstimate
from .frames import measurement_matrix

SHARD_ROUNDS = 1 << 16
NORM_RENORMALIZE = 1e-9
NORM_FAIL = 1e-6


def key_bit(a, b):
    """Order bit of the pair (a, b): 0 if a > b, 1 if a < b."""
    if a == b:
        raise InvalidArgument(f"key bit undefined for equal indices ({a}, {b})")
    return 0 if a > b else 1


# --- closed forms ---------------------------------------------------------------


def closed_form_stats(N, d):
    """Sift rates and error figures for full interception, as exact fractions.

    Returns a dict with R0, R, eps_R, QBER.
    """
    if int(N) != N or int(d) != d or d < 2 or N <= d:
        raise InvalidArgument(f"closed forms need integers N > d >= 2, got N={N}, d={d}")
    N, d = int(N), int(d)
    R0 = Fraction(1, N - 1)
    R = Fraction(2 * N * N - (d + 3) * N + 2 * d, N * (N - 1) ** 2)
    eps_R = Fraction((N - d) * (N - 2), N * (N - 1))
    qber = Fraction((N - 1) * (N - d), 2 * N * N - (d + 3) * N + 2 * d)
    assert eps_R == R / R0 - 1
    assert qber == (1 / R) * (1 - Fraction(d, N)) / (N - 1)
    # the long-hand form of R: agree -> fail w.p. (N-2)/(N-1), disagree -> its square
    fail = Fraction(N - 2, N - 1)
    assert R == 1 - fail * Fraction(d, N) - fail ** 2 * (1 - Fraction(d, N))
    return {"R0": R0, "R": R, "eps_R": eps_R, "QBER": qber}


def mixture_stats(N, d, q):
    """Per-round Bernoulli(q) interception: R(q) = (1-q) R0 + q R."""
    cf = closed_form_stats(N, d)
    q = Fraction(q).limit_denominator(10 ** 9) if not isinstance(q, Fraction) else q
    R0, R = cf["R0"], cf["R"]
    Rq = (1 - q) * R0 + q * R
    errors = q * (1 - Fraction(d, N)) / (N - 1)
    return {"R": Rq, "QBER": errors / Rq, "eps_R": Rq / R0 - 1}


@lru_cache(maxsize=64)
def _enumeration_tallies(N):
    """Per (j, m): number of (l, x) tuples that succeed, and that succeed with a bit error."""
    idx = np.arange(N)
    j = idx[:, None, None, None]
    m = idx[None, :, None, None]
    l = idx[None, None, :, None]
    x = idx[None, None, None, :]

    valid = (l != m) & (x != l)
    success = valid & ((j == l) | (j == x))
    # Alice's partner is the other element of {l, x}; Bob's pair is (x, l)
    partner = np.where(j == l, x, l)
    alice = np.where(j > partner, 0, 1)
    bob = np.where(x > l, 0, 1)
    mismatch = success & (alice != bob)
    return success.sum(axis=(2, 3)).astype(np.int64), mismatch.sum(axis=(2, 3)).astype(np.int64)


def exact_enumeration_stats(N, d):
    """Enumerate every (j, m, l, x) with integer weights; return exact R0, R, eps_R, QBER.

    Weights are probabilities scaled by N * N(N-1) * (N-1) * (N-1):
    P(j) = 1/N, P(m|j) = d/N or (N-d)/(N(N-1)), P(l|m) = 1/(N-1) for l != m,
    P(x|l) = 1/(N-1) for x != l.  Success and bit agreement are evaluated
    per tuple with the same ordering rule as key_bit.
    """
    if d < 2 or N <= d:
        raise InvalidArgument(f"need N > d >= 2, got N={N}, d={d}")
    succ_jm, err_jm = _enumeration_tallies(int(N))
    eve = np.where(np.eye(N, dtype=bool), d * (N - 1), N - d).astype(np.int64)
    denom = N * N * (N - 1) * (N - 1) * (N - 1)

    R = Fraction(int((eve * succ_jm).sum()), denom)
    errors = Fraction(int((eve * err_jm).sum()), denom)
    # no Eve: the state reaching Bob is f_j itself, i.e. m = j with weight 1
    R0 = Fraction(int(np.trace(succ_jm)), N * (N - 1) * (N - 1))
    return {"R0": R0, "R": R, "eps_R": R / R0 - 1, "QBER": errors / R}


# --- sampling ---------------------------------------------------------------


def outcome_distribution(state, frame):
    """Exact outcome law (d/N)|<frame_j, state>|^2, renormalized within tolerance."""
    state = np.asarray(state, dtype=np.complex128).reshape(-1)
    if state.size != frame.d:
        raise InvalidArgument(f"state has dimension {state.size}, frame has {frame.d}")
    probs = (frame.d / frame.N) * np.abs(frame.synthesis.conj().T @ state) ** 2
    total = probs.sum()
    dev = abs(total - 1.0)
    if dev > NORM_FAIL:
        raise InvalidState(f"outcome probabilities sum to {total!r}")
    if dev > NORM_RENORMALIZE:
        probs = probs / total
    return probs


def measure_povm(state, frame, rng):
    """Sample an outcome index of the frame POVM on ``state``."""
    probs = outcome_distribution(state, frame)
    return int(min(np.searchsorted(np.cumsum(probs), rng.random(), side="right"), frame.N - 1))


def _cdf_table(P):
    P = np.asarray(P, dtype=np.float64)
    sums = P.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > NORM_FAIL):
        raise InvalidState(f"measurement rows sum to {sums}")
    P = np.where(np.abs(sums - 1.0)[:, None] > NORM_RENORMALIZE, P / sums[:, None], P)
    cdf = np.cumsum(P, axis=1)
    cdf[:, -1] = 1.0
    return np.ascontiguousarray(cdf)


@dataclass
class ProtocolParams:
    pair: object  # CompanionPair
    q: float = 1.0
    rounds: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise InvalidArgument(f"intercept fraction must lie in [0, 1], got {self.q}")
        if int(self.rounds) != self.rounds or self.rounds < 1:
            raise InvalidArgument(f"rounds must be a positive integer, got {self.rounds}")
        self.rounds = int(self.rounds)
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidArgument("seed must fit in 64 bits")

    @property
    def N(self):
        return self.pair.base.N

    @property
    def d(self):
        return self.pair.base.d


@dataclass
class RoundRecord:
    j: int
    intercepted: bool
    m: object  # int or None
    l: int
    x: int
    success: bool
    alice_bit: object = None
    bob_bit: object = None


@dataclass
class MeasurementTables:
    eve_cdf: np.ndarray  # row j: Eve's outcome law on f_j (base POVM)
    bob_cdf: np.ndarray  # row s: Bob's outcome law on f_s (companion POVM)

    @classmethod
    def from_pair(cls, pair):
        F, G = pair.base, pair.companion
        eve = measurement_matrix(F, F)
        bob = measurement_matrix(G, F)
        return cls(_cdf_table(eve), _cdf_table(bob))


def _draw(cdf_row, u):
    k = 0
    n = cdf_row.size
    while k < n - 1 and u >= cdf_row[k]:
        k += 1
    return k


def simulate_round(params, rng, tables=None):
    """One protocol round, with the same uniform-to-outcome mapping as the session kernels."""
    tables = tables or MeasurementTables.from_pair(params.pair)
    N = params.N
    u = rng.random(5)
    j = min(int(u[0] * N), N - 1)
    intercepted = bool(u[1] < params.q)
    m = _draw(tables.eve_cdf[j], u[2]) if intercepted else None
    received = m if intercepted else j
    l = _draw(tables.bob_cdf[received], u[3])
    x = (l + 1 + min(int(u[4] * (N - 1)), N - 2)) % N
    success = j == l or j == x
    rec = RoundRecord(j, intercepted, m, l, x, success)
    if success:
        partner = x if j == l else l
        rec.alice_bit = key_bit(j, partner)
        rec.bob_bit = key_bit(x, l)
    return rec


# --- session kernels: map uniforms to round tallies --------------------------------


def _eve_code(N, intercepted, m, l, x):
    """Eve's symbol: (intercepted m or null) together with the unordered public pair."""
    lo = np.minimum(l, x)
    hi = np.maximum(l, x)
    m_part = np.where(intercepted, m + 1, 0)
    return (m_part * N + lo) * N + hi


def _session_shard_numpy(u, N, q, eve_cdf, bob_cdf):
    j = np.minimum((u[:, 0] * N).astype(np.int64), N - 1)
    intercepted = u[:, 1] < q
    m = np.minimum((u[:, 2][:, None] >= eve_cdf[j]).sum(axis=1), N - 1)
    received = np.where(intercepted, m, j)
    l = np.minimum((u[:, 3][:, None] >= bob_cdf[received]).sum(axis=1), N - 1)
    x = (l + 1 + np.minimum((u[:, 4] * (N - 1)).astype(np.int64), N - 2)) % N
    success = (j == l) | (j == x)
    partner = np.where(j == l, x, l)
    alice = (j < partner).astype(np.int64)
    bob = (x < l).astype(np.int64)
    e = _eve_code(N, intercepted, m, l, x)
    joint = (e * 2 + alice) * 2 + bob
    n_codes = (N + 1) * N * N * 4
    counts = np.bincount(joint[success], minlength=n_codes).astype(np.int64)
    return counts


@_accel.njit(nogil=True, cache=True)
def _session_shard_jit(u, N, q, eve_cdf, bob_cdf):
    n_codes = (N + 1) * N * N * 4
    counts = np.zeros(n_codes, dtype=np.int64)
    for r in range(u.shape[0]):
        j = min(int(u[r, 0] * N), N - 1)
        intercepted = u[r, 1] < q
        m = 0
        received = j
        if intercepted:
            while m < N - 1 and u[r, 2] >= eve_cdf[j, m]:
                m += 1
            received = m
        l = 0
        while l < N - 1 and u[r, 3] >= bob_cdf[received, l]:
            l += 1
        x = (l + 1 + min(int(u[r, 4] * (N - 1)), N - 2)) % N
        if j != l and j != x:
            continue
        partner = x if j == l else l
        alice = 1 if j < partner else 0
        bob = 1 if x < l else 0
        lo = min(l, x)
        hi = max(l, x)
        m_part = m + 1 if intercepted else 0
        e = (m_part * N + lo) * N + hi
        counts[(e * 2 + alice) * 2 + bob] += 1
    return counts


def _shard_uniforms(seed, shard, size):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(shard),))
    gen = np.random.Generator(np.random.Philox(ss))
    return gen.random((size, 5))


def joint_counts(params, tables=None):
    """Counts over (eve symbol, alice bit, bob bit) for successful rounds.

    Returned array has shape (N + 1, N, N, 2, 2): axes are (m + 1 or 0 when not
    intercepted, min(l, x), max(l, x), alice bit, bob bit).
    """
    tables = tables or MeasurementTables.from_pair(params.pair)
    N, q = params.N, float(params.q)
    n_shards = -(-params.rounds // SHARD_ROUNDS)
    kernel = _session_shard_jit if _accel.jit_enabled() else _session_shard_numpy

    def run(s):
        size = min(SHARD_ROUNDS, params.rounds - s * SHARD_ROUNDS)
        u = _shard_uniforms(params.seed, s, size)
        return kernel(u, N, q, tables.eve_cdf, tables.bob_cdf)

    total = np.zeros((N + 1) * N * N * 4, dtype=np.int64)
    with ThreadPoolExecutor(max_workers=_accel.thread_cap()) as pool:
        for counts in pool.map(run, range(n_shards)):
            total += counts
    return total.reshape(N + 1, N, N, 2, 2)


# --- estimators ---------------------------------------------------------------


def binary_entropy(p):
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def plugin_mutual_information(table):
    """Plug-in mutual information (bits) of a 2-D contingency table."""
    table = np.asarray(table, dtype=np.float64)
    total = table.sum()
    if total <= 0:
        raise UndefinedEstimate("mutual information of an empty table")
    pxy = table / total
    px = pxy.sum(axis=1, keepdims=True)
    py = pxy.sum(axis=0, keepdims=True)
    nz = pxy > 0
    return float(np.sum(pxy[nz] * np.log2(pxy[nz] / (px @ py)[nz])))


def mutual_information_estimate(counts):
    """I(A:B), I(A:E), I(B:E) and the key-rate estimate I(A:B) - min(I(A:E), I(B:E)).

    ``counts`` is the joint tally from joint_counts (any shape whose last two
    axes are alice bit, bob bit and leading axes index Eve's symbol).
    """
    counts = np.asarray(counts)
    if counts.sum() == 0:
        raise UndefinedEstimate("no sifted rounds to estimate from")
    ab = counts.reshape(-1, 2, 2)
    I_AB = plugin_mutual_information(ab.sum(axis=0))
    I_AE = plugin_mutual_information(ab.sum(axis=2).T)
    I_BE = plugin_mutual_information(ab.sum(axis=1).T)
    return {"I_AB": I_AB, "I_AE": I_AE, "I_BE": I_BE, "key_rate": I_AB - min(I_AE, I_BE)}


@dataclass
class SessionStats:
    N: int
    d: int
    m: int
    q: float
    rounds: int
    seed: int
    successes: int
    bit_matches: int
    bit_mismatches: int
    R_hat: float
    QBER_hat: float
    eps_R_hat: float
    stderr: dict
    theory: dict
    theory_q0: dict
    theory_q: dict
    mi: dict = field(default_factory=dict)
    anomalous: bool = False

    def to_dict(self):
        return {
            "N": self.N,
            "d": self.d,
            "m": self.m,
            "q": self.q,
            "rounds": self.rounds,
            "seed": self.seed,
            "successes": self.successes,
            "bit_matches": self.bit_matches,
            "bit_mismatches": self.bit_mismatches,
            "R_hat": self.R_hat,
            "QBER_hat": self.QBER_hat,
            "eps_R_hat": self.eps_R_hat,
            "stderr": self.stderr,
            "theory": self.theory,
            "theory_q0": self.theory_q0,
            "theory_q": self.theory_q,
            "mi": self.mi,
            "anomalous": self.anomalous,
        }


def _floats(d):
    return {k: float(v) for k, v in d.items()}


def stats_from_counts(params, counts):
    N, d = params.N, params.d
    rounds = params.rounds
    successes = int(counts.sum())
    mismatches = int(counts[..., 0, 1].sum() + counts[..., 1, 0].sum())
    matches = successes - mismatches
    R_hat = successes / rounds
    qber_hat = mismatches / successes if successes else 0.0
    se_R = math.sqrt(R_hat * (1 - R_hat) / rounds)
    se_qber = math.sqrt(qber_hat * (1 - qber_hat) / successes) if successes else 0.0
    anomalous = successes == 0 and rounds >= 10 * (N - 1)
    if anomalous:
        warnings.warn(f"no successful rounds in {rounds} (N={N})", RuntimeWarning)
    cf = closed_form_stats(N, d)
    mix = mixture_stats(N, d, Fraction(params.q).limit_denominator(10 ** 9))
    try:
        mi = mutual_information_estimate(counts)
    except UndefinedEstimate:
        mi = {}
    return SessionStats(
        N=N, d=d, m=int(getattr(params.pair, "m", 0)), q=float(params.q), rounds=rounds,
        seed=int(params.seed), successes=successes, bit_matches=matches,
        bit_mismatches=mismatches, R_hat=R_hat, QBER_hat=qber_hat,
        eps_R_hat=R_hat * (N - 1) - 1,
        stderr={"R_hat": se_R, "QBER_hat": se_qber, "eps_R_hat": se_R * (N - 1)},
        theory=_floats(cf),
        theory_q0={"R": float(cf["R0"]), "QBER": 0.0, "eps_R": 0.0},
        theory_q=_floats(mix), mi=mi, anomalous=anomalous,
    )


def simulate_session(params):
    counts = joint_counts(params)
    return stats_from_counts(params, counts)
