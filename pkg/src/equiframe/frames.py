"""Fourier equiangular tight frames, companion frames and their POVMs.

Frames are stored by their synthesis matrix: a d x N complex array whose
columns are the frame vectors f_0, ..., f_{N-1}.  A companion G of an ETF F
satisfies |<g_j, f_j>| = 0 and |<g_j, f_k>|^2 = N / (d (N - 1)) for j != k.
"""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import _accel
from .characters import character_vector, is_prime
from .errors import ConstructionInvalid, InvalidArgument
from .linalg import dft_matrix, gram

DEFAULT_TOL = 1e-10


@dataclass
class FrameSpec:
    synthesis: np.ndarray
    tight: bool = False
    equiangular: bool = False
    label: str = ""

    def __post_init__(self):
        self.synthesis = np.asarray(self.synthesis, dtype=np.complex128)
        if self.synthesis.ndim != 2:
            raise InvalidArgument("synthesis matrix must be 2-D")

    @property
    def d(self):
        return self.synthesis.shape[0]

    @property
    def N(self):
        return self.synthesis.shape[1]

    @property
    def alpha(self):
        """Squared ETF angle (N - d) / (d (N - 1))."""
        N, d = self.N, self.d
        return (N - d) / (d * (N - 1)) if N > 1 else 0.0

    def column(self, j):
        return self.synthesis[:, j]

    def permuted(self, perm):
        return FrameSpec(self.synthesis[:, list(perm)], self.tight, self.equiangular, self.label)


@dataclass
class CompanionPair:
    base: FrameSpec
    diag_unitary: np.ndarray
    companion: FrameSpec
    angle_sq: float
    m: int = 0
    character: np.ndarray = field(default=None, repr=False)

    @property
    def p(self):
        return self.base.N


@dataclass
class Povm:
    elements: list

    def total(self):
        return sum(self.elements)


def companion_constant(N, d):
    return N / (d * (N - 1))


def fourier_etf(p):
    """The (p, p-1) Fourier ETF: the last p-1 rows of the p-point DFT, unit columns."""
    if int(p) != p or p < 3:
        raise InvalidArgument(f"Fourier ETF needs p >= 3, got {p!r}")
    p = int(p)
    d = p - 1
    # dft_matrix carries 1/sqrt(p); rescale so each truncated column has unit norm
    synth = dft_matrix(p)[1:, :] * np.sqrt(p / d)
    return FrameSpec(synth, tight=True, equiangular=True, label=f"fourier_etf({p})")


def frame_operator(F):
    s = F.synthesis
    return s @ s.conj().T


def has_unit_columns(F, tol=DEFAULT_TOL):
    norms = np.linalg.norm(F.synthesis, axis=0)
    return bool(np.all(np.abs(norms - 1.0) <= tol))


def is_funtf(F, tol=DEFAULT_TOL):
    if not has_unit_columns(F, tol):
        return False
    target = (F.N / F.d) * np.eye(F.d)
    return bool(np.max(np.abs(frame_operator(F) - target)) <= tol * max(1.0, F.N / F.d))


def is_etf(F, tol=DEFAULT_TOL):
    """Return (equiangular?, alpha) where alpha is the mean off-diagonal |<f_j,f_k>|^2."""
    if not is_funtf(F, tol):
        raise InvalidArgument("is_etf requires a finite unit-norm tight frame")
    N = F.N
    if N < 2:
        return True, 0.0
    g2 = np.abs(gram(F.synthesis)) ** 2
    off = g2[~np.eye(N, dtype=bool)]
    alpha = float(off.mean())
    return bool(np.max(np.abs(off - alpha)) <= tol), alpha


def companion_defects(F, G):
    """Max deviations (diagonal |<g_j,f_j>|, off-diagonal |<g_j,f_k>|^2 - constant)."""
    if F.synthesis.shape != G.synthesis.shape:
        raise InvalidArgument(
            f"frame shapes differ: {F.synthesis.shape} vs {G.synthesis.shape}"
        )
    N, d = F.N, F.d
    cross = gram(G.synthesis, F.synthesis)  # cross[j, k] = <g_j, f_k>
    diag_dev = float(np.max(np.abs(np.diag(cross))))
    if N < 2:
        return diag_dev, 0.0
    mask = ~np.eye(N, dtype=bool)
    off_dev = float(np.max(np.abs(np.abs(cross[mask]) ** 2 - companion_constant(N, d))))
    return diag_dev, off_dev


def is_companion(F, G, tol=DEFAULT_TOL):
    diag_dev, off_dev = companion_defects(F, G)
    return diag_dev <= tol and off_dev <= tol


def companion_angle_sq(F, G):
    """Mean off-diagonal |<g_j, f_k>|^2."""
    cross = np.abs(gram(G.synthesis, F.synthesis)) ** 2
    mask = ~np.eye(F.N, dtype=bool)
    return float(cross[mask].mean())


def companion_from_diagonal(F, diag, tol=DEFAULT_TOL, m=0, label=""):
    diag = np.asarray(diag, dtype=np.complex128)
    U = np.diag(diag)
    G = FrameSpec(U @ F.synthesis, tight=True, equiangular=True, label=label)
    if not is_companion(F, G, tol):
        diag_dev, off_dev = companion_defects(F, G)
        raise ConstructionInvalid(
            f"{label or 'diagonal'} companion fails certification: "
            f"max|<g_j,f_j>| = {diag_dev:.3e}, max angle deviation = {off_dev:.3e}"
        )
    return CompanionPair(F, U, G, companion_angle_sq(F, G), m=m)


def companion_from_character(p, m, tol=DEFAULT_TOL):
    """Companion of fourier_etf(p) from the m-th power residue character mod p."""
    if int(p) != p or p < 3 or not is_prime(int(p)):
        raise InvalidArgument(f"{p!r} is not an odd prime")
    chi = character_vector(p, m)
    F = fourier_etf(p)
    U_diag = chi.tail
    if abs(U_diag.sum()) > 1e-9:
        raise ConstructionInvalid(f"character ({p}, {m}) gives a unitary with nonzero trace")
    pair = companion_from_diagonal(F, U_diag, tol, m=m, label=f"companion({p},{m})")
    pair.character = chi.entries
    return pair


def povm_from_frame(F, tol=DEFAULT_TOL):
    """POVM elements (d/N) f_j f_j^* of a unit-norm tight frame."""
    if not is_funtf(F, tol):
        raise InvalidArgument("POVM construction requires a unit-norm tight frame")
    scale = F.d / F.N
    return Povm([scale * np.outer(f, f.conj()) for f in F.synthesis.T])


def measurement_matrix(measure, states):
    """P[s, j] = (d/N) |<measure_j, state_s>|^2, the outcome law for each input state."""
    cross = gram(states.synthesis, measure.synthesis)  # <state_s, measure_j>
    return (measure.d / measure.N) * np.abs(cross) ** 2


# --- Prop-1 style tensor frame check --------------------------------------------


@dataclass
class TwoDistanceReport:
    N: int
    d: int
    alpha: float
    tight_constant: float
    expected_constant: float
    tight_residual: float
    counts: dict
    expected_counts: dict
    passed: bool


def tensor_two_distance_check(F, tol=1e-9, seed=0):
    """Certify that {f_j f_k^*} is a tight two-distance frame for d x d matrices.

    Tightness is measured on a random basis of d^2 matrices (Hilbert-Schmidt
    inner product); distances are the squared HS moduli over all ordered pairs
    of the N^2 outer products, binned against {1, alpha, alpha^2}.
    """
    ok, alpha = is_etf(F, tol)
    if not ok:
        raise InvalidArgument("tensor_two_distance_check requires an ETF")
    N, d = F.N, F.d
    cols = F.synthesis.T
    # rows are vec(f_j f_k^*), index j*N + k
    outer = np.einsum("ja,kb->jkab", cols, cols.conj()).reshape(N * N, d * d)

    rng = np.random.default_rng(seed)
    basis = rng.standard_normal((d * d, d * d)) + 1j * rng.standard_normal((d * d, d * d))
    # <M, E>_HS = sum M * conj(E)
    coeffs = basis @ outer.conj().T
    energy = np.sum(np.abs(coeffs) ** 2, axis=1)
    hs_norm = np.sum(np.abs(basis) ** 2, axis=1)
    ratios = energy / hs_norm
    tight_constant = float(ratios.mean())
    expected_constant = N * N / (d * d)
    tight_residual = float(np.max(np.abs(ratios - expected_constant)))

    hs = np.abs(outer @ outer.conj().T) ** 2
    levels = {"1": 1.0, "alpha": alpha, "alpha^2": alpha * alpha}
    counts = Counter()
    for name, value in levels.items():
        hit = np.abs(hs - value) <= tol
        counts[name] = int(hit.sum())
    matched = np.zeros(hs.shape, dtype=bool)
    for value in set(levels.values()):
        matched |= np.abs(hs - value) <= tol
    unclassified = int((~matched).sum())

    expected = {"1": N * N, "alpha": 2 * N * N * (N - 1), "alpha^2": N * N * (N - 1) ** 2}
    if alpha <= tol:
        # orthonormal basis: alpha and alpha^2 collapse onto 0
        expected = {"1": N * N, "alpha": expected["alpha"] + expected["alpha^2"]}
        expected["alpha^2"] = expected["alpha"]
    passed = (
        tight_residual <= tol * max(1.0, expected_constant)
        and unclassified == 0
        and all(counts[k] == v for k, v in expected.items())
    )
    return TwoDistanceReport(
        N, d, alpha, tight_constant, expected_constant, tight_residual,
        dict(counts), expected, bool(passed),
    )


# --- the two-dimensional fixtures --------------------------------------------


def trine():
    return fourier_etf(3)


def renes_four_state():
    """Four-element ETF in C^2 with |<f_j, f_k>|^2 = 1/3."""
    a = np.sqrt((3 + np.sqrt(3)) / 6)
    b = np.sqrt((3 - np.sqrt(3)) / 6)
    synth = np.array([[a, a, b, b], [1j * b, -1j * b, a, -a]], dtype=np.complex128)
    return FrameSpec(synth, tight=True, equiangular=True, label="renes_four_state")


def swap_companion(F):
    """g_j = X f_j for j = 0, 1 and g_2 = X f_3, g_3 = X f_2 with X the Pauli swap."""
    X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    G = X @ F.synthesis
    return FrameSpec(G[:, [0, 1, 3, 2]], tight=True, equiangular=True, label="swap_companion")


def _torus_grid_numpy(weights, angles):
    best = np.inf
    best_ab = (0.0, 0.0)
    phases = np.exp(1j * angles)
    for i, a in enumerate(angles):
        # <U f_j, f_j> = sum_n U_nn |f_j[n]|^2 with U = diag(e^{ia}, e^{ib})
        vals = np.abs(weights[:, 0][None, :] * phases[i] + weights[:, 1][None, :] * phases[:, None])
        worst = vals.max(axis=1)
        k = int(np.argmin(worst))
        if worst[k] < best:
            best = float(worst[k])
            best_ab = (float(a), float(angles[k]))
    return best, best_ab


@_accel.njit(cache=True)
def _torus_grid_jit(weights, angles):
    best = np.inf
    best_a = 0.0
    best_b = 0.0
    n = angles.size
    nf = weights.shape[0]
    ca = np.cos(angles)
    sa = np.sin(angles)
    for i in range(n):
        for k in range(n):
            worst = 0.0
            for j in range(nf):
                re = weights[j, 0] * ca[i] + weights[j, 1] * ca[k]
                im = weights[j, 0] * sa[i] + weights[j, 1] * sa[k]
                v = np.sqrt(re * re + im * im)
                if v > worst:
                    worst = v
            if worst < best:
                best = worst
                best_a = angles[i]
                best_b = angles[k]
    return best, best_a, best_b


@dataclass
class RefutationResult:
    grid_min: float
    refined_min: float
    argmin: tuple
    grid_points: int

    @property
    def minimum(self):
        return min(self.grid_min, self.refined_min)


def diagonal_companion_refutation(F, resolution=1e-3):
    """Minimize max_j |<U f_j, f_j>| over diagonal unitaries U of C^2.

    Grid search over the 2-torus of phases followed by a Nelder-Mead polish.
    A minimum bounded away from zero rules out a diagonal companion.
    """
    if F.d != 2:
        raise InvalidArgument("diagonal refutation is implemented for C^2 frames")
    weights = np.ascontiguousarray(np.abs(F.synthesis.T) ** 2)
    angles = np.arange(0.0, 2 * np.pi, resolution)
    if _accel.jit_enabled():
        best, a, b = _torus_grid_jit(weights, angles)
        grid_min, ab = float(best), (float(a), float(b))
    else:
        grid_min, ab = _torus_grid_numpy(weights, angles)

    def objective(x):
        u = np.exp(1j * np.asarray(x))
        return float(np.max(np.abs(weights @ u)))

    res = minimize(objective, np.asarray(ab), method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    return RefutationResult(grid_min, float(res.fun), tuple(map(float, res.x)), angles.size ** 2)


@dataclass
class RenesFixtures:
    trine: CompanionPair
    four_state: FrameSpec
    swapped_companion: FrameSpec
    four_state_alpha: float
    refutation: RefutationResult


def renes_fixtures(tol=DEFAULT_TOL, refutation_threshold=0.1):
    """Build and certify the trine, the four-state ETF and its swap companion."""
    T = trine()
    trine_pair = companion_from_diagonal(T, [1.0, -1.0], tol, m=2, label="trine")
    four = renes_four_state()
    ok, alpha = is_etf(four, tol)
    if not ok or abs(alpha - 1 / 3) > tol:
        raise ConstructionInvalid(f"four-state frame is not an ETF with alpha 1/3 (alpha={alpha})")
    refutation = diagonal_companion_refutation(four)
    if refutation.minimum <= refutation_threshold:
        raise ConstructionInvalid(
            f"found a near-companion diagonal unitary: {refutation.minimum:.3e}"
        )
    swapped = swap_companion(four)
    if not is_companion(four, swapped, tol):
        raise ConstructionInvalid("swap-permutation companion fails certification")
    return RenesFixtures(trine_pair, four, swapped, alpha, refutation)
