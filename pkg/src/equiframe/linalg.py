"""Small dense complex linear algebra: the unitary DFT and inner products.

Vectors and matrices are plain ``numpy`` arrays of dtype ``complex128``.
The DFT uses the negative exponent, ``W[j, k] = exp(-2j*pi*j*k/n) / sqrt(n)``.
"""

import numpy as np

from .errors import InvalidArgument

RTOL = 1e-10
ATOL = 1e-12


def as_vector(v):
    return np.asarray(v, dtype=np.complex128).reshape(-1)


def dft_matrix(n):
    """Return the n x n unitary DFT matrix with omega = exp(-2*pi*i/n)."""
    if int(n) != n or n < 1:
        raise InvalidArgument(f"DFT size must be a positive integer, got {n!r}")
    n = int(n)
    idx = np.arange(n)
    # reduce the exponent mod n before taking the exponential to keep phases exact-ish
    phase = (np.outer(idx, idx) % n) * (-2.0 * np.pi / n)
    return np.exp(1j * phase) / np.sqrt(n)


def apply_dft(v):
    v = as_vector(v)
    return dft_matrix(v.size) @ v


def inner(u, v):
    """<u, v> = sum_k u[k] * conj(v[k]); linear in the first slot."""
    u = as_vector(u)
    v = as_vector(v)
    if u.shape != v.shape:
        raise InvalidArgument(f"length mismatch: {u.size} vs {v.size}")
    return complex(np.sum(u * np.conj(v)))


def norm_sq(v):
    v = as_vector(v)
    return float(np.sum(np.abs(v) ** 2))


def gram(a, b=None):
    """Matrix of inner products <a_j, b_k> between the columns of a and b."""
    a = np.asarray(a, dtype=np.complex128)
    b = a if b is None else np.asarray(b, dtype=np.complex128)
    return a.T @ np.conj(b)


def is_unitary(m, rtol=RTOL):
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    eye = np.eye(m.shape[0])
    return bool(np.allclose(m @ m.conj().T, eye, rtol=rtol, atol=rtol))


def close(a, b, rtol=RTOL, atol=ATOL):
    """Elementwise closeness with the package-wide default tolerances."""
    return bool(np.allclose(a, b, rtol=rtol, atol=atol))
