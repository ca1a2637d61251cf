"""Legendre symbols and m-th power residue characters modulo an odd prime.

A character vector has length p, a zero leading entry, and entry n equal to
the m-th power residue symbol (n/p)_m in {1, zeta, ..., zeta^(m-1)} with
zeta = exp(2*pi*i/m).  Its tail is the diagonal of a traceless diagonal
unitary that turns the (p, p-1) Fourier ETF into a companion frame.
"""

from dataclasses import dataclass
from math import isqrt

import numpy as np

from .errors import InvalidArgument


def is_prime(n):
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for f in range(3, isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


def odd_primes(upto):
    return [p for p in range(3, upto + 1) if is_prime(p)]


def _check_odd_prime(p):
    if int(p) != p or p < 3 or not is_prime(int(p)):
        raise InvalidArgument(f"{p!r} is not an odd prime")


def legendre(n, p):
    """Legendre symbol via Euler's criterion; n must be a unit mod p."""
    _check_odd_prime(p)
    if n % p == 0:
        raise InvalidArgument(f"Legendre symbol undefined for n = {n} = 0 mod {p}")
    r = pow(n, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def multiplicative_order(c, p):
    c %= p
    if c == 0:
        return 0
    k, x = 1, c
    while x != 1:
        x = x * c % p
        k += 1
    return k


def primitive_root_of_order(p, m):
    """Smallest c in 2..p-1 with multiplicative order exactly m mod p."""
    _check_odd_prime(p)
    if m < 2 or (p - 1) % m:
        raise InvalidArgument(f"order {m} does not divide p - 1 = {p - 1}")
    for c in range(2, p):
        if multiplicative_order(c, p) == m:
            return c
    raise AssertionError(f"no element of order {m} mod {p}")  # cyclic group: unreachable


def elements_of_order(p, m):
    return [c for c in range(2, p) if multiplicative_order(c, p) == m]


@dataclass(frozen=True)
class CharacterVector:
    p: int
    m: int
    c: int
    entries: np.ndarray

    @property
    def tail(self):
        return self.entries[1:]

    @property
    def exponents(self):
        """k with entries[n] = zeta^k, n = 1..p-1 (entry 0 is excluded)."""
        k = np.angle(self.tail) * self.m / (2 * np.pi)
        return np.rint(k).astype(int) % self.m


def power_residue_exponents(p, m, c=None):
    """Discrete logs k[n] of n^((p-1)/m) base c, for n = 1..p-1."""
    _check_odd_prime(p)
    if m < 2 or (p - 1) % m:
        raise InvalidArgument(f"order {m} does not divide p - 1 = {p - 1}")
    if c is None:
        c = primitive_root_of_order(p, m)
    elif multiplicative_order(c, p) != m:
        raise InvalidArgument(f"{c} does not have order {m} mod {p}")
    table = {pow(c, k, p): k for k in range(m)}
    e = (p - 1) // m
    out = []
    for n in range(1, p):
        r = pow(n, e, p)
        if r not in table:
            raise AssertionError(f"{n}^{e} mod {p} = {r} is not a power of {c}")
        out.append(table[r])
    return out


def character_vector(p, m, c=None):
    """Return [0, (1/p)_m, ..., ((p-1)/p)_m] as a CharacterVector.

    For m = 2 the entries are exactly the real Legendre symbols.
    """
    exps = power_residue_exponents(p, m, c)
    c = primitive_root_of_order(p, m) if c is None else c
    entries = np.zeros(p, dtype=np.complex128)
    if m == 2:
        entries[1:] = [1.0 if k == 0 else -1.0 for k in exps]
    else:
        roots = _roots_of_unity(m)
        entries[1:] = roots[np.asarray(exps)]
    return CharacterVector(p=p, m=m, c=c, entries=entries)


def _roots_of_unity(m):
    roots = np.exp(2j * np.pi * np.arange(m) / m)
    # snap the exact lattice points so e.g. i is 1j and not 6e-17 + 1j
    for k in range(m):
        if (4 * k) % m == 0:
            roots[k] = 1j ** (4 * k // m)
    return roots
