import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equiframe.errors import InvalidArgument
from equiframe.linalg import apply_dft, dft_matrix, gram, inner, is_unitary, norm_sq
from equiframe.frames import fourier_etf


def naive_dft(v):
    n = len(v)
    return [sum(v[k] * cmath.exp(-2j * math.pi * j * k / n) for k in range(n)) / math.sqrt(n)
            for j in range(n)]


def test_dft_2():
    expected = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    assert np.allclose(dft_matrix(2), expected, atol=1e-15)


def test_dft_5_matches_displayed_powers():
    w = cmath.exp(-2j * math.pi / 5)
    rows = [[0, 0, 0, 0, 0], [0, 1, 2, 3, 4], [0, 2, 4, 1, 3], [0, 3, 1, 4, 2], [0, 4, 3, 2, 1]]
    displayed = np.array([[w ** e for e in r] for r in rows]) / math.sqrt(5)
    assert np.allclose(dft_matrix(5), displayed, atol=1e-14)


@pytest.mark.parametrize("n", range(1, 65))
def test_dft_unitary(n):
    W = dft_matrix(n)
    assert np.allclose(W @ W.conj().T, np.eye(n), rtol=1e-10, atol=1e-12)
    assert is_unitary(W)


@pytest.mark.parametrize("n", [2, 3, 5, 8, 13, 32])
def test_dft_fourth_power_identity(n):
    W = dft_matrix(n)
    assert np.allclose(np.linalg.matrix_power(W, 4), np.eye(n), atol=1e-10)
    ev = np.linalg.eigvals(W)
    assert np.all(np.min(np.abs(ev[:, None] - np.array([1, -1, 1j, -1j])), axis=1) < 1e-9)


def test_dft_invalid():
    with pytest.raises(InvalidArgument):
        dft_matrix(0)


def test_apply_dft_delta():
    assert np.allclose(apply_dft([1, 0, 0, 0]), [0.5] * 4, atol=1e-15)


def test_apply_dft_legendre_vectors():
    u5 = np.array([0, 1, -1, -1, 1])
    assert np.allclose(apply_dft(u5), u5, atol=1e-12)
    u7 = np.array([0, 1, 1, -1, 1, -1, -1])
    assert np.allclose(apply_dft(u7), -1j * u7, atol=1e-12)


finite = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=24))
def test_apply_dft_matches_naive_and_parseval(pairs):
    v = np.array([complex(a, b) for a, b in pairs])
    assert np.allclose(apply_dft(v), naive_dft(list(v)), atol=1e-12 * max(1.0, np.abs(v).sum()))
    assert math.isclose(math.sqrt(norm_sq(apply_dft(v))), math.sqrt(norm_sq(v)),
                        rel_tol=1e-10, abs_tol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=16))
def test_inner_self_is_norm(pairs):
    v = np.array([complex(a, b) for a, b in pairs])
    val = inner(v, v)
    assert abs(val.imag) < 1e-12
    assert math.isclose(val.real, norm_sq(v), rel_tol=1e-12, abs_tol=1e-12)


def test_inner_conjugates_second_slot():
    assert inner([1j, 0], [1, 0]) == 1j
    assert inner([1, 0], [1j, 0]) == -1j
    assert inner([1, 0], [0, 1]) == 0


def test_inner_length_mismatch():
    with pytest.raises(InvalidArgument):
        inner([1, 2], [1, 2, 3])


def test_fourier_etf_p5_angle_by_root_sum():
    # oracle: |<f_j, f_k>|^2 = |(1/d) sum_{n=1}^{d} w^{n(j-k)}|^2 by direct summation
    p, d = 5, 4
    w = cmath.exp(-2j * math.pi / p)
    F = fourier_etf(p)
    for j in range(p):
        for k in range(p):
            if j == k:
                continue
            oracle = abs(sum(w ** (n * (j - k)) for n in range(1, p)) / d) ** 2
            assert math.isclose(oracle, 1 / 16, rel_tol=1e-12)
            assert math.isclose(abs(inner(F.column(j), F.column(k))) ** 2, oracle,
                                rel_tol=1e-10)


def test_gram_orientation():
    a = np.array([[1, 0], [0, 1j]])
    g = gram(a)
    assert g[1, 1] == 1
    assert g[0, 1] == 0
