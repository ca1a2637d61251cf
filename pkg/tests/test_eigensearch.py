import itertools

import numpy as np
import pytest

from equiframe.characters import character_vector, is_prime
from equiframe.eigensearch import (
    _brute_force,
    balanced_tail_count,
    conjugate_eigenvector_check,
    eigenvalue_of,
    expected_legendre_eigenvalue,
    legendre_eigenvalue,
    sign_eigenvector_search,
    uniqueness_report,
)
from equiframe.errors import InvalidArgument, SearchBudgetExceeded
from equiframe.linalg import dft_matrix


def hit_vectors(report):
    return [tuple(int(x) for x in v) for v, _ in report.hits]


def test_search_5(backend):
    rep = sign_eigenvector_search(5)
    assert hit_vectors(rep) == [(0, 1, -1, -1, 1)]
    assert rep.hits[0][1] == 1


def test_search_7(backend):
    rep = sign_eigenvector_search(7)
    assert hit_vectors(rep) == [(0, 1, 1, -1, 1, -1, -1)]
    assert rep.hits[0][1] == -1j


@pytest.mark.parametrize("n", [6, 9])
def test_search_no_hits(n, backend):
    assert sign_eigenvector_search(n).hits == []


def test_even_sizes_examine_nothing():
    rep = sign_eigenvector_search(10)
    assert rep.candidates_examined == 0 and rep.hits == []


@pytest.mark.parametrize("n", range(3, 18))
def test_pruning_is_sound(n, backend):
    # oracle: every standardized sign vector, balanced or not, against the full DFT
    pruned = sign_eigenvector_search(n)
    brute = sign_eigenvector_search(n, prune=False)
    assert brute.candidates_examined == 2 ** (n - 2)
    assert hit_vectors(pruned) == hit_vectors(brute)
    assert [lam for _, lam in pruned.hits] == [lam for _, lam in brute.hits]


def test_brute_force_tiny_by_itertools():
    # second oracle: plain itertools + explicit matrix for n = 7
    W = dft_matrix(7)
    found = []
    for tail in itertools.product((1, -1), repeat=5):
        u = np.array((0, 1) + tail, dtype=float)
        if eigenvalue_of(u, W) is not None:
            found.append(tuple(int(x) for x in u))
    hits, _ = _brute_force(7)
    assert found == [tuple(int(x) for x in v) for v, _ in hits]


@pytest.mark.parametrize("n", [11, 13, 19, 23])
def test_backends_agree(n, monkeypatch):
    monkeypatch.delenv("EQUIFRAME_DISABLE_JIT", raising=False)
    a = sign_eigenvector_search(n)
    monkeypatch.setenv("EQUIFRAME_DISABLE_JIT", "1")
    b = sign_eigenvector_search(n)
    assert hit_vectors(a) == hit_vectors(b)
    assert a.backend != b.backend


def test_global_sign_symmetry():
    for p in (5, 7, 11, 13):
        rep = sign_eigenvector_search(p)
        u, lam = rep.hits[0]
        neg = -u.astype(float)
        assert np.allclose(dft_matrix(p) @ neg, lam * neg, atol=1e-9)


def test_hits_invariant_holds(backend):
    for n in (13, 17):
        for u, lam in sign_eigenvector_search(n).hits:
            assert u[0] == 0 and u[1] == 1 and set(np.abs(u[1:])) == {1}
            assert np.max(np.abs(dft_matrix(n) @ u - lam * u)) <= 1e-9


def test_budget_exceeded_carries_partial(backend):
    with pytest.raises(SearchBudgetExceeded) as info:
        sign_eigenvector_search(29, budget=1)
    assert info.value.partial is not None
    assert 0.0 < info.value.progress < 1.0


def test_search_rejects_small():
    with pytest.raises(InvalidArgument):
        sign_eigenvector_search(2)


def test_balanced_tail_count():
    assert balanced_tail_count(5) == 3
    assert balanced_tail_count(6) == 0
    assert balanced_tail_count(31) == 77558760


def test_uniqueness_report_13(backend):
    rows = uniqueness_report(13)
    hits = {r.n: r.hits for r in rows}
    assert hits == {3: 1, 4: 0, 5: 1, 6: 0, 7: 1, 8: 0, 9: 0, 10: 0, 11: 1, 12: 0, 13: 1}
    by_n = {r.n: r for r in rows}
    assert by_n[13].eigenvalues == [1]
    assert by_n[11].eigenvalues == [-1j]
    assert all(r.ok for r in rows)


@pytest.mark.parametrize("p", [p for p in range(3, 60) if is_prime(p)])
def test_legendre_eigenvalue_pattern(p):
    assert legendre_eigenvalue(p) == expected_legendre_eigenvalue(p)


def test_conjugate_check_examples():
    z = conjugate_eigenvector_check(character_vector(5, 4).entries)
    assert z is not None and abs(abs(z) - 1) < 1e-12
    assert conjugate_eigenvector_check(character_vector(5, 2).entries) == pytest.approx(1)
    rng = np.random.default_rng(11)
    f = np.concatenate([[0], np.exp(2j * np.pi * rng.random(6))])
    assert conjugate_eigenvector_check(f) is None
    assert conjugate_eigenvector_check(np.zeros(5)) is None


def test_report_json_shape():
    d = sign_eigenvector_search(5).to_dict()
    assert set(d) == {"n", "hits", "candidates", "seconds"}
    assert d["hits"][0] == {"vector": [0, 1, -1, -1, 1], "lambda": [1.0, 0.0]}
