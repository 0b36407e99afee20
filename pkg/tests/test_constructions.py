import itertools

import numpy as np
import pytest

from symdefect.constructions import (
    KS_ORTHOGONAL_PAIRS,
    available_sic_dimensions,
    etf_fourier_omega,
    etf_fourier_unitary,
    fourier_matrix,
    get_structure,
    hoggar_lines,
    ks_set,
    mub_prime,
    mub_symmetry,
    mub_vectors,
    orthogonal_pair_count,
    registry,
    sic_vectors,
    sic_weyl_heisenberg,
    symmetry_matrix,
    weyl_operators,
)
from symdefect.core import StructureError, gram_from_vectors, unitary_from_vectors, verify_povm, verify_symmetry


def test_fourier_and_weyl():
    F = fourier_matrix(5)
    assert np.allclose(F @ F.conj().T, 5 * np.eye(5))
    W = weyl_operators(3)
    w = np.exp(2j * np.pi / 3)
    assert np.allclose(W.Z @ W.X, w * W.X @ W.Z)


@pytest.mark.parametrize("d", [2, 3] + list(range(4, 17)))
def test_sic_equiangular(d):
    if d >= 4:
        assert d in available_sic_dimensions()
    v = sic_vectors(d)
    g = np.abs(gram_from_vectors(v).entries) ** 2
    off = g[~np.eye(d * d, dtype=bool)]
    assert np.abs(off - 1 / (d + 1)).max() < 1e-12
    assert verify_povm(v) < 1e-10


def test_sic3_ordering_s_slowest():
    v = sic_weyl_heisenberg(np.array([1, -1, 0]) / np.sqrt(2))
    assert np.allclose(v.vectors[:, 0], np.array([1, -1, 0]) / np.sqrt(2))
    # index 1 is Z|phi>, index 3 is X|phi>
    w = np.exp(2j * np.pi / 3)
    assert np.allclose(v.vectors[:, 1], np.array([1, -w, 0]) / np.sqrt(2))
    assert np.allclose(v.vectors[:, 3], np.roll(v.vectors[:, 0], 1))


def test_hoggar_lines():
    v = hoggar_lines()
    assert (v.d, v.N) == (8, 64)
    g = np.abs(gram_from_vectors(v).entries) ** 2
    assert np.abs(g[~np.eye(64, dtype=bool)] - 1 / 9).max() < 1e-12
    assert verify_povm(v) < 1e-12


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_etf_fourier(k):
    U = etf_fourier_unitary(k)
    d, N = k * (k - 1) // 2, k * k
    assert (U.d, U.N) == (d, N)
    assert U.unitarity_residual() < 1e-12
    assert np.allclose(np.abs(U.entries), 1 / k)
    assert np.allclose(np.diag(U.entries), 1 - 2 * d / N)
    om = etf_fourier_omega(k)
    assert np.allclose(om, om.conj().T)


def test_etf_k2_complement_is_simplex():
    U = etf_fourier_unitary(2)
    V = -U.entries  # complement: d = 3, N = 4
    G = (4 / 6) * (np.eye(4) - V)
    assert np.allclose(G @ G, (4 / 3) * G)
    assert np.allclose(np.abs(G[~np.eye(4, dtype=bool)]) ** 2, 1 / 9)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 7, 8, 9])
def test_mub_symmetry(d):
    v = mub_vectors(d)
    assert verify_symmetry(v, mub_symmetry(d, d + 1)) < 1e-12
    assert verify_povm(v) < 1e-12


def test_mub_prime_matches_galois_up_to_relabelling():
    a = mub_prime(5)
    assert len(a) == 6
    for A, B in itertools.combinations(a, 2):
        assert np.abs(np.abs(A.conj().T @ B) ** 2 - 0.2).max() < 1e-12


def _contexts(v):
    g = np.abs(v.vectors.conj().T @ v.vectors) < 1e-10
    return [c for c in itertools.combinations(range(v.N), v.d) if all(g[a, b] for a, b in itertools.combinations(c, 2))]


@pytest.mark.parametrize("name", sorted(KS_ORTHOGONAL_PAIRS))
def test_ks_sets(name):
    v = ks_set(name)
    assert orthogonal_pair_count(v) == KS_ORTHOGONAL_PAIRS[name]
    assert verify_povm(v) < 1e-10
    unitary_from_vectors(v)


@pytest.mark.parametrize("name, contexts", [("cabello-18", 9), ("lisonek-21", 7)])
def test_ks_no_noncontextual_assignment(name, contexts):
    """No 0/1 assignment puts exactly one 1 in every context (each vector
    lies in two contexts and the number of contexts is odd)."""
    v = ks_set(name)
    ctx = _contexts(v)
    assert len(ctx) == contexts
    membership = np.zeros(v.N, int)
    for c in ctx:
        membership[list(c)] += 1
    assert np.all(membership == 2)
    bits = (np.arange(2**v.N)[:, None] >> np.arange(v.N)) & 1
    ok = np.ones(2**v.N, bool)
    for c in ctx:
        ok &= bits[:, list(c)].sum(axis=1) == 1
    assert not ok.any()


def test_unknown_ks_set():
    with pytest.raises(ValueError):
        ks_set("peres-33")


def test_registry_and_get_structure():
    assert set(registry()) == {"mub", "mub-pair-fourier", "sic", "hoggar", "etf-fourier", "ks"}
    st = get_structure("mub", 4, 3)
    assert (st.d, st.N) == (4, 12)
    assert get_structure("sic", 5).accuracy < 1e-30
    with pytest.raises(ValueError):
        get_structure("nonsense")


def test_symmetry_matrix_helper():
    S = symmetry_matrix("ETF", d=3, N=9)
    assert S.entries[0, 1] == pytest.approx(0.25)
    with pytest.raises(ValueError):
        symmetry_matrix("XYZ")


def test_structure_error_on_bad_etf():
    with pytest.raises(ValueError):
        etf_fourier_omega(1)
    with pytest.raises(StructureError):
        unitary_from_vectors(sic_vectors(3).__class__(np.hstack([np.eye(3), np.eye(3)[:, :1]])))
