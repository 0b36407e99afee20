import numpy as np
import pytest
from conftest import haar_unitary, union_of_bases
from hypothesis import given, settings
from hypothesis import strategies as st

from symdefect.constructions import mub_vectors, sic_vectors
from symdefect.core import (
    DEFAULT_TOLERANCES,
    GramMatrix,
    HermitianUnitary,
    StructureError,
    SymmetryMatrix,
    VectorSet,
    gram_from_unitary,
    gram_from_vectors,
    largest_log_gap,
    rank_with_tolerance,
    support_pairs,
    unitary_from_gram,
    unitary_from_vectors,
    vectors_from_gram,
    verify_povm,
    verify_symmetry,
)


def test_tolerances_defaults_and_override():
    t = DEFAULT_TOLERANCES
    assert (t.norm, t.unit, t.povm, t.zero, t.rank) == (1e-12, 1e-10, 1e-10, 1e-10, 1e-8)
    assert t.with_(rank=1e-6).rank == 1e-6
    assert t.rank == 1e-8


def test_vectorset_rejects_unnormalised():
    with pytest.raises(StructureError):
        VectorSet(np.array([[1.0, 0.0], [0.0, 2.0]]))
    v = VectorSet.from_list([[1, 1], [1, -1]], normalize=True)
    assert v.d == 2 and v.N == 2
    assert np.allclose(np.linalg.norm(v.vectors, axis=0), 1)


def test_vectorset_is_readonly():
    v = VectorSet(np.eye(2))
    with pytest.raises(ValueError):
        v.vectors[0, 0] = 3


def test_gram_povm_residual_zero_for_mub():
    G = gram_from_vectors(mub_vectors(3))
    assert G.povm_residual() < 1e-12
    assert np.allclose(G.spectrum()[:3], 4.0)


def test_unitary_from_gram_rejects_non_frame():
    v = VectorSet.from_list([[1, 0], [1, 1]], normalize=True)
    with pytest.raises(StructureError):
        unitary_from_vectors(v)


def test_unitary_properties_sic():
    U = unitary_from_vectors(sic_vectors(3))
    assert U.unitarity_residual() < 1e-12
    assert U.hermiticity_residual() < 1e-14
    assert U.diagonal_residual() < 1e-14
    assert U.diagonal_value == pytest.approx(1 - 6 / 9)
    assert len(U.support) == 36


def test_support_pairs_of_mub_excludes_same_basis():
    U = unitary_from_vectors(mub_vectors(2, 2))
    pairs = {tuple(p) for p in support_pairs(U.entries)}
    assert (0, 1) not in pairs and (2, 3) not in pairs
    assert len(pairs) == 4


@settings(max_examples=30, deadline=None)
@given(d=st.integers(2, 5), m=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_round_trip_vectors_gram_unitary(d, m, seed):
    rng = np.random.default_rng(seed)
    v = VectorSet(union_of_bases(d, m, rng))
    G = gram_from_vectors(v)
    U = unitary_from_gram(G)
    G2 = gram_from_unitary(U)
    assert np.abs(G2.entries - G.entries).max() <= 1e-10
    w = vectors_from_gram(G2)
    assert np.abs(gram_from_vectors(w).entries - G.entries).max() <= 1e-10
    # the factorisation differs from v by one global unitary
    W = w.vectors @ v.vectors.conj().T * (d / v.N)
    assert np.abs(W @ W.conj().T - np.eye(d)).max() <= 1e-10


@settings(max_examples=20, deadline=None)
@given(d=st.integers(2, 4), m=st.integers(2, 3), seed=st.integers(0, 2**32 - 1))
def test_conjugation_preserves_unitarity(d, m, seed):
    rng = np.random.default_rng(seed)
    U = unitary_from_vectors(VectorSet(union_of_bases(d, m, rng)))
    perm = rng.permutation(U.N)
    phases = rng.uniform(0, 2 * np.pi, U.N)
    V = U.conjugated(perm, phases)
    assert V.unitarity_residual() < 1e-10
    assert np.allclose(np.sort(np.abs(V.entries).ravel()), np.sort(np.abs(U.entries).ravel()))


def test_validate_raises_on_broken_unitary():
    U = HermitianUnitary(np.array([[0.5, 0.5], [0.5, 0.5]]), 1)
    with pytest.raises(StructureError):
        U.validate()


def test_verify_symmetry_detects_deviation():
    v = sic_vectors(3)
    S = SymmetryMatrix(np.full((9, 9), 0.25) + 0.75 * np.eye(9), "ETF(3,9)")
    assert verify_symmetry(v, S) < 1e-12
    a = v.vectors.copy()
    a[0, 2] *= -1
    assert verify_symmetry(VectorSet(a), S) > 1e-3
    assert verify_povm(v) < 1e-12


def test_gram_matrix_hermitian_symmetrised():
    g = np.array([[1, 0.5 + 1e-14j], [0.5, 1]])
    G = GramMatrix(g, 1)
    assert np.abs(G.entries - G.entries.conj().T).max() == 0


def test_rank_with_tolerance_and_gap():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((10, 4)) @ rng.standard_normal((4, 8))
    res = rank_with_tolerance(A)
    assert res.rank == 4
    k, gap = largest_log_gap(res.svals)
    assert k == 4 and gap > 8
    with pytest.raises(ValueError):
        rank_with_tolerance(A, tol=0)


def test_haar_unitary_helper():
    U = haar_unitary(4, np.random.default_rng(0))
    assert np.allclose(U @ U.conj().T, np.eye(4))
