import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symdefect.constructions import etf_fourier_unitary, ks_set, mub_vectors, sic_vectors
from symdefect.core import HermitianUnitary, unitary_from_vectors
from symdefect.defect import (
    PhasePattern,
    build_linear_system,
    defect_invariance_check,
    gauge_directions,
    gauge_subspace,
    kernel_basis,
    restricted_defect,
    spanning_tree_pairs,
    support_and_counts,
    system_operator,
)


def test_two_mub_qubit_worked_example():
    rep = restricted_defect(unitary_from_vectors(mub_vectors(2, 2)))
    assert (rep.z, rep.tau_paper, rep.r, rep.delta_paper) == (2, 1, 1, 0)
    assert rep.free_parameters == 0 and rep.isolated


def test_sic3_counts():
    rep = restricted_defect(unitary_from_vectors(sic_vectors(3)))
    assert (rep.tau_paper, rep.r, rep.delta_paper) == (28, 24, 4)
    assert rep.nullity == 4 and rep.gauge_dim == 0


def test_counts_without_gauge_fixing():
    U = unitary_from_vectors(sic_vectors(3))
    c = support_and_counts(U, None)
    assert len(c.columns) == 36 and len(c.fixed) == 0
    rep = restricted_defect(U, gauge_row=None)
    assert rep.gauge_dim == 8 and rep.free_parameters == 4


def test_gauge_row_out_of_range():
    with pytest.raises(ValueError):
        support_and_counts(unitary_from_vectors(sic_vectors(2)), 7)


def test_phase_pattern_validation_and_coordinates():
    with pytest.raises(ValueError):
        PhasePattern(np.ones((2, 2)))
    R = PhasePattern.from_columns(np.array([0.5]), np.array([[1, 2]]), 3)
    assert R.coordinates([(2, 3)]) == {"R23": 0.5}
    assert R.R[2, 1] == -0.5


def test_matrix_free_operator_matches_dense(rng):
    U = unitary_from_vectors(mub_vectors(4, 3))
    L = build_linear_system(U, 0)
    op = system_operator(U.entries, L.columns)
    x = rng.standard_normal(L.shape[1])
    y = rng.standard_normal(L.shape[0])
    assert np.allclose(op.matvec(x), L.matrix @ x, atol=1e-13)
    assert np.allclose(op.rmatvec(y), L.matrix.T @ y, atol=1e-13)


def _structures():
    return {
        "mub4": unitary_from_vectors(mub_vectors(4)),
        "sic3": unitary_from_vectors(sic_vectors(3)),
        "sic4": unitary_from_vectors(sic_vectors(4)),
        "etf4": etf_fourier_unitary(4),
        "cabello": unitary_from_vectors(ks_set("cabello-18")),
    }


@pytest.mark.parametrize("name", ["mub4", "sic3", "sic4", "etf4", "cabello"])
def test_gauge_directions_lie_in_kernel(name):
    U = _structures()[name]
    L = build_linear_system(U, None)
    smax = np.linalg.svd(L.matrix, compute_uv=False)[0]
    D = gauge_directions(U.N, L.columns)
    res = np.abs(L.matrix @ D).max()
    assert res <= 1e-8 * smax


@pytest.mark.parametrize("name", ["mub4", "sic3", "cabello"])
def test_gauge_subspace_dimension(name):
    U = _structures()[name]
    assert gauge_subspace(U, None).shape[1] == U.N - 1
    L = build_linear_system(U, None)
    G = gauge_subspace(U, None)
    assert np.abs(L.matrix @ G).max() < 1e-12


@pytest.mark.parametrize("name", ["mub4", "sic3", "etf4", "cabello"])
def test_rank_invariant_across_gauge_rows(name):
    U = _structures()[name]
    free = {restricted_defect(U, gauge_row=g).free_parameters for g in (0, 1, U.N - 1)}
    assert len(free) == 1


def test_spanning_tree_fixing_kills_gauge():
    U = unitary_from_vectors(ks_set("lisonek-21"))
    tree = spanning_tree_pairs(U)
    assert len(tree) == U.N - 1
    rep = restricted_defect(U, gauge_row=None, fixed_pairs=tree)
    assert rep.gauge_dim == 0 and rep.nullity == rep.free_parameters == 0


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**31), which=st.sampled_from(["mub4", "sic3", "etf4", "cabello"]))
def test_invariance_under_conjugation(seed, which):
    U = _structures()[which]
    rng = np.random.default_rng(seed)
    assert defect_invariance_check(U, rng.permutation(U.N), rng.uniform(0, 2 * np.pi, U.N))


def test_kernel_basis_spans_solutions():
    U = unitary_from_vectors(sic_vectors(3))
    L = build_linear_system(U, 0)
    ks = kernel_basis(L)
    assert len(ks) == 4
    for R in ks:
        assert L.residual(R.R) < 1e-12


def test_iterative_matches_dense_for_isolated():
    U = unitary_from_vectors(sic_vectors(5))
    a = restricted_defect(U, method="dense")
    b = restricted_defect(U, method="iterative")
    assert (a.r, a.free_parameters) == (b.r, b.free_parameters)
    assert b.sigma1 == pytest.approx(a.sigma1, rel=1e-4)


def test_iterative_with_gauge_deflation():
    U = unitary_from_vectors(mub_vectors(4))
    a = restricted_defect(U, gauge_row=None, method="dense")
    b = restricted_defect(U, gauge_row=None, method="iterative")
    assert a.free_parameters == b.free_parameters == 0
    assert a.gauge_dim == b.gauge_dim == 19


def test_iterative_inconclusive_raises():
    with pytest.raises(RuntimeError, match="inconclusive"):
        restricted_defect(etf_fourier_unitary(4), method="iterative", n_smallest=5)


def test_unknown_method():
    with pytest.raises(ValueError):
        restricted_defect(unitary_from_vectors(sic_vectors(3)), method="magic")


def test_report_serialisation():
    rep = restricted_defect(unitary_from_vectors(sic_vectors(2)))
    d = rep.to_dict()
    assert "svals" not in d and d["isolated"] is True
    assert '"free_parameters": 0' in rep.to_json()
    assert "isolated" in rep.summary()


def test_non_hermitian_input_rejected_by_validate():
    U = HermitianUnitary(np.diag([1, 1j]), 1)
    with pytest.raises(Exception):
        U.validate()
