import numpy as np
import pytest

from symdefect.constructions import etf_fourier_unitary, sic_vectors
from symdefect.core import gram_from_vectors, unitary_from_vectors, vectors_from_gram, GramMatrix
from symdefect.defect import build_linear_system, gauge_directions, kernel_basis, restricted_defect, PhasePattern
from symdefect.family import (
    FAMILY_TOL,
    SIC3_COORDINATES,
    equivalent_by_invariants,
    equivalent_exhaustive,
    etf_prime_delta,
    evaluate_family,
    export_family,
    find_exact_lines,
    gram_of,
    sic3_base,
    sic3_families,
    triple_invariants,
    verify_family,
)


@pytest.fixture(scope="module")
def families():
    return sic3_families(starts=150)


def test_t_zero_is_identity_map():
    U = sic3_base()
    R = kernel_basis(build_linear_system(U, 0))[0]
    V, res = evaluate_family(U, R, 0.0)
    assert np.array_equal(V, U.entries) and res < 1e-12


def test_gauge_direction_is_exact(rng):
    U = sic3_base()
    pairs = np.array(np.triu_indices(9, 1)).T
    theta = rng.uniform(0, 2 * np.pi, 9)
    R = PhasePattern.from_columns(gauge_directions(9, pairs) @ theta, pairs, 9)
    assert verify_family(U, R) < 1e-12


def test_families_verified(families):
    assert len(families) >= 1
    for f in families:
        assert f.passes and f.max_residual <= FAMILY_TOL
        assert len(f.t_grid) == 256
        assert set(f.coordinates) == {"R23", "R26", "R48", "R89"}
        L = build_linear_system(f.base, 0)
        assert L.residual(f.direction.R) < 1e-12


def test_family_member_at_t037(families):
    for f in families:
        assert evaluate_family(f.base, f.direction, 0.37)[1] <= 1e-10


def test_members_reconstruct_to_sic(families):
    for f in families:
        for t in (0.37, 1.0, 2.5):
            G = GramMatrix(gram_of(f.member(t), 3), 3)
            v = vectors_from_gram(G)
            g = np.abs(gram_from_vectors(v).entries) ** 2
            assert np.abs(g[~np.eye(9, dtype=bool)] - 0.25).max() < 1e-12
            assert np.allclose(np.linalg.norm(v.vectors, axis=0), 1, atol=1e-12)


def test_off_constraint_direction_fails():
    U = sic3_base()
    basis = kernel_basis(build_linear_system(U, 0))
    rng = np.random.default_rng(3)
    for _ in range(5):
        c = rng.standard_normal(len(basis))
        R = PhasePattern(sum(ci * b.R for ci, b in zip(c, basis)))
        assert verify_family(U, R) > 1e-3


def test_families_equivalent_to_each_other(families):
    t = 0.37
    grams = [gram_of(f.member(t), 3) for f in families]
    for G in grams[1:]:
        assert equivalent_by_invariants(grams[0], G)
        assert equivalent_exhaustive(grams[0], G) is not None


def test_distinct_parameters_not_equivalent(families):
    f = families[0]
    G1, G2 = gram_of(f.member(0.37), 3), gram_of(f.member(0.9), 3)
    assert not equivalent_by_invariants(G1, G2)
    assert equivalent_exhaustive(G1, G2) is None


def test_triple_invariants_phase_and_permutation_invariant(rng):
    G = gram_of(sic3_families(starts=40)[0].member(0.5), 3)
    p = rng.permutation(9)
    E = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 9)))
    H = (E @ G @ E.conj().T)[p][:, p]
    assert np.allclose(triple_invariants(G), triple_invariants(H))
    assert equivalent_exhaustive(G, H) is not None


def test_sic4_has_no_candidates():
    U = unitary_from_vectors(sic_vectors(4))
    assert restricted_defect(U).free_parameters == 0
    assert find_exact_lines(U, 0, starts=5) == []


def test_etf_prime_delta():
    assert [etf_prime_delta(k) for k in (2, 3, 5, 7, 13)] == [0, 4, 36, 120, 924]
    with pytest.raises(ValueError):
        etf_prime_delta(4)


@pytest.mark.parametrize("k", [2, 3, 5, 7])
def test_etf_prime_formula_matches_computation(k):
    assert restricted_defect(etf_fourier_unitary(k)).delta_paper == etf_prime_delta(k)


def test_export(families):
    text = export_family(families[0], "sic(3)")
    assert text.startswith("# structure: sic(3)")
    assert text.count("\n") > 256
    assert "t,residual" in text


def test_coordinate_labels():
    assert SIC3_COORDINATES == ((2, 3), (2, 6), (4, 8), (8, 9))
