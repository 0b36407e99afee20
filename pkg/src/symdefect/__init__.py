"""Isolation of symmetric POVMs via the restricted defect.

A rank-one POVM with ``N`` elements in dimension ``d`` corresponds to the
Hermitian unitary ``U = I - (2d/N) G`` built from its Gram matrix ``G``.
Phase perturbations ``U o exp(i t R)`` that keep ``U`` unitary to first
order form the kernel of a real linear system; after removing the
directions generated by per-vector phases, a zero-dimensional kernel shows
that the structure admits no continuous family with the same overlaps.
"""

from .core import (
    DEFAULT_TOLERANCES,
    GramMatrix,
    HermitianUnitary,
    StructureError,
    SymmetryMatrix,
    Tolerances,
    VectorSet,
    gram_from_unitary,
    gram_from_vectors,
    unitary_from_gram,
    unitary_from_vectors,
    vectors_from_gram,
    verify_povm,
    verify_symmetry,
)
from .constructions import get_structure, registry
from .defect import DefectReport, PhasePattern, build_linear_system, free_parameters, restricted_defect
from .family import evaluate_family, sic3_families, verify_family
from .kernels import BACKEND
from .robustness import confidence_region, f_bound, singular_sweep

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DEFAULT_TOLERANCES",
    "DefectReport",
    "GramMatrix",
    "HermitianUnitary",
    "PhasePattern",
    "StructureError",
    "SymmetryMatrix",
    "Tolerances",
    "VectorSet",
    "build_linear_system",
    "confidence_region",
    "evaluate_family",
    "f_bound",
    "free_parameters",
    "get_structure",
    "gram_from_unitary",
    "gram_from_vectors",
    "registry",
    "restricted_defect",
    "sic3_families",
    "singular_sweep",
    "unitary_from_gram",
    "unitary_from_vectors",
    "vectors_from_gram",
    "verify_family",
    "verify_povm",
    "verify_symmetry",
]
