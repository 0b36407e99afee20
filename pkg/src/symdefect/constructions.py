"""Generators for the structures whose isolation is studied.

* complete sets of mutually unbiased bases (prime and prime-power dimension)
  and subsets thereof;
* Weyl-Heisenberg SIC orbits from a fiducial vector, with packaged
  high-precision fiducials for ``d = 4..16`` and closed forms for ``d = 2, 3``;
* the Hoggar lines (64 vectors in dimension 8, three-qubit Pauli orbit);
* equiangular tight frames ETF(k(k-1)/2, k^2) built from ``F_k (x) F_k``;
* three Kochen-Specker sets (13 vectors in d=3, 18 in d=4, 21 in d=6);
* the prescribed-overlap matrices ``S``.

Embedded vector data is accepted only through validation predicates
(orthogonal-pair counts, frame residuals, equiangularity) which the test
suite checks; the particular numbers are replaceable.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from .core import (
    DEFAULT_TOLERANCES,
    HermitianUnitary,
    StructureError,
    SymmetryMatrix,
    VectorSet,
)
from .galois import galois_mub, is_prime, prime_power

__all__ = [
    "WeylOperators",
    "NamedStructure",
    "fourier_matrix",
    "weyl_operators",
    "etf_fourier_unitary",
    "etf_fourier_omega",
    "mub_prime",
    "mub_prime_power",
    "mub_vectors",
    "sic_weyl_heisenberg",
    "sic_fiducial",
    "sic_vectors",
    "available_sic_dimensions",
    "hoggar_fiducial",
    "hoggar_lines",
    "KS_SETS",
    "KS_ORTHOGONAL_PAIRS",
    "ks_set",
    "orthogonal_pair_count",
    "symmetry_matrix",
    "etf_symmetry",
    "mub_symmetry",
    "get_structure",
    "registry",
]


# --------------------------------------------------------------------------
# Fourier and Weyl operators


def fourier_matrix(k: int) -> np.ndarray:
    """Unnormalised Fourier matrix ``(F_k)_{st} = w^{st}``, ``w = e^{2 pi i/k}``."""
    if k < 2:
        raise ValueError("k must be at least 2")
    s = np.arange(k)
    return np.exp(2j * np.pi * (np.outer(s, s) % k) / k)


@dataclass(frozen=True)
class WeylOperators:
    """Shift ``X|j> = |j+1 mod d>`` and clock ``Z|j> = w^j |j>``."""

    d: int
    X: np.ndarray
    Z: np.ndarray
    omega: complex

    def displacement(self, s: int, t: int) -> np.ndarray:
        """``X^s Z^t``."""
        return np.linalg.matrix_power(self.X, s % self.d) @ np.linalg.matrix_power(self.Z, t % self.d)


def weyl_operators(d: int) -> WeylOperators:
    if d < 2:
        raise ValueError("d must be at least 2")
    X = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    w = np.exp(2j * np.pi / d)
    Z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return WeylOperators(d, X, Z, w)


# --------------------------------------------------------------------------
# Equiangular tight frames from F_k (x) F_k


def etf_fourier_omega(k: int) -> np.ndarray:
    """The unscaled matrix ``Omega[(i1 + k i2), (j1 + k j2)] = w^{i1 j2 - j1 i2}``."""
    if k < 2:
        raise ValueError("k must be at least 2")
    i1, i2 = np.meshgrid(np.arange(k), np.arange(k), indexing="xy")
    i1, i2 = i1.ravel(), i2.ravel()  # index = i1 + k*i2
    expo = (np.outer(i1, i2) - np.outer(i2, i1)) % k
    return np.exp(2j * np.pi * expo / k)


def etf_fourier_unitary(k: int, tol: float = 1e-12) -> HermitianUnitary:
    """Hermitian unitary of the ETF with ``N = k^2`` vectors in dimension
    ``d = k(k-1)/2``.

    ``U = Omega / k`` has diagonal ``1/k = 1 - 2d/N`` and off-diagonal moduli
    ``1/k``.  ``Omega`` is checked to be a column permutation of
    ``F_k (x) F_k``.  For ``k = 2`` the formula gives the trivial frame with
    ``d = 1``; its Naimark complement (``-U``, dimension 3) is the regular
    simplex ETF(3, 4) and has the same defect.
    """
    om = etf_fourier_omega(k)
    n = k * k
    F = fourier_matrix(k)
    FF = np.kron(F, F)  # row index k*a + b for F(x)F; re-index to i1 + k*i2
    perm_rows = np.array([k * (r % k) + r // k for r in range(n)])
    FF = FF[perm_rows][:, perm_rows]
    # column (j1, j2) of Omega equals column (a, b) = (j2, -j1) of F(x)F
    cols = np.array([(j // k) + k * ((-(j % k)) % k) for j in range(n)])
    if np.abs(FF[:, cols] - om).max() > tol:
        raise StructureError("Omega is not a column permutation of F_k (x) F_k")
    d = k * (k - 1) // 2
    U = HermitianUnitary(om / k, d)
    U.validate(max(tol, 1e-12))
    return U


# --------------------------------------------------------------------------
# Mutually unbiased bases


def mub_prime(p: int) -> list[np.ndarray]:
    """``p + 1`` mutually unbiased bases in prime dimension ``p``; each basis
    is a unitary whose columns are the vectors, the first is the identity."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return galois_mub(p)


def mub_prime_power(p: int, n: int, modulus: Sequence[int] | None = None) -> list[np.ndarray]:
    """``p^n + 1`` MUB over ``GF(p^n)`` (Galois ring ``GR(4, n)`` for
    ``p = 2``).  Defaults are provided for ``p^n`` in {4, 8, 9, 16, 25, 27, 32}."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n < 1:
        raise ValueError("n must be positive")
    return galois_mub(p**n, None if modulus is None else tuple(modulus))


def _mub_bases(d: int, modulus: Sequence[int] | None = None) -> list[np.ndarray]:
    if prime_power(d) is None:
        raise ValueError(f"no complete MUB construction for composite non-prime-power d={d}")
    return galois_mub(d, None if modulus is None else tuple(modulus))


def mub_vectors(
    d: int,
    m: int | None = None,
    subset: Sequence[int] | None = None,
    modulus: Sequence[int] | None = None,
) -> VectorSet:
    """Stack ``m`` bases of the complete set in dimension ``d`` (the first
    ``m`` by default, or an explicit ``subset`` of basis indices)."""
    bases = _mub_bases(d, modulus)
    if subset is None:
        m = len(bases) if m is None else m
        if not 1 <= m <= len(bases):
            raise ValueError(f"m must lie in 1..{len(bases)}")
        subset = range(m)
    subset = list(subset)
    labels = [f"B{b}:{j}" for b in subset for j in range(d)]
    return VectorSet(np.hstack([bases[b] for b in subset]), tuple(labels))


# --------------------------------------------------------------------------
# SIC-POVM


def sic_weyl_heisenberg(fiducial: Sequence[complex], norm_tol: float = DEFAULT_TOLERANCES.norm) -> VectorSet:
    """Orbit ``|phi_st> = X^s Z^t |phi_00>``, ordered with ``s`` slowest
    (index ``d*s + t``)."""
    f = np.asarray(fiducial, dtype=complex).ravel()
    d = f.size
    nrm = np.linalg.norm(f)
    if abs(nrm - 1) > max(norm_tol, 1e-15):
        raise StructureError(f"fiducial not normalised (|norm - 1| = {abs(nrm - 1):.3e})")
    # X^s Z^t f = roll(w^{tj} f_j, s)
    j = np.arange(d)
    cols = [np.roll(np.exp(2j * np.pi * t * j / d) * f, s) for s in range(d) for t in range(d)]
    labels = [f"{s}{t}" if d <= 10 else f"{s},{t}" for s in range(d) for t in range(d)]
    return VectorSet(np.array(cols).T, tuple(labels), norm_tol=max(norm_tol, 1e-14))


def _sic2_fiducial() -> np.ndarray:
    c = np.sqrt((1 + 1 / np.sqrt(3)) / 2)
    return np.array([c, np.exp(1j * np.pi / 4) * np.sqrt(1 - c * c)])


def _fiducial_resource(d: int):
    return resources.files("symdefect") / "data" / "sic" / f"d{d:02d}.json"


def available_sic_dimensions() -> list[int]:
    dims = [2, 3]
    for d in range(4, 64):
        if _fiducial_resource(d).is_file():
            dims.append(d)
    return dims


@lru_cache(maxsize=None)
def _load_fiducial(d: int) -> tuple[np.ndarray, float]:
    res = _fiducial_resource(d)
    if not res.is_file():
        raise ValueError(f"no packaged SIC fiducial for d={d}")
    doc = json.loads(res.read_text(encoding="utf-8"))
    if doc.get("d") != d or len(doc["entries"]) != d:
        raise StructureError(f"packaged fiducial for d={d} is inconsistent")
    f = np.array([complex(float(a), float(b)) for a, b in doc["entries"]])
    f.setflags(write=False)
    return f, float(doc.get("accuracy", "1e-16"))


def sic_fiducial(d: int) -> tuple[np.ndarray, float]:
    """A Weyl-Heisenberg SIC fiducial in dimension ``d`` and its declared
    accuracy.  ``d = 2`` (tetrahedral state) and ``d = 3`` (``(1,-1,0)/sqrt 2``)
    are exact; ``d >= 4`` come from the packaged high-precision data files."""
    if d == 2:
        return _sic2_fiducial(), 0.0
    if d == 3:
        return np.array([1, -1, 0], dtype=complex) / np.sqrt(2), 0.0
    f, acc = _load_fiducial(d)
    return f.copy(), acc


def sic_vectors(d: int) -> VectorSet:
    return sic_weyl_heisenberg(sic_fiducial(d)[0])


def hoggar_fiducial() -> np.ndarray:
    """A fiducial whose three-qubit Pauli orbit gives the Hoggar lines."""
    return np.array([1, 0, 0, 1, 0, 1, 1j, 1 + 1j]) / np.sqrt(6)


def hoggar_lines() -> VectorSet:
    """64 vectors ``X^a Z^b |psi>``, ``a, b`` in ``GF(2)^3`` (Pauli operators
    on three qubits), index ``8a + b`` with bit strings read big-endian."""
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Z = np.diag([1.0, -1.0]).astype(complex)
    I = np.eye(2, dtype=complex)
    f = hoggar_fiducial()
    cols, labels = [], []
    for a in itertools.product((0, 1), repeat=3):
        for b in itertools.product((0, 1), repeat=3):
            op = np.eye(1, dtype=complex)
            for ai, bi in zip(a, b):
                op = np.kron(op, (X if ai else I) @ (Z if bi else I))
            cols.append(op @ f)
            labels.append("".join(map(str, a)) + "|" + "".join(map(str, b)))
    return VectorSet(np.array(cols).T, tuple(labels))


# --------------------------------------------------------------------------
# Kochen-Specker sets

_YU_OH = [
    (1, 0, 0), (0, 1, 0), (0, 0, 1),
    (0, 1, -1), (0, 1, 1), (1, 0, -1), (1, 0, 1), (1, -1, 0), (1, 1, 0),
    (-1, 1, 1), (1, -1, 1), (1, 1, -1), (1, 1, 1),
]

_CABELLO_CONTEXTS = [
    [(0, 0, 0, 1), (0, 0, 1, 0), (1, 1, 0, 0), (1, -1, 0, 0)],
    [(0, 0, 0, 1), (0, 1, 0, 0), (1, 0, 1, 0), (1, 0, -1, 0)],
    [(1, -1, 1, -1), (1, -1, -1, 1), (1, 1, 0, 0), (0, 0, 1, 1)],
    [(1, -1, 1, -1), (1, 1, 1, 1), (1, 0, -1, 0), (0, 1, 0, -1)],
    [(0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 1), (1, 0, 0, -1)],
    [(1, -1, -1, 1), (1, 1, 1, 1), (1, 0, 0, -1), (0, 1, -1, 0)],
    [(1, 1, -1, 1), (1, 1, 1, -1), (1, -1, 0, 0), (0, 0, 1, 1)],
    [(1, 1, -1, 1), (-1, 1, 1, 1), (1, 0, 1, 0), (0, 1, 0, -1)],
    [(1, 1, 1, -1), (-1, 1, 1, 1), (1, 0, 0, 1), (0, 1, -1, 0)],
]

# 21 rays in C^6 labelled by the edges {i, j} of K7; rays are orthogonal
# exactly when their edges share a vertex, so the seven vertex stars are
# the seven orthonormal bases.  Components are powers of w = exp(2 pi i/3).
_LISONEK_EXPONENTS = {
    (0, 1): (0, 0, 0, 0, 0, 0), (0, 2): (0, 0, 1, 1, 2, 2), (0, 3): (0, 1, 0, 2, 1, 2),
    (0, 4): (0, 1, 2, 0, 2, 1), (0, 5): (0, 2, 1, 2, 0, 1), (0, 6): (0, 2, 2, 1, 1, 0),
    (1, 2): (0, 0, 2, 2, 1, 1), (1, 3): (0, 1, 2, 1, 2, 0), (1, 4): (0, 1, 1, 2, 0, 2),
    (1, 5): (0, 2, 0, 1, 1, 2), (1, 6): (0, 2, 1, 0, 2, 1),
    (2, 3): (0, 2, 2, 0, 0, 2), (2, 4): (0, 2, 0, 2, 2, 0), (2, 5): (0, 1, 1, 0, 1, 0),
    (2, 6): (0, 1, 0, 1, 0, 1),
    (3, 4): (0, 2, 1, 1, 1, 1), (3, 5): (0, 0, 0, 0, 2, 1), (3, 6): (0, 0, 1, 2, 0, 0),
    (4, 5): (0, 0, 2, 1, 0, 0), (4, 6): (0, 0, 0, 0, 1, 2),
    (5, 6): (0, 1, 2, 2, 2, 2),
}


def _yu_oh() -> VectorSet:
    return VectorSet.from_list(_YU_OH, labels=[str(v) for v in _YU_OH], normalize=True)


def _cabello() -> VectorSet:
    rays: list[tuple[int, ...]] = []
    for ctx in _CABELLO_CONTEXTS:
        for v in ctx:
            if v not in rays:
                rays.append(v)
    return VectorSet.from_list(rays, labels=[str(v) for v in rays], normalize=True)


def _lisonek() -> VectorSet:
    keys = sorted(_LISONEK_EXPONENTS)
    w = np.exp(2j * np.pi / 3)
    vecs = [w ** np.array(_LISONEK_EXPONENTS[k]) for k in keys]
    return VectorSet.from_list(vecs, labels=[f"{a}{b}" for a, b in keys], normalize=True)


KS_SETS: dict[str, Callable[[], VectorSet]] = {
    "yu-oh-13": _yu_oh,
    "cabello-18": _cabello,
    "lisonek-21": _lisonek,
}

#: Expected numbers of orthogonal pairs (zeros in the strict upper triangle
#: of the Gram matrix).
KS_ORTHOGONAL_PAIRS = {"yu-oh-13": 24, "cabello-18": 63, "lisonek-21": 105}


def orthogonal_pair_count(v: VectorSet, tol: float = DEFAULT_TOLERANCES.zero) -> int:
    g = v.vectors.conj().T @ v.vectors
    iu = np.triu_indices(v.N, 1)
    return int(np.sum(np.abs(g[iu]) <= tol))


def ks_set(name: str) -> VectorSet:
    """One of the embedded Kochen-Specker sets: ``yu-oh-13``,
    ``cabello-18`` or ``lisonek-21``."""
    try:
        build = KS_SETS[name]
    except KeyError:
        raise ValueError(f"unknown KS set {name!r}; choose from {sorted(KS_SETS)}") from None
    v = build()
    z = orthogonal_pair_count(v)
    if z != KS_ORTHOGONAL_PAIRS[name]:
        raise StructureError(f"{name}: {z} orthogonal pairs, expected {KS_ORTHOGONAL_PAIRS[name]}")
    return v


# --------------------------------------------------------------------------
# Prescribed overlaps


def etf_symmetry(d: int, N: int) -> SymmetryMatrix:
    """``S = I + (N-d)/(d(N-1)) (J - I)``, the overlaps of an ETF(d, N)."""
    if N <= d:
        raise ValueError("an ETF needs N > d")
    c = (N - d) / (d * (N - 1))
    s = np.full((N, N), c)
    np.fill_diagonal(s, 1.0)
    return SymmetryMatrix(s, f"ETF({d},{N})")


def mub_symmetry(d: int, m: int) -> SymmetryMatrix:
    """``S = I_{dm} + (1/d)(J_m - I_m) (x) J_d`` for ``m`` MUB in dimension ``d``."""
    if m < 2:
        raise ValueError("need at least two bases")
    s = np.eye(d * m) + np.kron(np.ones((m, m)) - np.eye(m), np.ones((d, d))) / d
    return SymmetryMatrix(s, f"MUB({m},{d})")


def symmetry_matrix(kind: str, **params: int) -> SymmetryMatrix:
    """``symmetry_matrix("ETF", d=3, N=9)`` or ``symmetry_matrix("MUB", d=4, m=5)``."""
    k = kind.upper()
    if k == "ETF":
        return etf_symmetry(int(params["d"]), int(params["N"]))
    if k == "MUB":
        return mub_symmetry(int(params["d"]), int(params["m"]))
    raise ValueError(f"unknown symmetry kind {kind!r}")


# --------------------------------------------------------------------------
# Registry


@dataclass(frozen=True)
class NamedStructure:
    """A named structure and the predicate data needed to validate it.

    ``payload`` is a :class:`VectorSet` (or, for Fourier ETFs, a
    :class:`HermitianUnitary`).  ``symmetry`` is the declared overlap matrix
    when there is one; ``accuracy`` the declared input accuracy.
    """

    name: str
    payload: VectorSet | HermitianUnitary
    symmetry: SymmetryMatrix | None = None
    accuracy: float = 0.0
    expected_orthogonal_pairs: int | None = None

    @property
    def d(self) -> int:
        return self.payload.d

    @property
    def N(self) -> int:
        return self.payload.N


def get_structure(kind: str, *args: str | int) -> NamedStructure:
    """Resolve a structure by kind and parameters, e.g. ``("mub", 4)``,
    ``("mub", 4, 3)`` (subset of 3 bases), ``("sic", 5)``, ``("hoggar",)``,
    ``("etf-fourier", 3)``, ``("ks", "yu-oh-13")``, ``("mub-pair-fourier", 6)``."""
    kind = kind.lower()
    if kind == "mub":
        d = int(args[0])
        m = int(args[1]) if len(args) > 1 else d + 1
        v = mub_vectors(d, m)
        return NamedStructure(f"mub({d},{m})", v, mub_symmetry(d, m), 1e-15)
    if kind == "mub-pair-fourier":
        d = int(args[0])
        F = fourier_matrix(d) / np.sqrt(d)
        v = VectorSet(np.hstack([np.eye(d), F]))
        return NamedStructure(f"mub-pair-fourier({d})", v, mub_symmetry(d, 2), 1e-15)
    if kind == "sic":
        d = int(args[0])
        f, acc = sic_fiducial(d)
        v = sic_weyl_heisenberg(f)
        return NamedStructure(f"sic({d})", v, etf_symmetry(d, d * d), acc)
    if kind == "hoggar":
        return NamedStructure("hoggar", hoggar_lines(), etf_symmetry(8, 64), 0.0)
    if kind == "etf-fourier":
        k = int(args[0])
        U = etf_fourier_unitary(k)
        return NamedStructure(f"etf-fourier({k})", U, etf_symmetry(U.d, U.N), 0.0)
    if kind == "ks":
        name = str(args[0])
        return NamedStructure(name, ks_set(name), None, 0.0, KS_ORTHOGONAL_PAIRS[name])
    raise ValueError(f"unknown structure kind {kind!r}")


def registry() -> dict[str, str]:
    """Structure kinds understood by :func:`get_structure` with usage hints."""
    return {
        "mub": "mub D [M]   first M bases of the complete set in prime-power dimension D",
        "mub-pair-fourier": "mub-pair-fourier D   {I, F_D/sqrt(D)} (any D)",
        "sic": f"sic D   Weyl-Heisenberg SIC, D in {available_sic_dimensions()}",
        "hoggar": "hoggar   the 64 Hoggar lines in dimension 8",
        "etf-fourier": "etf-fourier K   ETF(K(K-1)/2, K^2) from F_K (x) F_K",
        "ks": f"ks NAME   Kochen-Specker set, NAME in {sorted(KS_SETS)}",
    }
