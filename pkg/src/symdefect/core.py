"""Dense complex-matrix substrate.

Vector sets, Gram matrices and the Hermitian unitaries attached to tight
frames, together with the structural checks and the tolerance-based
numerical rank used throughout the package.

A set of ``N`` unit vectors in dimension ``d`` forms a rank-one POVM (after
scaling by ``N/d``) exactly when its Gram matrix satisfies
``G @ G == (N/d) * G``.  For such a Gram matrix the map
``U = I - (2d/N) G`` produces a Hermitian unitary with constant diagonal
``1 - 2d/N``; the inverse map is ``G = N/(2d) (I - U)``.

Inner products are conjugate-linear in the first slot:
``G[i, j] = <phi_i | phi_j> = vdot(phi_i, phi_j)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "StructureError",
    "VectorSet",
    "GramMatrix",
    "SymmetryMatrix",
    "HermitianUnitary",
    "RankResult",
    "gram_from_vectors",
    "unitary_from_gram",
    "unitary_from_vectors",
    "gram_from_unitary",
    "vectors_from_gram",
    "verify_povm",
    "verify_symmetry",
    "rank_with_tolerance",
    "largest_log_gap",
    "support_pairs",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by the whole pipeline.

    norm
        Allowed deviation of a vector norm from one.
    unit
        Allowed max-entry deviation of ``U U^dagger`` from the identity and
        of the diagonal of ``U`` from ``1 - 2d/N``.
    povm
        Allowed max-entry deviation of ``G^2`` from ``(N/d) G``.
    zero
        Entries of ``U`` with modulus at or below this are treated as zeros
        of the support pattern.
    rank
        Relative singular-value threshold for numerical rank.
    """

    norm: float = 1e-12
    unit: float = 1e-10
    povm: float = 1e-10
    zero: float = 1e-10
    rank: float = 1e-8

    def with_(self, **changes: float) -> "Tolerances":
        return replace(self, **changes)


DEFAULT_TOLERANCES = Tolerances()


class StructureError(ValueError):
    """Raised when an input fails a structural validation predicate."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class VectorSet:
    """``N`` complex vectors of dimension ``d``, stored as the columns of a
    ``(d, N)`` array.

    Unit norms are enforced within ``norm_tol``; pass ``norm_tol=None`` for
    deliberately unnormalised sets (for example entry-wise perturbed inputs).
    """

    vectors: np.ndarray
    labels: tuple[str, ...] | None = None
    norm_tol: float | None = DEFAULT_TOLERANCES.norm

    def __post_init__(self) -> None:
        v = np.asarray(self.vectors)
        if v.ndim != 2:
            raise StructureError(f"vectors must be a 2-D (d, N) array, got shape {v.shape}")
        d, n = v.shape
        if d < 1 or n < 1:
            raise StructureError("empty vector set")
        if n < d:
            raise StructureError(f"a frame needs N >= d vectors (d={d}, N={n})")
        object.__setattr__(self, "vectors", _readonly(v.astype(complex)))
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != n:
                raise StructureError(f"{len(labels)} labels for {n} vectors")
            object.__setattr__(self, "labels", labels)
        if self.norm_tol is not None:
            dev = np.abs(np.linalg.norm(self.vectors, axis=0) - 1.0).max()
            if dev > self.norm_tol:
                raise StructureError(
                    f"vectors are not normalised: max |norm - 1| = {dev:.3e} > {self.norm_tol:.1e}"
                )

    @classmethod
    def from_list(
        cls,
        vectors: Sequence[Sequence[complex]],
        labels: Sequence[str] | None = None,
        normalize: bool = False,
        norm_tol: float | None = DEFAULT_TOLERANCES.norm,
    ) -> "VectorSet":
        """Build from a sequence of length-``d`` vectors (one per element)."""
        lengths = {len(x) for x in vectors}
        if len(lengths) != 1:
            raise StructureError(f"dimension mismatch among vectors: lengths {sorted(lengths)}")
        arr = np.array([np.asarray(x, dtype=complex) for x in vectors]).T
        if normalize:
            arr = arr / np.linalg.norm(arr, axis=0)
        return cls(arr, None if labels is None else tuple(labels), norm_tol)

    @property
    def d(self) -> int:
        return self.vectors.shape[0]

    @property
    def N(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.N

    def __getitem__(self, j: int) -> np.ndarray:
        return self.vectors[:, j]


@dataclass(frozen=True)
class GramMatrix:
    """Hermitian ``N x N`` matrix of pairwise inner products."""

    entries: np.ndarray
    d: int

    def __post_init__(self) -> None:
        g = np.asarray(self.entries, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise StructureError(f"Gram matrix must be square, got {g.shape}")
        # Hermitian by construction: keep the upper triangle and mirror it.
        g = np.triu(g) + np.triu(g, 1).conj().T
        g[np.diag_indices_from(g)] = g.diagonal().real
        object.__setattr__(self, "entries", _readonly(g))
        if not 1 <= int(self.d) <= g.shape[0]:
            raise StructureError(f"invalid dimension d={self.d} for N={g.shape[0]}")
        object.__setattr__(self, "d", int(self.d))

    @property
    def N(self) -> int:
        return self.entries.shape[0]

    def povm_residual(self) -> float:
        """``max |G^2 - (N/d) G|``."""
        g = self.entries
        return float(np.abs(g @ g - (self.N / self.d) * g).max())

    def spectrum(self) -> np.ndarray:
        """Eigenvalues in descending order."""
        return np.linalg.eigvalsh(self.entries)[::-1]


@dataclass(frozen=True)
class SymmetryMatrix:
    """Prescribed squared overlaps ``S[i, j] = |<phi_i|phi_j>|^2``."""

    entries: np.ndarray
    kind: str = "custom"

    def __post_init__(self) -> None:
        s = np.asarray(self.entries, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise StructureError("symmetry matrix must be square")
        if not np.allclose(s, s.T, atol=0, rtol=0):
            raise StructureError("symmetry matrix must be symmetric")
        if not np.allclose(np.diag(s), 1.0, atol=1e-14):
            raise StructureError("symmetry matrix must have unit diagonal")
        if s.min() < 0 or s.max() > 1:
            raise StructureError("symmetry matrix entries must lie in [0, 1]")
        object.__setattr__(self, "entries", _readonly(s))

    @property
    def N(self) -> int:
        return self.entries.shape[0]


def support_pairs(u: np.ndarray, zero_tol: float = DEFAULT_TOLERANCES.zero) -> np.ndarray:
    """Index pairs ``(i, j)``, ``i < j``, with ``|u[i, j]| > zero_tol``, as an
    ``(n, 2)`` integer array in row-major upper-triangular order."""
    n = u.shape[0]
    iu, ju = np.triu_indices(n, 1)
    keep = np.abs(u[iu, ju]) > zero_tol
    return np.stack([iu[keep], ju[keep]], axis=1)


@dataclass(frozen=True)
class HermitianUnitary:
    """The Hermitian unitary ``U = I - (2d/N) G`` of a tight frame.

    ``support`` lists the pairs ``(i, j)``, ``i < j``, where ``|U_ij|``
    exceeds the zero tolerance.  Construction does not validate unitarity;
    use :func:`unitary_from_gram` or :meth:`validate` for that.
    """

    entries: np.ndarray
    d: int
    zero_tol: float = DEFAULT_TOLERANCES.zero
    support: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        u = np.asarray(self.entries, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise StructureError(f"U must be square, got {u.shape}")
        object.__setattr__(self, "entries", _readonly(u))
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "support", _readonly(support_pairs(u, self.zero_tol)))

    @property
    def N(self) -> int:
        return self.entries.shape[0]

    @property
    def diagonal_value(self) -> float:
        return 1.0 - 2.0 * self.d / self.N

    def unitarity_residual(self) -> float:
        u = self.entries
        return float(np.abs(u @ u.conj().T - np.eye(self.N)).max())

    def hermiticity_residual(self) -> float:
        u = self.entries
        return float(np.abs(u - u.conj().T).max())

    def diagonal_residual(self) -> float:
        return float(np.abs(np.diag(self.entries) - self.diagonal_value).max())

    def validate(self, tol: float = DEFAULT_TOLERANCES.unit) -> None:
        """Raise :class:`StructureError` unless ``U`` is Hermitian, unitary and
        has constant diagonal ``1 - 2d/N`` within ``tol``."""
        checks = {
            "hermiticity": self.hermiticity_residual(),
            "unitarity": self.unitarity_residual(),
            "constant diagonal": self.diagonal_residual(),
        }
        bad = {k: v for k, v in checks.items() if v > tol}
        if bad:
            desc = ", ".join(f"{k} residual {v:.3e}" for k, v in bad.items())
            raise StructureError(f"U fails validation ({desc}; tol {tol:.1e})")

    def symmetry_residual(self, S: SymmetryMatrix) -> float:
        """``max |U_ij| - (2d/N) sqrt(S_ij)`` over off-diagonal entries."""
        if S.N != self.N:
            raise StructureError("shape mismatch between U and S")
        target = (2.0 * self.d / self.N) * np.sqrt(S.entries)
        off = ~np.eye(self.N, dtype=bool)
        return float(np.abs(np.abs(self.entries) - target)[off].max())

    def conjugated(self, perm: Sequence[int] | None = None, phases: Sequence[float] | None = None) -> "HermitianUnitary":
        """Return ``P E U E^dagger P^T`` for a permutation and diagonal phases
        ``E = diag(exp(i * phases))``."""
        u = self.entries
        if phases is not None:
            e = np.exp(1j * np.asarray(phases, dtype=float))
            u = e[:, None] * u * e.conj()[None, :]
        if perm is not None:
            p = np.asarray(perm)
            u = u[np.ix_(p, p)]
        return HermitianUnitary(u, self.d, self.zero_tol)


def gram_from_vectors(v: VectorSet) -> GramMatrix:
    """Gram matrix ``G[i, j] = <phi_i|phi_j>`` of a vector set."""
    a = v.vectors
    return GramMatrix(a.conj().T @ a, v.d)


def unitary_from_gram(
    G: GramMatrix,
    tol: Tolerances = DEFAULT_TOLERANCES,
    check: bool = True,
) -> HermitianUnitary:
    """The Hermitian unitary ``I - (2d/N) G``.

    With ``check=True`` the POVM property of ``G`` and the unitarity and
    constant diagonal of the result are verified; a violation raises
    :class:`StructureError`.
    """
    if check:
        res = G.povm_residual()
        if res > tol.povm:
            raise StructureError(
                f"Gram matrix is not a tight frame for d={G.d}: "
                f"max |G^2 - (N/d)G| = {res:.3e} > {tol.povm:.1e}"
            )
    u = np.eye(G.N) - (2.0 * G.d / G.N) * G.entries
    U = HermitianUnitary(u, G.d, tol.zero)
    if check:
        U.validate(tol.unit)
    return U


def unitary_from_vectors(v: VectorSet, tol: Tolerances = DEFAULT_TOLERANCES, check: bool = True) -> HermitianUnitary:
    """Shortcut for ``unitary_from_gram(gram_from_vectors(v))``."""
    return unitary_from_gram(gram_from_vectors(v), tol, check)


def gram_from_unitary(U: HermitianUnitary, tol: Tolerances = DEFAULT_TOLERANCES) -> GramMatrix:
    """Inverse map ``G = N/(2d) (I - U)``."""
    if U.diagonal_residual() > tol.unit:
        raise StructureError(
            f"U has non-constant diagonal (deviation {U.diagonal_residual():.3e} from {U.diagonal_value})"
        )
    g = (U.N / (2.0 * U.d)) * (np.eye(U.N) - U.entries)
    return GramMatrix(g, U.d)


def vectors_from_gram(
    G: GramMatrix,
    tol: Tolerances = DEFAULT_TOLERANCES,
    labels: Sequence[str] | None = None,
) -> VectorSet:
    """Rank-``d`` factorisation ``G = V^dagger V``.

    The vectors come from the top-``d`` eigenpairs of ``G``.  The remaining
    unitary freedom ``V -> W V`` is fixed reproducibly by bringing ``V`` to
    upper-trapezoidal form with real non-negative pivots (a QR step), so the
    first vector is ``(r, 0, ..., 0)`` with ``r >= 0`` and so on.  A global
    unitary is used rather than per-vector phases because the latter would
    change the Gram matrix.
    """
    w, q = np.linalg.eigh(G.entries)
    w, q = w[::-1], q[:, ::-1]
    rank = int(np.sum(w > tol.rank * max(w[0], 1e-300)))
    if rank != G.d:
        raise StructureError(f"Gram matrix has numerical rank {rank}, expected d={G.d}")
    v = np.sqrt(w[: G.d])[:, None] * q[:, : G.d].conj().T
    # canonical gauge: v = Q R with R upper trapezoidal, diag(R) >= 0
    _, r = np.linalg.qr(v)
    piv = np.array([np.flatnonzero(np.abs(row) > 1e-13)[0] if np.any(np.abs(row) > 1e-13) else 0 for row in r])
    ph = np.exp(-1j * np.angle(r[np.arange(G.d), piv]))
    r = ph[:, None] * r
    out = VectorSet(r, None if labels is None else tuple(labels), norm_tol=None)
    resid = np.abs(r.conj().T @ r - G.entries).max()
    if resid > max(tol.povm, 1e3 * np.finfo(float).eps * G.N):
        raise StructureError(f"factorisation residual {resid:.3e} exceeds tolerance")
    return out


def verify_povm(v: VectorSet) -> float:
    """``max |sum_j |phi_j><phi_j| - (N/d) I|``."""
    a = v.vectors
    return float(np.abs(a @ a.conj().T - (v.N / v.d) * np.eye(v.d)).max())


def verify_symmetry(v: VectorSet, S: SymmetryMatrix) -> float:
    """``max_ij | |<phi_i|phi_j>|^2 - S_ij |``."""
    if S.N != v.N:
        raise StructureError(f"shape mismatch: {v.N} vectors vs {S.N}x{S.N} symmetry matrix")
    g = gram_from_vectors(v).entries
    return float(np.abs(np.abs(g) ** 2 - S.entries).max())


class RankResult(NamedTuple):
    rank: int
    svals: np.ndarray


def rank_with_tolerance(M: np.ndarray, tol: float = DEFAULT_TOLERANCES.rank) -> RankResult:
    """Numerical rank: the number of singular values ``>= tol * sigma_max``.

    Returns the rank and the full descending singular-value list.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = np.asarray(M)
    if M.size == 0:
        raise ValueError("empty matrix")
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return RankResult(0, s)
    return RankResult(int(np.sum(s >= tol * s[0])), s)


def largest_log_gap(svals: np.ndarray, floor: float = 1e-300) -> tuple[int, float]:
    """Position and size (in decades) of the widest gap in a descending
    singular spectrum.

    Returns ``(k, gap)`` where the gap lies between ``svals[k-1]`` and
    ``svals[k]``; ``k`` is the rank suggested by the gap.  For fewer than
    two values ``(len(svals), 0.0)`` is returned.
    """
    s = np.maximum(np.asarray(svals, dtype=float), floor)
    if s.size < 2:
        return int(s.size), 0.0
    g = -np.diff(np.log10(s))
    k = int(np.argmax(g))
    return k + 1, float(g[k])
