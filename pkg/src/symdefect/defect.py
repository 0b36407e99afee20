"""Restricted defect of a Hermitian unitary.

Deform ``U`` entry-wise by phases, ``V_ij(t) = U_ij exp(i t R_ij)`` with
``R`` real antisymmetric and supported where ``U_ij != 0``.  Unitarity of
``V(t)`` to first order in ``t`` is the real-linear condition

    (U o R) U + U (U o R) = 0,

one complex equation per pair ``j < k`` (the diagonal vanishes identically).
Splitting real and imaginary parts gives a real system ``A x = 0`` with one
column per variable ``R_ab``, ``a < b``, on the support.

Per-vector phases ``R_jk = theta_k - theta_j`` (gauge or enphasing
directions) always solve the system; they are removed by fixing the
variables of one row (``gauge_row``) to zero, and any residual gauge left
when that row has zeros is counted separately, so

    free_parameters = nullity - gauge_dim.

Bookkeeping also reports ``tau_paper = (N-1)(N-2)/2 - z`` (``z`` zero pairs
in the strict upper triangle) and ``delta_paper = tau_paper - r``.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla
from scipy.sparse.linalg import LinearOperator, lobpcg

from . import kernels
from ._format import fmt6, json_text
from .core import DEFAULT_TOLERANCES, HermitianUnitary, largest_log_gap

__all__ = [
    "PhasePattern",
    "SupportCounts",
    "LinearSystem",
    "DefectReport",
    "support_and_counts",
    "build_linear_system",
    "assemble_matrix",
    "system_operator",
    "restricted_defect",
    "kernel_basis",
    "gauge_subspace",
    "gauge_directions",
    "free_parameters",
    "defect_invariance_check",
    "spanning_tree_pairs",
]

#: Dense assembly is used automatically below this many bytes of system matrix.
DENSE_LIMIT_BYTES = 1.5e9


@dataclass(frozen=True)
class PhasePattern:
    """Real antisymmetric phase perturbation ``R`` (and family parameter ``t``)."""

    R: np.ndarray
    t: float = 1.0

    def __post_init__(self) -> None:
        R = np.array(self.R, dtype=float)
        if R.ndim != 2 or R.shape[0] != R.shape[1]:
            raise ValueError("R must be square")
        if np.abs(R + R.T).max() > 1e-12 * max(1.0, np.abs(R).max()):
            raise ValueError("R must be antisymmetric")
        R.setflags(write=False)
        object.__setattr__(self, "R", R)

    @classmethod
    def from_columns(cls, x: np.ndarray, columns: np.ndarray, N: int, t: float = 1.0) -> "PhasePattern":
        R = np.zeros((N, N))
        a, b = columns[:, 0], columns[:, 1]
        R[a, b] = x
        R[b, a] = -x
        return cls(R, t)

    def coordinates(self, pairs: Sequence[tuple[int, int]], one_based: bool = True) -> dict[str, float]:
        """Values ``R_ab`` at the given pairs, keyed like ``"R23"`` (1-based
        labels by default, ``R{a},{b}`` when an index exceeds 9)."""
        out = {}
        for a, b in pairs:
            ia, ib = (a - 1, b - 1) if one_based else (a, b)
            key = f"R{a}{b}" if max(a, b) < 10 else f"R{a},{b}"
            out[key] = float(self.R[ia, ib])
        return out


@dataclass(frozen=True)
class SupportCounts:
    support: np.ndarray  # (s, 2) pairs a<b with |U_ab| > zero_tol
    fixed: np.ndarray  # support pairs removed by gauge fixing
    columns: np.ndarray  # remaining variables
    z: int
    tau_paper: int
    tau_effective: int


def _as_pairs(pairs) -> np.ndarray:
    if pairs is None:
        return np.zeros((0, 2), dtype=np.int64)
    arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    return np.sort(arr, axis=1)


def support_and_counts(
    U: HermitianUnitary,
    gauge_row: int | None = 0,
    fixed_pairs: Sequence[tuple[int, int]] | None = None,
) -> SupportCounts:
    """Support pattern and parameter counts.

    Gauge fixing removes the support pairs that contain ``gauge_row`` (use
    ``None`` to disable) together with any explicit ``fixed_pairs``.
    """
    N = U.N
    sup = np.asarray(U.support, dtype=np.int64).reshape(-1, 2)
    z = N * (N - 1) // 2 - len(sup)
    mask = np.zeros(len(sup), dtype=bool)
    if gauge_row is not None:
        if not 0 <= gauge_row < N:
            raise ValueError(f"gauge_row {gauge_row} out of range")
        mask |= (sup[:, 0] == gauge_row) | (sup[:, 1] == gauge_row)
    extra = _as_pairs(fixed_pairs)
    if len(extra):
        key = sup[:, 0] * N + sup[:, 1]
        mask |= np.isin(key, extra[:, 0] * N + extra[:, 1])
    tau_paper = (N - 1) * (N - 2) // 2 - z
    return SupportCounts(sup, sup[mask], sup[~mask], z, tau_paper, int((~mask).sum()))


def _index_maps(N: int, columns: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    col = np.full((N, N), -1, dtype=np.int64)
    a, b = columns[:, 0], columns[:, 1]
    idx = np.arange(len(columns), dtype=np.int64)
    col[a, b] = idx
    col[b, a] = idx
    sgn = np.ones((N, N))
    sgn[np.tril_indices(N, -1)] = -1.0
    return col, sgn


@dataclass(frozen=True)
class LinearSystem:
    """The real first-order system.

    ``matrix`` has shape ``(2P, n)``: rows ``2p`` and ``2p+1`` are the real
    and imaginary parts of the equation for the ``p``-th pair in ``rows``
    (``j < k``, upper-triangular order); column ``c`` is the variable
    ``R[columns[c]]``.  ``matrix`` is ``None`` when the system was built
    matrix-free; :meth:`operator` is always available.
    """

    U: np.ndarray = field(repr=False)
    columns: np.ndarray
    gauge_fixed: np.ndarray
    rows: np.ndarray
    matrix: np.ndarray | None = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.U.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return (2 * len(self.rows), len(self.columns))

    def operator(self) -> LinearOperator:
        if self.matrix is not None:
            M = self.matrix
            return LinearOperator(M.shape, matvec=lambda x: M @ x, rmatvec=lambda y: M.T @ y, dtype=float)
        return system_operator(self.U, self.columns)

    def residual(self, R: np.ndarray) -> float:
        """Max-abs residual of the equations at a phase matrix ``R``."""
        a, b = self.columns[:, 0], self.columns[:, 1]
        x = np.asarray(R, dtype=float)[a, b]
        return float(np.abs(self.operator().matvec(x)).max()) if len(x) else 0.0


def system_operator(U: np.ndarray, columns: np.ndarray) -> LinearOperator:
    """Matrix-free form of the system (same row/column layout as the dense
    assembly), built from ``N x N`` matrix products."""
    U = np.asarray(U, dtype=complex)
    N = U.shape[0]
    a, b = columns[:, 0], columns[:, 1]
    j, k = np.triu_indices(N, 1)
    m, n = 2 * len(j), len(a)

    def matvec(x):
        x = np.ravel(x)
        R = np.zeros((N, N))
        R[a, b] = x
        R[b, a] = -x
        A = U * R
        Y = (A @ U + U @ A)[k, j]
        out = np.empty(m)
        out[0::2] = Y.real
        out[1::2] = Y.imag
        return out

    def rmatvec(y):
        y = np.ravel(y)
        Yh = np.zeros((N, N), dtype=complex)
        Yh[k, j] = y[0::2] + 1j * y[1::2]
        Yc = Yh.conj().T
        W = (U @ Yc + Yc @ U).T * U
        return (W[a, b] - W[b, a]).real

    def matmat(X):
        return np.column_stack([matvec(c) for c in np.asarray(X).T])

    def rmatmat(Y):
        return np.column_stack([rmatvec(c) for c in np.asarray(Y).T])

    return LinearOperator((m, n), matvec=matvec, rmatvec=rmatvec, matmat=matmat, rmatmat=rmatmat, dtype=float)


def assemble_matrix(U: np.ndarray, columns: np.ndarray) -> np.ndarray:
    """Dense real system for an arbitrary square matrix ``U`` (not
    necessarily unitary) and a given variable set."""
    U = np.ascontiguousarray(U, dtype=np.complex128)
    N = U.shape[0]
    j, k = np.triu_indices(N, 1)
    col, sgn = _index_maps(N, np.asarray(columns, dtype=np.int64).reshape(-1, 2))
    return np.asarray(
        kernels.assemble_system(
            U, np.ascontiguousarray(j, dtype=np.int64), np.ascontiguousarray(k, dtype=np.int64), col, sgn, len(columns)
        )
    )


def build_linear_system(
    U: HermitianUnitary,
    gauge_row: int | None = 0,
    fixed_pairs: Sequence[tuple[int, int]] | None = None,
    assemble: bool = True,
) -> LinearSystem:
    """Assemble the real system at ``t = 0`` (``V = U``).

    In equation ``(j, k)`` the variable ``R_jk`` has coefficient
    ``-2 U_kk U_kj`` (for constant diagonal) and every other support pair
    ``(k, l)`` or ``(l, j)`` contributes ``U_kl U_lj``.
    """
    counts = support_and_counts(U, gauge_row, fixed_pairs)
    N = U.N
    j, k = np.triu_indices(N, 1)
    rows = np.stack([j, k], axis=1)
    matrix = None
    if assemble:
        matrix = assemble_matrix(U.entries, counts.columns)
    return LinearSystem(U.entries, counts.columns, counts.fixed, rows, matrix)


# --------------------------------------------------------------------------
# Gauge directions


def gauge_directions(N: int, pairs: np.ndarray) -> np.ndarray:
    """Matrix ``D`` (``len(pairs) x N``) with ``(D theta)_p = theta_b - theta_a``
    for ``pairs[p] = (a, b)``."""
    D = np.zeros((len(pairs), N))
    if len(pairs):
        r = np.arange(len(pairs))
        D[r, pairs[:, 1]] = 1.0
        D[r, pairs[:, 0]] = -1.0
    return D


def gauge_subspace(
    U: HermitianUnitary,
    gauge_row: int | None = 0,
    fixed_pairs: Sequence[tuple[int, int]] | None = None,
) -> np.ndarray:
    """Orthonormal basis (columns) of the enphasing directions that survive
    gauge fixing, expressed on the system's columns.

    The directions ``theta_b - theta_a`` are restricted to those ``theta``
    that vanish on every fixed pair; the dimension is ``N - c - rank`` of the
    fixed-pair constraints, ``c`` being the number of connected components
    of the support graph.
    """
    counts = support_and_counts(U, gauge_row, fixed_pairs)
    N = U.N
    Df = gauge_directions(N, counts.fixed)
    Dc = gauge_directions(N, counts.columns)
    null = sla.null_space(Df) if len(counts.fixed) else np.eye(N)
    img = Dc @ null
    if img.size == 0:
        return np.zeros((len(counts.columns), 0))
    q, s, _ = np.linalg.svd(img, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0] if s.size else 0.0)))
    return q[:, :rank]


def spanning_tree_pairs(U: HermitianUnitary, root: int = 0, limit: int | None = None) -> np.ndarray:
    """Support pairs of a breadth-first spanning forest, starting with all
    pairs of ``root`` (so the first entries coincide with first-row gauge
    fixing).  Each pair fixes one independent enphasing direction."""
    N = U.N
    sup = np.asarray(U.support).reshape(-1, 2)
    adj: dict[int, list[int]] = {i: [] for i in range(N)}
    for a, b in sup:
        adj[int(a)].append(int(b))
        adj[int(b)].append(int(a))
    seen = {root}
    order = [root]
    out: list[tuple[int, int]] = []
    starts = [root] + [i for i in range(N) if i != root]
    for s in starts:
        if s not in seen:
            seen.add(s)
            order.append(s)
        queue = [s]
        while queue:
            v = queue.pop(0)
            for w in sorted(adj[v]):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
                    out.append((min(v, w), max(v, w)))
    arr = np.array(out, dtype=np.int64).reshape(-1, 2)
    return arr if limit is None else arr[:limit]


# --------------------------------------------------------------------------
# Reports


@dataclass
class DefectReport:
    """Bookkeeping of one restricted-defect computation."""

    N: int
    d: int
    z: int
    tau_paper: int
    tau_effective: int
    r: int
    delta_paper: int | None
    nullity: int
    gauge_dim: int
    free_parameters: int
    tol: float
    sigma_max: float
    smallest_svals: list[float]
    gauge_row: int | None = 0
    n_fixed: int = 0
    method: str = "dense"
    gap_rank: int | None = None
    gap_decades: float | None = None
    sigma0: float | None = None
    sigma1: float | None = None
    elapsed: float = 0.0
    flags: list[str] = field(default_factory=list)
    svals: np.ndarray | None = field(default=None, repr=False)

    @property
    def isolated(self) -> bool:
        return self.free_parameters == 0

    def to_dict(self, n_smallest: int = 10) -> dict:
        d = asdict(self)
        d.pop("svals")
        d["smallest_svals"] = [float(x) for x in self.smallest_svals[:n_smallest]]
        d["isolated"] = self.isolated
        return d

    def to_json(self) -> str:
        return json_text(self.to_dict())

    def summary(self) -> str:
        dp = "n/a" if self.delta_paper is None else str(self.delta_paper)
        s1 = "n/a" if self.sigma1 is None else fmt6(self.sigma1)
        verdict = "isolated" if self.isolated else f"{self.free_parameters} free parameter(s)"
        return (
            f"N={self.N} d={self.d} z={self.z} tau={self.tau_paper} r={self.r} Delta={dp} "
            f"nullity={self.nullity} gauge={self.gauge_dim} free={self.free_parameters} "
            f"sigma1={s1} sigma_max={fmt6(self.sigma_max)} -> {verdict}"
        )


def _finish(
    U: HermitianUnitary,
    counts: SupportCounts,
    r: int,
    gauge_dim: int,
    tol: float,
    sigma_max: float,
    small_asc: np.ndarray,
    method: str,
    gauge_row: int | None,
    full: np.ndarray | None,
    t0: float,
) -> DefectReport:
    n = counts.tau_effective
    nullity = n - r
    free = nullity - gauge_dim
    flags = []
    delta_paper: int | None = counts.tau_paper - r
    if delta_paper < 0:
        flags.append(f"tau_paper ({counts.tau_paper}) < r ({r}): Delta bookkeeping not applicable")
        delta_paper = None
    elif delta_paper != free:
        flags.append(f"delta_paper ({delta_paper}) differs from free_parameters ({free})")
    if free < 0:
        flags.append("gauge dimension exceeds nullity (rank tolerance too loose?)")
    gap_rank = gap = None
    if full is not None and full.size:
        gap_rank, gap = largest_log_gap(full)
    sigma0 = float(small_asc[nullity - 1]) if nullity >= 1 and nullity <= len(small_asc) else None
    sigma1 = float(small_asc[nullity]) if nullity < len(small_asc) else None
    return DefectReport(
        N=U.N,
        d=U.d,
        z=counts.z,
        tau_paper=counts.tau_paper,
        tau_effective=n,
        r=r,
        delta_paper=delta_paper,
        nullity=nullity,
        gauge_dim=gauge_dim,
        free_parameters=free,
        tol=tol,
        sigma_max=float(sigma_max),
        smallest_svals=[float(x) for x in small_asc[:10]],
        gauge_row=gauge_row,
        n_fixed=len(counts.fixed),
        method=method,
        gap_rank=gap_rank,
        gap_decades=gap,
        sigma0=sigma0,
        sigma1=sigma1,
        elapsed=time.perf_counter() - t0,
        flags=flags,
        svals=full,
    )


def restricted_defect(
    U: HermitianUnitary,
    tol: float = DEFAULT_TOLERANCES.rank,
    gauge_row: int | None = 0,
    fixed_pairs: Sequence[tuple[int, int]] | None = None,
    method: str = "auto",
    n_smallest: int = 4,
    seed: int = 0,
) -> DefectReport:
    """Compute ``z``, ``tau``, ``r``, ``Delta``, nullity, residual gauge and
    free parameters.

    ``method="dense"`` takes the full SVD of the assembled system.
    ``method="iterative"`` never forms the matrix: ``sigma_max`` comes from
    power iteration and the smallest singular values from LOBPCG on
    the normal operator, deflated by the (exactly known) gauge directions.
    It establishes the rank only when fewer than ``n_smallest`` singular
    values fall below the threshold, which is the situation of isolated
    structures.  A computed value between ``tol * sigma_max`` and
    ``sqrt(tol) * sigma_max`` cannot be told apart from a converged zero at
    the solver tolerance, and is reported as inconclusive as well.
    ``"auto"`` picks dense whenever the matrix fits in memory.
    """
    t0 = time.perf_counter()
    counts = support_and_counts(U, gauge_row, fixed_pairs)
    n = counts.tau_effective
    P = U.N * (U.N - 1) // 2
    if method == "auto":
        method = "dense" if 2 * P * n * 8 <= DENSE_LIMIT_BYTES else "iterative"
    G = gauge_subspace(U, gauge_row, fixed_pairs)
    gauge_dim = G.shape[1]
    if n == 0:
        return _finish(U, counts, 0, gauge_dim, tol, 0.0, np.zeros(0), method, gauge_row, np.zeros(0), t0)
    if method == "dense":
        L = build_linear_system(U, gauge_row, fixed_pairs)
        s = np.linalg.svd(L.matrix, compute_uv=False)
        smax = s[0]
        r = int(np.sum(s >= tol * smax)) if smax > 0 else 0
        full = np.concatenate([s, np.zeros(max(0, n - len(s)))])
        return _finish(U, counts, r, gauge_dim, tol, smax, full[::-1], "dense", gauge_row, full, t0)
    if method != "iterative":
        raise ValueError(f"unknown method {method!r}")
    op = system_operator(U.entries, counts.columns)
    small, smax = _smallest_singular_values(op, G, n_smallest, seed)
    below = int(np.sum(small < tol * smax))
    if below >= len(small) and len(small) < n - gauge_dim:
        raise RuntimeError(
            f"iterative rank inconclusive: all {len(small)} computed singular values lie below the threshold; "
            "increase n_smallest or use method='dense'"
        )
    ambiguous = (small >= tol * smax) & (small < np.sqrt(tol) * smax)
    if ambiguous.any():
        raise RuntimeError(
            f"iterative rank inconclusive: singular value {small[ambiguous][0]:.3g} lies within the solver "
            "resolution of the threshold; use method='dense'"
        )
    nullity = gauge_dim + below
    r = n - nullity
    small_asc = np.concatenate([np.zeros(gauge_dim), small])
    rep = _finish(U, counts, r, gauge_dim, tol, smax, small_asc, "iterative", gauge_row, None, t0)
    rep.flags.append(f"iterative: gauge directions deflated analytically; {len(small)} smallest values computed")
    return rep


def _largest_singular_value(op: LinearOperator, rng: np.random.Generator, rtol: float = 1e-6, maxiter: int = 500) -> float:
    """Power iteration on ``A^T A``.  The Rayleigh quotient approaches the
    top eigenvalue from below even when the top of the spectrum is a tight
    cluster (where ARPACK converges slowly); a few significant digits are
    all the relative rank threshold needs."""
    x = rng.standard_normal(op.shape[1])
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(maxiter):
        y = op.rmatvec(op.matvec(x))
        new = float(x @ y)
        x = y / np.linalg.norm(y)
        if abs(new - lam) <= rtol * new:
            lam = new
            break
        lam = new
    return float(np.sqrt(lam))


def _smallest_singular_values(op: LinearOperator, G: np.ndarray, k: int, seed: int) -> tuple[np.ndarray, float]:
    n = op.shape[1]
    rng = np.random.default_rng(seed)
    if n <= 200:
        M = op.matmat(np.eye(n))
        if G.shape[1]:
            Q = sla.null_space(G.T)
            M = M @ Q
        s = np.linalg.svd(M, compute_uv=False)
        smax = np.linalg.svd(op.matmat(np.eye(n)), compute_uv=False)[0]
        return np.sort(s)[:k], float(smax)
    smax = _largest_singular_value(op, rng)
    normal = LinearOperator((n, n), matvec=lambda x: op.rmatvec(op.matvec(x)), dtype=float)
    k = min(k, n - G.shape[1] - 1)
    X = rng.standard_normal((n, k))
    Y = G if G.shape[1] else None
    with warnings.catch_warnings():
        # non-convergence warnings concern the last digits only; the values
        # are compared against a threshold many decades away
        warnings.simplefilter("ignore", UserWarning)
        w, _ = lobpcg(normal, X, Y=Y, largest=False, tol=1e-6 * smax**2, maxiter=3000)
    return np.sqrt(np.clip(np.sort(w), 0, None)), smax


def kernel_basis(L: LinearSystem, tol: float = DEFAULT_TOLERANCES.rank) -> list[PhasePattern]:
    """Orthonormal basis of the null space as phase patterns on ``U``."""
    if L.matrix is None:
        raise ValueError("kernel_basis needs an assembled system")
    n = L.matrix.shape[1]
    if n == 0:
        return []
    _, s, vt = np.linalg.svd(L.matrix, full_matrices=True)
    smax = s[0] if s.size else 0.0
    r = int(np.sum(s >= tol * smax)) if smax > 0 else 0
    return [PhasePattern.from_columns(vt[i], L.columns, L.N) for i in range(r, n)]


def free_parameters(
    U: HermitianUnitary,
    tol: float = DEFAULT_TOLERANCES.rank,
    gauge_row: int | None = 0,
    method: str = "auto",
) -> int:
    """``nullity - dim(gauge directions)``: the number of genuine first-order
    deformation parameters."""
    return restricted_defect(U, tol, gauge_row, method=method).free_parameters


def defect_invariance_check(
    U: HermitianUnitary,
    permutation: Sequence[int] | None = None,
    phases: Sequence[float] | None = None,
    tol: float = DEFAULT_TOLERANCES.rank,
    gauge_row: int = 0,
) -> bool:
    """True iff ``(z, tau, r, Delta, free_parameters)`` agree for ``U`` and
    ``P E U E^dagger P^T``."""
    a = restricted_defect(U, tol, gauge_row)
    b = restricted_defect(U.conjugated(permutation, phases), tol, gauge_row)
    keys = ("z", "tau_paper", "r", "delta_paper", "free_parameters")
    return all(getattr(a, k) == getattr(b, k) for k in keys)
