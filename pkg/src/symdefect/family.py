"""Finite-``t`` families ``V(t) = U o exp(i t R)`` along kernel directions.

A kernel element ``R`` of the first-order system only guarantees unitarity
of ``V(t)`` to first order.  Exactness is tested on a grid of ``t`` values.
For a direction with integer entries ``|R_ab| <= m`` each entry of
``V V^dagger - I`` is a trigonometric polynomial with frequencies in
``-2m..2m``; it vanishes identically iff its first ``4m + 1`` Taylor
moments

    M_p(j, k) = sum_l U_jl conj(U_kl) (R_jl - R_kl)^p,   p = 0 .. 4m,

vanish.  :func:`find_exact_lines` searches the kernel for such directions by
minimising the low moments from random starts and keeps the candidates that
round to integer patterns and pass the grid check.

Equivalence of Gram matrices under relabelling and per-vector phases is
tested through the multiset of triple-phase (Bargmann) invariants
``arg(G_ij G_jk G_ki)``; an exhaustive permutation search is available for
small ``N``.
"""

from __future__ import annotations

import io
import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from ._format import fmt17
from .constructions import sic_weyl_heisenberg
from .core import HermitianUnitary, unitary_from_vectors
from .defect import PhasePattern, build_linear_system, kernel_basis
from .galois import is_prime

__all__ = [
    "FamilyCandidate",
    "evaluate_family",
    "verify_family",
    "family_grid",
    "find_exact_lines",
    "sic3_base",
    "sic3_families",
    "SIC3_COORDINATES",
    "etf_prime_delta",
    "triple_invariants",
    "equivalent_by_invariants",
    "equivalent_exhaustive",
    "gram_of",
    "export_family",
    "FAMILY_TOL",
]

#: Maximum unitarity residual for a direction to count as an exact family.
FAMILY_TOL = 1e-10

#: Kernel coordinates (1-based pair labels) used to present the d=3 families.
SIC3_COORDINATES = ((2, 3), (2, 6), (4, 8), (8, 9))


def evaluate_family(U: HermitianUnitary | np.ndarray, R: PhasePattern | np.ndarray, t: float) -> tuple[np.ndarray, float]:
    """``V(t) = U o exp(i t R)`` and ``max |V V^dagger - I|``."""
    u = U.entries if isinstance(U, HermitianUnitary) else np.asarray(U)
    r = R.R if isinstance(R, PhasePattern) else np.asarray(R)
    V = u * np.exp(1j * t * r)
    res = float(np.abs(V @ V.conj().T - np.eye(len(u))).max())
    return V, res


def family_grid(points: int = 256, period: float = 2 * np.pi) -> np.ndarray:
    return np.linspace(0.0, period, points, endpoint=False)


def verify_family(U: HermitianUnitary | np.ndarray, R: PhasePattern | np.ndarray, t_grid: Sequence[float] | None = None) -> float:
    """Maximum unitarity residual of ``V(t)`` over ``t_grid`` (default: 256
    points on ``[0, 2 pi)``).  A direction passes iff this is at most
    :data:`FAMILY_TOL`."""
    grid = family_grid() if t_grid is None else t_grid
    return max(evaluate_family(U, R, float(t))[1] for t in grid)


@dataclass
class FamilyCandidate:
    """A verified (or rejected) one-parameter family through ``base``."""

    base: HermitianUnitary
    direction: PhasePattern
    t_grid: np.ndarray
    residuals: np.ndarray
    label: str = ""
    coordinates: dict[str, float] = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if len(self.residuals) else 0.0

    @property
    def passes(self) -> bool:
        return self.max_residual <= FAMILY_TOL

    def member(self, t: float) -> np.ndarray:
        return evaluate_family(self.base, self.direction, t)[0]


def _moment_residuals(U: np.ndarray, K: np.ndarray, cols: np.ndarray, orders: Sequence[int]):
    N = U.shape[0]
    a, b = cols[:, 0], cols[:, 1]
    prod = U[:, None, :] * U.conj()[None, :, :]  # (j, k, l)

    def fun(c):
        x = K @ c
        R = np.zeros((N, N))
        R[a, b] = x
        R[b, a] = -x
        D = R[:, None, :] - R[None, :, :]
        out = []
        for p in orders:
            m = np.einsum("jkl,jkl->jk", prod, D**p)
            out += [m.real.ravel(), m.imag.ravel()]
        out.append([np.dot(c, c) - 1.0])
        return np.concatenate(out)

    return fun


def _integer_pattern(x: np.ndarray, atol: float = 1e-6) -> np.ndarray | None:
    nz = np.abs(x) > atol
    if not nz.any():
        return None
    y = x / np.abs(x[nz]).min()
    r = np.round(y)
    if np.abs(y - r).max() > 1e-5:
        return None
    r = r.astype(int)
    first = r[np.flatnonzero(r)[0]]
    return r if first > 0 else -r


def find_exact_lines(
    U: HermitianUnitary,
    gauge_row: int | None = 0,
    starts: int = 400,
    seed: int = 0,
    max_order: int = 4,
    t_points: int = 256,
) -> list[FamilyCandidate]:
    """Exact one-parameter families through ``U`` along kernel directions.

    Directions are found by solving the moment conditions of orders
    ``2..max_order`` on the unit sphere of the kernel from ``starts`` random
    starting points, keeping solutions that are integer patterns up to
    scale, and verifying each over ``t_points`` points of one period
    (``2 pi`` for integer patterns).  Lines are reported once, oriented so
    that the first non-zero entry is positive.
    """
    L = build_linear_system(U, gauge_row)
    basis = kernel_basis(L)
    if not basis:
        return []
    a, b = L.columns[:, 0], L.columns[:, 1]
    K = np.array([p.R[a, b] for p in basis]).T
    fun = _moment_residuals(U.entries, K, L.columns, range(2, max_order + 1))
    rng = np.random.default_rng(seed)
    found: list[np.ndarray] = []
    for _ in range(starts):
        sol = least_squares(fun, rng.standard_normal(K.shape[1]), xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if np.abs(sol.fun).max() > 1e-9:
            continue
        pat = _integer_pattern(K @ sol.x)
        if pat is None or any(np.array_equal(pat, f) for f in found):
            continue
        found.append(pat)
    found.sort(key=lambda p: tuple(-np.abs(p)))
    grid = family_grid(t_points)
    out = []
    for i, pat in enumerate(found):
        R = PhasePattern.from_columns(pat.astype(float), L.columns, U.N)
        res = np.array([evaluate_family(U, R, t)[1] for t in grid])
        cand = FamilyCandidate(U, R, grid, res, label=f"line-{i + 1}")
        if cand.passes:
            out.append(cand)
    return out


def sic3_base() -> HermitianUnitary:
    """``U`` of the d=3 SIC generated by ``(1, -1, 0)/sqrt 2``."""
    v = sic_weyl_heisenberg(np.array([1, -1, 0]) / np.sqrt(2))
    return unitary_from_vectors(v)


def sic3_families(starts: int = 400, seed: int = 0, t_points: int = 256) -> list[FamilyCandidate]:
    """All exact one-parameter families through the d=3 SIC found by
    :func:`find_exact_lines`, each verified over a full period.

    The kernel of the first-order system is real and 4-dimensional, so
    the realness condition imposes nothing.  Each family carries its values
    at the coordinates ``R23, R26, R48, R89`` (1-based labels, vectors
    ordered ``X^s Z^t`` with ``s`` slowest).
    """
    U = sic3_base()
    fams = find_exact_lines(U, 0, starts, seed, 4, t_points)
    for i, f in enumerate(fams):
        f.label = f"S{i + 1}"
        f.coordinates = f.direction.coordinates(SIC3_COORDINATES)
    return fams


def etf_prime_delta(k: int) -> int:
    """Closed form ``(k+1)(k-1)(k-2)/2`` for the restricted defect of the
    Fourier-type ETF with prime ``k``."""
    if not is_prime(k):
        raise ValueError(f"k={k} is not prime")
    return (k + 1) * (k - 1) * (k - 2) // 2


# --------------------------------------------------------------------------
# Equivalence


def gram_of(V: np.ndarray, d: int) -> np.ndarray:
    """Gram matrix ``N/(2d) (I - V)`` of a Hermitian unitary."""
    N = V.shape[0]
    return (N / (2 * d)) * (np.eye(N) - V)


def triple_invariants(G: np.ndarray, zero_tol: float = 1e-10, decimals: int = 8) -> np.ndarray:
    """Sorted phases ``arg(G_ij G_jk G_ki)`` in ``[0, 2 pi)`` over triples
    ``i < j < k`` with all three entries non-zero (rounded)."""
    G = np.asarray(G)
    N = G.shape[0]
    i, j, k = np.array(list(itertools.combinations(range(N), 3))).T
    prod = G[i, j] * G[j, k] * G[k, i]
    ok = (np.abs(G[i, j]) > zero_tol) & (np.abs(G[j, k]) > zero_tol) & (np.abs(G[k, i]) > zero_tol)
    ph = np.mod(np.angle(prod[ok]), 2 * np.pi)
    ph = np.round(ph, decimals) % np.round(2 * np.pi, decimals)
    # a triple and its reverse orientation give conjugate phases; the sorted
    # multiset over i<j<k is invariant under phases but depends on labelling
    # only through orientation, so fold phi and 2pi - phi together
    ph = np.minimum(ph, np.round(2 * np.pi - ph, decimals) % np.round(2 * np.pi, decimals))
    return np.sort(ph)


def equivalent_by_invariants(G1: np.ndarray, G2: np.ndarray, atol: float = 1e-7) -> bool:
    """Necessary condition for ``G2 = E P G1 P^T E^dagger``: equal sorted
    moduli and equal multisets of (orientation-folded) triple phases."""
    if G1.shape != G2.shape:
        return False
    m1 = np.sort(np.abs(G1).ravel())
    m2 = np.sort(np.abs(G2).ravel())
    if np.abs(m1 - m2).max() > atol:
        return False
    t1, t2 = triple_invariants(G1), triple_invariants(G2)
    return t1.shape == t2.shape and bool(np.abs(t1 - t2).max(initial=0.0) <= atol)


def equivalent_exhaustive(G1: np.ndarray, G2: np.ndarray, atol: float = 1e-8, max_n: int = 16) -> np.ndarray | None:
    """Search for a permutation ``p`` with ``G2[p][:, p]`` phase-equivalent
    to ``G1`` (all entries matched in modulus, all triple products matched).

    Returns the permutation or ``None``.  Backtracking, limited to
    ``N <= max_n``.  Complete when the support graph is connected and
    triangle-rich (e.g. equiangular sets), since the phases of such a Gram
    matrix are fixed up to ``E`` by its triple products.
    """
    G1, G2 = np.asarray(G1), np.asarray(G2)
    N = G1.shape[0]
    if G2.shape != G1.shape:
        return None
    if N > max_n:
        raise ValueError(f"exhaustive search limited to N <= {max_n}")
    A1, A2 = np.abs(G1), np.abs(G2)

    def ok(p: list[int]) -> bool:
        i = len(p) - 1
        pi = p[i]
        for j in range(i):
            if abs(A1[i, j] - A2[pi, p[j]]) > atol:
                return False
        for j, k in itertools.combinations(range(i), 2):
            x = G1[i, j] * G1[j, k] * G1[k, i]
            y = G2[pi, p[j]] * G2[p[j], p[k]] * G2[p[k], pi]
            if abs(x - y) > atol:
                return False
        return True

    def rec(p: list[int], free: set[int]) -> list[int] | None:
        if len(p) == N:
            return p
        for c in sorted(free):
            p.append(c)
            if ok(p):
                got = rec(p, free - {c})
                if got is not None:
                    return got
            p.pop()
        return None

    res = rec([], set(range(N)))
    return None if res is None else np.array(res)


def export_family(candidate: FamilyCandidate, structure: str = "custom") -> str:
    """CSV text: metadata header (structure, shape, direction entries) and
    one ``t,residual`` row per grid point."""
    buf = io.StringIO()
    U = candidate.base
    buf.write(f"# structure: {structure}\n# d: {U.d}\n# N: {U.N}\n# label: {candidate.label}\n")
    buf.write(f"# max_residual: {fmt17(candidate.max_residual)}\n")
    R = candidate.direction.R
    for a, b in zip(*np.nonzero(np.triu(R))):
        buf.write(f"# R {a} {b} {fmt17(R[a, b])}\n")
    buf.write("t,residual\n")
    for t, r in zip(candidate.t_grid, candidate.residuals):
        buf.write(f"{fmt17(t)},{fmt17(r)}\n")
    return buf.getvalue()
